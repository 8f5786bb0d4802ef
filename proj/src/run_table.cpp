#include "mgafem/run_table.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace mgafem {

namespace {

std::string format_value(double value)
{
    if (std::isnan(value))
        return "nan";
    return format_double(value);
}

std::vector<std::string_view> split(std::string_view line)
{
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    for (;;) {
        const std::size_t comma = line.find(',', start);
        fields.push_back(line.substr(start, comma - start));
        if (comma == std::string_view::npos)
            return fields;
        start = comma + 1;
    }
}

class RowParser {
public:
    RowParser(std::string_view source, int line) : source_(source), line_(line) {}

    [[noreturn]] void fail(const std::string& message) const
    {
        throw InputError(source_ + ":" + std::to_string(line_) + ": " + message);
    }

    long integer(std::string_view field, std::string_view column) const
    {
        long value = 0;
        auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
        if (ec != std::errc{} || ptr != field.data() + field.size())
            fail("malformed integer '" + std::string(field) + "' in column " + std::string(column));
        return value;
    }

    double real(std::string_view field, std::string_view column) const
    {
        if (field == "nan")
            return std::numeric_limits<double>::quiet_NaN();
        double value = 0.0;
        auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
        if (ec != std::errc{} || ptr != field.data() + field.size())
            fail("malformed number '" + std::string(field) + "' in column " + std::string(column));
        return value;
    }

private:
    std::string source_;
    int line_;
};

}  // namespace

std::string csv_header(int num_goals)
{
    std::string header = "level,active_goal,n_elements,ndof,cumndof,eta";
    for (int i = 1; i <= num_goals; ++i)
        header += ",zeta_" + std::to_string(i);
    header += ",delta,marking,n_mark_u,n_mark_z,n_mark_uz,n_mark,solves_primal,solves_dual";
    for (int i = 1; i <= num_goals; ++i)
        header += ",goal_" + std::to_string(i);
    return header;
}

void write_csv(std::ostream& out, std::span<const LevelRecord> levels, int num_goals)
{
    out << csv_header(num_goals) << '\n';
    for (const LevelRecord& r : levels) {
        if (static_cast<int>(r.zeta.size()) != num_goals || static_cast<int>(r.goal_values.size()) != num_goals)
            throw InputError("write_csv: level " + std::to_string(r.level) + " does not have " +
                             std::to_string(num_goals) + " goals");
        out << r.level << ',' << r.active_goal << ',' << r.n_elements << ',' << r.ndof << ',' << r.cumndof << ','
            << format_value(r.eta);
        for (double z : r.zeta)
            out << ',' << format_value(z);
        out << ',' << format_value(r.delta) << ',' << r.marking << ',' << r.n_mark_u << ',' << r.n_mark_z << ','
            << r.n_mark_uz << ',' << r.n_mark << ',' << r.solves_primal << ',' << r.solves_dual;
        for (double g : r.goal_values)
            out << ',' << format_value(g);
        out << '\n';
    }
}

std::string to_csv(std::span<const LevelRecord> levels, int num_goals)
{
    std::ostringstream out;
    write_csv(out, levels, num_goals);
    return out.str();
}

RunTable read_csv(std::istream& in, std::string_view source)
{
    std::string line;
    if (!std::getline(in, line) || line.empty())
        throw InputError(std::string(source) + ": empty CSV");
    const auto header = split(line);
    const int extra = static_cast<int>(header.size()) - 14;
    if (extra < 2 || extra % 2 != 0)
        throw InputError(std::string(source) + ":1: unexpected column count " + std::to_string(header.size()));
    RunTable table;
    table.num_goals = extra / 2;
    if (line != csv_header(table.num_goals))
        throw InputError(std::string(source) + ":1: header does not match the run CSV layout");
    const int n = table.num_goals;

    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty())
            continue;
        const RowParser p(source, line_no);
        const auto f = split(line);
        if (f.size() != header.size())
            p.fail("expected " + std::to_string(header.size()) + " fields, got " + std::to_string(f.size()));
        LevelRecord r;
        std::size_t c = 0;
        auto next_int = [&](std::string_view name) { return p.integer(f[c++], name); };
        auto next_real = [&](std::string_view name) { return p.real(f[c++], name); };
        r.level = static_cast<int>(next_int("level"));
        r.active_goal = static_cast<int>(next_int("active_goal"));
        r.n_elements = next_int("n_elements");
        r.ndof = next_int("ndof");
        r.cumndof = next_int("cumndof");
        r.eta = next_real("eta");
        for (int i = 0; i < n; ++i)
            r.zeta.push_back(next_real("zeta"));
        r.delta = next_real("delta");
        r.marking = std::string(f[c++]);
        if (r.marking != "initial" && r.marking != "regular" && r.marking != "irregular")
            p.fail("unknown marking '" + r.marking + "'");
        r.n_mark_u = next_int("n_mark_u");
        r.n_mark_z = next_int("n_mark_z");
        r.n_mark_uz = next_int("n_mark_uz");
        r.n_mark = next_int("n_mark");
        r.solves_primal = static_cast<int>(next_int("solves_primal"));
        r.solves_dual = static_cast<int>(next_int("solves_dual"));
        for (int i = 0; i < n; ++i)
            r.goal_values.push_back(next_real("goal"));
        if (r.active_goal < 0 || r.active_goal > n)
            p.fail("active_goal " + std::to_string(r.active_goal) + " out of range");
        if (r.level != static_cast<int>(table.levels.size()))
            p.fail("levels must be numbered 0, 1, 2, ...");
        r.zeta_fresh.assign(n, false);
        if (r.active_goal > 0)
            r.zeta_fresh[r.active_goal - 1] = true;
        if (r.level == 0)
            for (int i = 0; i < n; ++i)
                r.zeta_fresh[i] = !std::isnan(r.zeta[i]);
        table.levels.push_back(std::move(r));
    }
    return table;
}

RunTable load_csv(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw InputError("cannot open CSV '" + path + "'");
    return read_csv(in, path);
}

}  // namespace mgafem
