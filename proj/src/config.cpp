#include "mgafem/config.hpp"
#include "mgafem/toml_lite.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace mgafem {

namespace {

class Reader {
public:
    explicit Reader(std::string_view source) : source_(source) {}

    [[noreturn]] void fail(const toml::Value& at, const std::string& message) const
    {
        throw toml::ParseError(source_, at.line, at.column, message);
    }

    void check_keys(const toml::Value& table_value, std::initializer_list<std::string_view> allowed,
                    std::string_view where) const
    {
        const toml::Table& table = table_value.as_table();
        for (std::size_t i = 0; i < table.keys.size(); ++i)
            if (std::find(allowed.begin(), allowed.end(), table.keys[i]) == allowed.end())
                fail(table.values[i], "unknown key '" + table.keys[i] + "' in " + std::string(where));
    }

    const toml::Value& table(const toml::Value& v, std::string_view what) const
    {
        if (!v.is_table())
            fail(v, std::string(what) + " must be a table, got " + std::string(v.type_name()));
        return v;
    }

    double number(const toml::Value& v, std::string_view what) const
    {
        if (!v.is_number())
            fail(v, std::string(what) + " must be a number, got " + std::string(v.type_name()));
        return v.as_number();
    }

    long integer(const toml::Value& v, std::string_view what) const
    {
        if (v.is_integer())
            return static_cast<long>(std::get<std::int64_t>(v.data));
        if (std::holds_alternative<double>(v.data)) {
            const double d = std::get<double>(v.data);
            if (d == static_cast<double>(static_cast<long>(d)))
                return static_cast<long>(d);
        }
        fail(v, std::string(what) + " must be an integer");
    }

    bool boolean(const toml::Value& v, std::string_view what) const
    {
        if (!v.is_bool())
            fail(v, std::string(what) + " must be true or false");
        return std::get<bool>(v.data);
    }

    const std::string& string(const toml::Value& v, std::string_view what) const
    {
        if (!v.is_string())
            fail(v, std::string(what) + " must be a string");
        return v.as_string();
    }

    const toml::Array& array(const toml::Value& v, std::string_view what) const
    {
        if (!v.is_array())
            fail(v, std::string(what) + " must be an array");
        return v.as_array();
    }

    Point point(const toml::Value& v, std::string_view what) const
    {
        const auto& a = array(v, what);
        if (a.size() != 2)
            fail(v, std::string(what) + " must have two entries");
        return {number(a[0], what), number(a[1], what)};
    }

    Vec2 vec2(const toml::Value& v, std::string_view what) const
    {
        const Point p = point(v, what);
        return {p.x, p.y};
    }

    Mat2 mat2(const toml::Value& v, std::string_view what) const
    {
        const auto& rows = array(v, what);
        if (rows.size() != 2)
            fail(v, std::string(what) + " must be a 2x2 matrix");
        Mat2 m;
        for (int r = 0; r < 2; ++r) {
            const Vec2 row = vec2(rows[r], what);
            m(r, 0) = row[0];
            m(r, 1) = row[1];
        }
        return m;
    }

private:
    std::string source_;
};

bool is_piece_list(const toml::Value& v)
{
    return v.is_array() && !v.as_array().empty() && v.as_array().front().is_table();
}

// Reads either a plain value (all regions) or [{ region = id, value = ... }, ...].
template <typename T, typename ReadOne>
std::vector<T> piecewise(const Reader& rd, const toml::Value& v, const std::vector<int>& region_ids, int n_slots,
                         std::optional<T> fallback, std::string_view what, ReadOne read_one)
{
    if (!is_piece_list(v))
        return std::vector<T>(n_slots, read_one(v));
    std::vector<std::optional<T>> slots(n_slots);
    for (const toml::Value& piece : v.as_array()) {
        rd.table(piece, what);
        rd.check_keys(piece, {"region", "value"}, what);
        const toml::Value* region = piece.as_table().find("region");
        const toml::Value* value = piece.as_table().find("value");
        if (!region || !value)
            rd.fail(piece, std::string(what) + ": each piece needs 'region' and 'value'");
        const long id = rd.integer(*region, "region");
        if (std::find(region_ids.begin(), region_ids.end(), id) == region_ids.end())
            rd.fail(*region, std::string(what) + ": region " + std::to_string(id) + " is not defined");
        if (slots[id])
            rd.fail(*region, std::string(what) + ": region " + std::to_string(id) + " given twice");
        slots[id] = read_one(*value);
    }
    std::vector<T> out;
    for (int id = 0; id < n_slots; ++id) {
        if (!slots[id] && !fallback &&
            std::find(region_ids.begin(), region_ids.end(), id) != region_ids.end())
            rd.fail(v, std::string(what) + ": no value for region " + std::to_string(id));
        out.push_back(slots[id] ? *slots[id] : fallback.value_or(T{}));
    }
    return out;
}

DomainSpec read_domain(const Reader& rd, const toml::Value& v)
{
    rd.table(v, "domain");
    const toml::Table& t = v.as_table();
    const toml::Value* shape = t.find("shape");
    if (!shape)
        rd.fail(v, "domain needs a 'shape' (unit_square, z_shape or explicit)");
    const std::string& kind = rd.string(*shape, "domain.shape");
    if (kind == "unit_square") {
        rd.check_keys(v, {"shape", "cells", "pattern"}, "domain");
        UnitSquareSpec spec;
        if (const auto* c = t.find("cells"))
            spec.cells = static_cast<int>(rd.integer(*c, "domain.cells"));
        if (const auto* p = t.find("pattern")) {
            const std::string& pattern = rd.string(*p, "domain.pattern");
            if (pattern == "criss_cross")
                spec.pattern = UnitSquareSpec::Pattern::criss_cross;
            else if (pattern == "diagonal")
                spec.pattern = UnitSquareSpec::Pattern::diagonal;
            else
                rd.fail(*p, "domain.pattern must be criss_cross or diagonal");
        }
        if (spec.cells < 1)
            rd.fail(v, "domain.cells must be >= 1");
        return spec;
    }
    if (kind == "z_shape") {
        rd.check_keys(v, {"shape", "cells"}, "domain");
        ZShapeSpec spec;
        if (const auto* c = t.find("cells"))
            spec.cells = static_cast<int>(rd.integer(*c, "domain.cells"));
        if (spec.cells < 2 || spec.cells % 2 != 0)
            rd.fail(v, "domain.cells must be even and >= 2 for z_shape");
        return spec;
    }
    if (kind == "explicit") {
        rd.check_keys(v, {"shape", "vertices", "elements", "neumann"}, "domain");
        ExplicitMeshSpec spec;
        const auto* vertices = t.find("vertices");
        const auto* elements = t.find("elements");
        if (!vertices || !elements)
            rd.fail(v, "explicit domain needs 'vertices' and 'elements'");
        for (const auto& p : rd.array(*vertices, "vertices"))
            spec.vertices.push_back(rd.point(p, "vertex"));
        for (const auto& e : rd.array(*elements, "elements")) {
            const auto& idx = rd.array(e, "element");
            if (idx.size() != 3)
                rd.fail(e, "element must list three vertex indices");
            spec.elements.push_back({static_cast<int>(rd.integer(idx[0], "vertex index")),
                                     static_cast<int>(rd.integer(idx[1], "vertex index")),
                                     static_cast<int>(rd.integer(idx[2], "vertex index"))});
        }
        if (const auto* n = t.find("neumann"))
            for (const auto& e : rd.array(*n, "neumann")) {
                const auto& idx = rd.array(e, "neumann edge");
                if (idx.size() != 2)
                    rd.fail(e, "neumann edge must list two vertex indices");
                spec.neumann.push_back({static_cast<int>(rd.integer(idx[0], "vertex index")),
                                        static_cast<int>(rd.integer(idx[1], "vertex index"))});
            }
        return spec;
    }
    rd.fail(*shape, "unknown domain shape '" + kind + "'");
}

}  // namespace

ExperimentConfig parse_config(std::string_view text, std::string_view source)
{
    const Reader rd(source);
    toml::Value root{toml::parse(text, source), 1, 1};
    rd.check_keys(root, {"problem", "adapt", "stop", "ablation", "output"}, "config");
    const toml::Table& top = root.as_table();

    ExperimentConfig cfg;
    cfg.source = std::string(source);

    // [problem]
    const toml::Value* problem = top.find("problem");
    if (!problem)
        throw toml::ParseError(source, 1, 1, "missing [problem] table");
    rd.table(*problem, "[problem]");
    rd.check_keys(*problem, {"domain", "regions", "A", "f", "fvec", "goals"}, "[problem]");
    const toml::Table& pt = problem->as_table();

    const toml::Value* domain = pt.find("domain");
    if (!domain)
        rd.fail(*problem, "[problem] needs 'domain'");
    cfg.domain = read_domain(rd, *domain);

    std::vector<int> region_ids{0};
    if (const auto* regions = pt.find("regions")) {
        for (const toml::Value& r : rd.array(*regions, "regions")) {
            rd.table(r, "region");
            rd.check_keys(r, {"id", "rect", "polygon"}, "region");
            const toml::Table& rt = r.as_table();
            const auto* id = rt.find("id");
            if (!id)
                rd.fail(r, "region needs an 'id'");
            RegionSpec spec;
            spec.id = static_cast<int>(rd.integer(*id, "region id"));
            if (spec.id < 1)
                rd.fail(*id, "region ids must be >= 1 (0 is the background)");
            if (std::find(region_ids.begin(), region_ids.end(), spec.id) != region_ids.end())
                rd.fail(*id, "duplicate region id " + std::to_string(spec.id));
            const auto* rect = rt.find("rect");
            const auto* polygon = rt.find("polygon");
            if ((rect != nullptr) == (polygon != nullptr))
                rd.fail(r, "region needs exactly one of 'rect' or 'polygon'");
            if (rect) {
                const auto& c = rd.array(*rect, "rect");
                if (c.size() != 4)
                    rd.fail(*rect, "rect must be [x0, y0, x1, y1]");
                const double x0 = rd.number(c[0], "rect"), y0 = rd.number(c[1], "rect");
                const double x1 = rd.number(c[2], "rect"), y1 = rd.number(c[3], "rect");
                if (!(x1 > x0 && y1 > y0))
                    rd.fail(*rect, "rect must satisfy x1 > x0 and y1 > y0");
                spec = RegionSpec::rectangle(spec.id, x0, y0, x1, y1);
            } else {
                for (const auto& p : rd.array(*polygon, "polygon"))
                    spec.polygon.push_back(rd.point(p, "polygon point"));
                if (spec.polygon.size() < 3)
                    rd.fail(*polygon, "polygon needs at least three points");
            }
            region_ids.push_back(spec.id);
            cfg.regions.push_back(std::move(spec));
        }
    }
    const int n_slots = *std::max_element(region_ids.begin(), region_ids.end()) + 1;

    auto read_scalar = [&](const toml::Value& v) { return rd.number(v, "scalar data"); };
    auto read_vector = [&](const toml::Value& v) { return rd.vec2(v, "vector data"); };
    auto read_matrix = [&](const toml::Value& v) { return rd.mat2(v, "A"); };
    auto sources = [&](const toml::Table& t, const char* scalar_key, const char* vector_key) {
        std::vector<double> scalars(n_slots, 0.0);
        std::vector<Vec2> vectors(n_slots, Vec2::Zero());
        if (const auto* s = t.find(scalar_key))
            scalars = piecewise<double>(rd, *s, region_ids, n_slots, 0.0, scalar_key, read_scalar);
        if (const auto* q = t.find(vector_key))
            vectors = piecewise<Vec2>(rd, *q, region_ids, n_slots, Vec2::Zero(), vector_key, read_vector);
        std::vector<SourceTerm> out(n_slots);
        for (int r = 0; r < n_slots; ++r)
            out[r] = SourceTerm{scalars[r], vectors[r]};
        return out;
    };

    if (const auto* a = pt.find("A"))
        cfg.problem.diffusion = piecewise<Mat2>(rd, *a, region_ids, n_slots, std::nullopt, "A", read_matrix);
    else
        cfg.problem.diffusion.assign(n_slots, Mat2::Identity());
    cfg.problem.load = sources(pt, "f", "fvec");

    const toml::Value* goals = pt.find("goals");
    if (!goals)
        rd.fail(*problem, "[problem] needs at least one [[problem.goals]] entry");
    for (const toml::Value& g : rd.array(*goals, "goals")) {
        rd.table(g, "goal");
        rd.check_keys(g, {"g", "gvec"}, "goal");
        cfg.problem.goals.push_back(sources(g.as_table(), "g", "gvec"));
    }
    for (int r = 0; r < n_slots; ++r) {
        const Mat2& m = cfg.problem.diffusion[r];
        if (std::find(region_ids.begin(), region_ids.end(), r) == region_ids.end())
            continue;
        if (m(0, 1) != m(1, 0) || !(m(0, 0) > 0.0) || !(m.determinant() > 0.0))
            rd.fail(*(pt.find("A") ? pt.find("A") : problem),
                    "A must be symmetric positive definite on region " + std::to_string(r));
    }

    // [adapt]
    const toml::Value* adapt = top.find("adapt");
    if (!adapt)
        throw toml::ParseError(source, 1, 1, "missing [adapt] table");
    rd.table(*adapt, "[adapt]");
    rd.check_keys(*adapt,
                  {"theta", "c_mark", "rho_irr", "n_goals", "degree", "irregular_variant", "initial_sort",
                   "neumann_residual"},
                  "[adapt]");
    const toml::Table& at = adapt->as_table();
    auto required = [&](const char* key) -> const toml::Value& {
        const toml::Value* v = at.find(key);
        if (!v)
            rd.fail(*adapt, std::string("[adapt] needs '") + key + "'");
        return *v;
    };
    AdaptiveConfig& ac = cfg.adapt;
    const toml::Value& theta = required("theta");
    ac.theta = rd.number(theta, "theta");
    if (!(ac.theta > 0.0 && ac.theta <= 1.0))
        rd.fail(theta, "theta must lie in (0, 1]");
    const toml::Value& c_mark = required("c_mark");
    ac.c_mark = rd.number(c_mark, "c_mark");
    if (!(ac.c_mark >= 1.0))
        rd.fail(c_mark, "c_mark must be >= 1");
    const toml::Value& n_goals = required("n_goals");
    ac.num_goals = static_cast<int>(rd.integer(n_goals, "n_goals"));
    if (ac.num_goals != cfg.problem.num_goals())
        rd.fail(n_goals, "n_goals = " + std::to_string(ac.num_goals) + " but " +
                             std::to_string(cfg.problem.num_goals()) + " goals are defined");
    const toml::Value& degree = required("degree");
    ac.degree = static_cast<int>(rd.integer(degree, "degree"));
    if (ac.degree != 1 && ac.degree != 2)
        rd.fail(degree, "degree must be 1 or 2");
    if (const auto* v = at.find("irregular_variant")) {
        const std::string& text = rd.string(*v, "irregular_variant");
        try {
            ac.irregular_variant = parse_irregular_variant(text);
        } catch (const InputError& e) {
            rd.fail(*v, e.what());
        }
    }
    if (const auto* v = at.find("initial_sort"))
        ac.initial_sort = rd.boolean(*v, "initial_sort");
    if (const auto* v = at.find("neumann_residual"))
        ac.neumann_residual = rd.boolean(*v, "neumann_residual");

    // [ablation]
    if (const auto* ablation = top.find("ablation")) {
        rd.table(*ablation, "[ablation]");
        rd.check_keys(*ablation, {"mode"}, "[ablation]");
        if (const auto* mode = ablation->as_table().find("mode")) {
            try {
                ac.ablation = Ablation::parse(rd.string(*mode, "mode"));
            } catch (const InputError& e) {
                rd.fail(*mode, e.what());
            }
            if (ac.ablation.mode == Ablation::Mode::restrict_goals && ac.ablation.goals > ac.num_goals)
                rd.fail(*mode, "restrict_goals(k) needs k <= n_goals");
        }
    }

    const int cycled = ac.ablation.mode == Ablation::Mode::afem_only        ? 1
                       : ac.ablation.mode == Ablation::Mode::restrict_goals ? ac.ablation.goals
                                                                            : ac.num_goals;
    if (const auto* v = at.find("rho_irr")) {
        ac.rho_irr = rd.number(*v, "rho_irr");
        if (cycled >= 2 && !(ac.rho_irr > 0.0 && ac.rho_irr < 1.0 / (cycled - 1)))
            rd.fail(*v, "rho_irr must lie in (0, 1/(N-1)) = (0, " + format_double(1.0 / (cycled - 1)) + ")");
    } else if (cycled >= 2) {
        rd.fail(*adapt, "[adapt] needs 'rho_irr' when more than one goal is cycled");
    }

    // [stop]
    const toml::Value* stop = top.find("stop");
    if (!stop)
        throw toml::ParseError(source, 1, 1, "missing [stop] table");
    rd.table(*stop, "[stop]");
    rd.check_keys(*stop, {"max_ndof", "max_levels", "tol"}, "[stop]");
    const toml::Table& st = stop->as_table();
    if (const auto* v = st.find("max_ndof")) {
        ac.stop.max_ndof = rd.integer(*v, "max_ndof");
        if (*ac.stop.max_ndof < 1)
            rd.fail(*v, "max_ndof must be >= 1");
    }
    if (const auto* v = st.find("max_levels")) {
        ac.stop.max_levels = static_cast<int>(rd.integer(*v, "max_levels"));
        if (*ac.stop.max_levels < 1)
            rd.fail(*v, "max_levels must be >= 1");
    }
    if (const auto* v = st.find("tol")) {
        ac.stop.tolerance = rd.number(*v, "tol");
        if (!(*ac.stop.tolerance > 0.0))
            rd.fail(*v, "tol must be positive");
    }
    if (!ac.stop.max_ndof && !ac.stop.max_levels && !ac.stop.tolerance)
        rd.fail(*stop, "[stop] needs max_ndof, max_levels or tol");

    // [output]
    std::string stem = std::string(source);
    if (const auto slash = stem.find_last_of('/'); slash != std::string::npos)
        stem = stem.substr(slash + 1);
    if (const auto dot = stem.find_last_of('.'); dot != std::string::npos)
        stem = stem.substr(0, dot);
    cfg.output = {stem + ".csv", stem + "_report.txt"};
    if (const auto* output = top.find("output")) {
        rd.table(*output, "[output]");
        rd.check_keys(*output, {"csv_path", "report_path"}, "[output]");
        if (const auto* v = output->as_table().find("csv_path"))
            cfg.output.csv_path = rd.string(*v, "csv_path");
        if (const auto* v = output->as_table().find("report_path"))
            cfg.output.report_path = rd.string(*v, "report_path");
    }

    validate_params(ac);
    return cfg;
}

ExperimentConfig load_config(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw InputError("cannot open config '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str(), path);
}

}  // namespace mgafem
