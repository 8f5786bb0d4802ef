#include "mgafem/report.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <tuple>

namespace mgafem {

namespace {

std::string fixed(double value, int digits)
{
    char buffer[64];
    std::snprintf(buffer, sizeof buffer, "%.*f", digits, value);
    return buffer;
}

std::string sci(double value)
{
    char buffer[64];
    std::snprintf(buffer, sizeof buffer, "%.3e", value);
    return buffer;
}

std::string pad(std::string text, std::size_t width)
{
    if (text.size() < width)
        text.append(width - text.size(), ' ');
    return text;
}

}  // namespace

std::pair<double, double> expected_band(const Quantity& quantity, int degree)
{
    const double p = degree;
    if (quantity.kind == Quantity::Kind::delta || quantity.kind == Quantity::Kind::goal_error)
        return {-p - 0.15 * p, -p + 0.15 * p};
    return {-p / 2.0 - 0.15, -p / 2.0 + 0.15};
}

int infer_degree(const LevelRecord& last)
{
    if (last.n_elements <= 0)
        return 1;
    const double ratio = 2.0 * static_cast<double>(last.ndof) / static_cast<double>(last.n_elements);
    return std::max(1, static_cast<int>(std::lround(std::sqrt(ratio))));
}

RunReport analyze_run(const NamedTable& run, const ReportOptions& options)
{
    const auto& levels = run.table.levels;
    if (levels.empty())
        throw InputError(run.name + ": window too small (the CSV has no levels)");
    RunReport report;
    report.name = run.name;
    report.degree_inferred = !options.degree;
    report.degree = options.degree ? *options.degree : infer_degree(levels.back());

    std::vector<Quantity> quantities{Quantity::parse("delta"), Quantity::parse("eta")};
    for (int i = 1; i <= run.table.num_goals; ++i)
        quantities.push_back(Quantity::parse("zeta_" + std::to_string(i)));

    for (const Quantity& q : quantities) {
        SlopeCheck check;
        check.quantity = q.name();
        std::tie(check.expected_lo, check.expected_hi) = expected_band(q, report.degree);
        try {
            check.fit = rate_fit(levels, q, options.window, options.axis);
        } catch (const InputError& e) {
            if (q.kind == Quantity::Kind::delta)
                throw InputError(run.name + ": " + e.what());
        }
        check.pass = check.fit && check.fit->slope >= check.expected_lo && check.fit->slope <= check.expected_hi;
        report.checks.push_back(std::move(check));
    }
    return report;
}

std::string format_report(std::span<const RunReport> runs, const ReportOptions& options)
{
    std::ostringstream out;
    const std::string axis = options.axis == XAxis::ndof ? "ndof" : "cumndof";
    out << "rate report: slope of log(quantity) against log(" << axis << "), window " << options.window.to_string()
        << "\n";
    for (const RunReport& run : runs) {
        out << "\nrun " << run.name << " (p = " << run.degree << (run.degree_inferred ? ", inferred" : "")
            << ")\n";
        out << "  " << pad("quantity", 12) << pad("slope", 10) << pad("points", 8) << pad(axis + " range", 24)
            << pad("expected", 18) << "status\n";
        for (const SlopeCheck& c : run.checks) {
            const std::string band = "[" + fixed(c.expected_lo, 2) + ", " + fixed(c.expected_hi, 2) + "]";
            out << "  " << pad(c.quantity, 12);
            if (c.fit)
                out << pad(fixed(c.fit->slope, 4), 10) << pad(std::to_string(c.fit->points), 8)
                    << pad(sci(c.fit->x_min) + ".." + sci(c.fit->x_max), 24);
            else
                out << pad("n/a", 10) << pad("<3", 8) << pad("-", 24);
            out << pad(band, 18) << (c.pass ? "PASS" : c.fit ? "FAIL" : "n/a") << "\n";
        }
    }
    if (runs.size() > 1) {
        out << "\ncomparison\n";
        out << "  " << pad("run", 32) << pad("delta", 10) << pad("eta", 10) << "worst zeta\n";
        for (const RunReport& run : runs) {
            auto slope = [](const SlopeCheck& c) { return c.fit ? fixed(c.fit->slope, 4) : std::string("n/a"); };
            std::string worst = "n/a";
            double worst_value = -std::numeric_limits<double>::infinity();
            for (std::size_t i = 2; i < run.checks.size(); ++i)
                if (run.checks[i].fit && run.checks[i].fit->slope > worst_value) {
                    worst_value = run.checks[i].fit->slope;
                    worst = run.checks[i].quantity + " " + fixed(worst_value, 4);
                }
            out << "  " << pad(run.name, 32) << pad(slope(run.checks[0]), 10) << pad(slope(run.checks[1]), 10)
                << worst << "\n";
        }
    }
    return out.str();
}

std::string rate_report(std::span<const NamedTable> runs, const ReportOptions& options)
{
    std::vector<RunReport> reports;
    for (const NamedTable& run : runs)
        reports.push_back(analyze_run(run, options));
    return format_report(reports, options);
}

}  // namespace mgafem
