#pragma once

#include "mgafem/driver.hpp"
#include "mgafem/run_table.hpp"

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace mgafem {

struct ReportOptions {
    Window window;
    XAxis axis = XAxis::ndof;
    std::optional<int> degree;  // inferred from the last level when unset
};

struct NamedTable {
    std::string name;
    RunTable table;
};

struct SlopeCheck {
    std::string quantity;
    std::optional<RateFit> fit;  // empty when the window holds too few points
    double expected_lo = 0.0, expected_hi = 0.0;
    bool pass = false;
};

struct RunReport {
    std::string name;
    int degree = 1;
    bool degree_inferred = false;
    std::vector<SlopeCheck> checks;  // delta, eta, zeta_1..N
};

/// Expected slope band: delta within -p +- 0.15p, eta and zeta within
/// -p/2 +- 0.15.
std::pair<double, double> expected_band(const Quantity& quantity, int degree);

/// Polynomial degree guessed from the dof/element ratio of the last level.
int infer_degree(const LevelRecord& last);

/// Fits every quantity of one run. The delta fit must succeed; an eta or
/// zeta window with fewer than three points is reported as n/a.
RunReport analyze_run(const NamedTable& run, const ReportOptions& options);

std::string format_report(std::span<const RunReport> runs, const ReportOptions& options);

/// analyze_run over all tables plus format_report.
std::string rate_report(std::span<const NamedTable> runs, const ReportOptions& options);

}  // namespace mgafem
