#pragma once

#include "mgafem/estimator.hpp"
#include "mgafem/marking.hpp"
#include "mgafem/mesh.hpp"

#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace mgafem {

struct StopCriteria {
    std::optional<long> max_ndof;  // stop after the first level with nDof >= max_ndof
    std::optional<int> max_levels;
    std::optional<double> tolerance;  // stop once Delta <= tolerance
};

/// Which parts of the multigoal loop run.
struct Ablation {
    enum class Mode {
        ngo,             // full algorithm
        afem_only,       // primal marking only; duals solved for reporting
        restrict_goals,  // cycle goals 1..k; the rest solved for reporting
    };
    Mode mode = Mode::ngo;
    int goals = 0;  // k for restrict_goals

    std::string to_string() const;
    static Ablation parse(std::string_view text);
};

struct AdaptiveConfig {
    double theta = 0.5;
    double c_mark = 2.0;
    double rho_irr = 0.25;
    int num_goals = 1;
    int degree = 1;
    IrregularVariant irregular_variant = IrregularVariant::cap_largest;
    bool initial_sort = false;
    bool neumann_residual = true;
    StopCriteria stop;
    Ablation ablation;
};

struct ParameterCheck {
    double q_red = 0.0;
    double q_est = 0.0;
    double rho_threshold = std::numeric_limits<double>::infinity();  // (1 - q_est) / (N - 1)
    std::vector<std::string> warnings;
};

/// Reduction factors and threshold warnings; throws InputError on hard
/// constraint violations (theta, C_mark, rho_irr range, degree, N).
ParameterCheck validate_params(const AdaptiveConfig& config, int dimension = 2);

struct LevelRecord {
    int level = 0;
    int active_goal = 0;  // 1-based original goal index; 0 if none
    long n_elements = 0;
    long ndof = 0;
    long cumndof = 0;
    double eta = 0.0;
    /// Last computed dual estimators; NaN before a goal's first computation.
    std::vector<double> zeta;
    /// Which zeta entries were computed on this level.
    std::vector<bool> zeta_fresh;
    double delta = 0.0;
    std::string marking;  // initial | regular | irregular
    long n_mark_u = 0;
    long n_mark_z = 0;
    long n_mark_uz = 0;
    long n_mark = 0;
    int solves_primal = 0;
    int solves_dual = 0;
    std::vector<double> goal_values;
};

struct History {
    AdaptiveConfig config;
    std::vector<LevelRecord> levels;
    /// Goal processing order: permutation[c] is the 0-based goal used at
    /// cycle position c. Identity unless initial_sort.
    std::vector<int> permutation;
    /// zeta_{i,0} in original numbering when initial_sort ran, else empty.
    std::vector<double> initial_zeta;
    std::shared_ptr<const Mesh> final_mesh;
};

/// Snapshot passed to the observer after each level's refinement.
struct LevelView {
    const LevelRecord& record;
    const Mesh& mesh;
    const Mesh& refined;
    std::span<const int> parent;
    const MarkSet& marked;
};

using LevelObserver = std::function<void(const LevelView&)>;

/// Runs the multigoal adaptive loop until a stop criterion fires.
History run(const AdaptiveConfig& config, const ProblemData& problem, const Mesh& initial_mesh,
            const LevelObserver& observer = {});

// ---------------------------------------------------------------------------
// Rate fitting

struct Quantity {
    enum class Kind { delta, eta, zeta, goal_error };
    Kind kind = Kind::delta;
    int goal = 0;  // 1-based for zeta / goal_error
    /// Reference goal value for goal_error; defaults to the last level's value
    /// (the last level is then excluded).
    std::optional<double> reference;

    static Quantity parse(std::string_view text);
    std::string name() const;
};

enum class XAxis { ndof, cumndof };

struct Window {
    enum class Kind { decade, last, range };
    Kind kind = Kind::decade;
    int count = 0;             // last
    int first = 0, last = -1;  // range of level indices, inclusive

    static Window parse(std::string_view text);
    std::string to_string() const;
};

struct RateFit {
    double slope = 0.0;
    int points = 0;
    double x_min = 0.0, x_max = 0.0;
};

/**
 * Least-squares slope of log(quantity) against log(x) over the window. For
 * zeta_i only levels where goal i was active are used; a goal that is never
 * active is fitted over all levels. Throws InputError for windows with fewer
 * than three points or nonpositive values.
 */
RateFit rate_fit(std::span<const LevelRecord> levels, const Quantity& quantity, const Window& window, XAxis axis);

double rate_fit_slope(std::span<const LevelRecord> levels, const Quantity& quantity, const Window& window,
                      XAxis axis);

}  // namespace mgafem
