#include "mgafem/driver.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>

namespace mgafem {

std::string Ablation::to_string() const
{
    switch (mode) {
    case Mode::ngo:
        return "ngo";
    case Mode::afem_only:
        return "afem_only";
    case Mode::restrict_goals:
        return "restrict_goals(" + std::to_string(goals) + ")";
    }
    return "ngo";
}

Ablation Ablation::parse(std::string_view text)
{
    if (text == "ngo")
        return {};
    if (text == "afem_only")
        return {Mode::afem_only, 0};
    constexpr std::string_view prefix = "restrict_goals(";
    if (text.starts_with(prefix) && text.ends_with(")")) {
        const std::string_view digits = text.substr(prefix.size(), text.size() - prefix.size() - 1);
        int k = 0;
        auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), k);
        if (ec == std::errc{} && ptr == digits.data() + digits.size() && k >= 1)
            return {Mode::restrict_goals, k};
    }
    throw InputError("unknown ablation mode '" + std::string(text) +
                     "' (expected ngo, afem_only or restrict_goals(k))");
}

ParameterCheck validate_params(const AdaptiveConfig& config, int dimension)
{
    if (!(config.theta > 0.0 && config.theta <= 1.0))
        throw InputError("theta must lie in (0, 1], got " + format_double(config.theta));
    if (!(config.c_mark >= 1.0))
        throw InputError("c_mark must be >= 1, got " + format_double(config.c_mark));
    if (config.num_goals < 1)
        throw InputError("n_goals must be >= 1");
    local_dof_count(config.degree);  // throws for unsupported degrees
    if (dimension < 1)
        throw InputError("dimension must be >= 1");

    int cycled = config.num_goals;
    if (config.ablation.mode == Ablation::Mode::restrict_goals) {
        if (config.ablation.goals > config.num_goals)
            throw InputError("restrict_goals(k) needs k <= n_goals");
        cycled = config.ablation.goals;
    } else if (config.ablation.mode == Ablation::Mode::afem_only) {
        cycled = 1;
    }

    ParameterCheck check;
    check.q_red = std::pow(2.0, -1.0 / (2.0 * dimension));
    check.q_est = std::sqrt(1.0 - (1.0 - check.q_red * check.q_red) * config.theta);
    if (cycled >= 2) {
        const double upper = 1.0 / (cycled - 1);
        if (!(config.rho_irr > 0.0 && config.rho_irr < upper))
            throw InputError("rho_irr must lie in (0, 1/(N-1)) = (0, " + format_double(upper) + "), got " +
                             format_double(config.rho_irr));
        check.rho_threshold = (1.0 - check.q_est) / (cycled - 1);
        if (config.rho_irr >= check.rho_threshold)
            check.warnings.push_back("rho_irr = " + format_double(config.rho_irr) +
                                     " is not below the convergence threshold (1 - q_est)/(N-1) = " +
                                     format_double(check.rho_threshold));
    }
    if (!config.stop.max_ndof && !config.stop.max_levels && !config.stop.tolerance)
        throw InputError("no stop criterion given (max_ndof, max_levels or tol)");
    return check;
}

namespace {

struct LevelSolve {
    std::shared_ptr<const FeSpace> space;
    std::unique_ptr<GalerkinSolver> solver;
};

double sum_known(std::span<const double> values)
{
    double sum = 0.0;
    for (double v : values)
        if (!std::isnan(v))
            sum += v;
    return sum;
}

}  // namespace

History run(const AdaptiveConfig& config, const ProblemData& problem, const Mesh& initial_mesh,
            const LevelObserver& observer)
{
    validate_params(config);
    if (problem.num_goals() != config.num_goals)
        throw InputError("n_goals = " + std::to_string(config.num_goals) + " but the problem defines " +
                         std::to_string(problem.num_goals()) + " goals");
    problem.validate(initial_mesh);

    const int n_goals = config.num_goals;
    const bool afem_only = config.ablation.mode == Ablation::Mode::afem_only;
    const int cycled = afem_only ? 0
                       : config.ablation.mode == Ablation::Mode::restrict_goals ? config.ablation.goals
                                                                                : n_goals;
    const EstimatorOptions est_options{config.neumann_residual};

    History history;
    history.config = config;
    history.permutation.resize(n_goals);
    std::iota(history.permutation.begin(), history.permutation.end(), 0);

    ActiveHistory active(std::max(cycled, 1));
    std::vector<double> zeta_last(n_goals, std::numeric_limits<double>::quiet_NaN());
    auto mesh = std::make_shared<const Mesh>(initial_mesh);
    long cumndof = 0;

    for (int level = 0;; ++level) {
        auto space = std::make_shared<const FeSpace>(mesh, config.degree);
        GalerkinSolver solver(space, problem);
        int reporting_solves = 0;

        LevelRecord rec;
        rec.level = level;
        rec.n_elements = mesh->num_elements();
        rec.ndof = space->num_free();
        cumndof += rec.ndof;
        rec.cumndof = cumndof;
        rec.zeta_fresh.assign(n_goals, false);

        // (i) primal solve, estimate, mark
        const FeSolution u = solver.solve(Functional::primal());
        IndicatorField eta = residual_indicators(*space, u, problem, Functional::primal(), est_options);
        eta.level = level;
        rec.eta = eta.estimate();
        const MarkSet mark_u = doerfler_min(eta, config.theta);
        rec.n_mark_u = mark_u.size();
        rec.goal_values.resize(n_goals);
        for (int j = 0; j < n_goals; ++j)
            rec.goal_values[j] = evaluate_functional(*space, problem, Functional::dual(j), u);

        auto estimate_dual = [&](int j) {
            const FeSolution z = solver.solve(Functional::dual(j));
            IndicatorField field = residual_indicators(*space, z, problem, Functional::dual(j), est_options);
            field.level = level;
            zeta_last[j] = field.estimate();
            rec.zeta_fresh[j] = true;
            return field;
        };

        MarkSet marked;
        if (afem_only) {
            for (int j = 0; j < n_goals; ++j) {
                estimate_dual(j);
                ++reporting_solves;
            }
            marked = mark_u;
            rec.marking = level == 0 ? "initial" : "regular";
        } else {
            // (ii) one dual solve for the active goal
            std::optional<IndicatorField> zeta_active;
            if (level == 0 && config.initial_sort) {
                std::vector<IndicatorField> all;
                for (int j = 0; j < n_goals; ++j)
                    all.push_back(estimate_dual(j));
                history.initial_zeta = zeta_last;
                // Sort cycled goals by descending zeta_{i,0}, ties by index.
                std::stable_sort(history.permutation.begin(), history.permutation.begin() + cycled,
                                 [&](int a, int b) { return zeta_last[a] > zeta_last[b]; });
                std::vector<double> seed;
                for (int c = 1; c < cycled; ++c)
                    seed.push_back(zeta_last[history.permutation[c]]);
                active.seed(std::move(seed));
                zeta_active = std::move(all[history.permutation[0]]);
            }
            const int goal = history.permutation[level % cycled];
            rec.active_goal = goal + 1;
            if (!zeta_active)
                zeta_active = estimate_dual(goal);
            for (int j = 0; j < n_goals; ++j)
                if (!rec.zeta_fresh[j] && std::find(history.permutation.begin(),
                                                    history.permutation.begin() + cycled, j) ==
                                              history.permutation.begin() + cycled) {
                    estimate_dual(j);  // reporting only (restrict_goals)
                    ++reporting_solves;
                }

            const MarkSet mark_z = doerfler_min(*zeta_active, config.theta);
            rec.n_mark_z = mark_z.size();
            // (iii.a) combine
            const MarkSet combined = combine_marks(mark_u, mark_z, eta, *zeta_active, config.c_mark);
            rec.n_mark_uz = combined.size();
            // (iii.b) regular or irregular
            const double zeta_now = zeta_active->estimate();
            const MarkingKind kind = decide_marking(zeta_now, active, config.rho_irr);
            if (kind == MarkingKind::regular) {
                marked = combined;
            } else {
                marked = irregular_select(combined, active.previous_marks(), config.irregular_variant, eta,
                                          *zeta_active);
            }
            rec.marking = level == 0 ? "initial" : kind == MarkingKind::regular ? "regular" : "irregular";
            active.push(zeta_now);
        }
        rec.n_mark = marked.size();
        active.record_marks(marked.size());

        rec.solves_primal = 1;
        rec.solves_dual = solver.solve_count() - 1 - reporting_solves;
        rec.zeta = zeta_last;
        rec.delta = rec.eta * sum_known(zeta_last);

        const bool stop = (config.stop.max_ndof && rec.ndof >= *config.stop.max_ndof) ||
                          (config.stop.max_levels && level + 1 >= *config.stop.max_levels) ||
                          (config.stop.tolerance && rec.delta <= *config.stop.tolerance);
        history.levels.push_back(std::move(rec));
        if (stop) {
            history.final_mesh = mesh;
            break;
        }

        // (iv) refine
        RefineResult refined = refine_nvb(*mesh, marked);
        if (observer)
            observer(LevelView{history.levels.back(), *mesh, refined.mesh, refined.parent, marked});
        mesh = std::make_shared<const Mesh>(std::move(refined.mesh));
    }
    return history;
}

}  // namespace mgafem
