#include "helpers.hpp"
#include "mgafem/estimator.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>
#include <set>

using namespace mgafem;
using namespace testing;

namespace {

std::shared_ptr<const FeSpace> space_on(const Mesh& mesh, int degree)
{
    return std::make_shared<const FeSpace>(std::make_shared<const Mesh>(mesh), degree);
}

ProblemData loaded_problem(int regions)
{
    ProblemData data = ProblemData::isotropic(regions);
    for (int r = 0; r < regions; ++r) {
        data.diffusion[r] << 2.0 - 0.5 * r, 0.25, 0.25, 1.0 + r;
        data.load[r] = SourceTerm{1.0 + r, Vec2(r == 0 ? 0.0 : -1.0, 0.5)};
    }
    data.goals.assign(1, std::vector<SourceTerm>(regions));
    return data;
}

void check_field(const IndicatorField& field)
{
    double sum = 0.0;
    for (double v : field.values) {
        CHECK(v >= 0.0);
        sum += v;
    }
    CHECK(std::abs(sum - field.total) <= 1e-13 * std::max(field.total, 1e-300));
    CHECK(field.estimate() == doctest::Approx(std::sqrt(field.total)));
}

const std::vector<RegionSpec> kQuadrant{RegionSpec::rectangle(1, 0.5, 0.0, 1.0, 0.5)};

}  // namespace

TEST_CASE("zero solution with zero data has zero indicators")
{
    const auto space = space_on(criss_cross_square(4), 2);
    ProblemData data = ProblemData::isotropic(1);
    const IndicatorField field = residual_indicators(*space, FeSolution::zero(space), data, Functional::primal());
    CHECK(field.total == 0.0);
    for (double v : field.values)
        CHECK(v == 0.0);
}

TEST_CASE("flux jump across the diagonal gives 1/2 per triangle")
{
    const Mesh plain = two_triangle_square();
    RegionSpec first{1, {}};
    for (int v : plain.element(0))
        first.polygon.push_back(plain.vertex(v));
    const std::vector<RegionSpec> regions{first};
    const Mesh mesh = two_triangle_square(regions);
    REQUIRE(mesh.region(0) == 1);
    REQUIRE(mesh.region(1) == 0);

    const auto space = space_on(mesh, 1);
    ProblemData data = ProblemData::isotropic(2);
    data.load[1].vector = Vec2(1.0, 0.0);
    const IndicatorField field = residual_indicators(*space, FeSolution::zero(space), data, Functional::primal());
    REQUIRE(field.values.size() == 2);
    CHECK(std::abs(field.values[0] - 0.5) <= 1e-12);
    CHECK(std::abs(field.values[1] - 0.5) <= 1e-12);
}

TEST_CASE("p = 1 volume term is h_T^2 |T| f^2")
{
    std::mt19937 rng(21);
    const Mesh mesh = random_adaptive_mesh(criss_cross_square(2, kQuadrant), 3, rng);
    const auto space = space_on(mesh, 1);
    const FeSolution v = random_solution(space, rng);
    ProblemData with = loaded_problem(2);
    ProblemData without = with;
    for (SourceTerm& s : without.load)
        s.scalar = 0.0;
    const IndicatorField a = residual_indicators(*space, v, with, Functional::primal());
    const IndicatorField b = residual_indicators(*space, v, without, Functional::primal());
    for (int t = 0; t < mesh.num_elements(); ++t) {
        const double f = with.load[mesh.region(t)].scalar;
        const double expected = mesh.area(t) * mesh.area(t) * f * f;
        CHECK(std::abs(a.values[t] - b.values[t] - expected) <= 1e-13 * std::max(a.values[t], expected));
    }
}

TEST_CASE("indicator field invariants")
{
    std::mt19937 rng(22);
    for (int degree : {1, 2}) {
        const Mesh mesh = random_adaptive_mesh(make_initial_mesh(ZShapeSpec{4}), 3, rng);
        const auto space = space_on(mesh, degree);
        const FeSolution v = random_solution(space, rng);
        const ProblemData data = loaded_problem(1);
        const IndicatorField with = residual_indicators(*space, v, data, Functional::primal());
        const IndicatorField without =
            residual_indicators(*space, v, data, Functional::primal(), EstimatorOptions{false});
        check_field(with);
        check_field(without);
        CHECK(without.total < with.total);
        for (int t = 0; t < mesh.num_elements(); ++t)
            CHECK(without.values[t] <= with.values[t]);
    }
}

TEST_CASE("indicators are local")
{
    std::mt19937 rng(23);
    for (int degree : {1, 2}) {
        const Mesh mesh = random_adaptive_mesh(criss_cross_square(2, kQuadrant), 3, rng);
        const auto space = space_on(mesh, degree);
        const ProblemData data = loaded_problem(2);
        const FeSolution v = random_solution(space, rng);
        const IndicatorField base = residual_indicators(*space, v, data, Functional::primal());
        for (int trial = 0; trial < 10; ++trial) {
            const int t = std::uniform_int_distribution<int>(0, mesh.num_elements() - 1)(rng);
            std::set<int> patch{t};
            for (int e : mesh.element_edges(t))
                for (int n : mesh.edge_elements(e))
                    if (n != kNoElement)
                        patch.insert(n);
            std::set<int> touched;
            for (int s : patch)
                for (int dof : space->element_dofs(s))
                    touched.insert(dof);
            FeSolution w = v;
            for (int dof = 0; dof < space->num_dofs(); ++dof)
                if (!touched.contains(dof) && !space->is_dirichlet(dof))
                    w.coefficients[dof] += 1.0 + dof;
            const IndicatorField changed = residual_indicators(*space, w, data, Functional::primal());
            CHECK(changed.values[t] == base.values[t]);
        }
    }
}

TEST_CASE("unrefined elements with unrefined neighbors keep their indicator")
{
    std::mt19937 rng(24);
    for (int degree : {1, 2}) {
        const Mesh coarse = random_adaptive_mesh(criss_cross_square(2, kQuadrant), 2, rng);
        const RefineResult r = refine_nvb(coarse, MarkSet({0, 1}, coarse.num_elements()));
        const auto cs = space_on(coarse, degree), fs = space_on(r.mesh, degree);
        const ProblemData data = loaded_problem(2);
        const FeSolution v = random_solution(cs, rng);
        const FeSolution pv = prolongate(v, fs, r.parent);
        const IndicatorField a = residual_indicators(*cs, v, data, Functional::primal());
        const IndicatorField b = residual_indicators(*fs, pv, data, Functional::primal());

        std::vector<int> children(coarse.num_elements(), 0), child_of(coarse.num_elements(), -1);
        for (int t = 0; t < r.mesh.num_elements(); ++t) {
            ++children[r.parent[t]];
            child_of[r.parent[t]] = t;
        }
        int compared = 0;
        for (int t = 0; t < coarse.num_elements(); ++t) {
            bool untouched = children[t] == 1;
            for (int e : coarse.element_edges(t))
                for (int n : coarse.edge_elements(e))
                    untouched = untouched && (n == kNoElement || children[n] == 1);
            if (!untouched)
                continue;
            ++compared;
            CHECK(std::abs(b.values[child_of[t]] - a.values[t]) <= 1e-12 * a.values[t]);
        }
        CHECK(compared > 0);
    }
}

TEST_CASE("uniform refinement reduces the indicators of a fixed function")
{
    std::mt19937 rng(25);
    const double q_red_sq = std::pow(2.0, -0.5);
    for (int trial = 0; trial < 4; ++trial) {
        const int degree = 1 + trial % 2;
        const Mesh coarse = random_adaptive_mesh(criss_cross_square(2, kQuadrant), 2, rng);
        const RefineResult r = refine_uniform(coarse);
        const auto cs = space_on(coarse, degree), fs = space_on(r.mesh, degree);
        const ProblemData data = loaded_problem(2);
        const FeSolution v = random_solution(cs, rng);
        const IndicatorField a = residual_indicators(*cs, v, data, Functional::primal());
        const IndicatorField b = residual_indicators(*fs, prolongate(v, fs, r.parent), data, Functional::primal());
        std::vector<double> child_sum(coarse.num_elements(), 0.0);
        for (int t = 0; t < r.mesh.num_elements(); ++t)
            child_sum[r.parent[t]] += b.values[t];
        for (int t = 0; t < coarse.num_elements(); ++t)
            CHECK(child_sum[t] <= q_red_sq * a.values[t]);
        CHECK(b.total <= q_red_sq * a.total);
    }
}
