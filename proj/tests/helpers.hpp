#pragma once

#include "mgafem/driver.hpp"
#include "mgafem/fem.hpp"
#include "mgafem/mesh.hpp"

#include <random>

namespace testing {

using namespace mgafem;

inline Mesh two_triangle_square(std::span<const RegionSpec> regions = {})
{
    return make_initial_mesh(UnitSquareSpec{1, UnitSquareSpec::Pattern::diagonal}, regions);
}

inline Mesh criss_cross_square(int cells = 1, std::span<const RegionSpec> regions = {})
{
    return make_initial_mesh(UnitSquareSpec{cells, UnitSquareSpec::Pattern::criss_cross}, regions);
}

/// Refines a random third of the elements, repeatedly.
inline Mesh random_adaptive_mesh(Mesh mesh, int steps, std::mt19937& rng)
{
    for (int s = 0; s < steps; ++s) {
        std::vector<int> marked;
        std::bernoulli_distribution pick(1.0 / 3.0);
        for (int t = 0; t < mesh.num_elements(); ++t)
            if (pick(rng))
                marked.push_back(t);
        mesh = refine_nvb(mesh, MarkSet(marked, mesh.num_elements())).mesh;
    }
    return mesh;
}

inline FeSolution random_solution(std::shared_ptr<const FeSpace> space, std::mt19937& rng)
{
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Eigen::VectorXd free(space->num_free());
    for (int i = 0; i < free.size(); ++i)
        free[i] = dist(rng);
    return FeSolution::from_free(std::move(space), free);
}

/// Unit-square problem with three goals on corner squares (regions 1..4).
struct CornerProblem {
    std::vector<RegionSpec> regions;
    ProblemData data;
};

inline CornerProblem corner_problem()
{
    CornerProblem p;
    p.regions = {RegionSpec::rectangle(1, 0.0, 0.0, 0.25, 0.25), RegionSpec::rectangle(2, 0.75, 0.0, 1.0, 0.25),
                 RegionSpec::rectangle(3, 0.75, 0.75, 1.0, 1.0), RegionSpec::rectangle(4, 0.0, 0.75, 0.25, 1.0)};
    p.data = ProblemData::isotropic(5);
    p.data.load[1].vector = Vec2(-1.0, 0.0);
    p.data.goals.assign(3, std::vector<SourceTerm>(5));
    p.data.goals[0][2].vector = Vec2(1.0, 0.0);
    p.data.goals[1][3].vector = Vec2(1.0, 0.0);
    p.data.goals[2][4].vector = Vec2(0.0, 1.5);
    return p;
}

inline double relative_error(double value, double reference)
{
    return std::abs(value - reference) / std::max(std::abs(reference), 1e-300);
}

}  // namespace testing
