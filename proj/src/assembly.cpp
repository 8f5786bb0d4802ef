#include "mgafem/fem.hpp"
#include "mgafem/quadrature.hpp"

#include <cmath>
#include <string>

namespace mgafem {

namespace {

constexpr int kMaxLocal = 6;

// Exact for every integrand of a per-region-constant problem with p <= 2.
const TriangleRule& rule_for(const FeSpace& space) { return triangle_rule(2 * space.degree()); }

}  // namespace

SparseMatrix assemble_stiffness(const FeSpace& space, const ProblemData& data)
{
    const Mesh& mesh = space.mesh();
    const int nl = space.num_local();
    const TriangleRule& rule = rule_for(space);

    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<std::size_t>(mesh.num_elements()) * nl * nl);
    std::array<Vec2, kMaxLocal> grads;
    Eigen::Matrix<double, kMaxLocal, kMaxLocal> local;
    for (int t = 0; t < mesh.num_elements(); ++t) {
        const ElementGeometry geo = element_geometry(mesh, t);
        const Mat2& a = data.diffusion[mesh.region(t)];
        local.setZero();
        for (std::size_t q = 0; q < rule.weights.size(); ++q) {
            shape_gradients(space.degree(), rule.points[q], geo, grads);
            const double w = rule.weights[q] * geo.area;
            for (int i = 0; i < nl; ++i) {
                const Vec2 flux = a * grads[i];
                for (int j = 0; j < nl; ++j)
                    local(j, i) += w * flux.dot(grads[j]);
            }
        }
        const auto dofs = space.element_dofs(t);
        for (int i = 0; i < nl; ++i) {
            const int row = space.free_index(dofs[i]);
            if (row < 0)
                continue;
            for (int j = 0; j < nl; ++j) {
                const int col = space.free_index(dofs[j]);
                if (col >= 0)
                    triplets.emplace_back(row, col, local(i, j));
            }
        }
    }
    SparseMatrix k(space.num_free(), space.num_free());
    k.setFromTriplets(triplets.begin(), triplets.end());
    return k;
}

Eigen::VectorXd assemble_functional(const FeSpace& space, const ProblemData& data, Functional which)
{
    const Mesh& mesh = space.mesh();
    const int nl = space.num_local();
    const TriangleRule& rule = rule_for(space);

    Eigen::VectorXd b = Eigen::VectorXd::Zero(space.num_free());
    std::array<double, kMaxLocal> values;
    std::array<Vec2, kMaxLocal> grads;
    for (int t = 0; t < mesh.num_elements(); ++t) {
        const SourceTerm& src = data.source(which, mesh.region(t));
        if (src.scalar == 0.0 && src.vector.isZero())
            continue;
        const ElementGeometry geo = element_geometry(mesh, t);
        std::array<double, kMaxLocal> local{};
        for (std::size_t q = 0; q < rule.weights.size(); ++q) {
            shape_values(space.degree(), rule.points[q], values);
            shape_gradients(space.degree(), rule.points[q], geo, grads);
            const double w = rule.weights[q] * geo.area;
            for (int i = 0; i < nl; ++i)
                local[i] += w * (src.scalar * values[i] + src.vector.dot(grads[i]));
        }
        const auto dofs = space.element_dofs(t);
        for (int i = 0; i < nl; ++i) {
            const int row = space.free_index(dofs[i]);
            if (row >= 0)
                b[row] += local[i];
        }
    }
    return b;
}

GalerkinSolver::GalerkinSolver(std::shared_ptr<const FeSpace> space, const ProblemData& data)
    : space_(std::move(space)), data_(data)
{
    data_.validate(space_->mesh());
    stiffness_ = assemble_stiffness(*space_, data_);
    if (space_->num_free() == 0)
        return;
    factor_.compute(stiffness_);
    if (factor_.info() != Eigen::Success)
        throw InputError("galerkin: factorization failed; the stiffness matrix is not SPD");
    if (!(factor_.vectorD().minCoeff() > 0.0))
        throw InputError("galerkin: the stiffness matrix is not positive definite (check the diffusion data)");
}

FeSolution GalerkinSolver::solve(Functional which)
{
    if (!which.is_primal() && (which.goal < 0 || which.goal >= data_.num_goals()))
        throw InputError("galerkin: goal index " + std::to_string(which.goal + 1) + " out of range");
    ++solve_count_;
    if (space_->num_free() == 0)
        return FeSolution::zero(space_);
    const Eigen::VectorXd b = assemble_functional(*space_, data_, which);
    const double scale = b.lpNorm<Eigen::Infinity>();
    if (scale == 0.0)
        return FeSolution::zero(space_);

    Eigen::VectorXd x = factor_.solve(b);
    Eigen::VectorXd r = b - stiffness_ * x;
    for (int sweep = 0; sweep < 3 && r.lpNorm<Eigen::Infinity>() > kResidualTolerance * scale; ++sweep) {
        x += factor_.solve(r);
        r = b - stiffness_ * x;
    }
    if (!(r.lpNorm<Eigen::Infinity>() <= kResidualTolerance * scale))
        throw std::runtime_error("galerkin: residual " + format_double(r.lpNorm<Eigen::Infinity>() / scale) +
                                 " exceeds the solve tolerance");
    return FeSolution::from_free(space_, x);
}

double evaluate_functional(const FeSpace& space, const ProblemData& data, Functional which, const FeSolution& v)
{
    const Mesh& mesh = space.mesh();
    const int nl = space.num_local();
    const TriangleRule& rule = rule_for(space);
    std::array<double, kMaxLocal> values;
    std::array<Vec2, kMaxLocal> grads;
    double total = 0.0;
    for (int t = 0; t < mesh.num_elements(); ++t) {
        const SourceTerm& src = data.source(which, mesh.region(t));
        if (src.scalar == 0.0 && src.vector.isZero())
            continue;
        const ElementGeometry geo = element_geometry(mesh, t);
        const auto dofs = space.element_dofs(t);
        double local = 0.0;
        for (std::size_t q = 0; q < rule.weights.size(); ++q) {
            shape_values(space.degree(), rule.points[q], values);
            shape_gradients(space.degree(), rule.points[q], geo, grads);
            double value = 0.0;
            Vec2 grad = Vec2::Zero();
            for (int i = 0; i < nl; ++i) {
                value += v.coefficients[dofs[i]] * values[i];
                grad += v.coefficients[dofs[i]] * grads[i];
            }
            local += rule.weights[q] * (src.scalar * value + src.vector.dot(grad));
        }
        total += geo.area * local;
    }
    return total;
}

double energy_inner(const FeSpace& space, const ProblemData& data, const FeSolution& v, const FeSolution& w)
{
    if (v.coefficients.size() != space.num_dofs() || w.coefficients.size() != space.num_dofs())
        throw InputError("energy_inner: solutions do not belong to the space");
    const Mesh& mesh = space.mesh();
    const int nl = space.num_local();
    const TriangleRule& rule = rule_for(space);
    std::array<Vec2, kMaxLocal> grads;
    double total = 0.0;
    for (int t = 0; t < mesh.num_elements(); ++t) {
        const ElementGeometry geo = element_geometry(mesh, t);
        const Mat2& a = data.diffusion[mesh.region(t)];
        const auto dofs = space.element_dofs(t);
        double local = 0.0;
        for (std::size_t q = 0; q < rule.weights.size(); ++q) {
            shape_gradients(space.degree(), rule.points[q], geo, grads);
            Vec2 gv = Vec2::Zero(), gw = Vec2::Zero();
            for (int i = 0; i < nl; ++i) {
                gv += v.coefficients[dofs[i]] * grads[i];
                gw += w.coefficients[dofs[i]] * grads[i];
            }
            local += rule.weights[q] * (a * gv).dot(gw);
        }
        total += geo.area * local;
    }
    return total;
}

double energy_norm(const FeSpace& space, const ProblemData& data, const FeSolution& v)
{
    return std::sqrt(std::max(0.0, energy_inner(space, data, v, v)));
}

}  // namespace mgafem
