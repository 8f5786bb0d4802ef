#include "mgafem/fem.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <string>

namespace mgafem {

const SourceTerm& ProblemData::source(Functional which, int region) const
{
    return which.is_primal() ? load[region] : goals[which.goal][region];
}

void ProblemData::validate(const Mesh& mesh) const
{
    if (goals.empty())
        throw InputError("problem data: at least one goal functional is required");
    const int nr = num_regions();
    if (static_cast<int>(load.size()) != nr)
        throw InputError("problem data: load defined on a different number of regions than A");
    for (std::size_t j = 0; j < goals.size(); ++j)
        if (static_cast<int>(goals[j].size()) != nr)
            throw InputError("problem data: goal " + std::to_string(j + 1) +
                             " defined on a different number of regions than A");
    for (int t = 0; t < mesh.num_elements(); ++t)
        if (mesh.region(t) < 0 || mesh.region(t) >= nr)
            throw InputError("problem data: no data for region " + std::to_string(mesh.region(t)));
    for (int r = 0; r < nr; ++r) {
        const Mat2& a = diffusion[r];
        if (std::abs(a(0, 1) - a(1, 0)) > 1e-14 * a.cwiseAbs().maxCoeff())
            throw InputError("problem data: A is not symmetric on region " + std::to_string(r));
        const Eigen::SelfAdjointEigenSolver<Mat2> eig(a);
        if (!(eig.eigenvalues().minCoeff() > 0.0))
            throw InputError("problem data: A is not positive definite on region " + std::to_string(r));
    }
}

ProblemData ProblemData::isotropic(int regions, double scale)
{
    ProblemData data;
    data.diffusion.assign(regions, scale * Mat2::Identity());
    data.load.assign(regions, SourceTerm{});
    return data;
}

int local_dof_count(int degree)
{
    switch (degree) {
    case 1:
        return 3;
    case 2:
        return 6;
    default:
        throw InputError("unsupported polynomial degree " + std::to_string(degree) + " (supported: 1, 2)");
    }
}

FeSpace::FeSpace(std::shared_ptr<const Mesh> mesh, int degree)
    : mesh_(std::move(mesh)), degree_(degree), num_local_(local_dof_count(degree))
{
    const Mesh& m = *mesh_;
    const int nv = m.num_vertices();
    num_dofs_ = nv + (degree_ == 2 ? m.num_edges() : 0);

    element_dofs_.resize(static_cast<std::size_t>(m.num_elements()) * num_local_);
    for (int t = 0; t < m.num_elements(); ++t) {
        int* dofs = element_dofs_.data() + static_cast<std::size_t>(t) * num_local_;
        for (int k = 0; k < 3; ++k)
            dofs[k] = m.element(t)[k];
        if (degree_ == 2)
            for (int k = 0; k < 3; ++k)
                dofs[3 + k] = nv + m.element_edges(t)[k];
    }

    std::vector<char> dirichlet(num_dofs_, 0);
    for (int e = 0; e < m.num_edges(); ++e) {
        if (m.edge_boundary(e) != BoundaryKind::dirichlet)
            continue;
        dirichlet[m.edge_vertices(e)[0]] = 1;
        dirichlet[m.edge_vertices(e)[1]] = 1;
        if (degree_ == 2)
            dirichlet[nv + e] = 1;
    }
    free_index_.assign(num_dofs_, -1);
    for (int d = 0; d < num_dofs_; ++d)
        if (!dirichlet[d]) {
            free_index_[d] = num_free_++;
            free_dofs_.push_back(d);
        }
}

Point FeSpace::dof_point(int dof) const
{
    const Mesh& m = *mesh_;
    if (dof < m.num_vertices())
        return m.vertex(dof);
    const auto& ev = m.edge_vertices(dof - m.num_vertices());
    const Point& a = m.vertex(ev[0]);
    const Point& b = m.vertex(ev[1]);
    return {0.5 * (a.x + b.x), 0.5 * (a.y + b.y)};
}

FeSolution FeSolution::zero(std::shared_ptr<const FeSpace> space)
{
    const int n = space->num_dofs();
    return FeSolution{std::move(space), Eigen::VectorXd::Zero(n)};
}

FeSolution FeSolution::from_free(std::shared_ptr<const FeSpace> space, const Eigen::VectorXd& free_values)
{
    if (free_values.size() != space->num_free())
        throw InputError("solution: free value count does not match the space");
    FeSolution u = zero(std::move(space));
    const auto free = u.space->free_dofs();
    for (std::size_t i = 0; i < free.size(); ++i)
        u.coefficients[free[i]] = free_values[static_cast<Eigen::Index>(i)];
    return u;
}

Eigen::VectorXd FeSolution::free_values() const
{
    const auto free = space->free_dofs();
    Eigen::VectorXd out(static_cast<Eigen::Index>(free.size()));
    for (std::size_t i = 0; i < free.size(); ++i)
        out[static_cast<Eigen::Index>(i)] = coefficients[free[i]];
    return out;
}

// ---------------------------------------------------------------------------

ElementGeometry element_geometry(const Mesh& mesh, int t)
{
    ElementGeometry geo;
    const Triangle& tri = mesh.element(t);
    for (int k = 0; k < 3; ++k)
        geo.vertices[k] = mesh.vertex(tri[k]);
    geo.area = mesh.area(t);
    const double inv = 1.0 / (2.0 * geo.area);
    for (int k = 0; k < 3; ++k) {
        const Point& a = geo.vertices[(k + 1) % 3];
        const Point& b = geo.vertices[(k + 2) % 3];
        geo.grad_lambda[k] = Vec2(a.y - b.y, b.x - a.x) * inv;
    }
    return geo;
}

void shape_values(int degree, const std::array<double, 3>& l, std::span<double> out)
{
    if (degree == 1) {
        out[0] = l[0];
        out[1] = l[1];
        out[2] = l[2];
        return;
    }
    for (int k = 0; k < 3; ++k) {
        out[k] = l[k] * (2.0 * l[k] - 1.0);
        out[3 + k] = 4.0 * l[(k + 1) % 3] * l[(k + 2) % 3];
    }
}

void shape_gradients(int degree, const std::array<double, 3>& l, const ElementGeometry& geo, std::span<Vec2> out)
{
    const auto& g = geo.grad_lambda;
    if (degree == 1) {
        out[0] = g[0];
        out[1] = g[1];
        out[2] = g[2];
        return;
    }
    for (int k = 0; k < 3; ++k) {
        const int i = (k + 1) % 3, j = (k + 2) % 3;
        out[k] = (4.0 * l[k] - 1.0) * g[k];
        out[3 + k] = 4.0 * (l[i] * g[j] + l[j] * g[i]);
    }
}

void shape_hessians(int degree, const ElementGeometry& geo, std::span<Mat2> out)
{
    const auto& g = geo.grad_lambda;
    if (degree == 1) {
        for (int k = 0; k < 3; ++k)
            out[k].setZero();
        return;
    }
    for (int k = 0; k < 3; ++k) {
        const int i = (k + 1) % 3, j = (k + 2) % 3;
        out[k] = 4.0 * g[k] * g[k].transpose();
        out[3 + k] = 4.0 * (g[i] * g[j].transpose() + g[j] * g[i].transpose());
    }
}

}  // namespace mgafem
