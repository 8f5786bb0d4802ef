#include "mgafem/estimator.hpp"

#include <cmath>

namespace mgafem {

double IndicatorField::estimate() const { return std::sqrt(total); }

namespace {

// Flux A grad v - q at the three vertices of an element (affine for p <= 2).
std::array<Vec2, 3> vertex_fluxes(const FeSpace& space, const FeSolution& v, const ProblemData& data,
                                  Functional which, int t)
{
    const Mesh& mesh = space.mesh();
    const ElementGeometry geo = element_geometry(mesh, t);
    const Mat2& a = data.diffusion[mesh.region(t)];
    const Vec2& q = data.source(which, mesh.region(t)).vector;
    const auto dofs = space.element_dofs(t);
    std::array<Vec2, 6> grads;
    std::array<Vec2, 3> out;
    for (int k = 0; k < 3; ++k) {
        std::array<double, 3> lambda{0.0, 0.0, 0.0};
        lambda[k] = 1.0;
        shape_gradients(space.degree(), lambda, geo, grads);
        Vec2 g = Vec2::Zero();
        for (int i = 0; i < space.num_local(); ++i)
            g += v.coefficients[dofs[i]] * grads[i];
        out[k] = a * g - q;
    }
    return out;
}

int local_index(const Triangle& tri, int vertex)
{
    for (int k = 0; k < 3; ++k)
        if (tri[k] == vertex)
            return k;
    return -1;
}

}  // namespace

IndicatorField residual_indicators(const FeSpace& space, const FeSolution& v, const ProblemData& data,
                                   Functional which, EstimatorOptions options)
{
    if (v.space.get() != &space || v.coefficients.size() != space.num_dofs())
        throw InputError("residual_indicators: solution does not belong to the space");
    const Mesh& mesh = space.mesh();
    const int nt = mesh.num_elements();

    IndicatorField field;
    field.tag = which;
    field.values.assign(nt, 0.0);

    std::vector<std::array<Vec2, 3>> flux(nt);
    std::array<Mat2, 6> hessians;
    for (int t = 0; t < nt; ++t) {
        flux[t] = vertex_fluxes(space, v, data, which, t);
        // Volume residual r + div(A grad v) is constant on T; div q = 0.
        double div = 0.0;
        if (space.degree() == 2) {
            const ElementGeometry geo = element_geometry(mesh, t);
            shape_hessians(space.degree(), geo, hessians);
            Mat2 hess = Mat2::Zero();
            const auto dofs = space.element_dofs(t);
            for (int i = 0; i < space.num_local(); ++i)
                hess += v.coefficients[dofs[i]] * hessians[i];
            div = (data.diffusion[mesh.region(t)].cwiseProduct(hess)).sum();
        }
        const double residual = data.source(which, mesh.region(t)).scalar + div;
        const double area = mesh.area(t);
        field.values[t] = area * area * residual * residual;  // h_T^2 |T| R^2
    }

    for (int e = 0; e < mesh.num_edges(); ++e) {
        const auto boundary = mesh.edge_boundary(e);
        if (boundary == BoundaryKind::dirichlet)
            continue;
        if (boundary == BoundaryKind::neumann && !options.neumann_residual)
            continue;
        const auto& ev = mesh.edge_vertices(e);
        const auto& adj = mesh.edge_elements(e);
        const Point& pa = mesh.vertex(ev[0]);
        const Point& pb = mesh.vertex(ev[1]);
        const double length = mesh.edge_length(e);
        // Unit normal pointing out of adj[0].
        const Triangle& t0 = mesh.element(adj[0]);
        const int ka = local_index(t0, ev[0]);
        const int kb = local_index(t0, ev[1]);
        Vec2 normal((pb.y - pa.y) / length, -(pb.x - pa.x) / length);
        if (t0[(ka + 1) % 3] != ev[1])
            normal = -normal;  // adj[0] traverses the edge as (b, a)
        double jump_a = flux[adj[0]][ka].dot(normal);
        double jump_b = flux[adj[0]][kb].dot(normal);
        if (adj[1] != kNoElement) {
            const Triangle& t1 = mesh.element(adj[1]);
            jump_a -= flux[adj[1]][local_index(t1, ev[0])].dot(normal);
            jump_b -= flux[adj[1]][local_index(t1, ev[1])].dot(normal);
        }
        // Exact integral of the square of a linear function along the edge.
        const double jump_sq = length * (jump_a * jump_a + jump_a * jump_b + jump_b * jump_b) / 3.0;
        for (int t : adj)
            if (t != kNoElement)
                field.values[t] += mesh.mesh_size(t) * jump_sq;
    }

    double total = 0.0;
    for (double value : field.values)
        total += value;
    field.total = total;
    return field;
}

}  // namespace mgafem
