#include "mgafem/fem.hpp"

#include <algorithm>
#include <cmath>

namespace mgafem {

SparseMatrix prolongation_matrix(const FeSpace& coarse, const FeSpace& fine, std::span<const int> parent)
{
    if (coarse.degree() != fine.degree())
        throw InputError("prolongate: spaces have different polynomial degrees");
    const Mesh& cm = coarse.mesh();
    const Mesh& fm = fine.mesh();
    if (static_cast<int>(parent.size()) != fm.num_elements())
        throw InputError("prolongate: parent map does not match the fine mesh");

    const int nl = fine.num_local();
    std::vector<char> done(fine.num_dofs(), 0);
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<std::size_t>(fine.num_dofs()) * nl);
    std::array<double, 6> values;

    for (int t = 0; t < fm.num_elements(); ++t) {
        const int p = parent[t];
        if (p < 0 || p >= cm.num_elements())
            throw InputError("prolongate: parent index out of range");
        const Triangle& pt = cm.element(p);
        const Point& a = cm.vertex(pt[0]);
        const Point& b = cm.vertex(pt[1]);
        const Point& c = cm.vertex(pt[2]);
        const double area = cm.area(p);
        const auto fine_dofs = fine.element_dofs(t);
        const auto coarse_dofs = coarse.element_dofs(p);
        for (int i = 0; i < nl; ++i) {
            const int dof = fine_dofs[i];
            if (done[dof])
                continue;
            done[dof] = 1;
            if (fine.is_dirichlet(dof))
                continue;
            const Point x = fine.dof_point(dof);
            const std::array<double, 3> lambda{signed_area(x, b, c) / area, signed_area(a, x, c) / area,
                                               signed_area(a, b, x) / area};
            if (*std::min_element(lambda.begin(), lambda.end()) < -1e-10)
                throw InputError("prolongate: fine mesh is not a refinement of the coarse mesh");
            shape_values(coarse.degree(), lambda, values);
            for (int j = 0; j < nl; ++j)
                if (std::abs(values[j]) > 1e-14)
                    triplets.emplace_back(dof, coarse_dofs[j], values[j]);
        }
    }
    SparseMatrix prolong(fine.num_dofs(), coarse.num_dofs());
    prolong.setFromTriplets(triplets.begin(), triplets.end());
    return prolong;
}

FeSolution prolongate(const FeSolution& v, std::shared_ptr<const FeSpace> fine, std::span<const int> parent)
{
    const SparseMatrix prolong = prolongation_matrix(*v.space, *fine, parent);
    FeSolution out{std::move(fine), prolong * v.coefficients};
    return out;
}

}  // namespace mgafem
