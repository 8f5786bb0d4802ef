#pragma once

#include <array>
#include <vector>

namespace mgafem {

/// Rule on the reference triangle in barycentric coordinates. Weights sum to
/// one, so an integral over T is |T| * sum(w_q * f(x_q)).
struct TriangleRule {
    std::vector<std::array<double, 3>> points;
    std::vector<double> weights;
};

/// Rule on [0, 1]; weights sum to one.
struct LineRule {
    std::vector<double> points;
    std::vector<double> weights;
};

/// Gauss-Legendre rule with n points on [0, 1] (exact up to degree 2n - 1).
const LineRule& gauss_legendre(int n);

/// Rule exact for polynomials of total degree <= degree. Symmetric Gauss
/// rules up to degree 4, collapsed (Duffy) tensor rules beyond.
const TriangleRule& triangle_rule(int degree);

/// Collapsed tensor-product rule exact up to the given degree; used as an
/// independent cross-check of the symmetric rules.
TriangleRule collapsed_triangle_rule(int degree);

}  // namespace mgafem
