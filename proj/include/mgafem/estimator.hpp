#pragma once

#include "mgafem/fem.hpp"

#include <vector>

namespace mgafem {

/// Squared refinement indicators of one estimator on one mesh.
struct IndicatorField {
    std::vector<double> values;
    double total = 0.0;  // sum of values
    Functional tag = Functional::primal();
    int level = -1;

    /// Estimator value, i.e. the square root of the total.
    double estimate() const;
};

struct EstimatorOptions {
    /// Include the flux residual on Neumann edges.
    bool neumann_residual = true;
};

/**
 * Residual indicators
 *   h_T^2 ||r + div(A grad v - q)||_T^2 + h_T ||[(A grad v - q) . n]||_{dT}^2
 * with (r, q) the data of `which`. Interior edges are integrated once and
 * added to both neighbors with their own h_T; Neumann edges contribute the
 * full normal flux when enabled; Dirichlet edges contribute nothing.
 * All integrals are evaluated exactly (per-region-constant data, p <= 2).
 */
IndicatorField residual_indicators(const FeSpace& space, const FeSolution& v, const ProblemData& data,
                                   Functional which, EstimatorOptions options = {});

}  // namespace mgafem
