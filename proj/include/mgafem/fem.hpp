#pragma once

#include "mgafem/mesh.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <memory>
#include <span>
#include <vector>

namespace mgafem {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;
using SparseMatrix = Eigen::SparseMatrix<double>;

/// Selects the primal load F or the goal functional G_j (0-based j).
struct Functional {
    int goal = -1;

    static constexpr Functional primal() { return Functional{-1}; }
    static constexpr Functional dual(int j) { return Functional{j}; }
    constexpr bool is_primal() const { return goal < 0; }
    friend constexpr bool operator==(Functional, Functional) = default;
};

/// Right-hand side data (r, q) of the functional v -> int r v + q . grad v.
struct SourceTerm {
    double scalar = 0.0;
    Vec2 vector = Vec2::Zero();
};

/**
 * Per-region constant problem data. Vectors are indexed by region id; region
 * 0 is the background. Every functional is v -> sum_T int_T (r v + q . grad v).
 */
struct ProblemData {
    std::vector<Mat2> diffusion;
    std::vector<SourceTerm> load;
    std::vector<std::vector<SourceTerm>> goals;

    int num_goals() const { return static_cast<int>(goals.size()); }
    int num_regions() const { return static_cast<int>(diffusion.size()); }
    const SourceTerm& source(Functional which, int region) const;

    /// Throws InputError unless A is symmetric positive definite on every
    /// region, N >= 1, and every region of the mesh has data.
    void validate(const Mesh& mesh) const;

    /// Data with A = scale * I, zero load and no goals on `regions` regions.
    static ProblemData isotropic(int regions, double scale = 1.0);
};

/// Number of local basis functions of the Lagrange element of degree p.
int local_dof_count(int degree);

/**
 * Lagrange space of degree 1 or 2 on a mesh. Global dofs: vertices first,
 * then (for p = 2) one per edge in edge order. Local dofs: vertices 0..2,
 * then the edges opposite vertices 0..2. Dirichlet dofs are the nodes on
 * Dirichlet-labeled boundary edges; the rest are free.
 */
class FeSpace {
public:
    FeSpace(std::shared_ptr<const Mesh> mesh, int degree);

    const Mesh& mesh() const { return *mesh_; }
    const std::shared_ptr<const Mesh>& mesh_ptr() const { return mesh_; }
    int degree() const { return degree_; }
    int num_local() const { return num_local_; }
    int num_dofs() const { return num_dofs_; }
    int num_free() const { return num_free_; }

    std::span<const int> element_dofs(int t) const
    {
        return {element_dofs_.data() + static_cast<std::size_t>(t) * num_local_,
                static_cast<std::size_t>(num_local_)};
    }
    bool is_dirichlet(int dof) const { return free_index_[dof] < 0; }
    /// Position among free dofs, or -1 for Dirichlet dofs.
    int free_index(int dof) const { return free_index_[dof]; }
    std::span<const int> free_dofs() const { return free_dofs_; }
    Point dof_point(int dof) const;

private:
    std::shared_ptr<const Mesh> mesh_;
    int degree_;
    int num_local_;
    int num_dofs_;
    int num_free_ = 0;
    std::vector<int> element_dofs_;
    std::vector<int> free_index_;
    std::vector<int> free_dofs_;
};

/// Coefficient vector over all dofs of a space; Dirichlet entries are zero.
struct FeSolution {
    std::shared_ptr<const FeSpace> space;
    Eigen::VectorXd coefficients;

    static FeSolution zero(std::shared_ptr<const FeSpace> space);
    static FeSolution from_free(std::shared_ptr<const FeSpace> space, const Eigen::VectorXd& free_values);
    Eigen::VectorXd free_values() const;
};

// ---------------------------------------------------------------------------
// Local element quantities

struct ElementGeometry {
    std::array<Point, 3> vertices;
    std::array<Vec2, 3> grad_lambda;  // gradients of the barycentric coordinates
    double area = 0.0;
};

ElementGeometry element_geometry(const Mesh& mesh, int t);

/// Basis values at barycentric point `lambda`.
void shape_values(int degree, const std::array<double, 3>& lambda, std::span<double> out);
/// Basis gradients at barycentric point `lambda`.
void shape_gradients(int degree, const std::array<double, 3>& lambda, const ElementGeometry& geo,
                     std::span<Vec2> out);
/// Basis Hessians (constant on the element; zero for p = 1).
void shape_hessians(int degree, const ElementGeometry& geo, std::span<Mat2> out);

// ---------------------------------------------------------------------------
// Galerkin systems

/// Stiffness matrix on the free dofs, row/column order = free_dofs().
SparseMatrix assemble_stiffness(const FeSpace& space, const ProblemData& data);
/// Load vector of F or G_j on the free dofs.
Eigen::VectorXd assemble_functional(const FeSpace& space, const ProblemData& data, Functional which);

/**
 * Assembles the symmetric stiffness matrix once and factors it once; primal
 * and dual solves on the same space reuse the factorization.
 */
class GalerkinSolver {
public:
    static constexpr double kResidualTolerance = 1e-10;

    /// Throws InputError when the assembled matrix is not SPD.
    GalerkinSolver(std::shared_ptr<const FeSpace> space, const ProblemData& data);

    /// Solves a(u, v) = F(v) (primal) or a(v, z) = G_j(v) (dual j).
    FeSolution solve(Functional which);

    const FeSpace& space() const { return *space_; }
    const SparseMatrix& stiffness() const { return stiffness_; }
    int solve_count() const { return solve_count_; }

private:
    std::shared_ptr<const FeSpace> space_;
    ProblemData data_;
    SparseMatrix stiffness_;
    Eigen::SimplicialLDLT<SparseMatrix> factor_;
    int solve_count_ = 0;
};

/// int (r v + q . grad v) with exact quadrature.
double evaluate_functional(const FeSpace& space, const ProblemData& data, Functional which, const FeSolution& v);

/// a(v, w) = int (A grad v) . grad w.
double energy_inner(const FeSpace& space, const ProblemData& data, const FeSolution& v, const FeSolution& w);

/// a(v, v)^{1/2}.
double energy_norm(const FeSpace& space, const ProblemData& data, const FeSolution& v);

// ---------------------------------------------------------------------------
// Nested spaces

/**
 * Matrix mapping coarse coefficients (all dofs) to fine coefficients of the
 * same function. `parent` maps fine elements to coarse elements. Throws
 * InputError when degrees differ or a fine element is not inside its parent.
 */
SparseMatrix prolongation_matrix(const FeSpace& coarse, const FeSpace& fine, std::span<const int> parent);

FeSolution prolongate(const FeSolution& v, std::shared_ptr<const FeSpace> fine, std::span<const int> parent);

}  // namespace mgafem
