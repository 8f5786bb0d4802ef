#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace mgafem {

/// Raised for malformed input: invalid meshes, bad parameters, inconsistent data.
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct Point {
    double x = 0.0;
    double y = 0.0;
};

enum class BoundaryKind : std::uint8_t { dirichlet, neumann };

struct BoundaryEdge {
    std::array<int, 2> vertices;
    BoundaryKind kind = BoundaryKind::dirichlet;
};

/// Vertex triple (a, b, c) in counter-clockwise order. The refinement edge is
/// (a, b); c is the newest vertex.
using Triangle = std::array<int, 3>;

inline constexpr int kNoElement = -1;

/**
 * Conforming triangulation with edge topology.
 *
 * Immutable after construction. The constructor validates positive element
 * areas, conformity (every edge shared by at most two consistently oriented
 * elements) and that the boundary edge list covers exactly the edges with a
 * single adjacent element. Local edge k of an element is the edge opposite
 * its local vertex k, so local edge 2 is the refinement edge.
 */
class Mesh {
public:
    Mesh(std::vector<Point> vertices, std::vector<Triangle> elements,
         std::vector<BoundaryEdge> boundary, std::vector<int> regions,
         std::vector<int> generations = {});

    int num_vertices() const { return static_cast<int>(vertices_.size()); }
    int num_elements() const { return static_cast<int>(elements_.size()); }
    int num_edges() const { return static_cast<int>(edge_vertices_.size()); }

    const Point& vertex(int v) const { return vertices_[v]; }
    std::span<const Point> vertices() const { return vertices_; }
    const Triangle& element(int t) const { return elements_[t]; }
    std::span<const Triangle> elements() const { return elements_; }
    std::span<const BoundaryEdge> boundary_edges() const { return boundary_; }
    int region(int t) const { return regions_[t]; }
    std::span<const int> regions() const { return regions_; }
    int generation(int t) const { return generations_[t]; }
    std::span<const int> generations() const { return generations_; }

    const std::array<int, 3>& element_edges(int t) const { return element_edges_[t]; }
    int refinement_edge(int t) const { return element_edges_[t][2]; }
    const std::array<int, 2>& edge_vertices(int e) const { return edge_vertices_[e]; }
    /// Adjacent elements; the second entry is kNoElement on the boundary.
    const std::array<int, 2>& edge_elements(int e) const { return edge_elements_[e]; }
    std::optional<BoundaryKind> edge_boundary(int e) const;

    double area(int t) const { return areas_[t]; }
    /// h_T = |T|^{1/2}.
    double mesh_size(int t) const;
    double edge_length(int e) const;
    Point centroid(int t) const;

    /// Edge index for an unordered vertex pair, or -1.
    int find_edge(int a, int b) const;

private:
    void build_topology();

    std::vector<Point> vertices_;
    std::vector<Triangle> elements_;
    std::vector<BoundaryEdge> boundary_;
    std::vector<int> regions_;
    std::vector<int> generations_;

    std::vector<double> areas_;
    std::vector<std::array<int, 3>> element_edges_;
    std::vector<std::array<int, 2>> edge_vertices_;
    std::vector<std::array<int, 2>> edge_elements_;
    std::vector<std::int8_t> edge_kind_;  // -1 interior, else BoundaryKind
    std::vector<std::pair<std::uint64_t, int>> edge_lookup_;  // sorted by key
};

double signed_area(const Point& a, const Point& b, const Point& c);

/// Sorted, duplicate-free set of element indices of one mesh.
class MarkSet {
public:
    MarkSet() = default;
    /// Throws InputError if an index lies outside [0, num_elements).
    MarkSet(std::vector<int> elements, int num_elements);

    static MarkSet all(int num_elements);

    std::span<const int> elements() const { return elements_; }
    int size() const { return static_cast<int>(elements_.size()); }
    bool empty() const { return elements_.empty(); }
    bool contains(int t) const;

    friend bool operator==(const MarkSet&, const MarkSet&) = default;

private:
    std::vector<int> elements_;
};

struct RefineResult {
    Mesh mesh;
    /// parent[t] is the element of the input mesh that contains new element t.
    std::vector<int> parent;
};

/// Newest-vertex bisection: every marked element is bisected at least once,
/// plus the minimal closure needed to restore conformity.
RefineResult refine_nvb(const Mesh& mesh, const MarkSet& marked);

/// Bisects every edge once, i.e. each element splits into four children.
RefineResult refine_uniform(const Mesh& mesh);

/// Composition of two parent maps: fine -> mid -> coarse.
std::vector<int> compose_parents(std::span<const int> fine_to_mid, std::span<const int> mid_to_coarse);

struct ShapeQuality {
    double min_angle = 0.0;  // radians
    double max_h = 0.0;
    double min_h = 0.0;
};

ShapeQuality shape_quality(const Mesh& mesh);

// Structural checks used by tests and the driver's self-checks.
bool is_conforming(const Mesh& mesh);
/// Every child lies inside its parent, vertex-wise, with the given tolerance.
bool is_nested(const Mesh& coarse, const Mesh& fine, std::span<const int> parent, double tol = 1e-12);

// ---------------------------------------------------------------------------
// Initial meshes

struct UnitSquareSpec {
    enum class Pattern { diagonal, criss_cross };
    int cells = 1;  // cells per side
    Pattern pattern = Pattern::criss_cross;
};

/// (-1,1)^2 minus conv{(0,0),(-1,0),(-1,-1)}, criss-cross cells. Dirichlet on
/// the two edges meeting at the reentrant corner, Neumann elsewhere.
struct ZShapeSpec {
    int cells = 8;  // cells per side of (-1,1)^2, must be even
};

struct ExplicitMeshSpec {
    std::vector<Point> vertices;
    std::vector<std::array<int, 3>> elements;  // any orientation
    /// Boundary edges listed here are Neumann; all others are Dirichlet.
    std::vector<std::array<int, 2>> neumann;
};

using DomainSpec = std::variant<UnitSquareSpec, ZShapeSpec, ExplicitMeshSpec>;

struct RegionSpec {
    int id = 0;
    std::vector<Point> polygon;  // counter-clockwise or clockwise, simple

    static RegionSpec rectangle(int id, double x0, double y0, double x1, double y1);
};

/**
 * Builds the initial triangulation. Refinement edges are the longest edge of
 * each element, ties broken by the smallest opposite-vertex index. Elements
 * whose centroid lies in a region polygon get that region's id, others get 0.
 * Throws InputError when a region is not a union of elements.
 */
Mesh make_initial_mesh(const DomainSpec& domain, std::span<const RegionSpec> regions = {});

// ---------------------------------------------------------------------------
// Plain-text dump: VERTICES / ELEMENTS / BOUNDARY sections.

void write_mesh(std::ostream& os, const Mesh& mesh);
Mesh read_mesh(std::istream& is);

/// Shortest decimal representation that parses back to the same double.
std::string format_double(double value);

}  // namespace mgafem
