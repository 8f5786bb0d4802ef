#include "mgafem/mesh.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <unordered_map>

namespace mgafem {

namespace {

std::uint64_t edge_key(int a, int b)
{
    const auto lo = static_cast<std::uint64_t>(std::min(a, b));
    const auto hi = static_cast<std::uint64_t>(std::max(a, b));
    return (lo << 32) | hi;
}

}  // namespace

double signed_area(const Point& a, const Point& b, const Point& c)
{
    return 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
}

Mesh::Mesh(std::vector<Point> vertices, std::vector<Triangle> elements,
           std::vector<BoundaryEdge> boundary, std::vector<int> regions,
           std::vector<int> generations)
    : vertices_(std::move(vertices)),
      elements_(std::move(elements)),
      boundary_(std::move(boundary)),
      regions_(std::move(regions)),
      generations_(std::move(generations))
{
    if (generations_.empty())
        generations_.assign(elements_.size(), 0);
    if (regions_.size() != elements_.size())
        throw InputError("mesh: region list length does not match element count");
    if (generations_.size() != elements_.size())
        throw InputError("mesh: generation list length does not match element count");
    build_topology();
}

void Mesh::build_topology()
{
    const int nv = num_vertices();
    const int nt = num_elements();

    areas_.resize(nt);
    element_edges_.resize(nt);
    edge_lookup_.clear();
    edge_lookup_.reserve(3 * static_cast<std::size_t>(nt));

    for (int t = 0; t < nt; ++t) {
        const Triangle& tri = elements_[t];
        for (int v : tri)
            if (v < 0 || v >= nv)
                throw InputError("mesh: element " + std::to_string(t) + " references vertex " +
                                 std::to_string(v) + " out of range");
        if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2])
            throw InputError("mesh: element " + std::to_string(t) + " has repeated vertices");
        areas_[t] = signed_area(vertices_[tri[0]], vertices_[tri[1]], vertices_[tri[2]]);
        if (!(areas_[t] > 0.0))
            throw InputError("mesh: element " + std::to_string(t) + " has non-positive signed area");
        for (int k = 0; k < 3; ++k)
            edge_lookup_.emplace_back(edge_key(tri[(k + 1) % 3], tri[(k + 2) % 3]), 3 * t + k);
    }

    // Edge ids follow first appearance in element order.
    std::unordered_map<std::uint64_t, int> ids;
    ids.reserve(edge_lookup_.size());
    edge_vertices_.clear();
    edge_elements_.clear();
    for (const auto& [key, slot] : edge_lookup_) {
        const int t = slot / 3, k = slot % 3;
        const Triangle& tri = elements_[t];
        auto [it, inserted] = ids.try_emplace(key, static_cast<int>(edge_vertices_.size()));
        const int e = it->second;
        if (inserted) {
            edge_vertices_.push_back({tri[(k + 1) % 3], tri[(k + 2) % 3]});
            edge_elements_.push_back({t, kNoElement});
        } else {
            if (edge_elements_[e][1] != kNoElement)
                throw InputError("mesh: edge shared by more than two elements");
            // Conforming neighbors traverse the shared edge in opposite directions.
            if (edge_vertices_[e][0] != tri[(k + 2) % 3])
                throw InputError("mesh: inconsistently oriented neighbors at element " + std::to_string(t));
            edge_elements_[e][1] = t;
        }
        element_edges_[t][k] = e;
    }

    edge_lookup_.clear();
    edge_lookup_.reserve(edge_vertices_.size());
    for (int e = 0; e < num_edges(); ++e)
        edge_lookup_.emplace_back(edge_key(edge_vertices_[e][0], edge_vertices_[e][1]), e);
    std::sort(edge_lookup_.begin(), edge_lookup_.end());

    edge_kind_.assign(edge_vertices_.size(), -1);
    for (const BoundaryEdge& be : boundary_) {
        const int e = find_edge(be.vertices[0], be.vertices[1]);
        if (e < 0)
            throw InputError("mesh: boundary edge (" + std::to_string(be.vertices[0]) + ", " +
                             std::to_string(be.vertices[1]) + ") is not an element edge");
        if (edge_elements_[e][1] != kNoElement)
            throw InputError("mesh: boundary edge (" + std::to_string(be.vertices[0]) + ", " +
                             std::to_string(be.vertices[1]) + ") is interior");
        if (edge_kind_[e] != -1)
            throw InputError("mesh: boundary edge listed twice");
        edge_kind_[e] = static_cast<std::int8_t>(be.kind);
    }
    for (int e = 0; e < num_edges(); ++e)
        if (edge_elements_[e][1] == kNoElement && edge_kind_[e] == -1)
            throw InputError("mesh: edge (" + std::to_string(edge_vertices_[e][0]) + ", " +
                             std::to_string(edge_vertices_[e][1]) +
                             ") has one neighbor but no boundary label (hanging node?)");
}

std::optional<BoundaryKind> Mesh::edge_boundary(int e) const
{
    if (edge_kind_[e] < 0)
        return std::nullopt;
    return static_cast<BoundaryKind>(edge_kind_[e]);
}

double Mesh::mesh_size(int t) const { return std::sqrt(areas_[t]); }

double Mesh::edge_length(int e) const
{
    const Point& a = vertices_[edge_vertices_[e][0]];
    const Point& b = vertices_[edge_vertices_[e][1]];
    return std::hypot(b.x - a.x, b.y - a.y);
}

Point Mesh::centroid(int t) const
{
    const Triangle& tri = elements_[t];
    const Point& a = vertices_[tri[0]];
    const Point& b = vertices_[tri[1]];
    const Point& c = vertices_[tri[2]];
    return {(a.x + b.x + c.x) / 3.0, (a.y + b.y + c.y) / 3.0};
}

int Mesh::find_edge(int a, int b) const
{
    const std::uint64_t key = edge_key(a, b);
    auto it = std::lower_bound(edge_lookup_.begin(), edge_lookup_.end(), std::make_pair(key, -1));
    if (it == edge_lookup_.end() || it->first != key)
        return -1;
    return it->second;
}

// ---------------------------------------------------------------------------

MarkSet::MarkSet(std::vector<int> elements, int num_elements) : elements_(std::move(elements))
{
    std::sort(elements_.begin(), elements_.end());
    elements_.erase(std::unique(elements_.begin(), elements_.end()), elements_.end());
    if (!elements_.empty() && (elements_.front() < 0 || elements_.back() >= num_elements))
        throw InputError("mark set: element index out of range");
}

MarkSet MarkSet::all(int num_elements)
{
    std::vector<int> all(num_elements);
    for (int t = 0; t < num_elements; ++t)
        all[t] = t;
    return MarkSet(std::move(all), num_elements);
}

bool MarkSet::contains(int t) const { return std::binary_search(elements_.begin(), elements_.end(), t); }

// ---------------------------------------------------------------------------

ShapeQuality shape_quality(const Mesh& mesh)
{
    ShapeQuality q;
    q.min_angle = std::numbers::pi;
    q.min_h = std::numeric_limits<double>::infinity();
    q.max_h = 0.0;
    for (int t = 0; t < mesh.num_elements(); ++t) {
        const Triangle& tri = mesh.element(t);
        for (int k = 0; k < 3; ++k) {
            const Point& p = mesh.vertex(tri[k]);
            const Point& a = mesh.vertex(tri[(k + 1) % 3]);
            const Point& b = mesh.vertex(tri[(k + 2) % 3]);
            const double ux = a.x - p.x, uy = a.y - p.y;
            const double vx = b.x - p.x, vy = b.y - p.y;
            const double angle = std::atan2(std::abs(ux * vy - uy * vx), ux * vx + uy * vy);
            q.min_angle = std::min(q.min_angle, angle);
        }
        const double h = mesh.mesh_size(t);
        q.min_h = std::min(q.min_h, h);
        q.max_h = std::max(q.max_h, h);
    }
    return q;
}

bool is_conforming(const Mesh& mesh)
{
    // The constructor already rejects non-conforming input; re-check the
    // invariants that matter downstream.
    for (int e = 0; e < mesh.num_edges(); ++e) {
        const auto& adj = mesh.edge_elements(e);
        if (adj[0] == kNoElement)
            return false;
        if (adj[1] == kNoElement && !mesh.edge_boundary(e))
            return false;
    }
    for (int t = 0; t < mesh.num_elements(); ++t)
        if (!(mesh.area(t) > 0.0))
            return false;
    return static_cast<int>(mesh.boundary_edges().size()) ==
           std::count_if(mesh.boundary_edges().begin(), mesh.boundary_edges().end(),
                         [&](const BoundaryEdge& be) {
                             const int e = mesh.find_edge(be.vertices[0], be.vertices[1]);
                             return e >= 0 && mesh.edge_elements(e)[1] == kNoElement;
                         });
}

bool is_nested(const Mesh& coarse, const Mesh& fine, std::span<const int> parent, double tol)
{
    if (static_cast<int>(parent.size()) != fine.num_elements())
        return false;
    for (int t = 0; t < fine.num_elements(); ++t) {
        const int p = parent[t];
        if (p < 0 || p >= coarse.num_elements())
            return false;
        if (fine.region(t) != coarse.region(p))
            return false;
        const Triangle& pt = coarse.element(p);
        const Point& a = coarse.vertex(pt[0]);
        const Point& b = coarse.vertex(pt[1]);
        const Point& c = coarse.vertex(pt[2]);
        const double area = coarse.area(p);
        for (int v : fine.element(t)) {
            const Point& x = fine.vertex(v);
            const double l0 = signed_area(x, b, c) / area;
            const double l1 = signed_area(a, x, c) / area;
            const double l2 = signed_area(a, b, x) / area;
            const double scale = std::sqrt(area);
            if (std::min({l0, l1, l2}) * scale < -tol)
                return false;
        }
    }
    return true;
}

std::vector<int> compose_parents(std::span<const int> fine_to_mid, std::span<const int> mid_to_coarse)
{
    std::vector<int> out(fine_to_mid.size());
    for (std::size_t t = 0; t < fine_to_mid.size(); ++t)
        out[t] = mid_to_coarse[fine_to_mid[t]];
    return out;
}

std::string format_double(double value)
{
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, ptr);
}

}  // namespace mgafem
