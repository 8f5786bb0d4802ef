#include "mgafem/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <string>

namespace mgafem {

namespace {

struct RawMesh {
    std::vector<Point> vertices;
    std::vector<std::array<int, 3>> elements;
};

void add_grid_cells(RawMesh& raw, double x0, double y0, double width, int cells, UnitSquareSpec::Pattern pattern)
{
    const int n = cells;
    const double h = width / n;
    auto node = [n](int i, int j) { return j * (n + 1) + i; };
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i)
            raw.vertices.push_back({x0 + i * h, y0 + j * h});
    if (pattern == UnitSquareSpec::Pattern::diagonal) {
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) {
                const int p00 = node(i, j), p10 = node(i + 1, j), p11 = node(i + 1, j + 1), p01 = node(i, j + 1);
                raw.elements.push_back({p00, p10, p11});
                raw.elements.push_back({p00, p11, p01});
            }
        return;
    }
    const int first_center = static_cast<int>(raw.vertices.size());
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            raw.vertices.push_back({x0 + (i + 0.5) * h, y0 + (j + 0.5) * h});
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            const int p00 = node(i, j), p10 = node(i + 1, j), p11 = node(i + 1, j + 1), p01 = node(i, j + 1);
            const int c = first_center + j * n + i;
            raw.elements.push_back({p00, p10, c});
            raw.elements.push_back({p10, p11, c});
            raw.elements.push_back({p11, p01, c});
            raw.elements.push_back({p01, p00, c});
        }
}

// Drops unreferenced vertices, keeping the relative order of the rest.
void compact(RawMesh& raw)
{
    std::vector<int> remap(raw.vertices.size(), -1);
    for (const auto& tri : raw.elements)
        for (int v : tri)
            remap[v] = 0;
    std::vector<Point> kept;
    for (std::size_t v = 0; v < raw.vertices.size(); ++v)
        if (remap[v] == 0) {
            remap[v] = static_cast<int>(kept.size());
            kept.push_back(raw.vertices[v]);
        }
    for (auto& tri : raw.elements)
        for (int& v : tri)
            v = remap[v];
    raw.vertices = std::move(kept);
}

double squared_length(const Point& a, const Point& b)
{
    return (a.x - b.x) * (a.x - b.x) + (a.y - b.y) * (a.y - b.y);
}

// Counter-clockwise rotation that puts the refinement edge first: the
// longest edge, ties broken by the smallest opposite-vertex index.
Triangle orient(const std::vector<Point>& vertices, std::array<int, 3> tri)
{
    if (signed_area(vertices[tri[0]], vertices[tri[1]], vertices[tri[2]]) < 0.0)
        std::swap(tri[1], tri[2]);
    int best = -1;
    double best_len = -1.0;
    for (int k = 0; k < 3; ++k) {
        const double len = squared_length(vertices[tri[(k + 1) % 3]], vertices[tri[(k + 2) % 3]]);
        const bool longer = len > best_len * (1.0 + 1e-12);
        const bool tie = !longer && len >= best_len * (1.0 - 1e-12);
        if (best < 0 || longer || (tie && tri[k] < tri[best])) {
            best = k;
            best_len = std::max(len, best_len);
        }
    }
    return {tri[(best + 1) % 3], tri[(best + 2) % 3], tri[best]};
}

bool on_segment(const Point& p, const Point& a, const Point& b)
{
    const double tol = 1e-12;
    const double cross = (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
    if (std::abs(cross) > tol)
        return false;
    const double dot = (p.x - a.x) * (b.x - a.x) + (p.y - a.y) * (b.y - a.y);
    return dot >= -tol && dot <= squared_length(a, b) + tol;
}

// Point-in-polygon; `closed` decides whether points on the boundary count.
bool in_polygon(const Point& p, const std::vector<Point>& poly, bool closed)
{
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i)
        if (on_segment(p, poly[i], poly[(i + 1) % n]))
            return closed;
    bool inside = false;
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const Point& a = poly[i];
        const Point& b = poly[j];
        if ((a.y > p.y) != (b.y > p.y)) {
            const double x = (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x;
            if (p.x < x)
                inside = !inside;
        }
    }
    return inside;
}

double polygon_area(const std::vector<Point>& poly)
{
    double twice = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const Point& a = poly[i];
        const Point& b = poly[(i + 1) % poly.size()];
        twice += a.x * b.y - b.x * a.y;
    }
    return 0.5 * std::abs(twice);
}

Mesh finish(RawMesh raw, const std::function<BoundaryKind(const Point&, const Point&)>& classify,
            std::span<const RegionSpec> regions)
{
    std::vector<Triangle> elements;
    elements.reserve(raw.elements.size());
    for (const auto& tri : raw.elements)
        elements.push_back(orient(raw.vertices, tri));

    // Boundary = edges with a single adjacent element.
    std::map<std::pair<int, int>, int> count;
    for (const Triangle& tri : elements)
        for (int k = 0; k < 3; ++k) {
            const int a = tri[k], b = tri[(k + 1) % 3];
            ++count[{std::min(a, b), std::max(a, b)}];
        }
    std::vector<BoundaryEdge> boundary;
    for (const Triangle& tri : elements)
        for (int k = 0; k < 3; ++k) {
            const int a = tri[k], b = tri[(k + 1) % 3];
            if (count[{std::min(a, b), std::max(a, b)}] == 1)
                boundary.push_back({{a, b}, classify(raw.vertices[a], raw.vertices[b])});
        }

    std::vector<int> region_of(elements.size(), 0);
    for (std::size_t r = 0; r < regions.size(); ++r) {
        const RegionSpec& spec = regions[r];
        if (spec.id <= 0)
            throw InputError("region ids must be positive (0 is the background), got " + std::to_string(spec.id));
        for (std::size_t q = 0; q < r; ++q)
            if (regions[q].id == spec.id)
                throw InputError("duplicate region id " + std::to_string(spec.id));
        if (spec.polygon.size() < 3)
            throw InputError("region " + std::to_string(spec.id) + ": polygon needs at least three points");
    }
    for (std::size_t t = 0; t < elements.size(); ++t) {
        const Triangle& tri = elements[t];
        const Point& a = raw.vertices[tri[0]];
        const Point& b = raw.vertices[tri[1]];
        const Point& c = raw.vertices[tri[2]];
        const Point centroid{(a.x + b.x + c.x) / 3.0, (a.y + b.y + c.y) / 3.0};
        for (const RegionSpec& spec : regions)
            if (in_polygon(centroid, spec.polygon, false)) {
                region_of[t] = spec.id;
                break;
            }
    }
    // A region is resolved when the elements assigned to it lie inside its
    // polygon and their total area equals the polygon area.
    for (const RegionSpec& spec : regions) {
        double covered = 0.0;
        for (std::size_t t = 0; t < elements.size(); ++t) {
            if (region_of[t] != spec.id)
                continue;
            const Triangle& tri = elements[t];
            for (int v : tri)
                if (!in_polygon(raw.vertices[v], spec.polygon, true))
                    throw InputError("region " + std::to_string(spec.id) +
                                     " is not resolved by the initial mesh: an element straddles its boundary");
            covered += signed_area(raw.vertices[tri[0]], raw.vertices[tri[1]], raw.vertices[tri[2]]);
        }
        const double expected = polygon_area(spec.polygon);
        if (std::abs(covered - expected) > 1e-10 * std::max(1.0, expected))
            throw InputError("region " + std::to_string(spec.id) +
                             " is not resolved by the initial mesh: covered area " + format_double(covered) +
                             " differs from polygon area " + format_double(expected) +
                             " (region overlaps another, leaves the domain, or cuts elements)");
    }

    return Mesh(std::move(raw.vertices), std::move(elements), std::move(boundary), std::move(region_of));
}

}  // namespace

RegionSpec RegionSpec::rectangle(int id, double x0, double y0, double x1, double y1)
{
    return RegionSpec{id, {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}}};
}

Mesh make_initial_mesh(const DomainSpec& domain, std::span<const RegionSpec> regions)
{
    if (const auto* square = std::get_if<UnitSquareSpec>(&domain)) {
        if (square->cells < 1)
            throw InputError("unit_square: cells must be >= 1");
        RawMesh raw;
        add_grid_cells(raw, 0.0, 0.0, 1.0, square->cells, square->pattern);
        return finish(std::move(raw), [](const Point&, const Point&) { return BoundaryKind::dirichlet; }, regions);
    }
    if (const auto* z = std::get_if<ZShapeSpec>(&domain)) {
        if (z->cells < 2 || z->cells % 2 != 0)
            throw InputError("z_shape: cells must be even and >= 2");
        RawMesh raw;
        add_grid_cells(raw, -1.0, -1.0, 2.0, z->cells, UnitSquareSpec::Pattern::criss_cross);
        // Remove conv{(0,0), (-1,0), (-1,-1)}: x < 0, y < 0, y > x.
        std::erase_if(raw.elements, [&](const std::array<int, 3>& tri) {
            const Point& a = raw.vertices[tri[0]];
            const Point& b = raw.vertices[tri[1]];
            const Point& c = raw.vertices[tri[2]];
            const double x = (a.x + b.x + c.x) / 3.0, y = (a.y + b.y + c.y) / 3.0;
            return x < 0.0 && y < 0.0 && y > x;
        });
        compact(raw);
        const Point origin{0.0, 0.0}, left{-1.0, 0.0}, corner{-1.0, -1.0};
        auto classify = [&](const Point& a, const Point& b) {
            const bool on_first = on_segment(a, left, origin) && on_segment(b, left, origin);
            const bool on_second = on_segment(a, origin, corner) && on_segment(b, origin, corner);
            return (on_first || on_second) ? BoundaryKind::dirichlet : BoundaryKind::neumann;
        };
        return finish(std::move(raw), classify, regions);
    }
    const auto& spec = std::get<ExplicitMeshSpec>(domain);
    RawMesh raw{spec.vertices, spec.elements};
    for (const auto& tri : raw.elements)
        for (int v : tri)
            if (v < 0 || v >= static_cast<int>(raw.vertices.size()))
                throw InputError("explicit mesh: vertex index " + std::to_string(v) + " out of range");
    auto classify = [&](const Point& a, const Point& b) {
        for (const auto& edge : spec.neumann) {
            const Point& p = spec.vertices.at(edge[0]);
            const Point& q = spec.vertices.at(edge[1]);
            const bool same = (squared_length(a, p) == 0.0 && squared_length(b, q) == 0.0) ||
                              (squared_length(a, q) == 0.0 && squared_length(b, p) == 0.0);
            if (same)
                return BoundaryKind::neumann;
        }
        return BoundaryKind::dirichlet;
    };
    return finish(std::move(raw), classify, regions);
}

}  // namespace mgafem
