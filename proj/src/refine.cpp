#include "mgafem/mesh.hpp"

#include <deque>

namespace mgafem {

namespace {

struct Builder {
    const Mesh& mesh;
    const std::vector<int>& midpoint;  // per old edge, -1 if not bisected
    std::vector<Triangle> elements;
    std::vector<int> regions;
    std::vector<int> generations;
    std::vector<int> parent;

    int midpoint_of(int a, int b) const
    {
        const int e = mesh.find_edge(a, b);
        return e < 0 ? -1 : midpoint[e];
    }

    // Bisect while the refinement edge (a, b) carries a midpoint. Children of
    // (a, b, c) with midpoint m are (c, a, m) and (b, c, m).
    void emit(const Triangle& tri, int generation, int old)
    {
        const int m = midpoint_of(tri[0], tri[1]);
        if (m < 0) {
            elements.push_back(tri);
            regions.push_back(mesh.region(old));
            generations.push_back(generation);
            parent.push_back(old);
            return;
        }
        emit({tri[2], tri[0], m}, generation + 1, old);
        emit({tri[1], tri[2], m}, generation + 1, old);
    }
};

RefineResult bisect_marked_edges(const Mesh& mesh, std::vector<char> edge_marked)
{
    // Closure: an element with any marked edge must have its refinement edge marked.
    std::deque<int> queue;
    for (int t = 0; t < mesh.num_elements(); ++t)
        for (int e : mesh.element_edges(t))
            if (edge_marked[e]) {
                queue.push_back(t);
                break;
            }
    while (!queue.empty()) {
        const int t = queue.front();
        queue.pop_front();
        const int ref = mesh.refinement_edge(t);
        if (edge_marked[ref])
            continue;
        edge_marked[ref] = 1;
        for (int nb : mesh.edge_elements(ref))
            if (nb != kNoElement && nb != t)
                queue.push_back(nb);
    }

    std::vector<Point> vertices(mesh.vertices().begin(), mesh.vertices().end());
    std::vector<int> midpoint(mesh.num_edges(), -1);
    for (int e = 0; e < mesh.num_edges(); ++e) {
        if (!edge_marked[e])
            continue;
        const Point& a = mesh.vertex(mesh.edge_vertices(e)[0]);
        const Point& b = mesh.vertex(mesh.edge_vertices(e)[1]);
        midpoint[e] = static_cast<int>(vertices.size());
        vertices.push_back({0.5 * (a.x + b.x), 0.5 * (a.y + b.y)});
    }

    Builder builder{mesh, midpoint, {}, {}, {}, {}};
    builder.elements.reserve(mesh.num_elements() * 2);
    for (int t = 0; t < mesh.num_elements(); ++t)
        builder.emit(mesh.element(t), mesh.generation(t), t);

    std::vector<BoundaryEdge> boundary;
    boundary.reserve(mesh.boundary_edges().size() + 8);
    for (const BoundaryEdge& be : mesh.boundary_edges()) {
        const int m = builder.midpoint_of(be.vertices[0], be.vertices[1]);
        if (m < 0) {
            boundary.push_back(be);
        } else {
            boundary.push_back({{be.vertices[0], m}, be.kind});
            boundary.push_back({{m, be.vertices[1]}, be.kind});
        }
    }

    Mesh refined(std::move(vertices), std::move(builder.elements), std::move(boundary),
                 std::move(builder.regions), std::move(builder.generations));
    return {std::move(refined), std::move(builder.parent)};
}

}  // namespace

RefineResult refine_nvb(const Mesh& mesh, const MarkSet& marked)
{
    if (!marked.empty() && marked.elements().back() >= mesh.num_elements())
        throw InputError("refine_nvb: mark set does not belong to this mesh");
    std::vector<char> edge_marked(mesh.num_edges(), 0);
    for (int t : marked.elements())
        edge_marked[mesh.refinement_edge(t)] = 1;
    return bisect_marked_edges(mesh, std::move(edge_marked));
}

RefineResult refine_uniform(const Mesh& mesh)
{
    return bisect_marked_edges(mesh, std::vector<char>(mesh.num_edges(), 1));
}

}  // namespace mgafem
