#include "mgafem/mesh.hpp"

#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace mgafem {

void write_mesh(std::ostream& os, const Mesh& mesh)
{
    os << "VERTICES\n";
    for (const Point& p : mesh.vertices())
        os << format_double(p.x) << ' ' << format_double(p.y) << '\n';
    os << "ELEMENTS\n";
    for (int t = 0; t < mesh.num_elements(); ++t) {
        const Triangle& tri = mesh.element(t);
        os << tri[0] << ' ' << tri[1] << ' ' << tri[2] << ' ' << mesh.region(t) << '\n';
    }
    os << "BOUNDARY\n";
    for (const BoundaryEdge& be : mesh.boundary_edges())
        os << be.vertices[0] << ' ' << be.vertices[1] << ' '
           << (be.kind == BoundaryKind::dirichlet ? "Dirichlet" : "Neumann") << '\n';
}

Mesh read_mesh(std::istream& is)
{
    enum class Section { none, vertices, elements, boundary, other } section = Section::none;
    std::vector<Point> vertices;
    std::vector<Triangle> elements;
    std::vector<int> regions;
    std::vector<BoundaryEdge> boundary;

    std::string line;
    int line_no = 0;
    auto fail = [&](const std::string& what) {
        throw InputError("mesh dump line " + std::to_string(line_no) + ": " + what);
    };
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty())
            continue;
        if (line == "VERTICES") { section = Section::vertices; continue; }
        if (line == "ELEMENTS") { section = Section::elements; continue; }
        if (line == "BOUNDARY") { section = Section::boundary; continue; }
        if (line == "VALUES") { section = Section::other; continue; }
        std::istringstream row(line);
        switch (section) {
        case Section::vertices: {
            Point p;
            if (!(row >> p.x >> p.y))
                fail("expected 'x y'");
            vertices.push_back(p);
            break;
        }
        case Section::elements: {
            Triangle tri;
            int region = 0;
            if (!(row >> tri[0] >> tri[1] >> tri[2] >> region))
                fail("expected 'v0 v1 v2 region'");
            elements.push_back(tri);
            regions.push_back(region);
            break;
        }
        case Section::boundary: {
            BoundaryEdge be;
            std::string label;
            if (!(row >> be.vertices[0] >> be.vertices[1] >> label))
                fail("expected 'v0 v1 label'");
            if (label == "Dirichlet")
                be.kind = BoundaryKind::dirichlet;
            else if (label == "Neumann")
                be.kind = BoundaryKind::neumann;
            else
                fail("unknown boundary label '" + label + "'");
            boundary.push_back(be);
            break;
        }
        case Section::other:
            break;
        case Section::none:
            fail("data before the first section header");
        }
    }
    return Mesh(std::move(vertices), std::move(elements), std::move(boundary), std::move(regions));
}

}  // namespace mgafem
