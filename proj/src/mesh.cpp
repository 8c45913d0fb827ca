#include "pgfem/mesh.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>
#include <utility>

namespace pgfem {

namespace {

using EdgeKey = std::pair<int, int>;

EdgeKey edge_key(int a, int b) { return a < b ? EdgeKey{a, b} : EdgeKey{b, a}; }

double signed_area(const Point& a, const Point& b, const Point& c) {
    return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) - (c.x() - a.x()) * (b.y() - a.y()));
}

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& token) {
    double v = 0.0;
    auto res = std::from_chars(token.data(), token.data() + token.size(), v);
    if (res.ec != std::errc() || res.ptr != token.data() + token.size())
        throw Error(ErrorCode::ParseError, "bad coordinate '" + token + "'");
    return v;
}

// Vertex numbering for the polar generators: node (i, j) with i the angular
// index and j the radial index.
struct PolarGrid {
    int ni;
    int nj;
    int index(int i, int j) const { return j * (ni + 1) + i; }
};

}  // namespace

TriMesh make_mesh(std::vector<Point> vertices, std::vector<std::array<int, 3>> triangles,
                  std::vector<BoundaryEdge> boundary_edges) {
    TriMesh mesh;
    mesh.vertices = std::move(vertices);
    mesh.triangles = std::move(triangles);
    mesh.boundary_edges = std::move(boundary_edges);
    const int nv = static_cast<int>(mesh.vertices.size());
    mesh.h_per_element.resize(mesh.triangles.size());
    mesh.rho_per_element.resize(mesh.triangles.size());
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
        auto& tri = mesh.triangles[t];
        for (int v : tri)
            if (v < 0 || v >= nv)
                throw Error(ErrorCode::MeshAssumptionViolated, "triangle " + std::to_string(t) + " has a bad vertex index");
        double area = signed_area(mesh.vertices[tri[0]], mesh.vertices[tri[1]], mesh.vertices[tri[2]]);
        if (area < 0.0) {
            std::swap(tri[1], tri[2]);
            area = -area;
        }
        if (!(area > 0.0))
            throw Error(ErrorCode::MeshAssumptionViolated, "triangle " + std::to_string(t) + " is degenerate");
        double perimeter = 0.0;
        double diam = 0.0;
        for (int i = 0; i < 3; ++i) {
            const double len = (mesh.vertices[tri[(i + 1) % 3]] - mesh.vertices[tri[i]]).norm();
            perimeter += len;
            diam = std::max(diam, len);
        }
        mesh.h_per_element[t] = diam;
        mesh.rho_per_element[t] = 2.0 * area / perimeter;
    }
    return mesh;
}

namespace {

TriMesh square_ring_ellipse(int J, double e) {
    const PolarGrid grid{J, J};
    std::vector<Point> vertices;
    vertices.reserve(static_cast<std::size_t>((J + 1) * (J + 1)));
    for (int j = 0; j <= J; ++j) {
        for (int i = 0; i <= J; ++i) {
            const int ring = std::max(i, j);
            if (ring == 0) {
                vertices.emplace_back(0.0, 0.0);
                continue;
            }
            // position along the L-shaped ring: 0 on the x axis, 2 on the y axis
            const double s = i == ring ? static_cast<double>(j) / ring : 2.0 - static_cast<double>(i) / ring;
            const double theta = 0.25 * std::numbers::pi * s;
            double c = std::cos(theta), sn = std::sin(theta);
            if (i == 0) c = 0.0;
            if (j == 0) sn = 0.0;
            const double radius = 1.0 / std::sqrt(c * c / (e * e) + sn * sn);
            const double rho = static_cast<double>(ring) / J;
            vertices.emplace_back(rho * radius * c, rho * radius * sn);
        }
    }

    std::vector<std::array<int, 3>> triangles;
    triangles.reserve(static_cast<std::size_t>(2 * J * J));
    for (int j = 0; j < J; ++j) {
        for (int i = 0; i < J; ++i) {
            triangles.push_back({grid.index(i, j), grid.index(i + 1, j), grid.index(i + 1, j + 1)});
            triangles.push_back({grid.index(i, j), grid.index(i + 1, j + 1), grid.index(i, j + 1)});
        }
    }

    std::vector<BoundaryEdge> edges;
    for (int m = 0; m < J; ++m) {
        edges.push_back({{grid.index(J, m), grid.index(J, m + 1)}, EdgeTag::dirichlet_curved});
        edges.push_back({{grid.index(m, J), grid.index(m + 1, J)}, EdgeTag::dirichlet_curved});
        edges.push_back({{grid.index(m, 0), grid.index(m + 1, 0)}, EdgeTag::symmetry_straight});
        edges.push_back({{grid.index(0, m), grid.index(0, m + 1)}, EdgeTag::symmetry_straight});
    }
    return make_mesh(std::move(vertices), std::move(triangles), std::move(edges));
}

TriMesh polar_fan_ellipse(int J, double e) {
    // Ring j = 0 collapses to the origin, stored as vertex 0; ring j >= 1 has
    // J + 1 vertices.
    auto index = [J](int i, int j) { return j == 0 ? 0 : 1 + (j - 1) * (J + 1) + i; };
    std::vector<Point> vertices;
    vertices.reserve(static_cast<std::size_t>(J * J + J + 1));
    vertices.emplace_back(0.0, 0.0);
    for (int j = 1; j <= J; ++j) {
        const double r = static_cast<double>(j) / J;
        for (int i = 0; i <= J; ++i) {
            const double theta = 0.5 * std::numbers::pi * i / J;
            double c = std::cos(theta), s = std::sin(theta);
            if (i == J) c = 0.0;
            if (i == 0) s = 0.0;
            vertices.emplace_back(e * r * c, r * s);
        }
    }

    std::vector<std::array<int, 3>> triangles;
    triangles.reserve(static_cast<std::size_t>(2 * J * J - J));
    for (int i = 0; i < J; ++i) triangles.push_back({index(i, 0), index(i, 1), index(i + 1, 1)});
    for (int j = 1; j < J; ++j) {
        for (int i = 0; i < J; ++i) {
            triangles.push_back({index(i, j), index(i + 1, j), index(i + 1, j + 1)});
            triangles.push_back({index(i, j), index(i + 1, j + 1), index(i, j + 1)});
        }
    }

    std::vector<BoundaryEdge> edges;
    for (int i = 0; i < J; ++i) edges.push_back({{index(i, J), index(i + 1, J)}, EdgeTag::dirichlet_curved});
    for (int j = 0; j < J; ++j) {
        edges.push_back({{index(0, j), index(0, j + 1)}, EdgeTag::symmetry_straight});
        edges.push_back({{index(J, j), index(J, j + 1)}, EdgeTag::symmetry_straight});
    }
    return make_mesh(std::move(vertices), std::move(triangles), std::move(edges));
}

}  // namespace

TriMesh gen_quarter_ellipse_mesh(int J, double e, EllipseLayout layout) {
    if (J < 1) throw Error(ErrorCode::InvalidParam, "J must be >= 1");
    if (!(e > 0.0 && e <= 1.0)) throw Error(ErrorCode::InvalidParam, "e must lie in (0,1]");
    return layout == EllipseLayout::square_rings ? square_ring_ellipse(J, e) : polar_fan_ellipse(J, e);
}

TriMesh gen_quarter_annulus_mesh(int I, int J, double e, AngularRange range) {
    if (I < 1 || J < 1) throw Error(ErrorCode::InvalidParam, "I and J must be >= 1");
    if (!(e > 0.0 && e < 1.0)) throw Error(ErrorCode::InvalidParam, "e must lie in (0,1)");
    const double theta_max = range == AngularRange::half_pi ? 0.5 * std::numbers::pi : 0.25 * std::numbers::pi;
    const PolarGrid grid{I, J};

    std::vector<Point> vertices;
    vertices.reserve(static_cast<std::size_t>((I + 1) * (J + 1)));
    for (int j = 0; j <= J; ++j) {
        const double r = e + (1.0 - e) * j / J;
        for (int i = 0; i <= I; ++i) {
            const double theta = theta_max * i / I;
            double c = std::cos(theta), s = std::sin(theta);
            if (i == I && range == AngularRange::half_pi) c = 0.0;
            if (i == 0) s = 0.0;
            vertices.emplace_back(r * c, r * s);
        }
    }

    std::vector<std::array<int, 3>> triangles;
    triangles.reserve(static_cast<std::size_t>(2 * I * J));
    for (int j = 0; j < J; ++j) {
        for (int i = 0; i < I; ++i) {
            triangles.push_back({grid.index(i, j), grid.index(i + 1, j), grid.index(i + 1, j + 1)});
            triangles.push_back({grid.index(i, j), grid.index(i + 1, j + 1), grid.index(i, j + 1)});
        }
    }

    std::vector<BoundaryEdge> edges;
    for (int i = 0; i < I; ++i) {
        edges.push_back({{grid.index(i, 0), grid.index(i + 1, 0)}, EdgeTag::dirichlet_curved});
        edges.push_back({{grid.index(i, J), grid.index(i + 1, J)}, EdgeTag::dirichlet_curved});
    }
    for (int j = 0; j < J; ++j) {
        edges.push_back({{grid.index(0, j), grid.index(0, j + 1)}, EdgeTag::symmetry_straight});
        edges.push_back({{grid.index(I, j), grid.index(I, j + 1)}, EdgeTag::symmetry_straight});
    }
    return make_mesh(std::move(vertices), std::move(triangles), std::move(edges));
}

TriMesh gen_rectangle_mesh(int J, double x0, double x1, double y0, double y1) {
    if (J < 1) throw Error(ErrorCode::InvalidParam, "J must be >= 1");
    const PolarGrid grid{J, J};
    std::vector<Point> vertices;
    for (int j = 0; j <= J; ++j)
        for (int i = 0; i <= J; ++i)
            vertices.emplace_back(x0 + (x1 - x0) * i / J, y0 + (y1 - y0) * j / J);
    std::vector<std::array<int, 3>> triangles;
    for (int j = 0; j < J; ++j) {
        for (int i = 0; i < J; ++i) {
            triangles.push_back({grid.index(i, j), grid.index(i + 1, j), grid.index(i + 1, j + 1)});
            triangles.push_back({grid.index(i, j), grid.index(i + 1, j + 1), grid.index(i, j + 1)});
        }
    }
    std::vector<BoundaryEdge> edges;
    for (int i = 0; i < J; ++i) {
        edges.push_back({{grid.index(i, 0), grid.index(i + 1, 0)}, EdgeTag::dirichlet_curved});
        edges.push_back({{grid.index(i, J), grid.index(i + 1, J)}, EdgeTag::dirichlet_curved});
        edges.push_back({{grid.index(0, i), grid.index(0, i + 1)}, EdgeTag::dirichlet_curved});
        edges.push_back({{grid.index(J, i), grid.index(J, i + 1)}, EdgeTag::dirichlet_curved});
    }
    return make_mesh(std::move(vertices), std::move(triangles), std::move(edges));
}

void validate_mesh(const TriMesh& mesh, const BoundaryGeometry& geom, double tol) {
    std::map<EdgeKey, int> uses;
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
        const auto c = mesh.corners(t);
        if (!(signed_area(c[0], c[1], c[2]) > 0.0))
            throw Error(ErrorCode::MeshAssumptionViolated, "triangle " + std::to_string(t) + " is not counterclockwise");
        const auto& tri = mesh.triangles[t];
        for (int i = 0; i < 3; ++i) ++uses[edge_key(tri[i], tri[(i + 1) % 3])];
    }
    std::map<EdgeKey, EdgeTag> tagged;
    for (const auto& be : mesh.boundary_edges) {
        const auto key = edge_key(be.v[0], be.v[1]);
        auto it = uses.find(key);
        if (it == uses.end() || it->second != 1)
            throw Error(ErrorCode::MeshAssumptionViolated,
                        "tagged edge (" + std::to_string(key.first) + "," + std::to_string(key.second) +
                            ") is not a boundary edge of the triangulation");
        tagged.emplace(key, be.tag);
        if (be.tag == EdgeTag::dirichlet_curved && geom.is_curved()) {
            for (int v : be.v) {
                if (std::abs(geom.value(mesh.vertices[v])) > tol)
                    throw Error(ErrorCode::MeshAssumptionViolated,
                                "vertex " + std::to_string(v) + " of a curved edge is off the boundary");
            }
        }
    }
    for (const auto& [key, count] : uses) {
        if (count > 2)
            throw Error(ErrorCode::MeshAssumptionViolated, "edge shared by more than two triangles");
        if (count == 1 && !tagged.count(key))
            throw Error(ErrorCode::MeshAssumptionViolated,
                        "untagged boundary edge (" + std::to_string(key.first) + "," + std::to_string(key.second) +
                            "); mesh is not conforming or tags are incomplete");
    }
}

TriMesh classify_elements(TriMesh mesh, const BoundaryGeometry& geom) {
    mesh.element_class.assign(mesh.triangles.size(), ElementClass{});
    if (!geom.is_curved()) return mesh;

    std::map<EdgeKey, EdgeTag> tags;
    for (const auto& be : mesh.boundary_edges) tags[edge_key(be.v[0], be.v[1])] = be.tag;
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
        const auto& tri = mesh.triangles[t];
        for (int i = 0; i < 3; ++i) {
            auto it = tags.find(edge_key(tri[i], tri[(i + 1) % 3]));
            if (it == tags.end() || it->second != EdgeTag::dirichlet_curved) continue;
            if (mesh.element_class[t].is_boundary())
                throw Error(ErrorCode::MeshAssumptionViolated,
                            "triangle " + std::to_string(t) + " has more than one edge on the curved boundary");
            mesh.element_class[t].boundary_edge = i;
        }
    }
    return mesh;
}

std::size_t count_boundary_elements(const TriMesh& mesh) {
    return static_cast<std::size_t>(std::count_if(mesh.element_class.begin(), mesh.element_class.end(),
                                                  [](const ElementClass& c) { return c.is_boundary(); }));
}

MeshStats mesh_stats(const TriMesh& mesh) {
    if (mesh.triangles.empty()) throw Error(ErrorCode::InvalidParam, "empty mesh");
    MeshStats s{0.0, 0.0, mesh.n_triangles(), mesh.n_vertices(), mesh.h_per_element.front()};
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
        s.h = std::max(s.h, mesh.h_per_element[t]);
        s.min_h = std::min(s.min_h, mesh.h_per_element[t]);
        s.gamma = std::max(s.gamma, mesh.h_per_element[t] / mesh.rho_per_element[t]);
    }
    return s;
}

void write_mesh(std::ostream& out, const TriMesh& mesh) {
    out << mesh.vertices.size() << ' ' << mesh.triangles.size() << ' ' << mesh.boundary_edges.size() << '\n';
    for (const auto& p : mesh.vertices) out << format_double(p.x()) << ' ' << format_double(p.y()) << '\n';
    for (const auto& t : mesh.triangles) out << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
    for (const auto& be : mesh.boundary_edges)
        out << be.v[0] << ' ' << be.v[1] << ' ' << (be.tag == EdgeTag::dirichlet_curved ? 'D' : 'S') << '\n';
}

TriMesh read_mesh(std::istream& in) {
    std::size_t nv = 0, nt = 0, nb = 0;
    if (!(in >> nv >> nt >> nb)) throw Error(ErrorCode::ParseError, "missing mesh header");
    std::vector<Point> vertices(nv);
    for (auto& p : vertices) {
        std::string xs, ys;
        if (!(in >> xs >> ys)) throw Error(ErrorCode::ParseError, "truncated vertex list");
        p = Point(parse_double(xs), parse_double(ys));
    }
    std::vector<std::array<int, 3>> triangles(nt);
    for (auto& t : triangles)
        if (!(in >> t[0] >> t[1] >> t[2])) throw Error(ErrorCode::ParseError, "truncated triangle list");
    std::vector<BoundaryEdge> edges(nb);
    for (auto& be : edges) {
        std::string tag;
        if (!(in >> be.v[0] >> be.v[1] >> tag)) throw Error(ErrorCode::ParseError, "truncated boundary edge list");
        if (tag == "D")
            be.tag = EdgeTag::dirichlet_curved;
        else if (tag == "S")
            be.tag = EdgeTag::symmetry_straight;
        else
            throw Error(ErrorCode::ParseError, "unknown edge tag '" + tag + "'");
        for (int v : be.v)
            if (v < 0 || static_cast<std::size_t>(v) >= nv)
                throw Error(ErrorCode::ParseError, "boundary edge vertex out of range");
    }
    return make_mesh(std::move(vertices), std::move(triangles), std::move(edges));
}

void write_mesh_file(const std::string& path, const TriMesh& mesh) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::InvalidParam, "cannot open " + path);
    write_mesh(out, mesh);
}

TriMesh read_mesh_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::InvalidParam, "cannot open " + path);
    return read_mesh(in);
}

}  // namespace pgfem
