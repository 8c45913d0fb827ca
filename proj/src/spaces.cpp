#include "pgfem/spaces.hpp"

#include <cmath>
#include <map>
#include <string>
#include <tuple>
#include <unordered_map>

namespace pgfem {

namespace {

std::vector<std::array<int, 3>> lattice_indices(int k) {
    std::vector<std::array<int, 3>> alphas{{k, 0, 0}, {0, k, 0}, {0, 0, k}};
    for (int e = 0; e < 3; ++e) {
        for (int s = 1; s < k; ++s) {
            std::array<int, 3> a{0, 0, 0};
            a[e] = k - s;
            a[(e + 1) % 3] = s;
            alphas.push_back(a);
        }
    }
    for (int i1 = 1; i1 < k; ++i1)
        for (int i2 = 1; i1 + i2 < k; ++i2) alphas.push_back({k - i1 - i2, i1, i2});
    return alphas;
}

void check_degree(int k) {
    if (k != 2 && k != 3) throw Error(ErrorCode::UnsupportedDegree, "degree " + std::to_string(k) + " (expected 2 or 3)");
}

}  // namespace

SpaceSpec SpaceSpec::for_degree(int k) {
    check_degree(k);
    return {k, (k + 2) * (k + 1) / 2, (k + 1) * k / 2};
}

LagrangeTriangle::LagrangeTriangle(const std::array<Point, 3>& corners, int k)
    : corners_(corners), k_(k), alphas_(lattice_indices(k)) {
    check_degree(k);
    Eigen::Matrix2d jac;
    jac.col(0) = corners[1] - corners[0];
    jac.col(1) = corners[2] - corners[0];
    const double det = jac.determinant();
    if (det == 0.0) throw Error(ErrorCode::InvalidParam, "degenerate triangle");
    to_bary_ = jac.inverse();
    grad_bary_[1] = to_bary_.row(0).transpose();
    grad_bary_[2] = to_bary_.row(1).transpose();
    grad_bary_[0] = -grad_bary_[1] - grad_bary_[2];
}

std::array<double, 3> LagrangeTriangle::barycentric(const Point& p) const {
    const Eigen::Vector2d l = to_bary_ * (p - corners_[0]);
    return {1.0 - l[0] - l[1], l[0], l[1]};
}

// phi_alpha = prod_a prod_{m < alpha_a} (k lambda_a - m) / (m + 1)
Eigen::VectorXd LagrangeTriangle::values(const Point& p) const {
    const auto lambda = barycentric(p);
    Eigen::VectorXd out(size());
    for (int n = 0; n < size(); ++n) {
        double v = 1.0;
        for (int a = 0; a < 3; ++a)
            for (int m = 0; m < alphas_[n][a]; ++m) v *= (k_ * lambda[a] - m) / (m + 1);
        out[n] = v;
    }
    return out;
}

Eigen::MatrixX2d LagrangeTriangle::gradients(const Point& p) const {
    const auto lambda = barycentric(p);
    Eigen::MatrixX2d out(size(), 2);
    for (int n = 0; n < size(); ++n) {
        std::array<double, 3> factor{};
        std::array<double, 3> dfactor{};
        for (int a = 0; a < 3; ++a) {
            double f = 1.0, df = 0.0;
            for (int m = 0; m < alphas_[n][a]; ++m) {
                const double term = (k_ * lambda[a] - m) / (m + 1);
                df = df * term + f * k_ / (m + 1);
                f *= term;
            }
            factor[a] = f;
            dfactor[a] = df;
        }
        Point g = dfactor[0] * factor[1] * factor[2] * grad_bary_[0] +
                  factor[0] * dfactor[1] * factor[2] * grad_bary_[1] +
                  factor[0] * factor[1] * dfactor[2] * grad_bary_[2];
        out.row(n) = g.transpose();
    }
    return out;
}

std::vector<Point> LagrangeTriangle::nodes() const {
    std::vector<Point> pts;
    pts.reserve(alphas_.size());
    for (const auto& a : alphas_)
        pts.push_back((a[0] * corners_[0] + a[1] * corners_[1] + a[2] * corners_[2]) / static_cast<double>(k_));
    return pts;
}

std::vector<Point> lagrange_layout(int k, const std::array<Point, 3>& T) {
    return LagrangeTriangle(T, k).nodes();
}

std::vector<Point> shift_boundary_nodes(const std::array<Point, 3>& T, int boundary_edge,
                                        const BoundaryGeometry& geom, int k, double tol) {
    const LagrangeTriangle element(T, k);
    std::vector<Point> nodes = element.nodes();
    if (!geom.is_curved()) return nodes;
    if (boundary_edge < 0 || boundary_edge > 2) throw Error(ErrorCode::InvalidParam, "bad boundary edge index");

    const Point& a = T[boundary_edge];
    const Point& origin = T[opposite_vertex(boundary_edge)];
    const std::size_t piece = geom.nearest_piece(a);
    for (int s = 1; s < k; ++s) {
        const int local = element.edge_node(boundary_edge, s);
        const RayIntersectionQuery query{origin, nodes[local]};
        nodes[local] = ray_boundary_intersection(geom, query, tol, piece).point;
    }
    return nodes;
}

LocalBasis build_local_basis(const std::array<Point, 3>& T, const std::vector<Point>& nodes, int k,
                             std::size_t element_id) {
    LagrangeTriangle reference(T, k);
    const int n = reference.size();
    if (static_cast<int>(nodes.size()) != n)
        throw Error(ErrorCode::InconsistentDof, "element " + std::to_string(element_id) + " node count mismatch");

    const std::vector<Point> standard = reference.nodes();
    bool moved = false;
    for (int i = 0; i < n; ++i) moved = moved || nodes[i] != standard[i];

    LocalBasis basis{element_id, reference, nodes, Eigen::MatrixXd::Identity(n, n), 0.0, moved};
    if (!moved) return basis;

    Eigen::MatrixXd kt(n, n);
    for (int i = 0; i < n; ++i) kt.row(i) = reference.values(nodes[i]).transpose();
    basis.kt_deviation = (kt - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff();

    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(kt);
    const auto& sv = svd.singularValues();
    const double smin = sv[n - 1];
    if (!(smin > 0.0) || sv[0] / smin > kMaxLocalCondition)
        throw Error(ErrorCode::SingularLocalSystem,
                    "element " + std::to_string(element_id) + ": local nodal system is numerically singular");
    basis.coeffs = kt.partialPivLu().inverse();
    return basis;
}

std::vector<LocalBasis> build_local_bases(const TriMesh& mesh, const BoundaryGeometry& geom, int k) {
    if (mesh.element_class.size() != mesh.n_triangles())
        throw Error(ErrorCode::InvalidParam, "mesh is not classified");
    std::vector<LocalBasis> bases;
    bases.reserve(mesh.n_triangles());
    for (std::size_t t = 0; t < mesh.n_triangles(); ++t) {
        const auto T = mesh.corners(t);
        const auto& cls = mesh.element_class[t];
        const auto nodes = cls.is_boundary() ? shift_boundary_nodes(T, cls.boundary_edge, geom, k)
                                             : lagrange_layout(k, T);
        bases.push_back(build_local_basis(T, nodes, k, t));
    }
    return bases;
}

namespace {

// Identity of a node independent of its coordinates: (kind, a, b, c).
using LogicalKey = std::tuple<int, int, int, int>;

class SpatialIndex {
public:
    explicit SpatialIndex(double cell) : cell_(cell) {}

    int find(const Point& p, const std::vector<Point>& coords, double tol) const {
        const auto [cx, cy] = cell_of(p);
        for (long long dx = -1; dx <= 1; ++dx) {
            for (long long dy = -1; dy <= 1; ++dy) {
                auto it = cells_.find(hash(cx + dx, cy + dy));
                if (it == cells_.end()) continue;
                for (int id : it->second)
                    if ((coords[id] - p).norm() <= tol) return id;
            }
        }
        return -1;
    }

    void insert(const Point& p, int id) {
        const auto [cx, cy] = cell_of(p);
        cells_[hash(cx, cy)].push_back(id);
    }

private:
    std::pair<long long, long long> cell_of(const Point& p) const {
        return {static_cast<long long>(std::floor(p.x() / cell_)), static_cast<long long>(std::floor(p.y() / cell_))};
    }
    static long long hash(long long x, long long y) { return x * 73856093LL ^ y * 19349663LL; }

    double cell_;
    std::unordered_map<long long, std::vector<int>> cells_;
};

}  // namespace

DofMap build_dof_map(const TriMesh& mesh, const std::vector<LocalBasis>& bases, int k,
                     const ScalarField& dirichlet_data) {
    const SpaceSpec spec = SpaceSpec::for_degree(k);
    if (bases.size() != mesh.n_triangles())
        throw Error(ErrorCode::InconsistentDof, "one local basis per element expected");

    std::map<std::pair<int, int>, bool> dirichlet_edges;
    std::vector<bool> dirichlet_vertex(mesh.n_vertices(), false);
    for (const auto& be : mesh.boundary_edges) {
        if (be.tag != EdgeTag::dirichlet_curved) continue;
        dirichlet_edges[{std::min(be.v[0], be.v[1]), std::max(be.v[0], be.v[1])}] = true;
        dirichlet_vertex[be.v[0]] = dirichlet_vertex[be.v[1]] = true;
    }

    DofMap map;
    map.k = k;
    std::vector<LogicalKey> keys;
    SpatialIndex index(1e3 * kNodeMergeTol);
    map.element_to_global.resize(mesh.n_triangles());

    for (std::size_t t = 0; t < mesh.n_triangles(); ++t) {
        const auto& tri = mesh.triangles[t];
        const auto& basis = bases[t];
        if (static_cast<int>(basis.nodes.size()) != spec.n_k)
            throw Error(ErrorCode::InconsistentDof, "element " + std::to_string(t) + " has the wrong local size");
        auto& globals = map.element_to_global[t];
        globals.resize(spec.n_k);

        for (int i = 0; i < spec.n_k; ++i) {
            LogicalKey key;
            bool on_boundary = false;
            if (i < 3) {
                key = {0, tri[i], 0, 0};
                on_boundary = dirichlet_vertex[tri[i]];
            } else if (i < 3 + 3 * (k - 1)) {
                const int edge = (i - 3) / (k - 1);
                const int s = (i - 3) % (k - 1) + 1;
                const int va = tri[edge], vb = tri[(edge + 1) % 3];
                const int from_min = va < vb ? s : k - s;
                key = {1, std::min(va, vb), std::max(va, vb), from_min};
                on_boundary = dirichlet_edges.count({std::min(va, vb), std::max(va, vb)}) > 0;
            } else {
                key = {2, static_cast<int>(t), i, 0};
            }

            const Point& p = basis.nodes[i];
            int id = index.find(p, map.node_coords, kNodeMergeTol);
            if (id >= 0) {
                if (keys[id] != key)
                    throw Error(ErrorCode::DuplicateNodeCollision,
                                "element " + std::to_string(t) + " node " + std::to_string(i) +
                                    " coincides with a different node");
            } else {
                id = static_cast<int>(map.node_coords.size());
                map.node_coords.push_back(p);
                map.node_status.push_back({on_boundary, on_boundary ? dirichlet_data(p) : 0.0});
                keys.push_back(key);
                index.insert(p, id);
            }
            globals[i] = id;
        }
    }

    map.unknown_of_node.assign(map.n_nodes(), -1);
    for (std::size_t n = 0; n < map.n_nodes(); ++n) {
        if (map.node_status[n].dirichlet) continue;
        map.unknown_of_node[n] = static_cast<int>(map.node_of_unknown.size());
        map.node_of_unknown.push_back(static_cast<int>(n));
    }
    return map;
}

Eigen::VectorXd expand_solution(const DofMap& dofmap, const Eigen::VectorXd& x) {
    if (static_cast<std::size_t>(x.size()) != dofmap.n_unknowns())
        throw Error(ErrorCode::DimensionMismatch, "solution size does not match the number of unknowns");
    Eigen::VectorXd nodal(dofmap.n_nodes());
    for (std::size_t n = 0; n < dofmap.n_nodes(); ++n) {
        const int u = dofmap.unknown_of_node[n];
        nodal[n] = u >= 0 ? x[u] : dofmap.node_status[n].value;
    }
    return nodal;
}

PointEval eval_uh(const DofMap& dofmap, const std::vector<LocalBasis>& bases, const Eigen::VectorXd& nodal,
                  std::size_t element, const Point& p) {
    const auto& globals = dofmap.element_to_global.at(element);
    const LocalBasis& basis = bases.at(element);
    Eigen::VectorXd local(globals.size());
    for (std::size_t i = 0; i < globals.size(); ++i) local[i] = nodal[globals[i]];
    const Eigen::VectorXd v = basis.values(p);
    const Eigen::MatrixX2d g = basis.gradients(p);
    return {v.dot(local), Point(g.col(0).dot(local), g.col(1).dot(local))};
}

}  // namespace pgfem
