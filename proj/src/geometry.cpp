#include "pgfem/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace pgfem {

namespace {

constexpr int kMaxRootIterations = 100;

double segment_distance(const Point& p, const Point& a, const Point& b, Point& closest) {
    const Point ab = b - a;
    const double len2 = ab.squaredNorm();
    double s = len2 > 0.0 ? (p - a).dot(ab) / len2 : 0.0;
    s = std::clamp(s, 0.0, 1.0);
    closest = a + s * ab;
    return (p - closest).norm();
}

bool polygon_contains(const std::vector<Point>& poly, const Point& p) {
    bool inside = false;
    const std::size_t n = poly.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const Point& a = poly[i];
        const Point& b = poly[j];
        if ((a.y() > p.y()) != (b.y() > p.y())) {
            const double x = (b.x() - a.x()) * (p.y() - a.y()) / (b.y() - a.y()) + a.x();
            if (p.x() < x) inside = !inside;
        }
    }
    return inside;
}

}  // namespace

BoundaryGeometry BoundaryGeometry::ellipse(double e) {
    if (!(e > 0.0)) throw Error(ErrorCode::InvalidParam, "ellipse parameter must be positive");
    return BoundaryGeometry(GeometryKind::ellipse, e, {});
}

BoundaryGeometry BoundaryGeometry::annulus(double e) {
    if (!(e > 0.0 && e < 1.0)) throw Error(ErrorCode::InvalidParam, "annulus inner radius must lie in (0,1)");
    return BoundaryGeometry(GeometryKind::annulus, e, {});
}

BoundaryGeometry BoundaryGeometry::polygon(std::vector<Point> vertices) {
    if (vertices.size() < 3) throw Error(ErrorCode::InvalidParam, "polygon needs at least 3 vertices");
    return BoundaryGeometry(GeometryKind::polygon, 0.0, std::move(vertices));
}

std::size_t BoundaryGeometry::piece_count() const noexcept {
    return kind_ == GeometryKind::annulus ? 2 : 1;
}

double BoundaryGeometry::piece_value(std::size_t piece, const Point& p) const {
    switch (kind_) {
        case GeometryKind::ellipse: {
            const double xs = p.x() / param_;
            return xs * xs + p.y() * p.y() - 1.0;
        }
        case GeometryKind::annulus: {
            const double r = p.norm();
            return piece == 0 ? r - 1.0 : param_ - r;
        }
        case GeometryKind::polygon: {
            double best = std::numeric_limits<double>::infinity();
            Point closest;
            for (std::size_t i = 0; i < vertices_.size(); ++i) {
                const Point& a = vertices_[i];
                const Point& b = vertices_[(i + 1) % vertices_.size()];
                best = std::min(best, segment_distance(p, a, b, closest));
            }
            return polygon_contains(vertices_, p) ? -best : best;
        }
    }
    return 0.0;
}

Point BoundaryGeometry::piece_gradient(std::size_t piece, const Point& p) const {
    switch (kind_) {
        case GeometryKind::ellipse:
            return Point(2.0 * p.x() / (param_ * param_), 2.0 * p.y());
        case GeometryKind::annulus: {
            const double r = p.norm();
            if (r == 0.0) return Point::Zero();
            const Point radial = p / r;
            return piece == 0 ? radial : Point(-radial);
        }
        case GeometryKind::polygon: {
            double best = std::numeric_limits<double>::infinity();
            Point nearest = p;
            for (std::size_t i = 0; i < vertices_.size(); ++i) {
                Point closest;
                const double d = segment_distance(p, vertices_[i], vertices_[(i + 1) % vertices_.size()], closest);
                if (d < best) {
                    best = d;
                    nearest = closest;
                }
            }
            if (best == 0.0) return Point::Zero();
            const Point away = (p - nearest) / best;
            return polygon_contains(vertices_, p) ? Point(-away) : away;
        }
    }
    return Point::Zero();
}

double BoundaryGeometry::value(const Point& p) const {
    double g = piece_value(0, p);
    for (std::size_t i = 1; i < piece_count(); ++i) g = std::max(g, piece_value(i, p));
    return g;
}

Point BoundaryGeometry::gradient(const Point& p) const {
    std::size_t active = 0;
    double g = piece_value(0, p);
    for (std::size_t i = 1; i < piece_count(); ++i) {
        const double gi = piece_value(i, p);
        if (gi > g) {
            g = gi;
            active = i;
        }
    }
    return piece_gradient(active, p);
}

std::size_t BoundaryGeometry::nearest_piece(const Point& p) const {
    std::size_t best = 0;
    double best_abs = std::abs(piece_value(0, p));
    for (std::size_t i = 1; i < piece_count(); ++i) {
        const double gi = std::abs(piece_value(i, p));
        if (gi < best_abs) {
            best_abs = gi;
            best = i;
        }
    }
    return best;
}

PointClass classify_point(const BoundaryGeometry& geom, const Point& p, double tol) {
    const double g = geom.value(p);
    if (std::abs(g) <= tol) return PointClass::on_boundary;
    return g < -tol ? PointClass::inside : PointClass::outside;
}

RayIntersection ray_boundary_intersection(const BoundaryGeometry& geom,
                                          const RayIntersectionQuery& query,
                                          double tol,
                                          std::optional<std::size_t> piece) {
    if (!(tol > 0.0)) throw Error(ErrorCode::InvalidParam, "tolerance must be positive");
    if (!(query.t_min < 1.0 && query.t_max > 1.0))
        throw Error(ErrorCode::InvalidParam, "bracket must contain t = 1");
    const std::size_t pc = piece.value_or(geom.nearest_piece(query.through));
    if (pc >= geom.piece_count()) throw Error(ErrorCode::InvalidParam, "no such boundary piece");
    if (!(geom.piece_value(pc, query.origin) < 0.0))
        throw Error(ErrorCode::InvalidParam, "ray origin is not inside the domain");

    const Point dir = query.through - query.origin;
    auto at = [&](double t) -> Point { return query.origin + t * dir; };
    auto phi = [&](double t) { return geom.piece_value(pc, at(t)); };
    auto dphi = [&](double t) { return geom.piece_gradient(pc, at(t)).dot(dir); };

    const double f1 = phi(1.0);
    if (std::abs(f1) <= tol) return {query.through, 1.0, 0};

    // Widen a window around t = 1 until one side shows a sign change, so the
    // root found is the one nearest to the subdivision point.
    double lo = 0.0, hi = 0.0, flo = 0.0, fhi = 0.0;
    bool bracketed = false;
    const double reach = std::max(1.0 - query.t_min, query.t_max - 1.0);
    for (double width = reach / 64.0;; width *= 2.0) {
        const double a = std::max(query.t_min, 1.0 - width);
        const double b = std::min(query.t_max, 1.0 + width);
        const double fa = phi(a);
        const double fb = phi(b);
        if ((fa < 0.0) != (f1 < 0.0) || std::abs(fa) <= tol) {
            lo = a, hi = 1.0, flo = fa, fhi = f1;
            bracketed = true;
        } else if ((fb < 0.0) != (f1 < 0.0) || std::abs(fb) <= tol) {
            lo = 1.0, hi = b, flo = f1, fhi = fb;
            bracketed = true;
        }
        if (bracketed || (a <= query.t_min && b >= query.t_max)) break;
    }
    if (!bracketed) throw Error(ErrorCode::NoRootInBracket, "g has no sign change along the ray");
    if (std::abs(flo) <= tol) return {at(lo), lo, 0};
    if (std::abs(fhi) <= tol) return {at(hi), hi, 0};

    double t = (std::abs(flo) < std::abs(fhi)) ? lo : hi;
    double ft = phi(t);
    for (int it = 1; it <= kMaxRootIterations; ++it) {
        const double slope = dphi(t);
        double next = slope != 0.0 ? t - ft / slope : lo - 1.0;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        t = next;
        ft = phi(t);
        if (std::abs(ft) <= tol) return {at(t), t, it};
        if ((ft < 0.0) == (flo < 0.0)) {
            lo = t;
            flo = ft;
        } else {
            hi = t;
        }
        if (hi - lo <= std::numeric_limits<double>::epsilon() * hi) break;
    }
    throw Error(ErrorCode::NoConvergence, "root iteration did not reach |g| <= " + std::to_string(tol));
}

SkinSide edge_skin_side(const BoundaryGeometry& geom, const Point& a, const Point& b, double tol) {
    if (!geom.is_curved()) return SkinSide::coincident;
    const Point mid = 0.5 * (a + b);
    const double g = geom.value(mid);
    if (std::abs(g) <= tol) {
        if ((b - a).norm() > tol)
            throw Error(ErrorCode::AmbiguousEdge, "chord midpoint lies on the curved boundary");
        return SkinSide::coincident;
    }
    return g < 0.0 ? SkinSide::curve_outside_chord : SkinSide::curve_inside_chord;
}

}  // namespace pgfem
