/**
 * Convex H-representation polyhedra and the region/domain types built on
 * them. Projection and vertex enumeration work by enumerating active
 * constraint subsets, which is exact and cheap for the small systems
 * (dimension <= 4, a handful of rows) this toolkit deals with.
 */

#ifndef LIPINV_POLYHEDRON_HPP
#define LIPINV_POLYHEDRON_HPP

#include <optional>
#include <sstream>
#include <variant>

#include "core.hpp"

namespace lipinv {

/** One inequality <a, x> <= c. */
struct HalfSpace {
    Vec a;
    double c = 0.0;
};

struct Polyhedron {
    int dim = 0;
    std::vector<HalfSpace> rows;

    static Polyhedron all_space(int dim) { return Polyhedron{dim, {}}; }

    static Polyhedron box(const Vec& lo, const Vec& hi)
    {
        require(lo.size() == hi.size(), ErrorKind::DimensionMismatch, "box corners differ in dimension");
        Polyhedron p;
        p.dim = static_cast<int>(lo.size());
        for (int i = 0; i < p.dim; ++i) {
            Vec a = Vec::Zero(p.dim);
            a[i] = 1.0;
            p.rows.push_back({a, hi[i]});
            a[i] = -1.0;
            p.rows.push_back({a, -lo[i]});
        }
        return p;
    }

    Polyhedron& add(const Vec& a, double c)
    {
        require(static_cast<int>(a.size()) == dim, ErrorKind::DimensionMismatch, "half-space dimension mismatch");
        rows.push_back({a, c});
        return *this;
    }

    /** Worst constraint violation; <= 0 means the point is inside. */
    double violation(const Vec& x) const
    {
        double v = -kInfinity;
        for (const auto& r : rows) v = std::max(v, r.a.dot(x) - r.c);
        return rows.empty() ? -kInfinity : v;
    }

    bool contains(const Vec& x, double tol = 1e-10) const { return violation(x) <= tol; }

    Polyhedron intersect(const Polyhedron& other) const
    {
        require(dim == other.dim, ErrorKind::DimensionMismatch, "intersecting polyhedra of different dimension");
        Polyhedron out = *this;
        for (const auto& r : other.rows) out.rows.push_back(r);
        return out;
    }
};

namespace detail {

inline void subsets_up_to(int m, int max_size, const std::function<void(const std::vector<int>&)>& visit)
{
    std::vector<int> current;
    std::function<void(int)> rec = [&](int start) {
        visit(current);
        if (static_cast<int>(current.size()) == max_size) return;
        for (int i = start; i < m; ++i) {
            current.push_back(i);
            rec(i + 1);
            current.pop_back();
        }
    };
    rec(0);
}

}  // namespace detail

/**
 * Euclidean projection of x0 onto the polyhedron, or nullopt when the
 * feasible set is empty. Exact: the face whose relative interior holds the
 * projection appears as one of the enumerated equality subsets.
 */
inline std::optional<Vec> project_onto(const Polyhedron& poly, const Vec& x0, double tol = 1e-9)
{
    require(static_cast<int>(x0.size()) == poly.dim, ErrorKind::DimensionMismatch, "projection point dimension mismatch");
    const int m = static_cast<int>(poly.rows.size());
    if (m == 0) return x0;
    if (poly.contains(x0, tol)) return x0;
    require(m <= 24, ErrorKind::InvalidArgument, "projection supports at most 24 half-spaces");

    std::optional<Vec> best;
    double best_dist = kInfinity;
    detail::subsets_up_to(m, poly.dim, [&](const std::vector<int>& S) {
        if (S.empty()) return;
        const int k = static_cast<int>(S.size());
        Mat A(k, poly.dim);
        Vec c(k);
        for (int i = 0; i < k; ++i) {
            A.row(i) = poly.rows[static_cast<std::size_t>(S[i])].a.transpose();
            c[i] = poly.rows[static_cast<std::size_t>(S[i])].c;
        }
        // min ||x - x0||  s.t.  A x = c   =>   x = x0 + A^T (A A^T)^+ (c - A x0)
        Eigen::CompleteOrthogonalDecomposition<Mat> cod(A * A.transpose());
        const Vec resid = c - A * x0;
        const Vec mult = cod.solve(resid);
        if (((A * A.transpose()) * mult - resid).norm() > 1e-8 * (1.0 + resid.norm())) return;  // inconsistent subset
        const Vec x = x0 + A.transpose() * mult;
        if (!poly.contains(x, tol)) return;
        const double d = (x - x0).norm();
        if (d < best_dist) {
            best_dist = d;
            best = x;
        }
    });
    return best;
}

/** Distance from x0 to the polyhedron (+inf when empty). */
inline double distance_to(const Polyhedron& poly, const Vec& x0, double tol = 1e-9)
{
    const auto p = project_onto(poly, x0, tol);
    if (!p) return kInfinity;
    return (*p - x0).norm();
}

/**
 * Vertices of a bounded polyhedron: feasible solutions of dim-subsets of
 * tight rows. Degenerate subsets are skipped via a rank check.
 */
inline std::vector<Vec> enumerate_vertices(const Polyhedron& poly, double tol = 1e-9)
{
    const int m = static_cast<int>(poly.rows.size());
    const int n = poly.dim;
    require(m <= 24, ErrorKind::InvalidArgument, "vertex enumeration supports at most 24 half-spaces");
    std::vector<Vec> verts;
    detail::subsets_up_to(m, n, [&](const std::vector<int>& S) {
        if (static_cast<int>(S.size()) != n) return;
        Mat A(n, n);
        Vec c(n);
        for (int i = 0; i < n; ++i) {
            A.row(i) = poly.rows[static_cast<std::size_t>(S[i])].a.transpose();
            c[i] = poly.rows[static_cast<std::size_t>(S[i])].c;
        }
        Eigen::FullPivLU<Mat> lu(A);
        if (lu.rank() < n) return;
        const Vec x = lu.solve(c);
        if (!poly.contains(x, tol)) return;
        for (const auto& v : verts)
            if ((v - x).norm() <= 1e-9 * (1.0 + x.norm())) return;
        verts.push_back(x);
    });
    return verts;
}

/** Axis-aligned bounding box of a bounded polyhedron via its vertices. */
inline std::pair<Vec, Vec> bounding_box(const Polyhedron& poly)
{
    const auto verts = enumerate_vertices(poly);
    require(!verts.empty(), ErrorKind::ValidationError, "polyhedron has no vertices (empty or unbounded)");
    Vec lo = verts.front(), hi = verts.front();
    for (const auto& v : verts) {
        lo = lo.cwiseMin(v);
        hi = hi.cwiseMax(v);
    }
    return {lo, hi};
}

// ---------------------------------------------------------------------------
// Domains for maps and norm patches: all of R^n, a box, or a polyhedron.
// All three are convex, so segment containment reduces to endpoints.
// ---------------------------------------------------------------------------

struct Domain {
    enum class Kind { All, Box, Poly };

    Kind kind = Kind::All;
    int dim = 0;
    Vec lo, hi;       // Box
    Polyhedron poly;  // Poly

    static Domain all_space(int dim)
    {
        Domain d;
        d.kind = Kind::All;
        d.dim = dim;
        return d;
    }

    static Domain box(const Vec& lo, const Vec& hi)
    {
        require(lo.size() == hi.size(), ErrorKind::DimensionMismatch, "box corners differ in dimension");
        for (int i = 0; i < lo.size(); ++i)
            require(lo[i] < hi[i], ErrorKind::ValidationError, "box has empty side");
        Domain d;
        d.kind = Kind::Box;
        d.dim = static_cast<int>(lo.size());
        d.lo = lo;
        d.hi = hi;
        return d;
    }

    static Domain polyhedron(const Polyhedron& p)
    {
        Domain d;
        d.kind = Kind::Poly;
        d.dim = p.dim;
        d.poly = p;
        return d;
    }

    bool contains(const Vec& x, double tol = 1e-10) const
    {
        require(static_cast<int>(x.size()) == dim, ErrorKind::DimensionMismatch, "domain membership dimension mismatch");
        switch (kind) {
            case Kind::All: return true;
            case Kind::Box:
                for (int i = 0; i < dim; ++i)
                    if (x[i] < lo[i] - tol || x[i] > hi[i] + tol) return false;
                return true;
            case Kind::Poly: return poly.contains(x, tol);
        }
        return false;
    }

    /** Largest r with the closed Euclidean ball B(x, r) inside the domain. */
    double ball_margin(const Vec& x) const
    {
        switch (kind) {
            case Kind::All: return kInfinity;
            case Kind::Box: {
                double r = kInfinity;
                for (int i = 0; i < dim; ++i) r = std::min(r, std::min(x[i] - lo[i], hi[i] - x[i]));
                return std::max(r, 0.0);
            }
            case Kind::Poly: {
                double r = kInfinity;
                for (const auto& row : poly.rows) {
                    const double na = row.a.norm();
                    if (na < 1e-300) continue;
                    r = std::min(r, (row.c - row.a.dot(x)) / na);
                }
                return std::max(r, 0.0);
            }
        }
        return 0.0;
    }

    Polyhedron as_polyhedron() const
    {
        switch (kind) {
            case Kind::All: return Polyhedron::all_space(dim);
            case Kind::Box: return Polyhedron::box(lo, hi);
            case Kind::Poly: return poly;
        }
        return Polyhedron::all_space(dim);
    }

    /** Finite box covering the relevant part of the domain, for grids. */
    std::pair<Vec, Vec> grid_box(const Vec& fallback_center, double fallback_radius) const
    {
        switch (kind) {
            case Kind::Box: return {lo, hi};
            case Kind::Poly: return bounding_box(poly);
            case Kind::All:
            default: {
                Vec l = fallback_center.array() - fallback_radius;
                Vec h = fallback_center.array() + fallback_radius;
                return {l, h};
            }
        }
    }
};

/** Evaluation region for certificates: a Euclidean ball or an axis box. */
struct Region {
    enum class Kind { Ball, Box };

    Kind kind = Kind::Ball;
    Vec center;
    double radius = 0.0;
    Vec lo, hi;

    static Region ball(const Vec& center, double radius)
    {
        require(radius > 0.0, ErrorKind::InvalidArgument, "region radius must be positive");
        Region r;
        r.kind = Kind::Ball;
        r.center = center;
        r.radius = radius;
        return r;
    }

    static Region box(const Vec& lo, const Vec& hi)
    {
        Region r;
        r.kind = Kind::Box;
        r.lo = lo;
        r.hi = hi;
        r.center = 0.5 * (lo + hi);
        return r;
    }

    int dim() const { return static_cast<int>(center.size()); }

    bool contains(const Vec& x, double tol = 1e-10) const
    {
        if (kind == Kind::Ball) return (x - center).norm() <= radius + tol;
        for (int i = 0; i < x.size(); ++i)
            if (x[i] < lo[i] - tol || x[i] > hi[i] + tol) return false;
        return true;
    }

    Vec sample(Rng& rng) const
    {
        if (kind == Kind::Ball) return rng.ball_point(center, radius);
        Vec x(lo.size());
        for (int i = 0; i < lo.size(); ++i) x[i] = rng.uniform(lo[i], hi[i]);
        return x;
    }

    /** Half-space rows for Box regions; Ball regions have none (handled separately). */
    std::vector<HalfSpace> box_rows() const
    {
        std::vector<HalfSpace> rows;
        if (kind != Kind::Box) return rows;
        const int n = static_cast<int>(lo.size());
        for (int i = 0; i < n; ++i) {
            Vec a = Vec::Zero(n);
            a[i] = 1.0;
            rows.push_back({a, hi[i]});
            a[i] = -1.0;
            rows.push_back({a, -lo[i]});
        }
        return rows;
    }

    /**
     * A point of `poly` inside this region, or nullopt when the intersection
     * is empty. Exact for boxes (joint projection) and balls (the projection
     * of the center realizes the distance to the polyhedron).
     */
    std::optional<Vec> point_in(const Polyhedron& poly, double tol = 1e-9) const
    {
        if (kind == Kind::Ball) {
            const auto p = project_onto(poly, center, tol);
            if (!p) return std::nullopt;
            if ((*p - center).norm() <= radius + tol) return p;
            return std::nullopt;
        }
        Polyhedron joint = poly;
        for (const auto& r : box_rows()) joint.rows.push_back(r);
        return project_onto(joint, center, tol);
    }

    std::string describe() const
    {
        std::ostringstream os;
        if (kind == Kind::Ball) {
            os << "ball(center=[";
            for (int i = 0; i < center.size(); ++i) os << (i ? "," : "") << center[i];
            os << "], r=" << radius << ")";
        } else {
            os << "box([";
            for (int i = 0; i < lo.size(); ++i) os << (i ? "," : "") << lo[i];
            os << "]..[";
            for (int i = 0; i < hi.size(); ++i) os << (i ? "," : "") << hi[i];
            os << "])";
        }
        return os.str();
    }
};

}  // namespace lipinv

#endif  // LIPINV_POLYHEDRON_HPP
