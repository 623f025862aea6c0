/**
 * Norm patches (a continuous field of norms over a convex chart domain) and
 * the metric quantities built from them: quadrature path lengths, an upper
 * geodesic distance from a grid graph with shortcut descent, and one-sided
 * scalar derivative estimates for maps between patches.
 *
 * Distances returned here are upper bounds that converge to the true
 * infimum as the mesh refines. Local ratios use straight chart segments,
 * which is exact for constant fields and first-order accurate in the
 * segment length for continuous fields.
 */

#ifndef LIPINV_FINSLER_HPP
#define LIPINV_FINSLER_HPP

#include <map>
#include <queue>

#include "maps.hpp"
#include "norms.hpp"

namespace lipinv {

struct FinslerPatch {
    int dim = 0;
    Domain domain;
    std::function<NormAtPoint(const Vec&)> field;
    /** Slope c of a linear continuity modulus w(d) = c d, when known. */
    double modulus_coeff = 0.0;
    /** True when the norm does not depend on the base point. */
    bool constant_field = false;
    std::string label = "patch";

    static FinslerPatch euclidean(int dim)
    {
        FinslerPatch p;
        p.dim = dim;
        p.domain = Domain::all_space(dim);
        p.field = [dim](const Vec&) { return NormAtPoint::euclidean(dim); };
        p.constant_field = true;
        p.label = "euclidean";
        return p;
    }

    static FinslerPatch constant(Domain domain, NormAtPoint norm, std::string label = "constant")
    {
        FinslerPatch p;
        p.dim = domain.dim;
        p.domain = std::move(domain);
        p.field = [norm](const Vec&) { return norm; };
        p.constant_field = true;
        p.label = std::move(label);
        return p;
    }

    static FinslerPatch varying(Domain domain, std::function<NormAtPoint(const Vec&)> field, double modulus_coeff,
                                std::string label = "varying")
    {
        FinslerPatch p;
        p.dim = domain.dim;
        p.domain = std::move(domain);
        p.field = std::move(field);
        p.modulus_coeff = modulus_coeff;
        p.label = std::move(label);
        return p;
    }

    NormAtPoint at(const Vec& x) const
    {
        require(domain.contains(x), ErrorKind::PointOutsideDomain, "norm requested outside the patch domain");
        return field(x);
    }

    /** Largest Euclidean ball radius around x inside the patch domain. */
    double horizon(const Vec& x) const { return domain.ball_margin(x); }
};

struct PolylinePath {
    std::vector<Vec> vertices;

    void validate() const
    {
        require(vertices.size() >= 2, ErrorKind::ValidationError, "a path needs at least two vertices");
        for (std::size_t i = 1; i < vertices.size(); ++i)
            require((vertices[i] - vertices[i - 1]).norm() > 1e-15, ErrorKind::ValidationError,
                    "consecutive path vertices coincide");
    }

    double euclidean_length() const
    {
        double s = 0.0;
        for (std::size_t i = 1; i < vertices.size(); ++i) s += (vertices[i] - vertices[i - 1]).norm();
        return s;
    }
};

/**
 * Patch length of a polyline by per-segment midpoint quadrature: each
 * segment contributes sum_i |q - p|_{gamma(mid_i)} / subdivisions. Domains
 * here are convex, so a segment stays inside iff its endpoints do.
 */
inline double path_length(const FinslerPatch& patch, const PolylinePath& path, int subdivisions = 8)
{
    path.validate();
    require(subdivisions >= 1, ErrorKind::InvalidArgument, "quadrature needs at least one subdivision");
    for (const auto& v : path.vertices)
        require(patch.domain.contains(v), ErrorKind::PathLeavesDomain, "path vertex is outside the patch domain");
    double total = 0.0;
    for (std::size_t i = 1; i < path.vertices.size(); ++i) {
        const Vec& p = path.vertices[i - 1];
        const Vec& q = path.vertices[i];
        const Vec d = q - p;
        for (int s = 0; s < subdivisions; ++s) {
            const double t = (static_cast<double>(s) + 0.5) / static_cast<double>(subdivisions);
            total += patch.field(p + t * d)(d) / static_cast<double>(subdivisions);
        }
    }
    return total;
}

/** Length of the straight segment from a to b under the patch field. */
inline double segment_length(const FinslerPatch& patch, const Vec& a, const Vec& b, int subdivisions = 8)
{
    // Same coincidence threshold as PolylinePath::validate, so endpoints
    // that differ only by rounding noise read as a zero-length segment.
    if ((b - a).norm() <= 1e-15) return 0.0;
    PolylinePath seg;
    seg.vertices = {a, b};
    return path_length(patch, seg, subdivisions);
}

struct DistanceResult {
    double distance = kInfinity;
    PolylinePath path;
    int graph_nodes = 0;
};

namespace detail {

/** Deterministic local descent: drop vertices, nudge the rest. */
inline void shorten_path(const FinslerPatch& patch, PolylinePath& path, double mesh)
{
    auto seg_len = [&](const Vec& a, const Vec& b) { return segment_length(patch, a, b, 4); };
    for (int pass = 0; pass < 40; ++pass) {
        bool improved = false;
        // Vertex removal (domains are convex, so the shortcut stays inside).
        for (std::size_t i = 1; i + 1 < path.vertices.size();) {
            const double before = seg_len(path.vertices[i - 1], path.vertices[i]) +
                                  seg_len(path.vertices[i], path.vertices[i + 1]);
            const double direct = seg_len(path.vertices[i - 1], path.vertices[i + 1]);
            if (direct < before - 1e-14 * (1.0 + before)) {
                path.vertices.erase(path.vertices.begin() + static_cast<std::ptrdiff_t>(i));
                improved = true;
            } else {
                ++i;
            }
        }
        // Vertex nudging along a shrinking axis stencil.
        const double step = mesh * std::pow(0.5, pass / 4);
        for (std::size_t i = 1; i + 1 < path.vertices.size(); ++i) {
            const Vec& u = path.vertices[i - 1];
            const Vec& w = path.vertices[i + 1];
            Vec best_v = path.vertices[i];
            double best_len = seg_len(u, best_v) + seg_len(best_v, w);
            auto try_candidate = [&](const Vec& cand) {
                if ((cand - u).norm() < 1e-14 || (cand - w).norm() < 1e-14) return;
                if (!patch.domain.contains(cand)) return;
                const double len = seg_len(u, cand) + seg_len(cand, w);
                if (len < best_len - 1e-15 * (1.0 + best_len)) {
                    best_len = len;
                    best_v = cand;
                    improved = true;
                }
            };
            try_candidate(0.5 * (u + w));
            for (int j = 0; j < patch.dim; ++j) {
                Vec cand = path.vertices[i];
                cand[j] += step;
                try_candidate(cand);
                cand[j] -= 2.0 * step;
                try_candidate(cand);
            }
            path.vertices[i] = best_v;
        }
        if (!improved) break;
    }
}

}  // namespace detail

/**
 * Upper bound on the patch geodesic distance between a and b: Dijkstra on a
 * lattice graph (spacing `mesh`, edges between nodes within 1.5 mesh) and
 * deterministic shortcut descent on the winning polyline. Converges to the
 * true distance from above as mesh -> 0. Throws Disconnected when the graph
 * admits no path.
 */
inline DistanceResult finsler_distance(const FinslerPatch& patch, const Vec& a, const Vec& b, double mesh)
{
    require(mesh > 0.0, ErrorKind::InvalidArgument, "mesh must be positive");
    require(patch.domain.contains(a), ErrorKind::PointOutsideDomain, "distance endpoint a is outside the patch");
    require(patch.domain.contains(b), ErrorKind::PointOutsideDomain, "distance endpoint b is outside the patch");

    if ((b - a).norm() <= 1e-300) {
        PolylinePath trivial;
        trivial.vertices = {a, b + Vec::Constant(patch.dim, 0.0)};
        return {0.0, trivial, 2};
    }

    const double inflate = std::max((b - a).norm(), 4.0 * mesh);
    auto [lo, hi] = patch.domain.grid_box(0.5 * (a + b), inflate);

    // Lattice nodes inside the domain.
    std::vector<int> counts(static_cast<std::size_t>(patch.dim));
    double total_nodes = 1.0;
    for (int j = 0; j < patch.dim; ++j) {
        counts[static_cast<std::size_t>(j)] = static_cast<int>(std::floor((hi[j] - lo[j]) / mesh)) + 1;
        total_nodes *= static_cast<double>(counts[static_cast<std::size_t>(j)]);
    }
    require(total_nodes <= 4e6, ErrorKind::InvalidArgument, "mesh too fine for the patch extent");

    std::vector<Vec> nodes;
    std::map<std::vector<int>, int> index_of;
    std::vector<int> digits(static_cast<std::size_t>(patch.dim), 0);
    for (;;) {
        Vec x(patch.dim);
        for (int j = 0; j < patch.dim; ++j) x[j] = lo[j] + mesh * digits[static_cast<std::size_t>(j)];
        if (patch.domain.contains(x)) {
            index_of[digits] = static_cast<int>(nodes.size());
            nodes.push_back(x);
        }
        int j = 0;
        for (; j < patch.dim; ++j) {
            if (++digits[static_cast<std::size_t>(j)] < counts[static_cast<std::size_t>(j)]) break;
            digits[static_cast<std::size_t>(j)] = 0;
        }
        if (j == patch.dim) break;
    }

    const int ia = static_cast<int>(nodes.size());
    nodes.push_back(a);
    const int ib = static_cast<int>(nodes.size());
    nodes.push_back(b);

    // Edges: lattice offsets within 1.5 mesh, plus links from a and b.
    std::vector<std::vector<int>> offsets;
    {
        std::vector<int> off(static_cast<std::size_t>(patch.dim), -1);
        for (;;) {
            double n2 = 0.0;
            bool nonzero = false;
            for (int j = 0; j < patch.dim; ++j) {
                n2 += static_cast<double>(off[static_cast<std::size_t>(j)] * off[static_cast<std::size_t>(j)]);
                nonzero = nonzero || off[static_cast<std::size_t>(j)] != 0;
            }
            if (nonzero && std::sqrt(n2) <= 1.5 + 1e-12) offsets.push_back(off);
            int j = 0;
            for (; j < patch.dim; ++j) {
                if (++off[static_cast<std::size_t>(j)] <= 1) break;
                off[static_cast<std::size_t>(j)] = -1;
            }
            if (j == patch.dim) break;
        }
    }

    std::vector<std::vector<std::pair<int, double>>> adj(nodes.size());
    auto add_edge = [&](int u, int v) {
        const double w = segment_length(patch, nodes[static_cast<std::size_t>(u)], nodes[static_cast<std::size_t>(v)], 2);
        adj[static_cast<std::size_t>(u)].push_back({v, w});
        adj[static_cast<std::size_t>(v)].push_back({u, w});
    };
    for (const auto& [digs, u] : index_of) {
        for (const auto& off : offsets) {
            std::vector<int> nb = digs;
            bool ok = true;
            for (int j = 0; j < patch.dim; ++j) {
                nb[static_cast<std::size_t>(j)] += off[static_cast<std::size_t>(j)];
                if (nb[static_cast<std::size_t>(j)] < 0 || nb[static_cast<std::size_t>(j)] >= counts[static_cast<std::size_t>(j)]) ok = false;
            }
            if (!ok) continue;
            const auto it = index_of.find(nb);
            if (it == index_of.end() || it->second <= u) continue;  // each pair once
            add_edge(u, it->second);
        }
    }
    for (int endpoint : {ia, ib}) {
        for (const auto& [digs, u] : index_of) {
            (void)digs;
            if ((nodes[static_cast<std::size_t>(u)] - nodes[static_cast<std::size_t>(endpoint)]).norm() <= 1.5 * mesh + 1e-12)
                add_edge(endpoint, u);
        }
    }
    if ((nodes[static_cast<std::size_t>(ia)] - nodes[static_cast<std::size_t>(ib)]).norm() <= 1.5 * mesh + 1e-12)
        add_edge(ia, ib);

    // Dijkstra.
    std::vector<double> dist(nodes.size(), kInfinity);
    std::vector<int> prev(nodes.size(), -1);
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
    dist[static_cast<std::size_t>(ia)] = 0.0;
    heap.push({0.0, ia});
    while (!heap.empty()) {
        const auto [d, u] = heap.top();
        heap.pop();
        if (d > dist[static_cast<std::size_t>(u)]) continue;
        if (u == ib) break;
        for (const auto& [v, w] : adj[static_cast<std::size_t>(u)]) {
            if (d + w < dist[static_cast<std::size_t>(v)]) {
                dist[static_cast<std::size_t>(v)] = d + w;
                prev[static_cast<std::size_t>(v)] = u;
                heap.push({d + w, v});
            }
        }
    }
    require(std::isfinite(dist[static_cast<std::size_t>(ib)]), ErrorKind::Disconnected,
            "no lattice path connects the endpoints at this mesh");

    PolylinePath path;
    for (int u = ib; u != -1; u = prev[static_cast<std::size_t>(u)])
        path.vertices.push_back(nodes[static_cast<std::size_t>(u)]);
    std::reverse(path.vertices.begin(), path.vertices.end());

    // A lattice node can land within rounding noise of an endpoint; drop
    // such duplicates so the reported path itself passes validate().
    {
        std::vector<Vec> kept;
        kept.reserve(path.vertices.size());
        kept.push_back(path.vertices.front());
        for (std::size_t i = 1; i < path.vertices.size(); ++i) {
            const bool last = i + 1 == path.vertices.size();
            if ((path.vertices[i] - kept.back()).norm() <= 1e-12) {
                if (!last) continue;
                if (kept.size() > 1) kept.pop_back();  // the true endpoint wins
            }
            kept.push_back(path.vertices[i]);
        }
        path.vertices = std::move(kept);
    }

    detail::shorten_path(patch, path, mesh);

    DistanceResult out;
    out.path = path;
    // Final length at mesh-resolved quadrature, so the reported value keeps
    // improving as the mesh refines even after shortcutting merges segments.
    out.distance = 0.0;
    for (std::size_t i = 1; i < path.vertices.size(); ++i) {
        const double len = (path.vertices[i] - path.vertices[i - 1]).norm();
        const int subs = std::clamp(static_cast<int>(std::ceil(len / mesh)), 8, 100000);
        out.distance += segment_length(patch, path.vertices[i - 1], path.vertices[i], subs);
    }
    out.graph_nodes = static_cast<int>(nodes.size());
    return out;
}

struct ScalarDerivativeEstimate {
    double lower = 0.0;  // min distance ratio at the finest radius
    double upper = 0.0;  // max distance ratio at the finest radius
    std::vector<double> radii;
    int samples_per_radius = 0;
    std::vector<double> min_ratio;  // per radius, same order as `radii`
    std::vector<double> max_ratio;
    int degenerate_samples = 0;  // directions with f(y) = f(x)
};

/**
 * One-sided derivative estimates of f at x between two patches: ratios
 * d_target(f(y), f(x)) / d_source(y, x) over seeded sphere directions at
 * each radius, with distances approximated by straight-segment lengths (the
 * small-radius regime where this is first-order exact). Radii must be
 * strictly decreasing; the headline lower/upper come from the finest one.
 */
inline ScalarDerivativeEstimate scalar_derivatives(const AnyMap& map, const FinslerPatch& source,
                                                   const FinslerPatch& target, const Vec& x,
                                                   const std::vector<double>& radii, int samples,
                                                   std::uint64_t seed)
{
    require(!radii.empty(), ErrorKind::InvalidArgument, "at least one radius is required");
    require(samples >= 1, ErrorKind::InvalidArgument, "at least one sample per radius is required");
    for (std::size_t i = 0; i < radii.size(); ++i) {
        require(radii[i] > 0.0, ErrorKind::InvalidArgument, "radii must be positive");
        if (i > 0)
            require(radii[i] < radii[i - 1], ErrorKind::InvalidArgument, "radii must be strictly decreasing");
    }
    require(source.dim == map_dim_in(map), ErrorKind::DimensionMismatch, "source patch dimension mismatch");
    require(target.dim == map_dim_out(map), ErrorKind::DimensionMismatch, "target patch dimension mismatch");
    require(source.horizon(x) >= radii.front(), ErrorKind::HorizonExceeded,
            "largest radius exceeds the patch margin around x");

    const Vec fx = map_eval(map, x);
    ScalarDerivativeEstimate est;
    est.radii = radii;
    est.samples_per_radius = samples;
    est.min_ratio.assign(radii.size(), kInfinity);
    est.max_ratio.assign(radii.size(), 0.0);

    const int n = map_dim_in(map);
    for (std::size_t ri = 0; ri < radii.size(); ++ri) {
        const double r = radii[ri];
        for (int s = 0; s < samples; ++s) {
            Rng rng = Rng::substream(seed, 301 + static_cast<std::uint64_t>(ri), static_cast<std::uint64_t>(s));
            Vec dir = rng.unit_vec(n);
            if (n == 1) dir[0] = (s % 2 == 0) ? 1.0 : -1.0;  // both sphere points, deterministically
            const Vec y = x + r * dir;
            const Vec fy = map_eval(map, y);
            const double din = segment_length(source, x, y, 8);
            if (din <= 1e-300) continue;
            double ratio = 0.0;
            if ((fy - fx).norm() <= 1e-300) {
                ++est.degenerate_samples;
            } else {
                ratio = segment_length(target, fx, fy, 8) / din;
            }
            est.min_ratio[ri] = std::min(est.min_ratio[ri], ratio);
            est.max_ratio[ri] = std::max(est.max_ratio[ri], ratio);
        }
        if (!std::isfinite(est.min_ratio[ri])) est.min_ratio[ri] = 0.0;
    }
    est.lower = est.min_ratio.back();
    est.upper = est.max_ratio.back();
    return est;
}

}  // namespace lipinv

#endif  // LIPINV_FINSLER_HPP
