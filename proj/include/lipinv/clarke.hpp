/**
 * Matrix polytopes standing for generalized derivatives, and the calculus
 * on them: construction (exact for piecewise-affine maps, sampled for
 * black boxes), operator norms and co-norms over the hull, maximal-rank
 * certification with an explicit determinant Lipschitz bound, inverse
 * hulls, chain-rule containment, and chart transport.
 *
 * Conventions. A polytope is the convex hull of its generator matrices;
 * lambda vectors are barycentric coordinates. Exhaustive barycentric grids
 * exist for up to 4 generators; larger hulls fall back to deterministic
 * quasi-random simplex samples, and certificates degrade to Heuristic.
 */

#ifndef LIPINV_CLARKE_HPP
#define LIPINV_CLARKE_HPP

#include "certificate.hpp"
#include "maps.hpp"
#include "norms.hpp"

namespace lipinv {

struct SampledTag {
    double radius = 0.0;
    int count = 0;
};

struct HullElement {
    Vec lambda;
};

struct MatrixPolytope {
    std::vector<Mat> generators;
    Vec base_point;
    std::optional<SampledTag> sampled;  // nullopt = exact

    int count() const { return static_cast<int>(generators.size()); }
    int rows() const { return generators.empty() ? 0 : static_cast<int>(generators.front().rows()); }
    int cols() const { return generators.empty() ? 0 : static_cast<int>(generators.front().cols()); }
    bool exact() const { return !sampled.has_value(); }

    Mat element(const Vec& lambda) const
    {
        require(static_cast<int>(lambda.size()) == count(), ErrorKind::DimensionMismatch,
                "hull coordinate length does not match generator count");
        Mat e = Mat::Zero(rows(), cols());
        for (int i = 0; i < count(); ++i) e += lambda[i] * generators[static_cast<std::size_t>(i)];
        return e;
    }

    void dedupe(double tol = 1e-12)
    {
        std::vector<Mat> unique;
        for (const auto& g : generators) {
            bool seen = false;
            for (const auto& u : unique)
                if ((g - u).norm() <= tol * (1.0 + u.norm())) {
                    seen = true;
                    break;
                }
            if (!seen) unique.push_back(g);
        }
        generators = std::move(unique);
    }
};

// ---------------------------------------------------------------------------
// Barycentric grids on the simplex.
// ---------------------------------------------------------------------------

namespace detail {

inline void compositions(int total, int parts, std::vector<int>& current, std::vector<Vec>& out)
{
    if (parts == 1) {
        Vec lambda(static_cast<int>(current.size()) + 1);
        for (std::size_t i = 0; i < current.size(); ++i) lambda[static_cast<int>(i)] = current[i];
        lambda[static_cast<int>(current.size())] = total;
        out.push_back(lambda);
        return;
    }
    for (int c = 0; c <= total; ++c) {
        current.push_back(c);
        compositions(total - c, parts - 1, current, out);
        current.pop_back();
    }
}

inline double halton(std::uint64_t index, int base)
{
    double f = 1.0, r = 0.0;
    std::uint64_t i = index;
    while (i > 0) {
        f /= static_cast<double>(base);
        r += f * static_cast<double>(i % static_cast<std::uint64_t>(base));
        i /= static_cast<std::uint64_t>(base);
    }
    return r;
}

}  // namespace detail

/**
 * Barycentric coordinates covering the (k-1)-simplex. For k <= 4 this is the
 * exhaustive grid of resolution grid-1 (exactly the certification lattice);
 * for larger k it is a deterministic Halton sample of size grid^3 plus the
 * vertices, which supports estimates but not certificates.
 */
inline std::vector<Vec> simplex_grid(int k, int grid)
{
    require(k >= 1, ErrorKind::InvalidArgument, "simplex grid needs at least one generator");
    require(grid >= 2 || k == 1, ErrorKind::InvalidArgument, "grid resolution must be at least 2");
    std::vector<Vec> out;
    if (k == 1) {
        out.push_back(make_vec({1.0}));
        return out;
    }
    if (k <= 4) {
        const int q = grid - 1;
        std::vector<Vec> raw;
        std::vector<int> current;
        detail::compositions(q, k, current, raw);
        out.reserve(raw.size());
        for (auto& v : raw) out.push_back(v / static_cast<double>(q));
        return out;
    }
    static const int primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31};
    require(k - 1 <= static_cast<int>(sizeof(primes) / sizeof(primes[0])), ErrorKind::InvalidArgument,
            "simplex sampling limited to 12 generators");
    const std::uint64_t N = static_cast<std::uint64_t>(grid) * static_cast<std::uint64_t>(grid) *
                            static_cast<std::uint64_t>(grid);
    for (int i = 0; i < k; ++i) out.push_back(Vec::Unit(k, i));  // always include the vertices
    std::vector<double> cuts(static_cast<std::size_t>(k) + 1);
    for (std::uint64_t idx = 1; idx <= N; ++idx) {
        for (int j = 0; j < k - 1; ++j) cuts[static_cast<std::size_t>(j)] = detail::halton(idx, primes[j]);
        cuts[static_cast<std::size_t>(k - 1)] = 0.0;
        cuts[static_cast<std::size_t>(k)] = 1.0;
        std::sort(cuts.begin(), cuts.end());
        Vec lambda(k);
        for (int j = 0; j < k; ++j) lambda[j] = cuts[static_cast<std::size_t>(j + 1)] - cuts[static_cast<std::size_t>(j)];
        out.push_back(lambda);
    }
    return out;
}

/** l1 covering radius of the exhaustive barycentric grid of resolution q. */
inline double simplex_grid_l1_radius(int k, int grid)
{
    if (k == 1) return 0.0;
    return static_cast<double>(k) / static_cast<double>(grid - 1);
}

// ---------------------------------------------------------------------------
// Construction.
// ---------------------------------------------------------------------------

/**
 * Exact generalized derivative of a piecewise-affine map at x: the hull of
 * the matrices of all pieces active at x. Exact because affine pieces have
 * constant derivatives and the map is continuous across facets.
 */
inline MatrixPolytope clarke_exact(const PwaMap& map, const Vec& x, double facet_tol = 1e-10)
{
    require(map.domain().contains(x), ErrorKind::PointOutsideDomain, "derivative point is outside the map domain");
    const auto idx = map.active_pieces(x, facet_tol);
    require(!idx.empty(), ErrorKind::PointOutsideDomain, "no piece is active at the derivative point");
    MatrixPolytope p;
    for (int i : idx) p.generators.push_back(map.pieces()[static_cast<std::size_t>(i)].A);
    p.base_point = x;
    p.dedupe();
    return p;
}

/**
 * Sampled approximation at x for a black-box map: Jacobians at `count`
 * points of the ball B(x, radius). Samples with non-finite entries are
 * dropped; losing more than half of them is a sampling failure. The result
 * is an inner approximation, up to Jacobian accuracy, of the true hull.
 */
inline MatrixPolytope clarke_sampled(const LipschitzMap& map, const Vec& x, double radius, int count,
                                     std::uint64_t seed)
{
    require(count >= 1, ErrorKind::InvalidArgument, "sample count must be positive");
    require(radius >= 0.0, ErrorKind::InvalidArgument, "sample radius must be nonnegative");
    require(map.domain.contains(x), ErrorKind::PointOutsideDomain, "derivative point is outside the map domain");
    MatrixPolytope p;
    p.base_point = x;
    int kept = 0;
    if (map.smooth && map.jac_fn) {
        // C^1 map: the generalized derivative at x is the single Jacobian.
        p.generators.push_back(map.jac_fn(x));
        p.sampled = SampledTag{radius, 1};
        return p;
    }
    for (int s = 0; s < count; ++s) {
        Rng rng = Rng::substream(seed, 101, static_cast<std::uint64_t>(s));
        Vec xs = s == 0 ? x : Vec(rng.ball_point(x, radius));
        if (!map.domain.contains(xs)) continue;
        Mat J;
        try {
            J = map.jacobian(xs);
        } catch (const Error&) {
            continue;
        }
        if (!J.allFinite()) continue;
        p.generators.push_back(J);
        ++kept;
    }
    require(kept >= (count + 1) / 2, ErrorKind::SamplingFailed,
            "more than half of the derivative samples were invalid");
    p.dedupe(1e-9);
    p.sampled = SampledTag{radius, count};
    return p;
}

/** Generalized derivative at x: exact for piecewise-affine maps, a single
 * Jacobian for C^1 maps, sampled otherwise. */
inline MatrixPolytope clarke_at(const AnyMap& map, const Vec& x, double radius = 1e-6, int count = 16,
                                std::uint64_t seed = 0)
{
    if (std::holds_alternative<PwaMap>(map)) return clarke_exact(std::get<PwaMap>(map), x);
    return clarke_sampled(std::get<LipschitzMap>(map), x, radius, count, seed);
}

// ---------------------------------------------------------------------------
// Norms over the hull.
// ---------------------------------------------------------------------------

/** Operator norm over the hull. The map B -> |B| is convex, so the supremum
 * over a polytope is attained at a generator. Exact given the generators. */
inline double polytope_norm(const MatrixPolytope& p, const NormAtPoint& nin, const NormAtPoint& nout)
{
    require(p.count() > 0, ErrorKind::InvalidArgument, "polytope has no generators");
    double best = 0.0;
    for (const auto& g : p.generators) best = std::max(best, operator_norm(g, nin, nout));
    return best;
}

struct ConormEstimate {
    double value = 0.0;
    HullElement witness;
};

/**
 * Co-norm over the hull: inf over hull elements of the matrix co-norm. The
 * co-norm is not concave in the matrix, so interior elements can be strict
 * minimizers (the hull {-1, 1} in one dimension contains 0); the infimum is
 * therefore scanned over a barycentric grid, giving an upper bound on the
 * true hull infimum together with the minimizing hull coordinates.
 */
inline ConormEstimate polytope_conorm(const MatrixPolytope& p, const NormAtPoint& nin, const NormAtPoint& nout,
                                      int grid = 101)
{
    require(p.count() > 0, ErrorKind::InvalidArgument, "polytope has no generators");
    ConormEstimate est;
    est.value = kInfinity;
    for (const auto& lambda : simplex_grid(p.count(), grid)) {
        const double v = conorm(p.element(lambda), nin, nout);
        if (v < est.value) {
            est.value = v;
            est.witness.lambda = lambda;
        }
    }
    return est;
}

// ---------------------------------------------------------------------------
// Maximal-rank certification.
// ---------------------------------------------------------------------------

namespace detail {

/** max spectral norm over generators; bounds the spectral norm over the hull. */
inline double hull_spectral_radius_bound(const MatrixPolytope& p)
{
    double r = 0.0;
    for (const auto& g : p.generators) {
        Eigen::JacobiSVD<Mat> svd(g);
        r = std::max(r, svd.singularValues()[0]);
    }
    return r;
}

inline double max_frobenius(const MatrixPolytope& p)
{
    double r = 0.0;
    for (const auto& g : p.generators) r = std::max(r, g.norm());
    return r;
}

/**
 * Lipschitz constant of lambda -> det(E(lambda)) in the l1 metric:
 * |det A - det B| <= sqrt(n) R^(n-1) |A - B|_F with R the hull spectral
 * bound, and |E(l) - E(l')|_F <= max|G|_F |l - l'|_1.
 */
inline double det_l1_lipschitz(const MatrixPolytope& p)
{
    const int n = p.rows();
    const double R = hull_spectral_radius_bound(p);
    return std::sqrt(static_cast<double>(n)) * std::pow(R, n - 1) * max_frobenius(p);
}

/** Bisect det(E(.)) along the segment between two hull coordinates. */
inline Vec bisect_det_zero(const MatrixPolytope& p, Vec lo, Vec hi)
{
    auto det_at = [&](const Vec& l) { return p.element(l).determinant(); };
    double flo = det_at(lo);
    for (int it = 0; it < 200; ++it) {
        const Vec mid = 0.5 * (lo + hi);
        const double fm = det_at(mid);
        if (fm == 0.0) return mid;
        if ((fm > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace detail

/**
 * Decide whether every hull element has full rank. For square hulls with at
 * most 4 generators the exhaustive grid plus the determinant Lipschitz
 * bound yields a certified verdict: Positive when the certified determinant
 * floor min|det| - L h is positive, Negative with an explicit singular (or
 * sign-crossing) witness, Heuristic when the grid is too coarse to decide.
 * Larger or sampled hulls report at most Heuristic.
 */
inline Certificate certify_maximal_rank(const MatrixPolytope& p, int grid = 21)
{
    require(p.count() > 0, ErrorKind::InvalidArgument, "polytope has no generators");
    require(p.rows() == p.cols(), ErrorKind::DimensionMismatch, "maximal-rank certification needs square matrices");

    const bool exhaustive = p.count() <= 4;
    const auto grid_pts = simplex_grid(p.count(), grid);

    double min_abs = kInfinity, max_abs = 0.0;
    Vec min_lambda;
    bool has_pos = false, has_neg = false;
    Vec pos_lambda, neg_lambda;
    for (const auto& lambda : grid_pts) {
        const double d = p.element(lambda).determinant();
        const double ad = std::abs(d);
        if (ad < min_abs) {
            min_abs = ad;
            min_lambda = lambda;
        }
        max_abs = std::max(max_abs, ad);
        if (d > 0.0 && !has_pos) {
            has_pos = true;
            pos_lambda = lambda;
        }
        if (d < 0.0 && !has_neg) {
            has_neg = true;
            neg_lambda = lambda;
        }
    }

    Certificate cert = Certificate::make("maximal_rank", Verdict::Inconclusive);
    cert.evidence["generator_count"] = p.count();
    cert.evidence["elements_checked"] = grid_pts.size();
    cert.evidence["min_abs_det"] = min_abs;
    cert.evidence["max_abs_det"] = max_abs;
    cert.evidence["representation"] = p.exact() ? "exact" : "sampled";

    if (has_pos && has_neg) {
        const Vec zero_lambda = detail::bisect_det_zero(p, pos_lambda, neg_lambda);
        cert.verdict = Verdict::Negative;
        cert.label = "negative";
        cert.evidence["witness"] = Json{{"lambda", json_vec(zero_lambda)},
                                        {"det", p.element(zero_lambda).determinant()},
                                        {"kind", "sign_change"}};
        cert.note("determinant changes sign across the hull; witness by segment bisection");
        return cert;
    }
    if (min_abs <= 1e-12) {
        cert.verdict = Verdict::Negative;
        cert.label = "negative";
        cert.evidence["witness"] = Json{{"lambda", json_vec(min_lambda)}, {"det", p.element(min_lambda).determinant()},
                                        {"kind", "singular_element"}};
        cert.note("hull element with vanishing determinant");
        return cert;
    }

    if (exhaustive) {
        const double L = detail::det_l1_lipschitz(p);
        const double h = simplex_grid_l1_radius(p.count(), grid);
        const double floor = min_abs - L * h;
        cert.evidence["det_lipschitz_l1"] = L;
        cert.evidence["grid_l1_covering"] = h;
        cert.evidence["certified_det_floor"] = floor;
        if (floor > 0.0) {
            cert.verdict = Verdict::Positive;
            cert.label = "positive";
            cert.evidence["det_sign"] = has_neg ? -1 : 1;
            cert.note("certified: exhaustive barycentric grid with determinant Lipschitz margin");
            if (!p.exact()) {
                cert.verdict = Verdict::Heuristic;
                cert.label = "heuristic_positive";
                cert.note("sampled hull: generators only approximate the true derivative set");
            }
            return cert;
        }
        cert.verdict = Verdict::Heuristic;
        cert.label = "heuristic_positive";
        cert.note("determinant sign is constant on the grid but the Lipschitz margin does not certify; refine the grid");
        return cert;
    }

    cert.verdict = Verdict::Heuristic;
    cert.label = "heuristic_positive";
    cert.note("more than 4 generators: quasi-random hull samples support no certificate");
    return cert;
}

/** Certified positive lower bound on |det| over the hull, or 0 when the
 * exhaustive-grid machinery cannot provide one. */
inline double certified_det_floor(const MatrixPolytope& p, int grid = 21)
{
    if (p.count() > 4 || p.rows() != p.cols()) return 0.0;
    const auto grid_pts = simplex_grid(p.count(), grid);
    double min_abs = kInfinity;
    bool has_pos = false, has_neg = false;
    for (const auto& lambda : grid_pts) {
        const double d = p.element(lambda).determinant();
        min_abs = std::min(min_abs, std::abs(d));
        has_pos = has_pos || d > 0.0;
        has_neg = has_neg || d < 0.0;
    }
    if (has_pos && has_neg) return 0.0;
    const double floor = min_abs - detail::det_l1_lipschitz(p) * simplex_grid_l1_radius(p.count(), grid);
    return std::max(floor, 0.0);
}

// ---------------------------------------------------------------------------
// Inverse hulls, chain rule, chart transport.
// ---------------------------------------------------------------------------

/**
 * Hull of inverses of hull samples. The set of inverses of hull elements is
 * not itself a polytope; the returned hull of grid inverses converges to its
 * closed convex hull as the grid refines, and always contains the inverses
 * of the sampled elements. Throws SingularElement at any near-singular
 * sample; certify maximal rank first.
 */
inline MatrixPolytope hull_of_inverses(const MatrixPolytope& p, int grid = 21)
{
    require(p.rows() == p.cols(), ErrorKind::DimensionMismatch, "inverse hull needs square matrices");
    MatrixPolytope out;
    out.base_point = p.base_point;
    for (const auto& lambda : simplex_grid(p.count(), grid)) {
        const Mat e = p.element(lambda);
        Eigen::JacobiSVD<Mat> svd(e);
        const auto& sv = svd.singularValues();
        require(sv[sv.size() - 1] > 1e-12 * std::max(1.0, sv[0]), ErrorKind::SingularElement,
                "hull sample is numerically singular; certify maximal rank first");
        out.generators.push_back(e.inverse());
    }
    out.dedupe();
    out.sampled = SampledTag{0.0, static_cast<int>(out.generators.size())};
    return out;
}

// ---------------------------------------------------------------------------
// Hull membership distance and Hausdorff distance.
// ---------------------------------------------------------------------------

namespace detail {

inline Vec simplex_project(Vec v)
{
    // Euclidean projection onto the probability simplex.
    const int k = static_cast<int>(v.size());
    std::vector<double> u(v.data(), v.data() + k);
    std::sort(u.begin(), u.end(), std::greater<double>());
    double css = 0.0, theta = 0.0;
    int rho = 0;
    for (int i = 0; i < k; ++i) {
        css += u[static_cast<std::size_t>(i)];
        const double t = (css - 1.0) / static_cast<double>(i + 1);
        if (u[static_cast<std::size_t>(i)] - t > 0.0) {
            rho = i + 1;
            theta = t;
        }
    }
    (void)rho;
    for (int i = 0; i < k; ++i) v[i] = std::max(v[i] - theta, 0.0);
    return v;
}

}  // namespace detail

struct MembershipResult {
    double distance = kInfinity;  // Frobenius distance to the hull
    Vec lambda;                   // optimal barycentric coordinates
};

/**
 * Frobenius distance from T to the hull of `p`. Small hulls (<= 12
 * generators) are solved exactly by enumerating active supports of the
 * constrained least-squares problem; an accelerated projected-gradient
 * polish runs afterwards either way.
 */
inline MembershipResult hull_membership(const MatrixPolytope& p, const Mat& T)
{
    require(p.count() > 0, ErrorKind::InvalidArgument, "polytope has no generators");
    require(static_cast<int>(T.rows()) == p.rows() && static_cast<int>(T.cols()) == p.cols(),
            ErrorKind::DimensionMismatch, "membership target has wrong shape");
    const int k = p.count();
    const int d = p.rows() * p.cols();
    Mat D(d, k);
    for (int i = 0; i < k; ++i)
        D.col(i) = Eigen::Map<const Vec>(p.generators[static_cast<std::size_t>(i)].data(), d);
    const Vec t = Eigen::Map<const Vec>(T.data(), d);

    auto objective = [&](const Vec& lambda) { return (D * lambda - t).norm(); };

    MembershipResult best;
    best.lambda = Vec::Constant(k, 1.0 / static_cast<double>(k));
    best.distance = objective(best.lambda);

    if (k <= 12) {
        detail::subsets_up_to(k, std::min(k, d + 1), [&](const std::vector<int>& S) {
            if (S.empty()) return;
            const int ks = static_cast<int>(S.size());
            Mat Ds(d, ks);
            for (int i = 0; i < ks; ++i) Ds.col(i) = D.col(S[static_cast<std::size_t>(i)]);
            // KKT system of min |Ds l - t|^2 s.t. 1^T l = 1.
            Mat K = Mat::Zero(ks + 1, ks + 1);
            K.topLeftCorner(ks, ks) = Ds.transpose() * Ds;
            K.topRightCorner(ks, 1).setOnes();
            K.bottomLeftCorner(1, ks).setOnes();
            Vec rhs(ks + 1);
            rhs.head(ks) = Ds.transpose() * t;
            rhs[ks] = 1.0;
            Eigen::CompleteOrthogonalDecomposition<Mat> cod(K);
            const Vec sol = cod.solve(rhs);
            Vec lambda_s = sol.head(ks);
            if (lambda_s.minCoeff() < -1e-9) return;
            lambda_s = lambda_s.cwiseMax(0.0);
            const double sum = lambda_s.sum();
            if (sum <= 0.0) return;
            lambda_s /= sum;
            Vec lambda = Vec::Zero(k);
            for (int i = 0; i < ks; ++i) lambda[S[static_cast<std::size_t>(i)]] = lambda_s[i];
            const double val = objective(lambda);
            if (val < best.distance) {
                best.distance = val;
                best.lambda = lambda;
            }
        });
    }

    // FISTA polish on the simplex.
    const Mat G = D.transpose() * D;
    Eigen::JacobiSVD<Mat> svd(G);
    const double L = std::max(svd.singularValues()[0], 1e-30);
    Vec x = best.lambda, y = x;
    double tk = 1.0;
    for (int it = 0; it < 2000; ++it) {
        const Vec grad = G * y - D.transpose() * t;
        Vec x_next = detail::simplex_project(y - grad / L);
        const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * tk * tk));
        y = x_next + ((tk - 1.0) / t_next) * (x_next - x);
        x = x_next;
        tk = t_next;
        if (it % 100 == 99 && (grad - Vec::Constant(k, grad.mean())).norm() < 1e-15) break;
    }
    const double polished = objective(x);
    if (polished < best.distance) {
        best.distance = polished;
        best.lambda = x;
    }
    return best;
}

/** Hausdorff distance between two hulls in the Frobenius metric. */
inline double hausdorff_distance(const MatrixPolytope& a, const MatrixPolytope& b)
{
    double d = 0.0;
    for (const auto& g : a.generators) d = std::max(d, hull_membership(b, g).distance);
    for (const auto& g : b.generators) d = std::max(d, hull_membership(a, g).distance);
    return d;
}

struct ChainRuleReport {
    bool contained = false;
    double max_distance = 0.0;
};

/**
 * Check the hull form of the chain rule for f = g o h at a point: every
 * generator of `composite` must lie within `tol` of the hull of pairwise
 * products (outer generator) x (inner generator).
 */
inline ChainRuleReport chain_rule_check(const MatrixPolytope& inner, const MatrixPolytope& outer,
                                        const MatrixPolytope& composite, double tol = 1e-9)
{
    require(outer.cols() == inner.rows(), ErrorKind::DimensionMismatch, "chain rule: factor shapes do not compose");
    MatrixPolytope products;
    products.base_point = inner.base_point;
    for (const auto& go : outer.generators)
        for (const auto& gi : inner.generators) products.generators.push_back(go * gi);
    products.dedupe();
    ChainRuleReport rep;
    rep.contained = true;
    for (const auto& g : composite.generators) {
        const double dist = hull_membership(products, g).distance;
        rep.max_distance = std::max(rep.max_distance, dist);
        if (dist > tol) rep.contained = false;
    }
    return rep;
}

/**
 * Rewrite the polytope in new charts: generators become
 * d_out_inv * G * d_in, for the source transition differential d_in and the
 * inverse target transition differential d_out_inv. Throws SingularChart
 * when either transition is numerically singular.
 */
inline MatrixPolytope transport_through_charts(const MatrixPolytope& p, const Mat& d_in, const Mat& d_out_inv)
{
    auto check_conditioning = [](const Mat& m, const char* which) {
        Eigen::JacobiSVD<Mat> svd(m);
        const auto& sv = svd.singularValues();
        require(sv[sv.size() - 1] > 1e-12 * std::max(1.0, sv[0]), ErrorKind::SingularChart,
                std::string("chart transition is numerically singular: ") + which);
    };
    check_conditioning(d_in, "source");
    check_conditioning(d_out_inv, "target");
    require(static_cast<int>(d_in.rows()) == p.cols(), ErrorKind::DimensionMismatch, "source transition shape mismatch");
    require(static_cast<int>(d_out_inv.cols()) == p.rows(), ErrorKind::DimensionMismatch,
            "target transition shape mismatch");
    MatrixPolytope out;
    out.base_point = p.base_point;
    out.sampled = p.sampled;
    for (const auto& g : p.generators) out.generators.push_back(d_out_inv * g * d_in);
    return out;
}

// ---------------------------------------------------------------------------
// Certified spectral bounds over the hull.
// ---------------------------------------------------------------------------

inline Eigen::VectorXcd eigenvalues_of(const Mat& m)
{
    Eigen::EigenSolver<Mat> es(m, /*computeEigenvectors=*/false);
    return es.eigenvalues();
}

/** True when every generator is upper (or every one lower) triangular. */
inline bool triangular_family(const MatrixPolytope& p, double tol = 1e-13)
{
    auto is_upper = [&](const Mat& m) {
        for (int i = 0; i < m.rows(); ++i)
            for (int j = 0; j < i; ++j)
                if (std::abs(m(i, j)) > tol) return false;
        return true;
    };
    auto is_lower = [&](const Mat& m) {
        for (int i = 0; i < m.rows(); ++i)
            for (int j = i + 1; j < m.cols(); ++j)
                if (std::abs(m(i, j)) > tol) return false;
        return true;
    };
    bool all_upper = true, all_lower = true;
    for (const auto& g : p.generators) {
        all_upper = all_upper && is_upper(g);
        all_lower = all_lower && is_lower(g);
    }
    return all_upper || all_lower;
}

/** Exact per-position diagonal ranges for triangular families. Hull
 * eigenvalues are exactly the points of these real intervals. */
inline std::vector<std::pair<double, double>> triangular_diag_ranges(const MatrixPolytope& p)
{
    std::vector<std::pair<double, double>> ranges;
    for (int i = 0; i < p.rows(); ++i) {
        double lo = kInfinity, hi = -kInfinity;
        for (const auto& g : p.generators) {
            lo = std::min(lo, g(i, i));
            hi = std::max(hi, g(i, i));
        }
        ranges.push_back({lo, hi});
    }
    return ranges;
}

/**
 * Certified range of real parts of eigenvalues over the whole hull, via the
 * spectral range of symmetric parts. The upper end is convex and the lower
 * end concave in the matrix, so generator extremes bound the hull exactly.
 */
inline std::pair<double, double> certified_real_part_range(const MatrixPolytope& p)
{
    double lo = kInfinity, hi = -kInfinity;
    for (const auto& g : p.generators) {
        const Mat h = 0.5 * (g + g.transpose());
        Eigen::SelfAdjointEigenSolver<Mat> es(h);
        lo = std::min(lo, es.eigenvalues().minCoeff());
        hi = std::max(hi, es.eigenvalues().maxCoeff());
    }
    return {lo, hi};
}

struct SpectralFloor {
    double value = 0.0;       // certified lower bound on min |eigenvalue| over the hull
    std::string method = "";  // which route produced it; empty = none
};

/**
 * Best available certified lower bound on |eigenvalue| over the hull:
 * exact diagonal intervals for triangular families, the real-part range
 * when it is sign-definite, and the determinant floor |det| / R^(n-1).
 */
inline SpectralFloor certified_abs_eigen_floor(const MatrixPolytope& p, int grid = 21)
{
    SpectralFloor best;
    if (triangular_family(p)) {
        double floor = kInfinity;
        for (const auto& [lo, hi] : triangular_diag_ranges(p)) {
            if (lo <= 0.0 && hi >= 0.0) {
                floor = 0.0;
                break;
            }
            floor = std::min(floor, std::min(std::abs(lo), std::abs(hi)));
        }
        return {floor, "triangular_diagonal_intervals"};
    }
    const auto [rlo, rhi] = certified_real_part_range(p);
    if (rlo > 0.0 && rlo > best.value) best = {rlo, "real_part_range"};
    if (rhi < 0.0 && -rhi > best.value) best = {-rhi, "real_part_range"};
    if (p.rows() == p.cols() && p.count() <= 4) {
        const double d0 = certified_det_floor(p, grid);
        if (d0 > 0.0) {
            const double R = detail::hull_spectral_radius_bound(p);
            const double floor = p.rows() == 1 ? d0 : d0 / std::pow(R, p.rows() - 1);
            if (floor > best.value) best = {floor, "determinant_floor"};
        }
    }
    return best;
}

}  // namespace lipinv

#endif  // LIPINV_CLARKE_HPP
