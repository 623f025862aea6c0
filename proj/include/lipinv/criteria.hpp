/**
 * Invertibility and injectivity certificates: maximal rank over a region,
 * radial infimum profiles m(t) and s(t), the radial-integral verdict, the
 * eps-disc spectral test, disc-sequence injectivity via linear shifts, and
 * the negative-half-plane test built on top of it.
 *
 * Verdict policy. Piecewise-affine maps admit certified Positive/Negative
 * verdicts: their derivative hulls are finitely many polytopes reachable
 * through cell-intersection strata, and spectral claims carry explicit
 * margins (exact triangular/symmetric-part bounds where applicable, else
 * conditioned perturbation bounds on an exhaustive barycentric grid).
 * Black-box maps are sampled: positive findings are Heuristic at best,
 * while negative findings still carry explicit witnesses.
 */

#ifndef LIPINV_CRITERIA_HPP
#define LIPINV_CRITERIA_HPP

#include <complex>

#include "clarke.hpp"
#include "corpus.hpp"
#include "finsler.hpp"

namespace lipinv {

/** Default disc radius for the spectral origin-disc certificate. */
inline constexpr double kSpectralEpsDefault = 0.1;
/** Raw disc prefixes must reach below this |t| to stand in for t -> 0. */
inline constexpr double kDiscTailThreshold = 1e-3;
/** Determinant magnitudes at or below this count as singular. */
inline constexpr double kSingularDetTol = 1e-12;

inline double region_horizon(const Region& r)
{
    if (r.kind == Region::Kind::Ball) return r.radius;
    return 0.5 * (r.hi - r.lo).norm();
}

// ---------------------------------------------------------------------------
// Derivative field sampling.
// ---------------------------------------------------------------------------

struct PointPolytope {
    Vec point;
    MatrixPolytope polytope;
};

/**
 * One witness point inside the region for every nonempty intersection
 * stratum of the map's cells (cell interiors, facets, ridges, vertices).
 * At such points clarke_exact realizes every distinct derivative hull the
 * map attains on the region.
 */
inline std::vector<Vec> pwa_stratum_points(const PwaMap& map, const Region& region)
{
    const int piece_count = static_cast<int>(map.pieces().size());
    require(piece_count <= 16, ErrorKind::InvalidArgument, "stratum enumeration limited to 16 pieces");
    std::vector<Vec> points;
    detail::subsets_up_to(piece_count, std::min(piece_count, 6), [&](const std::vector<int>& S) {
        if (S.empty()) return;
        Polyhedron joint = map.pieces()[static_cast<std::size_t>(S.front())].cell;
        for (std::size_t i = 1; i < S.size(); ++i)
            joint = joint.intersect(map.pieces()[static_cast<std::size_t>(S[i])].cell);
        if (map.domain().kind == Domain::Kind::Poly) joint = joint.intersect(map.domain().poly);
        if (static_cast<int>(joint.rows.size()) > 24) return;
        const auto p = region.point_in(joint);
        if (!p) return;
        for (const auto& q : points)
            if ((q - *p).norm() <= 1e-9 * (1.0 + p->norm())) return;
        points.push_back(*p);
    });
    return points;
}

/**
 * Derivative hulls at the points a region-level certificate must inspect:
 * every stratum point for piecewise-affine maps plus seeded random points
 * (random points only, plus the center, for black-box maps).
 */
inline std::vector<PointPolytope> derivative_field_samples(const AnyMap& map, const Region& region, int samples,
                                                           std::uint64_t seed)
{
    std::vector<Vec> points;
    if (std::holds_alternative<PwaMap>(map)) {
        points = pwa_stratum_points(std::get<PwaMap>(map), region);
    } else if (map_domain(map).contains(region.center)) {
        points.push_back(region.center);
    }
    Rng rng = Rng::substream(seed, 11);
    const auto& domain = map_domain(map);
    for (int s = 0; s < samples; ++s) {
        const Vec x = region.sample(rng);
        if (domain.contains(x)) points.push_back(x);
    }
    std::vector<PointPolytope> out;
    out.reserve(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        try {
            out.push_back({points[i], clarke_at(map, points[i], 1e-5 * (1.0 + points[i].norm()), 8,
                                                splitmix64(seed ^ (0xF00D + i)))});
        } catch (const Error&) {
            // skip points whose sampling failed; the remaining set decides
        }
    }
    require(!out.empty(), ErrorKind::SamplingFailed, "no derivative samples could be taken in the region");
    return out;
}

// ---------------------------------------------------------------------------
// Maximal rank over a region.
// ---------------------------------------------------------------------------

namespace detail {

/** Bisect det(Jacobian) to a near-singular point between two samples. */
inline Vec bisect_point_det_zero(const AnyMap& map, Vec lo, Vec hi, std::uint64_t seed)
{
    auto det_at = [&](const Vec& x) {
        return clarke_at(map, x, 1e-9, 4, seed).generators.front().determinant();
    };
    double flo = det_at(lo);
    for (int it = 0; it < 100; ++it) {
        const Vec mid = 0.5 * (lo + hi);
        const double fm = det_at(mid);
        if (std::abs(fm) <= kSingularDetTol) return mid;
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
 * Certify maximal rank of the derivative hull at every inspected point of
 * the region. Piecewise-affine maps yield exact Positive/Negative verdicts
 * (finitely many distinct hulls, each certified on its grid, refined until
 * decisive); black-box maps yield Heuristic positives, with honest Negative
 * witnesses when a singular sample or a determinant sign change is found.
 */
inline Certificate check_maximal_rank_region(const AnyMap& map, const Region& region, int samples, int grid,
                                             std::uint64_t seed)
{
    require(map_dim_in(map) == map_dim_out(map), ErrorKind::DimensionMismatch,
            "maximal-rank certification needs a square map");
    Certificate cert = Certificate::make("maximal_rank", Verdict::Inconclusive);
    cert.horizon = region_horizon(region);
    cert.evidence["region"] = region.describe();

    const auto field = derivative_field_samples(map, region, samples, seed);
    cert.evidence["points_checked"] = field.size();

    const bool pwa = map_is_pwa(map);
    int positives = 0, heuristics = 0;
    for (const auto& pp : field) {
        Certificate local = certify_maximal_rank(pp.polytope, grid);
        if (pwa) {
            for (int refine = 1; refine <= 2 && local.verdict == Verdict::Heuristic; ++refine)
                local = certify_maximal_rank(pp.polytope, 1 + (grid - 1) * (1 << refine));
        }
        if (local.verdict == Verdict::Negative) {
            cert.verdict = Verdict::Negative;
            cert.label = "negative";
            cert.evidence["witness"] = Json{{"point", json_vec(pp.point)}, {"local", local.to_json()}};
            cert.note(pwa ? "certified: singular element of an exactly computed hull"
                          : "sampled hull exhibits a singular element");
            return cert;
        }
        (local.verdict == Verdict::Positive ? positives : heuristics) += 1;
    }

    if (!pwa) {
        // Look for a determinant sign change between sampled Jacobians; a
        // continuous-derivative map must then pass through a singular point.
        const Vec* prev = nullptr;
        double prev_det = 0.0;
        for (const auto& pp : field) {
            const double d = pp.polytope.generators.front().determinant();
            if (prev != nullptr && d * prev_det < 0.0) {
                const Vec witness = detail::bisect_point_det_zero(map, *prev, pp.point, seed);
                Certificate local = certify_maximal_rank(
                    clarke_at(map, witness, 1e-5 * (1.0 + witness.norm()), 16, seed), grid);
                if (local.verdict == Verdict::Negative) {
                    cert.verdict = Verdict::Negative;
                    cert.label = "negative";
                    cert.evidence["witness"] = Json{{"point", json_vec(witness)}, {"local", local.to_json()}};
                    cert.note("determinant sign change between samples; witness located by bisection");
                    return cert;
                }
            }
            prev = &pp.point;
            prev_det = d;
        }
    }

    cert.evidence["positive_points"] = positives;
    cert.evidence["heuristic_points"] = heuristics;
    if (pwa && heuristics == 0) {
        cert.verdict = Verdict::Positive;
        cert.label = "positive";
        cert.note("certified: every stratum hull passed the determinant-floor certificate");
    } else {
        cert.verdict = Verdict::Heuristic;
        cert.label = "heuristic_positive";
        cert.note(pwa ? "some hulls resisted certification at the refined grid"
                      : "black-box map: sampled Jacobians only, no certificate");
    }
    return cert;
}

// ---------------------------------------------------------------------------
// Radial profiles.
// ---------------------------------------------------------------------------

namespace detail {

inline double min_abs_eigen_sampled(const MatrixPolytope& p, int grid)
{
    double best = kInfinity;
    for (const auto& lambda : simplex_grid(p.count(), grid)) {
        const auto ev = eigenvalues_of(p.element(lambda));
        for (int i = 0; i < ev.size(); ++i) best = std::min(best, std::abs(ev[i]));
    }
    return best;
}

inline double conorm_under_patches(const MatrixPolytope& p, const AnyMap& map, const Vec& x,
                                   const FinslerPatch& src, const FinslerPatch& dst, int grid, Vec* witness_lambda)
{
    const NormAtPoint nin = src.at(x);
    const NormAtPoint nout = dst.at(map_eval(map, x));
    const auto est = polytope_conorm(p, nin, nout, grid);
    if (witness_lambda != nullptr) *witness_lambda = est.witness.lambda;
    return est.value;
}

}  // namespace detail

/**
 * Infimum profile over growing closed balls around x0: the set co-norm
 * (kind CoNorm, the m(t) of the radial-integral condition) or the smallest
 * |eigenvalue|^n over hull samples (kind SpectralPowerN, the s(t) of the
 * spectral condition). Values are running minima, hence nonincreasing, and
 * are upper bounds on the true infimum. Piecewise-affine maps are handled
 * exactly: the hull is constant on each cell-intersection stratum, so the
 * profile is the minimum over strata within distance t, each evaluated at
 * its closest point to x0.
 */
inline RadialProfile radial_profile(const AnyMap& map, const Vec& x0, const std::vector<double>& radii,
                                    RadialProfile::Kind kind, int samples, int grid, std::uint64_t seed,
                                    const FinslerPatch* source = nullptr, const FinslerPatch* target = nullptr)
{
    require(!radii.empty(), ErrorKind::EmptyProfile, "no radii given");
    for (std::size_t i = 0; i < radii.size(); ++i) {
        require(radii[i] > 0.0, ErrorKind::InvalidArgument, "radii must be positive");
        if (i > 0) require(radii[i] > radii[i - 1], ErrorKind::InvalidArgument, "radii must be increasing");
    }
    const int dim = map_dim_in(map);
    require(static_cast<int>(x0.size()) == dim, ErrorKind::DimensionMismatch, "profile center dimension mismatch");
    const FinslerPatch src = source != nullptr ? *source : FinslerPatch::euclidean(dim);
    const FinslerPatch dst = target != nullptr ? *target : FinslerPatch::euclidean(map_dim_out(map));

    RadialProfile profile;
    profile.kind = kind;
    profile.center = x0;
    profile.radii = radii;
    profile.horizon = std::min(map_domain(map).ball_margin(x0), src.domain.ball_margin(x0));
    require(radii.back() <= profile.horizon + 1e-12, ErrorKind::HorizonExceeded,
            "largest radius leaves the map or patch domain");

    const double npow = static_cast<double>(dim);
    auto value_of = [&](const MatrixPolytope& p, const Vec& x, Vec* wl) {
        if (kind == RadialProfile::Kind::CoNorm)
            return detail::conorm_under_patches(p, map, x, src, dst, grid, wl);
        if (wl != nullptr) *wl = Vec();
        return std::pow(detail::min_abs_eigen_sampled(p, grid), npow);
    };

    if (map_is_pwa(map)) {
        // Stratum decomposition: (distance to stratum, value at its closest point).
        const auto& pwa = std::get<PwaMap>(map);
        struct Candidate {
            double dist;
            double value;
            Vec point;
            Vec lambda;
        };
        std::vector<Candidate> candidates;
        const int piece_count = static_cast<int>(pwa.pieces().size());
        detail::subsets_up_to(piece_count, std::min(piece_count, 6), [&](const std::vector<int>& S) {
            if (S.empty()) return;
            Polyhedron joint = pwa.pieces()[static_cast<std::size_t>(S.front())].cell;
            for (std::size_t i = 1; i < S.size(); ++i)
                joint = joint.intersect(pwa.pieces()[static_cast<std::size_t>(S[i])].cell);
            if (static_cast<int>(joint.rows.size()) > 24) return;
            const auto proj = project_onto(joint, x0);
            if (!proj) return;
            Candidate c;
            c.dist = (*proj - x0).norm();
            c.point = *proj;
            const MatrixPolytope p = clarke_exact(pwa, *proj);
            c.value = value_of(p, *proj, &c.lambda);
            candidates.push_back(std::move(c));
        });
        double running = kInfinity;
        for (std::size_t k = 0; k < radii.size(); ++k) {
            const Candidate* argmin = nullptr;
            for (const auto& c : candidates) {
                if (c.dist > radii[k] + 1e-12) continue;
                if (c.value < running) {
                    running = c.value;
                    argmin = &c;
                }
            }
            profile.values.push_back(running);
            profile.sample_counts.push_back(static_cast<int>(candidates.size()));
            Json w = Json::object();
            if (argmin != nullptr) {
                w["point"] = json_vec(argmin->point);
                if (argmin->lambda.size() > 0) w["lambda"] = json_vec(argmin->lambda);
            }
            profile.witnesses.push_back(w);
        }
        return profile;
    }

    // Black-box: shell plus interior samples per radius, cumulative minimum.
    const auto& lm = std::get<LipschitzMap>(map);
    double running = kInfinity;
    Json running_witness = Json::object();
    for (std::size_t k = 0; k < radii.size(); ++k) {
        const double t = radii[k];
        std::vector<Vec> points;
        points.push_back(x0);
        if (dim == 1) {
            points.push_back(x0 + Vec::Constant(1, t));
            points.push_back(x0 - Vec::Constant(1, t));
        }
        const int shell = samples / 3;
        for (int s = 0; s < samples; ++s) {
            Rng rng = Rng::substream(seed, 500 + static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(s));
            points.push_back(s < shell ? Vec(x0 + t * rng.unit_vec(dim)) : Vec(rng.ball_point(x0, t)));
        }
        std::vector<double> vals(points.size(), kInfinity);
        parallel_for(static_cast<int>(points.size()), [&](int i) {
            const Vec& x = points[static_cast<std::size_t>(i)];
            if (!lm.domain.contains(x)) return;
            const MatrixPolytope p = clarke_at(map, x, 1e-5 * (1.0 + x.norm()), 8,
                                               splitmix64(seed ^ (0xBEEF + static_cast<std::uint64_t>(i))));
            vals[static_cast<std::size_t>(i)] = value_of(p, x, nullptr);
        });
        for (std::size_t i = 0; i < points.size(); ++i) {
            if (vals[i] < running) {
                running = vals[i];
                running_witness = Json{{"point", json_vec(points[i])}};
            }
        }
        profile.values.push_back(running);
        profile.sample_counts.push_back(static_cast<int>(points.size()));
        profile.witnesses.push_back(running_witness);
    }
    return profile;
}

// ---------------------------------------------------------------------------
// Radial-integral verdict.
// ---------------------------------------------------------------------------

/**
 * Decide the status of the divergence condition on the radial integral of
 * the profile. Divergence is not decidable from finite data, so the verdict
 * states its epistemic reach explicitly:
 *
 *  - positive_to_horizon: a positive floor holds up to the horizon (given
 *    floor, or observed when the tail is essentially flat); the integral
 *    diverges conditionally on the floor persisting.
 *  - negative_signal: a zero value (the condition's necessary m(t) > 0
 *    fails; hard evidence, Negative) or a fitted tail whose integral
 *    converges (Heuristic evidence of failure).
 *  - heuristic: values decay but the fitted tail still diverges.
 */
inline Certificate hadamard_verdict(const RadialProfile& profile, std::optional<double> floor = std::nullopt)
{
    require(profile.kind == RadialProfile::Kind::CoNorm, ErrorKind::InvalidArgument,
            "the radial-integral verdict applies to co-norm profiles");
    require(!profile.values.empty(), ErrorKind::EmptyProfile, "profile has no values");

    Certificate cert = Certificate::make("hadamard", Verdict::Inconclusive);
    cert.horizon = profile.radii.back();
    cert.evidence["profile"] = profile.to_json();

    const auto& r = profile.radii;
    const auto& v = profile.values;
    const std::size_t K = v.size();

    double min_value = kInfinity;
    std::size_t min_at = 0;
    for (std::size_t i = 0; i < K; ++i)
        if (v[i] < min_value) {
            min_value = v[i];
            min_at = i;
        }
    cert.evidence["min_value"] = min_value;

    // Trapezoid integral over [0, T]; m is nonincreasing, so extending the
    // first value over [0, r1] underestimates nothing it should not.
    double integral = r[0] * v[0];
    for (std::size_t i = 1; i < K; ++i) integral += 0.5 * (v[i - 1] + v[i]) * (r[i] - r[i - 1]);
    cert.evidence["integral_to_horizon"] = integral;

    if (min_value <= kSingularDetTol) {
        cert.verdict = Verdict::Negative;
        cert.label = "negative_signal";
        cert.evidence["witness"] = Json{{"radius", r[min_at]}, {"value", v[min_at]},
                                        {"reason", "profile value vanishes; a positive infimum at every radius is necessary"}};
        cert.note("necessary condition fails: the infimum reaches zero inside the horizon");
        return cert;
    }

    // Log-linear fit over the last third (at least 3 points).
    const std::size_t tail = std::max<std::size_t>(3, K / 3);
    const std::size_t start = K >= tail ? K - tail : 0;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double count = static_cast<double>(K - start);
    for (std::size_t i = start; i < K; ++i) {
        sx += r[i];
        sy += std::log(v[i]);
        sxx += r[i] * r[i];
        sxy += r[i] * std::log(v[i]);
    }
    const double denom = count * sxx - sx * sx;
    const double alpha = denom != 0.0 ? (count * sxy - sx * sy) / denom : 0.0;
    const double beta = denom != 0.0 ? (sy - alpha * sx) / count : sy / count;
    const double tail_integral = alpha < 0.0 ? std::exp(alpha * r.back() + beta) / (-alpha) : kInfinity;
    cert.evidence["tail_fit"] = Json{{"log_slope", alpha},
                                     {"log_intercept", beta},
                                     {"fitted_tail_integral", std::isfinite(tail_integral) ? Json(tail_integral) : Json("inf")},
                                     {"points", K - start}};

    const double decay = (v[start] - v.back()) / std::max(v[start], 1e-300);

    if (floor.has_value()) {
        require(*floor > 0.0, ErrorKind::InvalidArgument, "floor must be positive");
        if (min_value >= *floor) {
            cert.verdict = Verdict::Positive;
            cert.label = "positive_to_horizon";
            cert.evidence["floor"] = *floor;
            cert.note("declared floor holds up to the horizon; divergence is conditional on it persisting");
            return cert;
        }
        cert.evidence["floor"] = *floor;
        cert.note("declared floor is violated inside the horizon");
    }

    if (decay <= 0.05) {
        cert.verdict = Verdict::Positive;
        cert.label = "positive_to_horizon";
        cert.evidence["floor"] = min_value;
        cert.note("tail is essentially flat: the observed floor persists to the horizon");
        return cert;
    }
    if (std::isfinite(tail_integral)) {
        cert.verdict = Verdict::Heuristic;
        cert.label = "negative_signal";
        cert.note("fitted tail integral converges; the divergence hypothesis looks violated");
        return cert;
    }
    cert.verdict = Verdict::Heuristic;
    cert.label = "heuristic";
    cert.note("values decay but the fitted tail integral still diverges; no signal either way");
    return cert;
}

// ---------------------------------------------------------------------------
// Spectral certificates.
// ---------------------------------------------------------------------------

namespace detail {

struct EigenScan {
    double min_abs = kInfinity;
    double max_real = -kInfinity;
    std::complex<double> min_abs_witness;
    std::complex<double> max_real_witness;
    Vec min_abs_lambda;
    bool certified = false;        // margin or exact floor covers the whole hull
    double certified_floor = 0.0;  // lower bound on |lambda| over the hull when certified
};

/** Elsner perturbation bound for eigenvalues of A vs A + E. */
inline double elsner_bound(double norm_a, double norm_e, int n)
{
    if (n <= 1) return norm_e;
    return 4.0 * std::pow(2.0 * norm_a + norm_e, 1.0 - 1.0 / static_cast<double>(n)) *
           std::pow(norm_e, 1.0 / static_cast<double>(n));
}

/**
 * Scan hull eigenvalues on the barycentric grid, tracking extremes, and
 * attempt a certified lower bound on |lambda| over the entire hull: exact
 * triangular/symmetric-part/determinant floors first, then per-sample
 * perturbation margins (eigenvector conditioning when available, Elsner
 * otherwise) against the grid covering radius.
 */
inline EigenScan eigen_scan(const MatrixPolytope& p, int grid, bool want_margin)
{
    EigenScan scan;
    const int n = p.rows();
    const double R = hull_spectral_radius_bound(p);
    const double h = p.count() <= 4 ? simplex_grid_l1_radius(p.count(), grid) : kInfinity;
    const double delta = h * max_frobenius(p);  // matrix 2-norm perturbation within one cell

    double worst_certified = kInfinity;  // min over samples of (|lambda|min - margin)
    for (const auto& lambda : simplex_grid(p.count(), grid)) {
        const Mat e = p.element(lambda);
        Eigen::EigenSolver<Mat> es(e, want_margin);
        const auto& ev = es.eigenvalues();
        double local_min = kInfinity;
        for (int i = 0; i < ev.size(); ++i) {
            const double a = std::abs(ev[i]);
            local_min = std::min(local_min, a);
            if (a < scan.min_abs) {
                scan.min_abs = a;
                scan.min_abs_witness = ev[i];
                scan.min_abs_lambda = lambda;
            }
            if (ev[i].real() > scan.max_real) {
                scan.max_real = ev[i].real();
                scan.max_real_witness = ev[i];
            }
        }
        if (want_margin && std::isfinite(delta)) {
            double margin = elsner_bound(R, delta, n);
            const Eigen::MatrixXcd V = es.eigenvectors();
            Eigen::JacobiSVD<Eigen::MatrixXcd> svd(V);
            const auto& sv = svd.singularValues();
            if (sv[sv.size() - 1] > 1e-12 * sv[0]) {
                const double cond = sv[0] / sv[sv.size() - 1];
                if (cond < 1e8) margin = std::min(margin, cond * delta);
            }
            worst_certified = std::min(worst_certified, local_min - margin);
        }
    }
    if (want_margin) {
        const SpectralFloor exact = certified_abs_eigen_floor(p, grid);
        double floor = exact.method.empty() ? 0.0 : exact.value;
        if (std::isfinite(delta) && worst_certified > floor) floor = std::max(worst_certified, 0.0);
        if (floor > 0.0 && p.exact()) {
            scan.certified = true;
            scan.certified_floor = floor;
        }
    }
    return scan;
}

/** Certified upper bound on real parts over the hull: exact diagonal
 * intervals for triangular families, symmetric-part range otherwise. */
inline double certified_real_upper(const MatrixPolytope& p)
{
    if (triangular_family(p)) {
        double hi = -kInfinity;
        for (const auto& [lo, up] : triangular_diag_ranges(p)) {
            (void)lo;
            hi = std::max(hi, up);
        }
        return hi;
    }
    return certified_real_part_range(p).second;
}

}  // namespace detail

/**
 * Certify that the spectra of all derivative hull elements over the region
 * avoid the closed disc |z| <= eps. Positive requires (a) the maximal-rank
 * certificate (a standing hypothesis here), (b) every sampled eigenvalue
 * magnitude above eps, and (c) a certified margin covering the whole hull
 * at every inspected point, with the grid refined when the margin falls
 * short. Negative carries the witness eigenvalue and point.
 */
inline Certificate spectral_eps_disc(const AnyMap& map, const Region& region, double eps, int samples, int grid,
                                     std::uint64_t seed)
{
    require(eps > 0.0, ErrorKind::InvalidArgument, "disc radius must be positive");
    Certificate cert = Certificate::make("spectral", Verdict::Inconclusive);
    cert.horizon = region_horizon(region);
    cert.evidence["eps"] = eps;
    cert.evidence["region"] = region.describe();

    const Certificate rank = check_maximal_rank_region(map, region, samples, grid, splitmix64(seed ^ 0x5eca17));
    cert.evidence["maximal_rank"] = Json{{"verdict", verdict_name(rank.verdict)}, {"label", rank.label}};

    const auto field = derivative_field_samples(map, region, samples, seed);
    double min_abs = kInfinity;
    double min_certified_floor = kInfinity;
    bool all_certified = true;
    Json witness = Json::object();
    for (const auto& pp : field) {
        detail::EigenScan scan = detail::eigen_scan(pp.polytope, grid, true);
        for (int refine = 1; refine <= 2 && !scan.certified && pp.polytope.exact() && scan.min_abs > eps; ++refine)
            scan = detail::eigen_scan(pp.polytope, 1 + (grid - 1) * (1 << refine), true);
        if (scan.min_abs < min_abs) {
            min_abs = scan.min_abs;
            witness = Json{{"point", json_vec(pp.point)},
                           {"eigenvalue", Json{{"re", scan.min_abs_witness.real()}, {"im", scan.min_abs_witness.imag()}}},
                           {"abs", scan.min_abs}};
            if (scan.min_abs_lambda.size() > 0) witness["lambda"] = json_vec(scan.min_abs_lambda);
        }
        all_certified = all_certified && scan.certified;
        if (scan.certified) min_certified_floor = std::min(min_certified_floor, scan.certified_floor);
    }
    cert.evidence["min_abs_eigenvalue"] = min_abs;
    if (all_certified) cert.evidence["certified_floor"] = min_certified_floor;

    if (min_abs <= eps) {
        cert.verdict = Verdict::Negative;
        cert.label = "negative";
        cert.evidence["witness"] = witness;
        cert.note("sampled eigenvalue inside the disc");
        return cert;
    }
    if (rank.positive() && all_certified && min_certified_floor > eps) {
        cert.verdict = Verdict::Positive;
        cert.label = "positive";
        cert.note("certified: hull eigenvalue floor exceeds the disc radius at every inspected point");
        return cert;
    }
    cert.verdict = Verdict::Heuristic;
    cert.label = "heuristic_positive";
    cert.note(rank.positive() ? "sampled spectra avoid the disc but the margin does not cover the hull"
                              : "sampled spectra avoid the disc; maximal rank itself is not certified");
    return cert;
}

/**
 * Disc-sequence injectivity: spectra over the region must avoid every disc
 * D(t_k, r_k) of a prefix whose centers tend to 0. Each disc is checked on
 * the shifted map f - t_k id (whose derivative generators shift exactly),
 * reusing the eps-disc certificate; the prefix stands in for the full
 * sequence when it was produced by a rule with limit 0 or reaches below
 * the smallness threshold.
 */
inline Certificate disc_sequence_injectivity(const AnyMap& map, const DiscSpec& discs, const Region& region,
                                             int samples, int grid, std::uint64_t seed)
{
    discs.validate();
    Certificate cert = Certificate::make("disc_sequence", Verdict::Inconclusive);
    cert.horizon = region_horizon(region);
    cert.evidence["discs"] = discs.to_json();
    cert.evidence["region"] = region.describe();

    const Certificate rank = check_maximal_rank_region(map, region, samples, grid, splitmix64(seed ^ 0xd15c));
    cert.evidence["maximal_rank"] = Json{{"verdict", verdict_name(rank.verdict)}, {"label", rank.label}};

    bool all_positive = rank.positive();
    Json disc_reports = Json::array();
    for (std::size_t k = 0; k < discs.centers.size(); ++k) {
        const AnyMap shifted = shift_map(map, discs.centers[k]);
        const Certificate shifted_cert =
            spectral_eps_disc(shifted, region, discs.radii[k], samples, grid,
                              splitmix64(seed ^ (0xd15c00 + k)));
        Json report = Json{{"center", discs.centers[k]},
                           {"radius", discs.radii[k]},
                           {"shifted_certificate", shifted_cert.to_json()}};
        disc_reports.push_back(report);
        if (shifted_cert.verdict == Verdict::Negative) {
            cert.verdict = Verdict::Negative;
            cert.label = "negative";
            cert.evidence["disc_checks"] = disc_reports;
            cert.evidence["witness"] = Json{{"disc_index", k},
                                            {"center", discs.centers[k]},
                                            {"radius", discs.radii[k]},
                                            {"shifted_witness", shifted_cert.evidence.contains("witness")
                                                                    ? shifted_cert.evidence["witness"]
                                                                    : Json::object()}};
            cert.note("a sampled eigenvalue lies inside one of the discs");
            return cert;
        }
        all_positive = all_positive && shifted_cert.positive();
    }
    cert.evidence["disc_checks"] = disc_reports;

    const double t_last = std::abs(discs.centers.back());
    const bool tail_ok = discs.rule_limit_zero || t_last <= kDiscTailThreshold;
    cert.evidence["tail"] = Json{{"t_last", t_last},
                                 {"rule_limit_zero", discs.rule_limit_zero},
                                 {"threshold", kDiscTailThreshold},
                                 {"demonstrates_limit", tail_ok}};

    if (!tail_ok) {
        cert.verdict = Verdict::Heuristic;
        cert.label = "heuristic_positive";
        cert.note("all prefix discs avoided, but the prefix does not demonstrate t -> 0");
        return cert;
    }
    if (all_positive) {
        cert.verdict = Verdict::Positive;
        cert.label = "positive";
        cert.note("certified: every disc of the prefix is avoided with margin and the centers tend to 0");
        return cert;
    }
    cert.verdict = Verdict::Heuristic;
    cert.label = "heuristic_positive";
    cert.note("discs avoided by samples; some checks lack a certified margin");
    return cert;
}

/**
 * Negative-half-plane injectivity: all hull spectra over the region must
 * satisfy Re(lambda) < 0. Reduces to the disc-sequence test with dyadic
 * discs marching down the positive real axis — spectra confined to the
 * open left half-plane avoid them all — and additionally certifies an
 * upper bound on real parts.
 */
inline Certificate half_plane_injectivity(const AnyMap& map, const Region& region, int samples, int grid,
                                          std::uint64_t seed)
{
    Certificate cert = Certificate::make("half_plane", Verdict::Inconclusive);
    cert.horizon = region_horizon(region);
    cert.evidence["region"] = region.describe();

    const Certificate rank = check_maximal_rank_region(map, region, samples, grid, splitmix64(seed ^ 0x4a1f));
    cert.evidence["maximal_rank"] = Json{{"verdict", verdict_name(rank.verdict)}, {"label", rank.label}};

    const auto field = derivative_field_samples(map, region, samples, seed);
    double max_real = -kInfinity;
    double certified_upper = -kInfinity;
    Json witness = Json::object();
    for (const auto& pp : field) {
        const detail::EigenScan scan = detail::eigen_scan(pp.polytope, grid, false);
        if (scan.max_real > max_real) {
            max_real = scan.max_real;
            witness = Json{{"point", json_vec(pp.point)},
                           {"eigenvalue", Json{{"re", scan.max_real_witness.real()}, {"im", scan.max_real_witness.imag()}}}};
        }
        certified_upper = std::max(certified_upper, detail::certified_real_upper(pp.polytope));
    }
    cert.evidence["max_real_part"] = max_real;
    cert.evidence["certified_real_upper_bound"] = certified_upper;

    if (max_real >= 0.0) {
        cert.verdict = Verdict::Negative;
        cert.label = "negative";
        cert.evidence["witness"] = witness;
        cert.note("sampled eigenvalue with nonnegative real part");
        return cert;
    }

    const Certificate discs =
        disc_sequence_injectivity(map, DiscSpec::dyadic(10), region, samples, grid, splitmix64(seed ^ 0xd7ad1c));
    cert.evidence["positive_axis_discs"] = Json{{"verdict", verdict_name(discs.verdict)}, {"label", discs.label}};

    const bool pwa_certified = map_is_pwa(map) && rank.positive() && certified_upper < 0.0;
    if (pwa_certified && discs.verdict != Verdict::Negative) {
        cert.verdict = Verdict::Positive;
        cert.label = "positive";
        cert.note("certified: hull real parts are bounded below zero at every inspected point");
        return cert;
    }
    if (discs.verdict == Verdict::Negative) {
        cert.verdict = Verdict::Negative;
        cert.label = "negative";
        cert.evidence["witness"] = discs.evidence.contains("witness") ? discs.evidence["witness"] : Json::object();
        cert.note("a positive-axis disc check failed");
        return cert;
    }
    cert.verdict = Verdict::Heuristic;
    cert.label = "heuristic_positive";
    cert.note("sampled real parts are negative; certification unavailable for this map class");
    return cert;
}

/**
 * Spectral-condition constants from the ambient derivative bound K and the
 * dimension: K2 bounds transposed-adjugate entries by (n-1)! K^(n-1), and
 * the co-norm floor per unit of s(t) is K3 = 1 / (n K2).
 */
struct SpectralConstants {
    double k1 = 0.0;
    double k2 = 0.0;
    double k3 = 0.0;
};

inline SpectralConstants spectral_constants(double ambient_bound, int n)
{
    require(ambient_bound > 0.0 && n >= 1, ErrorKind::InvalidArgument, "need a positive bound and dimension");
    SpectralConstants c;
    c.k1 = ambient_bound;
    double factorial = 1.0;
    for (int i = 2; i <= n - 1; ++i) factorial *= static_cast<double>(i);
    c.k2 = factorial * std::pow(ambient_bound, n - 1);
    c.k3 = 1.0 / (static_cast<double>(n) * c.k2);
    return c;
}

}  // namespace lipinv

#endif  // LIPINV_CRITERIA_HPP
