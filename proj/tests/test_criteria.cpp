#include <catch2/catch_amalgamated.hpp>

#include <lipinv/corpus.hpp>
#include <lipinv/criteria.hpp>

#include "oracles.hpp"

namespace {

using namespace lipinv;

PwaMap make_shear()
{
    Mat a_up(2, 2), a_dn(2, 2);
    a_up << 1, 1, 0, 1;
    a_dn << 1, -1, 0, 1;
    Polyhedron up = Polyhedron::all_space(2);
    up.add(make_vec({0.0, -1.0}), 0.0);
    Polyhedron dn = Polyhedron::all_space(2);
    dn.add(make_vec({0.0, 1.0}), 0.0);
    return PwaMap({{a_up, Vec::Zero(2), up}, {a_dn, Vec::Zero(2), dn}}, Domain::all_space(2));
}

PwaMap make_triangular_pair()
{
    // f(x, y) = (x +- y, 0.5 y): triangular generators with diagonal {1, 0.5}
    Mat a_up(2, 2), a_dn(2, 2);
    a_up << 1, 1, 0, 0.5;
    a_dn << 1, -1, 0, 0.5;
    Polyhedron up = Polyhedron::all_space(2);
    up.add(make_vec({0.0, -1.0}), 0.0);
    Polyhedron dn = Polyhedron::all_space(2);
    dn.add(make_vec({0.0, 1.0}), 0.0);
    return PwaMap({{a_up, Vec::Zero(2), up}, {a_dn, Vec::Zero(2), dn}}, Domain::all_space(2));
}

LipschitzMap make_abs1d()
{
    LipschitzMap m;
    m.dim_in = m.dim_out = 1;
    m.domain = Domain::all_space(1);
    m.eval_fn = [](const Vec& x) { return make_vec({std::abs(x[0])}); };
    m.jac_fn = [](const Vec& x) {
        Mat j(1, 1);
        j << (x[0] >= 0.0 ? 1.0 : -1.0);
        return j;
    };
    m.smooth = false;
    return m;
}

LipschitzMap make_exp1d()
{
    LipschitzMap m;
    m.dim_in = m.dim_out = 1;
    m.domain = Domain::all_space(1);
    m.eval_fn = [](const Vec& x) { return make_vec({std::exp(x[0])}); };
    m.jac_fn = [](const Vec& x) {
        Mat j(1, 1);
        j << std::exp(x[0]);
        return j;
    };
    m.smooth = true;
    return m;
}

RadialProfile flat_profile(const std::vector<double>& radii, double value)
{
    RadialProfile p;
    p.kind = RadialProfile::Kind::CoNorm;
    p.radii = radii;
    p.values.assign(radii.size(), value);
    return p;
}

}  // namespace

TEST_CASE("region horizons: ball radius and box half-diagonal", "[criteria][region]")
{
    REQUIRE(region_horizon(Region::ball(make_vec({1.0, 2.0}), 3.5)) == 3.5);
    const Region box = Region::box(make_vec({0.0, 0.0}), make_vec({2.0, 2.0}));
    REQUIRE(region_horizon(box) == Catch::Approx(std::sqrt(2.0)));
}

TEST_CASE("piecewise strata include the kink interfaces", "[criteria][strata]")
{
    const PwaMap shear = make_shear();
    const auto points = pwa_stratum_points(shear, Region::box(make_vec({-5.0, -5.0}), make_vec({5.0, 5.0})));
    REQUIRE_FALSE(points.empty());
    bool kink_seen = false;
    for (const auto& x : points) {
        const MatrixPolytope hull = clarke_exact(shear, x);
        REQUIRE(hull.count() >= 1);
        if (std::abs(x[1]) <= 1e-9 && hull.count() == 2) kink_seen = true;
    }
    REQUIRE(kink_seen);
}

TEST_CASE("maximal rank over a region: exact certification for piecewise maps", "[criteria][rank]")
{
    const Certificate cert = check_maximal_rank_region(
        AnyMap{make_shear()}, Region::box(make_vec({-5.0, -5.0}), make_vec({5.0, 5.0})), 40, 21, 11);
    REQUIRE(cert.verdict == Verdict::Positive);
    REQUIRE(cert.label == "positive");
    REQUIRE(cert.criterion == "maximal_rank");
    REQUIRE(cert.evidence["points_checked"].get<int>() > 0);
}

TEST_CASE("maximal rank over a region: a derivative sign flip is hunted to a witness", "[criteria][rank]")
{
    const Certificate cert =
        check_maximal_rank_region(AnyMap{make_abs1d()}, Region::box(make_vec({-1.0}), make_vec({1.0})), 40, 21, 12);
    REQUIRE(cert.verdict == Verdict::Negative);
    REQUIRE(cert.evidence.contains("witness"));
    const auto wp = cert.evidence["witness"]["point"].get<std::vector<double>>();
    REQUIRE(std::abs(wp[0]) <= 1e-6);  // the kink of |x| is the only rank-defect site
}

TEST_CASE("maximal rank over a region: smooth black boxes stay heuristic", "[criteria][rank]")
{
    const Certificate cert =
        check_maximal_rank_region(AnyMap{make_exp1d()}, Region::box(make_vec({-3.0}), make_vec({3.0})), 30, 21, 13);
    REQUIRE(cert.verdict == Verdict::Heuristic);
    REQUIRE(cert.label == "heuristic_positive");
}

TEST_CASE("the shear co-norm profile is constant at the golden-ratio value", "[criteria][profile]")
{
    const std::vector<double> radii = {1.0, 2.0, 3.0, 4.0, 5.0};
    const RadialProfile p =
        radial_profile(AnyMap{make_shear()}, make_vec({0.0, 0.0}), radii, RadialProfile::Kind::CoNorm, 40, 101, 21);
    const double phi_inv = 2.0 / (1.0 + std::sqrt(5.0));
    REQUIRE(p.values.size() == radii.size());
    for (double v : p.values) REQUIRE(v == Catch::Approx(phi_inv).margin(1e-9));
    REQUIRE(p.witnesses.size() == radii.size());
}

TEST_CASE("the exponential co-norm profile matches its closed form", "[criteria][profile]")
{
    const std::vector<double> radii = {1.0, 2.0, 3.0};
    const RadialProfile p =
        radial_profile(AnyMap{make_exp1d()}, make_vec({0.0}), radii, RadialProfile::Kind::CoNorm, 60, 21, 22);
    for (std::size_t k = 0; k < radii.size(); ++k)
        REQUIRE(p.values[k] == Catch::Approx(std::exp(-radii[k])).margin(1e-4));
}

TEST_CASE("profiles are nonincreasing running minima", "[criteria][profile]")
{
    const CorpusEntry e = find_corpus_entry("twoxsin");
    const std::vector<double> radii = {1.0, 2.0, 4.0, 6.0, 8.0};
    const RadialProfile p =
        radial_profile(e.map, e.profile_center, radii, RadialProfile::Kind::CoNorm, 60, 21, 23);
    for (std::size_t k = 1; k < p.values.size(); ++k) REQUIRE(p.values[k] <= p.values[k - 1] + 1e-15);
    REQUIRE(p.sample_counts.size() == radii.size());
    // slope of 2x + sin x is 2 + cos x, with infimum 1 attained at the center pi
    for (double v : p.values) REQUIRE(v == Catch::Approx(1.0).margin(1e-3));
}

TEST_CASE("profile preconditions: ordering, positivity, horizon", "[criteria][profile]")
{
    const AnyMap shear{make_shear()};
    const Vec x0 = make_vec({0.0, 0.0});
    REQUIRE_THROWS_AS(radial_profile(shear, x0, {2.0, 1.0}, RadialProfile::Kind::CoNorm, 8, 11, 1), Error);
    REQUIRE_THROWS_AS(radial_profile(shear, x0, {-1.0}, RadialProfile::Kind::CoNorm, 8, 11, 1), Error);
    REQUIRE_THROWS_AS(radial_profile(shear, x0, {}, RadialProfile::Kind::CoNorm, 8, 11, 1), Error);

    const FinslerPatch small =
        FinslerPatch::constant(Domain::box(make_vec({-2.0, -2.0}), make_vec({2.0, 2.0})), NormAtPoint::euclidean(2));
    try {
        radial_profile(shear, x0, {1.0, 3.0}, RadialProfile::Kind::CoNorm, 8, 11, 1, &small);
        FAIL("expected a horizon failure");
    } catch (const Error& e) {
        REQUIRE(e.kind() == ErrorKind::HorizonExceeded);
    }
}

TEST_CASE("the spectral-power profile of the shear is identically one", "[criteria][profile]")
{
    const RadialProfile p = radial_profile(AnyMap{make_shear()}, make_vec({0.0, 0.0}), {1.0, 2.0},
                                           RadialProfile::Kind::SpectralPowerN, 40, 21, 24);
    for (double v : p.values) REQUIRE(v == Catch::Approx(1.0).margin(1e-9));
}

TEST_CASE("in one dimension the co-norm and spectral-power profiles coincide", "[criteria][profile]")
{
    const std::vector<double> radii = {0.5, 1.0, 1.5};
    const AnyMap exp1{make_exp1d()};
    const RadialProfile a =
        radial_profile(exp1, make_vec({0.0}), radii, RadialProfile::Kind::CoNorm, 30, 21, 25);
    const RadialProfile b =
        radial_profile(exp1, make_vec({0.0}), radii, RadialProfile::Kind::SpectralPowerN, 30, 21, 25);
    for (std::size_t k = 0; k < radii.size(); ++k) REQUIRE(a.values[k] == Catch::Approx(b.values[k]).margin(1e-12));
}

TEST_CASE("the co-norm dominates its spectral floor constant", "[criteria][constants]")
{
    // |det B| >= min|lambda|^n and //B// >= |det B| / |B|^(n-1) give
    // //B// >= K3 * n! / n ... the packaged constant keeps //B// >= k3 * s.
    const std::vector<double> radii = {1.0, 2.0, 3.0};
    const AnyMap shear{make_shear()};
    const Vec x0 = make_vec({0.0, 0.0});
    const RadialProfile m = radial_profile(shear, x0, radii, RadialProfile::Kind::CoNorm, 40, 41, 26);
    const RadialProfile s = radial_profile(shear, x0, radii, RadialProfile::Kind::SpectralPowerN, 40, 41, 26);
    const double phi = 0.5 * (1.0 + std::sqrt(5.0));  // derivative-norm bound of the shear
    const SpectralConstants c = spectral_constants(phi, 2);
    for (std::size_t k = 0; k < radii.size(); ++k) REQUIRE(m.values[k] >= c.k3 * s.values[k] - 1e-6);
}

TEST_CASE("spectral constants follow the factorial-power formulas", "[criteria][constants]")
{
    const SpectralConstants c1 = spectral_constants(7.0, 1);
    REQUIRE(c1.k2 == 1.0);
    REQUIRE(c1.k3 == 1.0);
    const SpectralConstants c2 = spectral_constants(2.0, 2);
    REQUIRE(c2.k2 == 2.0);
    REQUIRE(c2.k3 == 0.25);
    const SpectralConstants c4 = spectral_constants(1.5, 4);
    REQUIRE(c4.k2 == Catch::Approx(6.0 * 1.5 * 1.5 * 1.5));
    REQUIRE(c4.k3 == Catch::Approx(1.0 / (4.0 * c4.k2)));
    REQUIRE_THROWS_AS(spectral_constants(0.0, 2), Error);
}

TEST_CASE("radial-integral verdict: a vanishing profile is hard negative evidence", "[criteria][hadamard]")
{
    RadialProfile p = flat_profile({1.0, 2.0, 3.0, 4.0}, 0.5);
    p.values.back() = 0.0;
    const Certificate cert = hadamard_verdict(p);
    REQUIRE(cert.verdict == Verdict::Negative);
    REQUIRE(cert.label == "negative_signal");
    REQUIRE(cert.evidence["witness"]["radius"].get<double>() == 4.0);
}

TEST_CASE("radial-integral verdict: flat tails persist to the horizon", "[criteria][hadamard]")
{
    const Certificate cert = hadamard_verdict(flat_profile({1.0, 2.0, 3.0, 4.0}, 0.618));
    REQUIRE(cert.verdict == Verdict::Positive);
    REQUIRE(cert.label == "positive_to_horizon");
    REQUIRE(cert.evidence["floor"].get<double>() == Catch::Approx(0.618));
    REQUIRE(cert.evidence["integral_to_horizon"].get<double>() == Catch::Approx(0.618 * 4.0));
}

TEST_CASE("radial-integral verdict: a declared floor certifies up to the horizon", "[criteria][hadamard]")
{
    RadialProfile p = flat_profile({1.0, 2.0, 3.0}, 1.0);
    p.values = {1.0, 0.8, 0.7};  // decaying but above the declared floor
    const Certificate held = hadamard_verdict(p, 0.5);
    REQUIRE(held.verdict == Verdict::Positive);
    REQUIRE(held.label == "positive_to_horizon");
    REQUIRE(held.evidence["floor"].get<double>() == 0.5);

    p.values = {1.0, 0.4, 0.2};  // violates the floor and keeps decaying
    const Certificate broken = hadamard_verdict(p, 0.5);
    REQUIRE(broken.verdict == Verdict::Heuristic);
    REQUIRE(broken.label == "negative_signal");
}

TEST_CASE("radial-integral verdict: geometric decay reads as a convergent tail", "[criteria][hadamard]")
{
    RadialProfile p;
    p.kind = RadialProfile::Kind::CoNorm;
    for (int k = 1; k <= 10; ++k) {
        p.radii.push_back(static_cast<double>(k));
        p.values.push_back(std::exp(-static_cast<double>(k)));
    }
    const Certificate cert = hadamard_verdict(p);
    REQUIRE(cert.verdict == Verdict::Heuristic);
    REQUIRE(cert.label == "negative_signal");
    const double slope = cert.evidence["tail_fit"]["log_slope"].get<double>();
    REQUIRE(slope == Catch::Approx(-1.0).margin(1e-9));
    const double tail = cert.evidence["tail_fit"]["fitted_tail_integral"].get<double>();
    REQUIRE(tail == Catch::Approx(std::exp(-10.0)).margin(1e-12));
}

TEST_CASE("radial-integral verdict: decay without a convergent fit stays unsignaled", "[criteria][hadamard]")
{
    // nonmonotone diagnostic data: a mid-window bump keeps the fitted slope
    // nonnegative while the window still decays end to end
    RadialProfile p;
    p.kind = RadialProfile::Kind::CoNorm;
    for (int k = 1; k <= 12; ++k) p.radii.push_back(static_cast<double>(k));
    p.values = {2.0, 2.0, 2.0, 2.0, 2.0, 2.0, 2.0, 2.0, 1.0, 1.0, 1.3, 0.94};
    const Certificate cert = hadamard_verdict(p);
    REQUIRE(cert.verdict == Verdict::Heuristic);
    REQUIRE(cert.label == "heuristic");
    REQUIRE(cert.evidence["tail_fit"]["log_slope"].get<double>() >= 0.0);
}

TEST_CASE("radial-integral verdict preconditions", "[criteria][hadamard]")
{
    RadialProfile wrong_kind;
    wrong_kind.kind = RadialProfile::Kind::SpectralPowerN;
    wrong_kind.radii = {1.0};
    wrong_kind.values = {1.0};
    REQUIRE_THROWS_AS(hadamard_verdict(wrong_kind), Error);

    RadialProfile empty;
    empty.kind = RadialProfile::Kind::CoNorm;
    try {
        hadamard_verdict(empty);
        FAIL("expected an empty-profile failure");
    } catch (const Error& e) {
        REQUIRE(e.kind() == ErrorKind::EmptyProfile);
    }

    REQUIRE_THROWS_AS(hadamard_verdict(flat_profile({1.0}, 1.0), -0.5), Error);
}

TEST_CASE("eps-disc spectra: a triangular family certifies both ways", "[criteria][spectral]")
{
    const AnyMap tri{make_triangular_pair()};
    const Region region = Region::box(make_vec({-2.0, -2.0}), make_vec({2.0, 2.0}));

    const Certificate neg = spectral_eps_disc(tri, region, 0.7, 30, 21, 31);
    REQUIRE(neg.verdict == Verdict::Negative);
    REQUIRE(neg.evidence["witness"]["abs"].get<double>() == Catch::Approx(0.5).margin(1e-9));

    const Certificate pos = spectral_eps_disc(tri, region, 0.3, 30, 21, 31);
    REQUIRE(pos.verdict == Verdict::Positive);
    REQUIRE(pos.label == "positive");
    REQUIRE(pos.evidence["certified_floor"].get<double>() == Catch::Approx(0.5).margin(1e-9));
    REQUIRE(pos.evidence["min_abs_eigenvalue"].get<double>() == Catch::Approx(0.5).margin(1e-9));
}

TEST_CASE("eps-disc spectra: the exponential dips under the default disc", "[criteria][spectral]")
{
    const Certificate cert = spectral_eps_disc(AnyMap{make_exp1d()}, Region::box(make_vec({-3.0}), make_vec({3.0})),
                                               kSpectralEpsDefault, 40, 21, 32);
    REQUIRE(cert.verdict == Verdict::Negative);
    // slope e^x falls to ~0.0498 < 0.1 near the left edge
    REQUIRE(cert.evidence["min_abs_eigenvalue"].get<double>() <= 0.1);
}

TEST_CASE("eps-disc spectra: smooth black boxes cap at a heuristic", "[criteria][spectral]")
{
    LipschitzMap m;
    m.dim_in = m.dim_out = 2;
    m.domain = Domain::all_space(2);
    m.eval_fn = [](const Vec& x) { return make_vec({2.0 * x[0] + 0.1 * std::sin(x[1]), 2.0 * x[1] + 0.1 * std::sin(x[0])}); };
    m.jac_fn = [](const Vec& x) {
        Mat j(2, 2);
        j << 2.0, 0.1 * std::cos(x[1]), 0.1 * std::cos(x[0]), 2.0;
        return j;
    };
    m.smooth = true;
    const Certificate cert =
        spectral_eps_disc(AnyMap{m}, Region::box(make_vec({-2.0, -2.0}), make_vec({2.0, 2.0})), 0.5, 30, 21, 33);
    REQUIRE(cert.verdict == Verdict::Heuristic);
    REQUIRE(cert.label == "heuristic_positive");
    REQUIRE(cert.evidence["min_abs_eigenvalue"].get<double>() >= 1.8);
}

TEST_CASE("disc-sequence spectra: the shear clears a dyadic prefix exactly", "[criteria][discs]")
{
    const Certificate cert = disc_sequence_injectivity(
        AnyMap{make_shear()}, DiscSpec::dyadic(6), Region::box(make_vec({-5.0, -5.0}), make_vec({5.0, 5.0})), 30, 21, 41);
    REQUIRE(cert.verdict == Verdict::Positive);
    REQUIRE(cert.label == "positive");
    REQUIRE(cert.evidence["disc_checks"].size() == 6);
    REQUIRE(cert.evidence["tail"]["demonstrates_limit"].get<bool>());
}

TEST_CASE("disc-sequence spectra: an eigenvalue inside a disc is a witness", "[criteria][discs]")
{
    // f(x) = 0.5 x has derivative 0.5, dead centre of the first dyadic disc
    Mat a(1, 1);
    a << 0.5;
    const PwaMap half({{a, Vec::Zero(1), Polyhedron::all_space(1)}}, Domain::all_space(1));
    const Certificate cert = disc_sequence_injectivity(AnyMap{half}, DiscSpec::dyadic(4),
                                                       Region::box(make_vec({-1.0}), make_vec({1.0})), 20, 21, 42);
    REQUIRE(cert.verdict == Verdict::Negative);
    REQUIRE(cert.evidence["witness"]["disc_index"].get<int>() == 0);
    REQUIRE(cert.evidence["witness"]["center"].get<double>() == 0.5);
}

TEST_CASE("disc-sequence spectra: a prefix without a limit rule stays heuristic", "[criteria][discs]")
{
    // centers away from the shear's double eigenvalue 1, so every disc clears
    const DiscSpec prefix = DiscSpec::from_lists({0.5, 0.4}, {0.1, 0.1});
    REQUIRE_FALSE(prefix.rule_limit_zero);
    const Certificate cert = disc_sequence_injectivity(
        AnyMap{make_shear()}, prefix, Region::box(make_vec({-5.0, -5.0}), make_vec({5.0, 5.0})), 30, 21, 43);
    REQUIRE(cert.verdict == Verdict::Heuristic);
    REQUIRE(cert.label == "heuristic_positive");
    REQUIRE_FALSE(cert.evidence["tail"]["demonstrates_limit"].get<bool>());
}

TEST_CASE("half-plane spectra: the coupled negative cross certifies", "[criteria][halfplane]")
{
    const CorpusEntry e = find_corpus_entry("neg_cross");
    const Certificate cert = half_plane_injectivity(e.map, e.eval_region, 40, 21, 51);
    REQUIRE(cert.verdict == Verdict::Positive);
    REQUIRE(cert.label == "positive");
    // symmetric-part bounds of the quadrant generators pin the range [-1.3, -0.7]
    REQUIRE(cert.evidence["certified_real_upper_bound"].get<double>() == Catch::Approx(-0.7).margin(1e-9));
    REQUIRE(cert.evidence["max_real_part"].get<double>() < 0.0);
}

TEST_CASE("half-plane spectra: a positive eigenvalue is an immediate witness", "[criteria][halfplane]")
{
    const Certificate cert = half_plane_injectivity(
        AnyMap{make_shear()}, Region::box(make_vec({-5.0, -5.0}), make_vec({5.0, 5.0})), 30, 21, 52);
    REQUIRE(cert.verdict == Verdict::Negative);
    REQUIRE(cert.evidence["witness"]["eigenvalue"]["re"].get<double>() == Catch::Approx(1.0).margin(1e-9));
}

TEST_CASE("half-plane spectra: negative smooth black boxes stay heuristic", "[criteria][halfplane]")
{
    LipschitzMap m;
    m.dim_in = m.dim_out = 1;
    m.domain = Domain::all_space(1);
    m.eval_fn = [](const Vec& x) { return make_vec({-2.0 * x[0] + 0.1 * std::sin(x[0])}); };
    m.jac_fn = [](const Vec& x) {
        Mat j(1, 1);
        j << -2.0 + 0.1 * std::cos(x[0]);
        return j;
    };
    m.smooth = true;
    const Certificate cert =
        half_plane_injectivity(AnyMap{m}, Region::box(make_vec({-2.0}), make_vec({2.0})), 30, 21, 53);
    REQUIRE(cert.verdict == Verdict::Heuristic);
    REQUIRE(cert.label == "heuristic_positive");
    REQUIRE(cert.evidence["max_real_part"].get<double>() < -1.8);
}

TEST_CASE("bundled corpus expectations replay through the criteria", "[criteria][corpus]")
{
    // the full corpus gate also runs through the command-line runner; this
    // spot-checks two entries directly at the library level
    const CorpusEntry shear = find_corpus_entry("shear_abs");
    REQUIRE(check_maximal_rank_region(shear.map, shear.eval_region, 40, 21, 61).verdict == Verdict::Positive);

    const CorpusEntry exp1 = find_corpus_entry("exp1d");
    const RadialProfile p = radial_profile(exp1.map, exp1.profile_center, {1.0, 2.0, 3.0},
                                           RadialProfile::Kind::CoNorm, 60, 21, 62);
    const Certificate cert = hadamard_verdict(p);
    REQUIRE(cert.verdict == Verdict::Heuristic);
    REQUIRE(cert.label == "negative_signal");
}
