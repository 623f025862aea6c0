#include <catch2/catch_amalgamated.hpp>

#include <set>

#include <lipinv/polyhedron.hpp>

#include "oracles.hpp"

using namespace lipinv;

TEST_CASE("projection onto a box is coordinate clamping", "[polyhedron][projection]")
{
    const Polyhedron box = Polyhedron::box(make_vec({-1.0, 0.0}), make_vec({2.0, 3.0}));
    Rng rng = Rng::substream(5, 0);
    for (int i = 0; i < 200; ++i) {
        const Vec x = make_vec({rng.uniform(-6.0, 6.0), rng.uniform(-6.0, 6.0)});
        const auto p = project_onto(box, x);
        REQUIRE(p.has_value());
        const Vec expected = make_vec({std::clamp(x[0], -1.0, 2.0), std::clamp(x[1], 0.0, 3.0)});
        REQUIRE((*p - expected).norm() <= 1e-10);
    }
}

TEST_CASE("projection onto a half-space matches the closed form", "[polyhedron][projection]")
{
    Polyhedron h = Polyhedron::all_space(3);
    const Vec a = make_vec({1.0, 2.0, -2.0});
    h.add(a, 4.0);  // <a, x> <= 4
    Rng rng = Rng::substream(6, 0);
    for (int i = 0; i < 200; ++i) {
        const Vec x = rng.gaussian_vec(3) * 5.0;
        const auto p = project_onto(h, x);
        REQUIRE(p.has_value());
        const double excess = std::max(0.0, a.dot(x) - 4.0);
        const Vec expected = x - excess / a.squaredNorm() * a;
        REQUIRE((*p - expected).norm() <= 1e-9);
    }
}

TEST_CASE("projection is optimal against random feasible competitors", "[polyhedron][projection]")
{
    // triangle x >= 0, y >= 0, x + y <= 2
    Polyhedron tri = Polyhedron::all_space(2);
    tri.add(make_vec({-1.0, 0.0}), 0.0);
    tri.add(make_vec({0.0, -1.0}), 0.0);
    tri.add(make_vec({1.0, 1.0}), 2.0);

    Rng rng = Rng::substream(7, 1);
    for (int trial = 0; trial < 50; ++trial) {
        const Vec x = make_vec({rng.uniform(-4.0, 4.0), rng.uniform(-4.0, 4.0)});
        const auto p = project_onto(tri, x);
        REQUIRE(p.has_value());
        REQUIRE(tri.contains(*p, 1e-8));
        const double d = (*p - x).norm();
        for (int i = 0; i < 500; ++i) {
            Vec q = make_vec({rng.uniform(0.0, 2.0), rng.uniform(0.0, 2.0)});
            if (!tri.contains(q, 0.0)) continue;
            REQUIRE((q - x).norm() >= d - 1e-9);
        }
    }
}

TEST_CASE("infeasible systems yield no projection", "[polyhedron][projection]")
{
    Polyhedron empty = Polyhedron::all_space(2);
    empty.add(make_vec({1.0, 0.0}), -1.0);  // x <= -1
    empty.add(make_vec({-1.0, 0.0}), -1.0); // x >= 1
    REQUIRE_FALSE(project_onto(empty, make_vec({0.0, 0.0})).has_value());
}

TEST_CASE("distance to a shifted box", "[polyhedron][projection]")
{
    const Polyhedron box = Polyhedron::box(make_vec({1.0, 1.0}), make_vec({2.0, 2.0}));
    REQUIRE(distance_to(box, make_vec({0.0, 0.0})) == Catch::Approx(std::sqrt(2.0)).epsilon(1e-12));
    REQUIRE(distance_to(box, make_vec({1.5, 1.5})) == Catch::Approx(0.0).margin(1e-12));
    REQUIRE(distance_to(box, make_vec({3.0, 1.5})) == Catch::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("vertex enumeration recovers corners", "[polyhedron][vertices]")
{
    const Polyhedron box = Polyhedron::box(make_vec({0.0, 0.0}), make_vec({1.0, 2.0}));
    auto verts = enumerate_vertices(box);
    REQUIRE(verts.size() == 4);
    std::set<std::pair<double, double>> got;
    for (const auto& v : verts) got.insert({std::round(v[0] * 1e9) / 1e9, std::round(v[1] * 1e9) / 1e9});
    REQUIRE(got == std::set<std::pair<double, double>>{{0, 0}, {0, 2}, {1, 0}, {1, 2}});

    Polyhedron tri = Polyhedron::all_space(2);
    tri.add(make_vec({-1.0, 0.0}), 0.0);
    tri.add(make_vec({0.0, -1.0}), 0.0);
    tri.add(make_vec({1.0, 1.0}), 2.0);
    REQUIRE(enumerate_vertices(tri).size() == 3);
}

TEST_CASE("bounding box encloses all vertices", "[polyhedron]")
{
    Polyhedron tri = Polyhedron::all_space(2);
    tri.add(make_vec({-1.0, 0.0}), 0.0);
    tri.add(make_vec({0.0, -1.0}), 0.0);
    tri.add(make_vec({1.0, 2.0}), 4.0);
    const auto [lo, hi] = bounding_box(tri);
    for (const auto& v : enumerate_vertices(tri))
        for (int i = 0; i < 2; ++i) {
            REQUIRE(v[i] >= lo[i] - 1e-9);
            REQUIRE(v[i] <= hi[i] + 1e-9);
        }
}

TEST_CASE("region point_in finds points exactly when the intersection is nonempty", "[polyhedron][region]")
{
    Polyhedron half = Polyhedron::all_space(2);
    half.add(make_vec({-1.0, 0.0}), -0.5);  // x >= 0.5

    const Region ball = Region::ball(make_vec({0.0, 0.0}), 1.0);
    const auto inside = ball.point_in(half);
    REQUIRE(inside.has_value());
    REQUIRE(half.contains(*inside, 1e-9));
    REQUIRE(ball.contains(*inside, 1e-9));

    Polyhedron far = Polyhedron::all_space(2);
    far.add(make_vec({-1.0, 0.0}), -3.0);  // x >= 3
    REQUIRE_FALSE(ball.point_in(far).has_value());

    const Region box = Region::box(make_vec({-2.0, -2.0}), make_vec({2.0, 2.0}));
    const auto bp = box.point_in(far);
    REQUIRE_FALSE(bp.has_value());
    const auto bp2 = box.point_in(half);
    REQUIRE(bp2.has_value());
    REQUIRE((*bp2 - make_vec({0.5, 0.0})).norm() <= 1e-9);
}

TEST_CASE("region sampling stays inside", "[polyhedron][region]")
{
    Rng rng = Rng::substream(9, 2);
    const Region ball = Region::ball(make_vec({1.0, -1.0, 0.0}), 2.0);
    const Region box = Region::box(make_vec({-1.0, 0.0}), make_vec({1.0, 4.0}));
    for (int i = 0; i < 500; ++i) {
        REQUIRE(ball.contains(ball.sample(rng)));
        REQUIRE(box.contains(box.sample(rng)));
    }
}

TEST_CASE("domain ball margins measure distance to the boundary", "[polyhedron][domain]")
{
    const Domain box = Domain::box(make_vec({0.0, 0.0}), make_vec({4.0, 2.0}));
    REQUIRE(box.ball_margin(make_vec({2.0, 1.0})) == Catch::Approx(1.0));
    REQUIRE(box.ball_margin(make_vec({0.5, 1.0})) == Catch::Approx(0.5));
    const Domain all = Domain::all_space(2);
    REQUIRE(std::isinf(all.ball_margin(make_vec({100.0, -100.0}))));
}

TEST_CASE("intersection combines constraints", "[polyhedron]")
{
    Polyhedron a = Polyhedron::all_space(2);
    a.add(make_vec({1.0, 0.0}), 1.0);
    Polyhedron b = Polyhedron::all_space(2);
    b.add(make_vec({-1.0, 0.0}), 0.0);
    const Polyhedron c = a.intersect(b);
    REQUIRE(c.rows.size() == 2);
    REQUIRE(c.contains(make_vec({0.5, 7.0})));
    REQUIRE_FALSE(c.contains(make_vec({1.5, 0.0})));
    REQUIRE_FALSE(c.contains(make_vec({-0.5, 0.0})));
}
