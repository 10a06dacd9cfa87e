#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <limits>

#include "solwalk/sol_group.hpp"
#include "test_util.hpp"

using namespace solwalk;

TEST_CASE("multiply matches the semidirect product rule") {
    SolElement p = multiply({1, 1, 0}, {-1, 0, 2});
    CHECK(close(p.z, 0.0, 1e-15));
    CHECK(close(p.x, 1.0, 1e-15));
    CHECK(close(p.y, 2.0 * std::exp(1.0), 1e-15));

    Rng rng(2024);
    for (int i = 0; i < 200; ++i) {
        SolElement g = random_element(rng);
        CHECK(close_elem(multiply(identity(), g), g, 1e-15));
        CHECK(close_elem(multiply(g, identity()), g, 1e-15));
    }
}

TEST_CASE("multiply is associative") {
    Rng rng(7);
    for (int i = 0; i < 5000; ++i) {
        SolElement a = random_element(rng), b = random_element(rng), c = random_element(rng);
        CHECK(close_elem(multiply(multiply(a, b), c), multiply(a, multiply(b, c)), 1e-12));
    }
}

TEST_CASE("multiply agrees with the 3x3 affine representation") {
    Rng rng(11);
    for (int i = 0; i < 1000; ++i) {
        SolElement a = random_element(rng, 3.0), b = random_element(rng, 3.0);
        auto ma = to_matrix(a), mb = to_matrix(b);
        std::array<std::array<double, 3>, 3> prod{};
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c)
                for (int k = 0; k < 3; ++k) prod[r][c] += ma[r][k] * mb[k][c];
        auto direct = to_matrix(multiply(a, b));
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) CHECK(close(prod[r][c], direct[r][c], 1e-12));
    }
}

TEST_CASE("inverse") {
    SolElement inv = inverse({std::log(2.0), 1, 0});
    CHECK(close(inv.z, -std::log(2.0), 1e-15));
    CHECK(close(inv.x, -2.0, 1e-15));
    CHECK(close(inv.y, 0.0, 1e-15));

    Rng rng(13);
    for (int i = 0; i < 5000; ++i) {
        SolElement g = random_element(rng);
        CHECK(close_elem(multiply(g, inverse(g)), identity(), 1e-12));
        CHECK(close_elem(multiply(inverse(g), g), identity(), 1e-12));
    }
}

TEST_CASE("real_power") {
    SECTION("halving doubling example") {
        SolElement g{std::log(2.0), 1, 0};
        SolElement g2 = real_power(g, 2.0);
        CHECK(close(g2.z, 2 * std::log(2.0), 1e-14));
        CHECK(close(g2.x, 1.5, 1e-14));
        CHECK(close(g2.y, 0.0, 1e-14));
    }
    SECTION("power one is identity map, power zero is identity element") {
        Rng rng(17);
        for (int i = 0; i < 500; ++i) {
            SolElement g = random_element(rng);
            CHECK(close_elem(real_power(g, 1.0), g, 1e-13));
            CHECK(close_elem(real_power(g, 0.0), identity(), 1e-13));
        }
    }
    SECTION("additivity g^s g^t = g^{s+t}") {
        Rng rng(19);
        for (int i = 0; i < 5000; ++i) {
            SolElement g = random_element(rng);
            double s = uniform_in(rng, -3, 3), t = uniform_in(rng, -3, 3);
            SolElement a = real_power(g, s), b = real_power(g, t);
            SolElement lhs = multiply(a, b), rhs = real_power(g, s + t);
            // tolerance is relative to the summands actually combined: when s ~ -t
            // the product cancels and no algorithm can do better than this scale
            double sx = std::max({1.0, std::abs(a.x), std::exp(-a.z) * std::abs(b.x)});
            double sy = std::max({1.0, std::abs(a.y), std::exp(a.z) * std::abs(b.y)});
            CHECK(close(lhs.z, rhs.z, 1e-12));
            CHECK(std::abs(lhs.x - rhs.x) <= 1e-10 * sx);
            CHECK(std::abs(lhs.y - rhs.y) <= 1e-10 * sy);
        }
    }
    SECTION("continuity across the z = 0 branch") {
        for (double t : {-2.0, 0.5, 2.0, 7.0}) {
            SolElement a{1e-8, 1.0, -1.0};  // direct formula
            SolElement b{0.0, 1.0, -1.0};   // limit branch
            SolElement pa = real_power(a, t), pb = real_power(b, t);
            CHECK(std::abs(pa.x - pb.x) < 1e-6);
            CHECK(std::abs(pa.y - pb.y) < 1e-6);
        }
    }
}

TEST_CASE("axis_distance") {
    CHECK(axis_distance(0.0) == 0.0);
    CHECK(close(axis_distance(2.0 * std::sinh(1.0)), 2.0, 1e-14));

    Rng rng(23);
    double prev = 0;
    for (double x = 0.0; x < 50.0; x += 0.37) {
        double d = axis_distance(x);
        CHECK(d >= prev);
        prev = d;
    }
}

TEST_CASE("distance_bounds") {
    SECTION("identity and pure vertical") {
        DistanceBounds id = distance_bounds(identity());
        CHECK(id.lower == 0.0);
        CHECK(id.upper == 0.0);
        DistanceBounds v = distance_bounds({5, 0, 0});
        CHECK(close(v.lower, 5.0, 1e-15));
        CHECK(close(v.upper, 5.0, 1e-15));
    }
    SECTION("sandwich the exact axis distance") {
        Rng rng(29);
        for (int i = 0; i < 2000; ++i) {
            double x = uniform_in(rng, -100, 100);
            DistanceBounds b = distance_bounds({0, x, 0});
            double d = axis_distance(x);
            CHECK(b.lower <= d + 1e-12);
            CHECK(d <= b.upper + 1e-12);
        }
    }
    SECTION("lower <= upper always") {
        Rng rng(31);
        for (int i = 0; i < 5000; ++i) {
            SolElement g = random_element(rng, 8.0, 1000.0);
            DistanceBounds b = distance_bounds(g);
            CHECK(b.lower <= b.upper + 1e-12);
            CHECK(b.lower >= 0.0);
        }
    }
}

TEST_CASE("boundary_action") {
    SECTION("composition compatibility") {
        Rng rng(37);
        for (int i = 0; i < 5000; ++i) {
            SolElement g = random_element(rng, 3.0), h = random_element(rng, 3.0);
            double xi = uniform_in(rng, -10, 10);
            for (BoundarySide side : {BoundarySide::Plus, BoundarySide::Minus}) {
                double lhs = boundary_action(multiply(g, h), xi, side);
                double rhs = boundary_action(g, boundary_action(h, xi, side), side);
                CHECK(close(lhs, rhs, 1e-12));
            }
        }
    }
    SECTION("z = 0 acts by pure translation") {
        CHECK(close(boundary_action({0, 3, 0}, 1.5, BoundarySide::Plus), 4.5, 1e-15));
    }
}

TEST_CASE("fixed_point") {
    CHECK(close(fixed_point({std::log(2.0), 1, 7}, BoundarySide::Plus), 2.0, 1e-14));
    CHECK(close(fixed_point({-std::log(2.0), 7, 1}, BoundarySide::Minus), 2.0, 1e-14));
    CHECK_THROWS_AS(fixed_point({0, 1, 1}, BoundarySide::Plus), degenerate_input_error);

    SECTION("fixed point is fixed by the action") {
        Rng rng(41);
        for (int i = 0; i < 2000; ++i) {
            SolElement g = random_element(rng);
            if (std::abs(g.z) < 1e-3) continue;
            for (BoundarySide side : {BoundarySide::Plus, BoundarySide::Minus}) {
                double p = fixed_point(g, side);
                CHECK(close(boundary_action(g, p, side), p, 1e-11));
            }
        }
    }
}

TEST_CASE("is_proper_pair") {
    // h shares the fixed point 2 with g on the ascending boundary
    SolElement g{std::log(2.0), 1, 0};
    SolElement h{std::log(3.0), 4.0 / 3.0, 0};
    CHECK_FALSE(is_proper_pair(g, h, BoundarySide::Plus));
    CHECK(is_proper_pair(g, SolElement{std::log(3.0), 2.0, 0}, BoundarySide::Plus));
    CHECK_FALSE(is_proper_pair(g, SolElement{0, 1, 1}, BoundarySide::Plus));
}

TEST_CASE("distance_bounds_from_logr matches distance_bounds") {
    Rng rng(57);
    for (int i = 0; i < 2000; ++i) {
        SolElement g = random_element(rng);
        double log_r = std::log(std::hypot(g.x, g.y));
        DistanceBounds a = distance_bounds(g);
        DistanceBounds b = distance_bounds_from_logr(g.z, log_r);
        CHECK(close(a.lower, b.lower, 1e-9));
        CHECK(close(a.upper, b.upper, 1e-9));
    }

    SECTION("r = 0 collapses to the vertical axis") {
        DistanceBounds b = distance_bounds_from_logr(3.0, -std::numeric_limits<double>::infinity());
        CHECK(b.lower == 3.0);
        CHECK(b.upper == 3.0);
    }

    SECTION("log_r beyond double overflow") {
        // for log r = 800 the exact values are az + 4 log r and 2(log r - log 4) - az
        DistanceBounds b = distance_bounds_from_logr(5.0, 800.0);
        CHECK(close(b.upper, 5.0 + 4 * 800.0, 1e-12));
        CHECK(close(b.lower, 2 * (800.0 - std::log(4.0)) - 5.0, 1e-12));
        CHECK(b.lower <= b.upper);
    }
}
