#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "solwalk/vertical_walk.hpp"
#include "test_util.hpp"

using namespace solwalk;

static VerticalMeasure two_atom(double p, double gamma = 1.0) {
    return {gamma, {{1, p}, {-1, 1.0 - p}}};
}

TEST_CASE("vertical_drift") {
    CHECK(close(vertical_drift(two_atom(0.7)), 0.4, 1e-15));
    CHECK(close(vertical_drift(two_atom(0.7, 0.5)), 0.2, 1e-15));
    CHECK(vertical_drift({1.0, {{1, 0.5}, {-1, 0.5}}}) == 0.0);
    CHECK_THROWS_AS(validate_vertical({1.0, {{1, 0.5}, {-1, 0.6}}}), validation_error);
    CHECK_THROWS_AS(validate_vertical({-1.0, {{1, 1.0}}}), validation_error);
    CHECK_THROWS_AS(validate_vertical({1.0, {}}), validation_error);
}

TEST_CASE("lundberg_exponent") {
    SECTION("two-atom closed form: exp(theta*) = p/(1-p)") {
        CHECK(close(lundberg_exponent(two_atom(0.7)), std::log(7.0 / 3.0), 1e-11));
        CHECK(close(lundberg_exponent(two_atom(0.9)), std::log(9.0), 1e-11));
        // gamma rescales theta* inversely
        CHECK(close(lundberg_exponent(two_atom(0.7, 2.0)), 0.5 * std::log(7.0 / 3.0), 1e-11));
    }
    SECTION("phi(theta*) = 1 within 1e-10") {
        VerticalMeasure mu{0.7, {{2, 0.5}, {1, 0.3}, {-1, 0.15}, {-3, 0.05}}};
        double theta = lundberg_exponent(mu);
        double phi = 0;
        for (const auto& [k, w] : mu.atoms) phi += w * std::exp(-theta * mu.gamma * static_cast<double>(k));
        CHECK(close(phi, 1.0, 1e-10));
    }
    SECTION("no downward support gives the +inf sentinel") {
        CHECK(std::isinf(lundberg_exponent({1.0, {{1, 1.0}}})));
        CHECK(std::isinf(lundberg_exponent({1.0, {{0, 0.3}, {2, 0.7}}})));
    }
    SECTION("theta* -> 0 as p -> 1/2 from above") {
        double prev = lundberg_exponent(two_atom(0.6));
        for (double p : {0.55, 0.52, 0.51, 0.501}) {
            double cur = lundberg_exponent(two_atom(p));
            CHECK(cur < prev);
            prev = cur;
        }
        CHECK(prev < 0.005);
        CHECK(prev > 0);
    }
    SECTION("zero or negative drift rejected") {
        CHECK_THROWS_AS(lundberg_exponent(two_atom(0.5)), zero_drift_error);
        CHECK_THROWS_AS(lundberg_exponent({1.0, {{1, 0.3}, {-1, 0.7}}}), zero_drift_error);
    }
}

TEST_CASE("make_truncation") {
    VerticalMeasure mu = two_atom(0.7);
    TruncationPolicy policy = make_truncation(mu, 1e-6);
    // ceil(log(1e6)/log(7/3)) = ceil(16.31) = 17
    CHECK(policy.delta_levels == 17);
    CHECK(std::exp(-lundberg_exponent(mu) * static_cast<double>(policy.delta_levels)) <= 1e-6);
    CHECK(make_truncation({1.0, {{1, 1.0}}}, 1e-6).delta_levels == 0);
    CHECK_THROWS_AS(make_truncation(mu, 0.0), validation_error);
}

TEST_CASE("return_probability") {
    SECTION("two-atom closed form p_ret = 2(1-p)") {
        VerticalWalkStats s = return_probability(two_atom(0.7), ReturnMethod::Exact2Atom);
        CHECK(close(s.p_ret, 0.6, 1e-15));
        CHECK(close(s.M, 2.5, 1e-12));
        CHECK(close(s.alpha, 0.4, 1e-15));
        CHECK(close(s.theta_star, std::log(7.0 / 3.0), 1e-11));

        VerticalWalkStats t = return_probability(two_atom(0.9), ReturnMethod::Exact2Atom);
        CHECK(close(t.p_ret, 0.2, 1e-15));
        CHECK(close(t.M, 1.25, 1e-12));
    }
    SECTION("p -> 1 gives p_ret -> 0, M -> 1") {
        VerticalWalkStats s = return_probability(two_atom(0.999), ReturnMethod::Exact2Atom);
        CHECK(s.p_ret < 0.003);
        CHECK(s.M < 1.003);
    }
    SECTION("negative drift is flipped") {
        VerticalMeasure down{1.0, {{1, 0.3}, {-1, 0.7}}};
        VerticalWalkStats s = return_probability(down, ReturnMethod::Exact2Atom);
        CHECK(close(s.p_ret, 0.6, 1e-15));
    }
    SECTION("method mismatch") {
        VerticalMeasure three{1.0, {{1, 0.6}, {0, 0.2}, {-1, 0.2}}};
        CHECK_THROWS_AS(return_probability(three, ReturnMethod::Exact2Atom), method_mismatch_error);
        VerticalMeasure skew{1.0, {{2, 0.7}, {-1, 0.3}}};
        CHECK_THROWS_AS(return_probability(skew, ReturnMethod::Exact2Atom), method_mismatch_error);
        CHECK_THROWS_AS(return_probability({1.0, {{1, 0.5}, {-1, 0.5}}}, ReturnMethod::Exact2Atom),
                        zero_drift_error);
    }
    SECTION("Monte Carlo agrees with the closed form within 3 standard errors") {
        std::size_t n = 200'000;
        VerticalWalkStats s = return_probability(two_atom(0.7), ReturnMethod::MonteCarlo, n, 99);
        double se = std::sqrt(0.6 * 0.4 / static_cast<double>(n));
        CHECK(std::abs(s.p_ret - 0.6) < 3 * se + 1e-9);
        // delta method: sigma_M = se / (1-p)^2
        CHECK(std::abs(s.M - 2.5) < 3 * se / (0.4 * 0.4) + 1e-9);
    }
    SECTION("Monte Carlo is reproducible for a fixed seed") {
        VerticalWalkStats a = return_probability(two_atom(0.7), ReturnMethod::MonteCarlo, 10'000, 7);
        VerticalWalkStats b = return_probability(two_atom(0.7), ReturnMethod::MonteCarlo, 10'000, 7);
        CHECK(a.p_ret == b.p_ret);
    }
}

TEST_CASE("occupation_counts") {
    SECTION("deterministic ascent occupies every level once") {
        VerticalMeasure mu{1.0, {{1, 1.0}}};
        Rng rng(5);
        auto counts = occupation_counts(mu, rng, -3, 10, make_truncation(mu, 1e-6));
        for (long long k = -3; k <= 10; ++k)
            CHECK(counts[static_cast<std::size_t>(k + 3)] == (k >= 0 ? 1 : 0));
    }
    SECTION("every level in [0, kmax] is visited on every drift-up path") {
        VerticalMeasure mu = two_atom(0.7);
        TruncationPolicy policy = make_truncation(mu, 1e-6);
        for (std::uint64_t i = 0; i < 2000; ++i) {
            Rng rng = Rng::stream(11, i);
            auto counts = occupation_counts(mu, rng, 0, 8, policy);
            for (long long c : counts) {
                if (c < 1) FAIL("level skipped on a skip-free upward walk");
            }
        }
    }
    SECTION("mean occupation matches M = 2.5 within 1% at high path count") {
        VerticalMeasure mu = two_atom(0.7);
        TruncationPolicy policy = make_truncation(mu, 1e-7);
        const std::size_t paths = 300'000;
        double sum0 = 0, sum5 = 0, sum_neg = 0;
        for (std::size_t i = 0; i < paths; ++i) {
            Rng rng = Rng::stream(23, i);
            auto counts = occupation_counts(mu, rng, -5, 5, policy);
            sum_neg += static_cast<double>(counts[0]);  // k = -5
            sum0 += static_cast<double>(counts[5]);     // k = 0
            sum5 += static_cast<double>(counts[10]);    // k = 5
        }
        double n = static_cast<double>(paths);
        CHECK(std::abs(sum0 / n - 2.5) < 0.025);
        CHECK(std::abs(sum5 / n - 2.5) < 0.025);
        CHECK(sum_neg / n <= 2.5 + 0.025);  // E n(zeta,k) <= M below the start
        CHECK(sum_neg / n < 0.5);           // and strictly smaller in fact
    }
    SECTION("zero drift rejected") {
        VerticalMeasure mu{1.0, {{1, 0.5}, {-1, 0.5}}};
        Rng rng(3);
        CHECK_THROWS_AS(occupation_counts(mu, rng, 0, 5, TruncationPolicy{}), zero_drift_error);
    }
}
