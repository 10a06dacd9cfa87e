#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "solwalk/pisot.hpp"
#include "test_util.hpp"

using namespace solwalk;

static const std::vector<long long> golden{1, -1, -1};    // X^2 - X - 1
static const std::vector<long long> golden_sq{1, -3, 1};  // X^2 - 3X + 1
static const std::vector<long long> plastic{1, 0, -1, -1};

TEST_CASE("certify_pisot on quadratic units") {
    PisotCertificate g = certify_pisot(golden);
    CHECK(close(g.alpha, (1.0 + std::sqrt(5.0)) / 2.0, 1e-14));
    CHECK(close(g.delta, (std::sqrt(5.0) - 1.0) / 2.0, 1e-14));
    CHECK(g.theta > std::max(1.0 / g.alpha, g.theta_tilde));
    CHECK(g.theta < 1.0);
    CHECK(g.L == 4);

    PisotCertificate s = certify_pisot(golden_sq);
    CHECK(close(s.alpha, (3.0 + std::sqrt(5.0)) / 2.0, 1e-14));
    CHECK(close(s.delta, (3.0 - std::sqrt(5.0)) / 2.0, 1e-14));
    CHECK(s.L == 2);
}

TEST_CASE("certify_pisot on a cubic") {
    PisotCertificate p = certify_pisot(plastic);
    CHECK(close(p.alpha, 1.324717957244746, 1e-12));
    CHECK(p.delta < 1.0 - 1e-9);
    CHECK(close(p.delta * p.delta * p.alpha, 1.0, 1e-12));  // |conj|^2 = 1/alpha (unit-ish norm)
    CHECK(p.theta < 1.0);
    CHECK(p.L <= 60);
}

TEST_CASE("certify_pisot rejections") {
    CHECK_THROWS_AS(certify_pisot({1, 0, -2}), not_pisot_error);      // X^2 - 2: conjugate -sqrt(2)
    CHECK_THROWS_AS(certify_pisot({1, 0, 1}), not_pisot_error);       // X^2 + 1: no real dominant root
    CHECK_THROWS_AS(certify_pisot({2, -1, -1}), validation_error);    // not monic
    CHECK_THROWS_AS(certify_pisot({1, -1, 0}), validation_error);     // zero constant term
    CHECK_THROWS_AS(certify_pisot({1}), validation_error);            // degree 0
}

TEST_CASE("power_sum Newton recurrence") {
    CHECK(power_sum(golden, 0) == 2);
    CHECK(power_sum(golden, 1) == 1);
    CHECK(power_sum(golden, 3) == 4);
    CHECK(power_sum(golden, 10) == 123);
    CHECK(power_sum(golden, 20) == 15127);

    SECTION("golden power sums satisfy the Lucas recurrence") {
        for (int k = 2; k <= 120; ++k)
            CHECK(power_sum(golden, k) == power_sum(golden, k - 1) + power_sum(golden, k - 2));
    }
    SECTION("squaring the golden roots gives the X^2-3X+1 power sums") {
        // roots of X^2-3X+1 are the squares of the golden roots
        for (int k = 0; k <= 60; ++k) CHECK(power_sum(golden_sq, k) == power_sum(golden, 2 * k));
    }
    SECTION("power sums round-trip against extended-precision Binet") {
        PisotCertificate g = certify_pisot(golden);
        for (int k = 2; k <= 120; ++k) {
            ext_float approx = pow(g.alpha_ext, k);                       // s_k = round(alpha^k) once conj^k < 1/2
            bigint rounded = bigint(floor(approx + ext_float(0.5)));
            CHECK(rounded == power_sum(golden, k));
        }
    }
}

TEST_CASE("alpha_power_residual stays within the conjugate envelope") {
    PisotCertificate g = certify_pisot(golden);
    // phi^10 = 122.9918...: witness 123, residual -phi^{-10}
    CHECK(close(static_cast<double>(alpha_power_residual(g, 10)), -std::pow(g.alpha, -10.0), 1e-12));
    for (int k = 1; k <= 60; ++k) {
        double resid = std::abs(static_cast<double>(alpha_power_residual(g, k)));
        CHECK(resid <= (g.degree() - 1) * std::pow(g.delta, k) * (1 + 1e-9));
    }
    PisotCertificate p = certify_pisot(plastic);
    for (int k = 1; k <= 60; ++k) {
        double resid = std::abs(static_cast<double>(alpha_power_residual(p, k)));
        CHECK(resid <= (p.degree() - 1) * std::pow(p.delta, k) * (1 + 1e-9));
    }
}

TEST_CASE("cosine_closeness") {
    PisotCertificate g = certify_pisot(golden);
    SECTION("golden k = -10 matches the small-angle value") {
        // residual is -phi^{-10} ~ -0.0081306, so 1 - cos is about 2(pi rho)^2
        double v = cosine_closeness(g, -10);
        CHECK(close(v, 1.304615e-03, 1e-5));
        CHECK(v <= std::pow(g.theta, 10));
    }
    SECTION("bound holds on the full certified range, both signs") {
        PisotCertificate s = certify_pisot(golden_sq);
        for (const PisotCertificate& cert : {g, s}) {
            for (int k = cert.L; k <= 120; ++k) {
                CHECK(cosine_closeness(cert, k) <= std::pow(cert.theta, k) * (1 + 1e-9));
                CHECK(cosine_closeness(cert, -k) <= std::pow(cert.theta, k) * (1 + 1e-9));
            }
        }
    }
    SECTION("witness precision survives to k = -120 where doubles cannot") {
        // phi^120 ~ 1.2e25 wraps 2 pi Z about 1e24 times; the answer is ~1.4e-49
        double v = cosine_closeness(g, -120);
        CHECK(v > 0.0);
        CHECK(v < 1e-45);
        CHECK_THROWS_AS(cosine_closeness(g, -121), precision_error);
    }
    SECTION("k = 0 is exact") { CHECK(cosine_closeness(g, 0) == 0.0); }
}

TEST_CASE("cos_2pi_r_beta_pow agrees with direct evaluation at small k") {
    PisotCertificate s = certify_pisot(golden_sq);
    double beta = 1.0 / s.alpha;
    for (int k = -8; k <= 8; ++k) {
        for (long long r : {1LL, 2LL, 3LL}) {
            double direct = std::cos(2.0 * M_PI * r * std::pow(beta, k));
            CHECK(close(cos_2pi_r_beta_pow(s, r, k), direct, 1e-6));
        }
    }
    CHECK(close(cos_2pi_beta_pow(s, 0), 1.0, 1e-15));
}
