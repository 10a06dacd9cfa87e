#pragma once
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "pisot.hpp"
#include "rng.hpp"

namespace solwalk {

// one evaluation of a Fourier transform / characteristic function at t;
// value is complex in general, real for symmetric measures
struct FourierEvaluation {
    double t = 0;
    std::complex<double> value{0, 0};
    double stat_err = 0;   // standard error of a Monte Carlo estimate, 0 if exact
    double trunc_err = 0;  // certified truncation / sampling-resolution error
};

namespace detail {

inline void validate_lambda(double lambda) {
    if (!(lambda > 0 && lambda < 1))
        throw validation_error("bernoulli: lambda must be in (0,1)");
}

}  // namespace detail

// one draw of sum_{j>=0} s_j lambda^j, fair signs, truncated once the
// geometric tail lambda^{j+1}/(1-lambda) drops below eps
inline double sample_b(double lambda, Rng& rng, double eps) {
    detail::validate_lambda(lambda);
    if (!(eps > 0)) throw validation_error("sample_b: eps must be positive");
    const double r = lambda / (1 - lambda);
    double v = 0, p = 1;
    for (;;) {
        v += (rng.next() & 1) ? p : -p;
        if (p * r <= eps) return v;
        p *= lambda;
    }
}

// truncated product prod_{k=0..K} cos(t lambda^k); the dropped factors differ
// from 1 by at most t^2 lambda^{2k}/2, so the tail product deviates from 1 by
// at most sum_{k>K} t^2 lambda^{2k}/2 <= eps
inline FourierEvaluation ft_bernoulli(double lambda, double t, double eps) {
    detail::validate_lambda(lambda);
    if (!(eps > 0)) throw validation_error("ft_bernoulli: eps must be positive");
    double v = 1, p = 1;  // p = lambda^k
    const double tail_scale = t * t / (2 * (1 - lambda * lambda));
    for (;;) {
        v *= std::cos(t * p);
        p *= lambda;
        if (tail_scale * p * p <= eps) break;
    }
    return {t, {v, 0.0}, 0.0, eps};
}

inline std::pair<double, double> support_interval(double lambda) {
    detail::validate_lambda(lambda);
    return {-1.0 / (1 - lambda), 1.0 / (1 - lambda)};
}

struct DensityEstimate {
    std::vector<double> values;
    double freq_cutoff = 0;
    double trunc_err = 0;   // bound on the dropped |t| > cutoff contribution
    bool certified = false;  // cutoff backed by the lambda^m = 1/2 decay bound
    bool pisot_warning = false;
};

// Fourier inversion f(x) = (1/pi) int_0^T cos(tx) Re b^(t) dt by composite
// Simpson.  For lambda^m = 1/2 the transform factors into m sinc-type blocks,
// |b^(t)| <= (2t)^{-m} lambda^{-m(m-1)/2}, which certifies the cutoff; other
// lambda reuse the formula with the real exponent log2/log(1/lambda) and are
// flagged heuristic.
inline DensityEstimate density_estimate(double lambda, const std::vector<double>& grid, double eps,
                                        const PisotCertificate* pisot_check = nullptr,
                                        double quad_step = 0.005) {
    detail::validate_lambda(lambda);
    if (lambda < 0.5) throw validation_error("density_estimate: lambda must be >= 1/2");
    if (grid.empty()) throw validation_error("density_estimate: empty grid");
    if (!(eps > 0)) throw validation_error("density_estimate: eps must be positive");
    if (!(quad_step > 0)) throw validation_error("density_estimate: quad_step must be positive");

    DensityEstimate out;
    if (pisot_check && std::abs(1.0 / pisot_check->alpha - lambda) <= 1e-12)
        out.pisot_warning = true;  // no density exists for certified Pisot-inverse lambda

    constexpr double pi = std::numbers::pi;
    const double m_real = std::log(2.0) / std::log(1.0 / lambda);
    const long long m = std::llround(m_real);
    const bool half_power = m >= 1 && std::abs(std::pow(lambda, static_cast<double>(m)) - 0.5) <= 1e-12;
    out.certified = half_power;

    double T;
    if (half_power && m == 1) {
        // lambda = 1/2 exactly: b^ = sin(2t)/(2t), the tail integral is
        // oscillatory; |int_T^inf sin(at)/t dt| <= 2/(aT) per frequency a = 2 -+ x
        T = 4000.0;
        double worst = 0;
        for (double x : grid) {
            if (std::abs(std::abs(x) - 2.0) <= 1e-9)
                throw validation_error("density_estimate: lambda = 1/2 density jumps at x = +-2");
            worst = std::max(worst,
                             (1 / std::abs(2 - x) + 1 / std::abs(2 + x)) / (2 * pi * T));
        }
        out.trunc_err = worst;
    } else {
        // |b^| <= C t^-m with C = 2^-m lambda^{-m(m-1)/2}; tail of the
        // inversion integral <= C T^{1-m} / (pi (m-1)) <= eps.  Non-integer
        // exponents (heuristic lambda) reuse the formula with m_real.
        const double m_eff = half_power ? static_cast<double>(m) : m_real;
        double log_c = -m_eff * std::log(2.0) - m_eff * (m_eff - 1) / 2 * std::log(lambda);
        T = std::exp((log_c - std::log((m_eff - 1) * pi * eps)) / (m_eff - 1));
        out.trunc_err = eps;
    }
    out.freq_cutoff = T;
    if (!(T / quad_step <= 5e7))
        throw precision_error("density_estimate: frequency cutoff needs too many quadrature nodes");

    std::size_t n = static_cast<std::size_t>(std::ceil(T / quad_step));
    if (n % 2 == 1) ++n;  // Simpson needs an even panel count
    const double h = T / static_cast<double>(n);
    std::vector<double> ft(n + 1);
    for (std::size_t i = 0; i <= n; ++i)
        ft[i] = ft_bernoulli(lambda, static_cast<double>(i) * h, eps).value.real();

    out.values.reserve(grid.size());
    for (double x : grid) {
        double acc = ft[0] + ft[n] * std::cos(static_cast<double>(n) * h * x);
        for (std::size_t i = 1; i < n; ++i)
            acc += ft[i] * std::cos(static_cast<double>(i) * h * x) * (i % 2 == 1 ? 4.0 : 2.0);
        out.values.push_back(acc * h / 3 / pi);
    }
    return out;
}

}  // namespace solwalk
