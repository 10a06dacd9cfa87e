#pragma once
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <boost/math/constants/constants.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <complex>
#include <vector>

#include "errors.hpp"

namespace solwalk {

// 128-bit mantissa; conjugate powers stay well inside the unit disk, so this
// resolves dist(alpha^k, Z) ~ delta^k down to k = 120 without cancellation
using ext_float =
    boost::multiprecision::number<boost::multiprecision::cpp_bin_float<128, boost::multiprecision::digit_base_2>>;
using bigint = boost::multiprecision::cpp_int;

struct not_pisot_error : validation_error {
    using validation_error::validation_error;
};

namespace detail {

struct ExtComplex {
    ext_float re, im;
};

inline ExtComplex cmul(const ExtComplex& a, const ExtComplex& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}
inline ExtComplex csub(const ExtComplex& a, const ExtComplex& b) { return {a.re - b.re, a.im - b.im}; }
inline ExtComplex cdiv(const ExtComplex& a, const ExtComplex& b) {
    ext_float n = b.re * b.re + b.im * b.im;
    return {(a.re * b.re + a.im * b.im) / n, (a.im * b.re - a.re * b.im) / n};
}
inline ext_float cabs(const ExtComplex& a) { return sqrt(a.re * a.re + a.im * a.im); }

inline ExtComplex horner(const std::vector<long long>& poly, const ExtComplex& x) {
    ExtComplex acc{ext_float(poly[0]), ext_float(0)};
    for (std::size_t i = 1; i < poly.size(); ++i) acc = {acc.re * x.re - acc.im * x.im + poly[i], acc.re * x.im + acc.im * x.re};
    return acc;
}

inline ExtComplex horner_derivative(const std::vector<long long>& poly, const ExtComplex& x) {
    const auto deg = static_cast<long long>(poly.size()) - 1;
    ExtComplex acc{ext_float(deg * poly[0]), ext_float(0)};
    for (std::size_t i = 1; i + 1 < poly.size(); ++i) {
        long long c = (deg - static_cast<long long>(i)) * poly[i];
        acc = {acc.re * x.re - acc.im * x.im + c, acc.re * x.im + acc.im * x.re};
    }
    return acc;
}

// Newton refinement from a double-precision seed; roots are simple
inline ExtComplex polish_root(const std::vector<long long>& poly, std::complex<double> seed) {
    ExtComplex x{ext_float(seed.real()), ext_float(seed.imag())};
    for (int it = 0; it < 12; ++it) {
        ExtComplex p = horner(poly, x), d = horner_derivative(poly, x);
        if (cabs(d) == 0) throw precision_error("pisot: derivative vanished during polish");
        x = csub(x, cdiv(p, d));
    }
    return x;
}

}  // namespace detail

struct PisotCertificate {
    std::vector<long long> poly;  // monic integer coefficients, highest degree first
    double alpha = 0;             // the dominant real root, > 1
    double delta = 0;             // max modulus over the conjugates, < 1
    double theta_tilde = 0;       // base certifying dist(alpha^k, Z) decay
    double theta = 0;             // > max(1/alpha, theta_tilde), used by the cosine bound
    int L = 0;                    // cosine bound holds for all L <= |k| <= 60 (checked)
    int precision_budget = 120;   // largest |k| served by witness-backed evaluations

    ext_float alpha_ext;
    std::vector<detail::ExtComplex> conjugates;

    int degree() const { return static_cast<int>(poly.size()) - 1; }
};

// exact power sums s_k = sum of all roots^k via Newton's identities
inline bigint power_sum(const std::vector<long long>& poly, int k) {
    if (poly.empty() || poly[0] != 1) throw validation_error("power_sum: polynomial must be monic");
    if (k < 0) throw validation_error("power_sum: k must be nonnegative");
    const int r = static_cast<int>(poly.size()) - 1;
    if (r < 1) throw validation_error("power_sum: degree must be at least 1");
    // Newton's identities: p_m + sum_{i<m} c_i p_{m-i} + m c_m = 0 (c_i = 0 past degree r)
    std::vector<bigint> p(static_cast<std::size_t>(k) + 1);
    p[0] = r;
    for (int m = 1; m <= k; ++m) {
        bigint acc = 0;
        for (int i = 1; i <= std::min(m - 1, r); ++i)
            acc += bigint(poly[static_cast<std::size_t>(i)]) * p[static_cast<std::size_t>(m - i)];
        if (m <= r) acc += bigint(m) * poly[static_cast<std::size_t>(m)];
        p[static_cast<std::size_t>(m)] = -acc;
    }
    return p[static_cast<std::size_t>(k)];
}

// alpha^m - s_m computed from the conjugates: equals -sum over conjugates of
// conj^m, so the magnitude is <= (r-1) delta^m with no large-number cancellation
inline ext_float alpha_power_residual(const PisotCertificate& cert, int m) {
    if (m < 0) throw validation_error("alpha_power_residual: m must be nonnegative");
    if (m > cert.precision_budget) throw precision_error("alpha_power_residual: beyond precision budget");
    ext_float acc = 0;
    for (const auto& c : cert.conjugates) {
        detail::ExtComplex p{ext_float(1), ext_float(0)};
        for (int i = 0; i < m; ++i) p = detail::cmul(p, c);
        acc += p.re;  // imaginary parts cancel in conjugate pairs
    }
    return -acc;
}

inline PisotCertificate certify_pisot(const std::vector<long long>& poly) {
    if (poly.size() < 2) throw validation_error("certify_pisot: degree must be at least 1");
    if (poly[0] != 1) throw validation_error("certify_pisot: polynomial must be monic");
    if (poly.back() == 0) throw validation_error("certify_pisot: zero constant term");
    const int r = static_cast<int>(poly.size()) - 1;

    // roots of the companion matrix, double precision seeds
    Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(r, r);
    for (int i = 1; i < r; ++i) comp(i, i - 1) = 1.0;
    for (int i = 0; i < r; ++i) comp(i, r - 1) = -static_cast<double>(poly[static_cast<std::size_t>(r - i)]);
    Eigen::EigenSolver<Eigen::MatrixXd> solver(comp);
    if (solver.info() != Eigen::Success) throw convergence_error("certify_pisot: eigensolver failed");

    std::vector<std::complex<double>> roots(static_cast<std::size_t>(r));
    for (int i = 0; i < r; ++i) roots[static_cast<std::size_t>(i)] = solver.eigenvalues()(i);

    // the dominant root must be real and > 1, every other root strictly inside
    // the unit disk with margin 1e-9
    std::size_t dominant = 0;
    for (std::size_t i = 1; i < roots.size(); ++i)
        if (std::abs(roots[i]) > std::abs(roots[dominant])) dominant = i;
    if (std::abs(roots[dominant].imag()) > 1e-8 || roots[dominant].real() <= 1.0)
        throw not_pisot_error("certify_pisot: dominant root is not a real number > 1");

    PisotCertificate cert;
    cert.poly = poly;
    cert.alpha_ext = detail::polish_root(poly, {roots[dominant].real(), 0.0}).re;
    cert.alpha = static_cast<double>(cert.alpha_ext);
    if (!(cert.alpha > 1.0)) throw not_pisot_error("certify_pisot: dominant root is not > 1");

    ext_float delta_ext = 0;
    for (std::size_t i = 0; i < roots.size(); ++i) {
        if (i == dominant) continue;
        detail::ExtComplex c = detail::polish_root(poly, roots[i]);
        ext_float mod = detail::cabs(c);
        if (mod >= ext_float(1) - ext_float(1e-9))
            throw not_pisot_error("certify_pisot: conjugate on or outside the unit circle (margin 1e-9)");
        if (mod > delta_ext) delta_ext = mod;
        cert.conjugates.push_back(c);
    }
    cert.delta = static_cast<double>(delta_ext);

    // root bookkeeping sanity: all roots together must reproduce the exact
    // integer power sums
    for (int k = 1; k <= 30; ++k) {
        ext_float total = pow(cert.alpha_ext, k) - alpha_power_residual(cert, k);  // alpha^k + sum conj^k
        ext_float sk(power_sum(poly, k));
        if (abs(total - sk) > (abs(sk) + 1) * ext_float(1e-25))
            throw precision_error("certify_pisot: root set does not reproduce integer power sums");
    }

    // dist(alpha^k, Z) <= (r-1) delta^k, witnessed by s_k, for k <= 60
    for (int k = 1; k <= 60; ++k) {
        ext_float resid = abs(alpha_power_residual(cert, k));
        ext_float bound = ext_float(r - 1) * pow(delta_ext, k) * (ext_float(1) + ext_float(1e-25));
        if (resid > bound) throw precision_error("certify_pisot: power-sum distance bound failed");
    }

    double rd = static_cast<double>(r - 1) * cert.delta;
    cert.theta_tilde = (r <= 2 || rd < 1.0) ? std::max(cert.delta, rd) : (1.0 + cert.delta) / 2.0;
    double beta = 1.0 / cert.alpha;
    cert.theta = (1.0 + std::max(beta, cert.theta_tilde)) / 2.0;

    // smallest L so that |cos(2 pi beta^k) - 1| <= theta^|k| for all L <= |k| <= 60
    int last_fail = 0;
    for (int k = 1; k <= 60; ++k) {
        ext_float pos = [&] {
            ext_float u = boost::math::constants::pi<ext_float>() * pow(ext_float(1) / cert.alpha_ext, k);
            ext_float s = sin(u);
            return 2 * s * s;
        }();
        ext_float neg = [&] {
            ext_float u = boost::math::constants::pi<ext_float>() * alpha_power_residual(cert, k);
            ext_float s = sin(u);
            return 2 * s * s;
        }();
        ext_float cap = pow(ext_float(cert.theta), k) * (ext_float(1) + ext_float(1e-9));
        if (pos > cap || neg > cap) last_fail = k;
    }
    cert.L = last_fail + 1;
    if (cert.L > 60) throw precision_error("certify_pisot: cosine bound not certifiable up to k = 60");
    return cert;
}

// |cos(2 pi beta^k) - 1|, witness-backed for k < 0 (cos(2 pi alpha^m) depends
// only on alpha^m - s_m because s_m is an integer)
inline double cosine_closeness(const PisotCertificate& cert, int k) {
    if (std::abs(k) > cert.precision_budget) throw precision_error("cosine_closeness: beyond precision budget");
    if (k == 0) return 0.0;
    ext_float u;
    if (k > 0)
        u = boost::math::constants::pi<ext_float>() * pow(ext_float(1) / cert.alpha_ext, k);
    else
        u = boost::math::constants::pi<ext_float>() * alpha_power_residual(cert, -k);
    ext_float s = sin(u);
    double val = static_cast<double>(2 * s * s);
    if (std::abs(k) >= cert.L && val > std::pow(cert.theta, std::abs(k)) * (1.0 + 1e-9) + 1e-300)
        throw precision_error("cosine_closeness: certified bound violated");
    return val;
}

// cos(2 pi r beta^k) for integer r; for k < 0 the integer part r*s_m drops out
inline double cos_2pi_r_beta_pow(const PisotCertificate& cert, long long r, int k) {
    if (std::abs(k) > cert.precision_budget) throw precision_error("cos_2pi_r_beta_pow: beyond precision budget");
    ext_float u;
    if (k >= 0)
        u = 2 * boost::math::constants::pi<ext_float>() * r * pow(ext_float(1) / cert.alpha_ext, k);
    else
        u = 2 * boost::math::constants::pi<ext_float>() * r * alpha_power_residual(cert, -k);
    return static_cast<double>(cos(u));
}

inline double cos_2pi_beta_pow(const PisotCertificate& cert, int k) { return cos_2pi_r_beta_pow(cert, 1, k); }

}  // namespace solwalk
