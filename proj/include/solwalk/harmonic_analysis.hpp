#pragma once
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "bernoulli_conv.hpp"
#include "boundary_sampler.hpp"
#include "errors.hpp"
#include "pisot.hpp"
#include "rng.hpp"
#include "stats.hpp"
#include "step_measure.hpp"
#include "vertical_walk.hpp"

namespace solwalk {

inline FourierEvaluation ecf(const EmpiricalMeasure& em, double t) {
    if (em.samples.size() < 2) throw validation_error("ecf: need at least 2 samples");
    std::complex<double> acc{0, 0};
    for (double s : em.samples) acc += std::complex<double>{std::cos(t * s), std::sin(t * s)};
    acc /= static_cast<double>(em.samples.size());
    return {t, acc, 1.0 / std::sqrt(static_cast<double>(em.samples.size())),
            em.max_err * std::abs(t)};
}

namespace detail {

// x-marginal of a product-form measure as q0 delta_0 + sum_r q_r (delta_r + delta_-r)
struct SymmetricXMarginal {
    double q0 = 0;
    std::vector<std::pair<double, double>> pairs;  // (r > 0, weight of each of +-r)
    double x_max = 0;
};

inline SymmetricXMarginal symmetric_x_marginal(const StepMeasure& mu) {
    if (!mu.product_form) throw method_mismatch_error("exact_ft: needs a product-form measure");
    std::vector<std::pair<double, double>> xs = mu.product_form->mu_x;
    std::sort(xs.begin(), xs.end());
    SymmetricXMarginal out;
    std::size_t lo = 0, hi = xs.size();
    while (lo < hi) {
        if (std::abs(xs[lo].first) <= 1e-12) {
            out.q0 += xs[lo].second;
            ++lo;
            continue;
        }
        if (hi - lo < 2 || std::abs(xs[lo].first + xs[hi - 1].first) > 1e-12 ||
            std::abs(xs[lo].second - xs[hi - 1].second) > 1e-12)
            throw validation_error("exact_ft: x-marginal must be symmetric");
        out.pairs.push_back({xs[hi - 1].first, xs[hi - 1].second});
        out.x_max = std::max(out.x_max, xs[hi - 1].first);
        ++lo;
        --hi;
    }
    return out;
}

// per-level factor values cached over the reachable window
class FactorTable {
  public:
    FactorTable(std::function<double(long long)> f, long long lo, long long hi)
        : f_(std::move(f)), lo_(lo) {
        for (long long k = lo; k <= hi; ++k) table_.push_back(f_(k));
    }
    double operator()(long long k) const {
        long long i = k - lo_;
        if (i >= 0 && i < static_cast<long long>(table_.size())) return table_[static_cast<std::size_t>(i)];
        return f_(k);
    }

  private:
    std::function<double(long long)> f_;
    long long lo_;
    std::vector<double> table_;
};

// Monte Carlo mean of the per-path factor product over vertical paths.  One
// factor is multiplied for every pre-step level; a path ends once it climbs
// past stop_level, after which its remaining true factors deviate from 1 by a
// certified total of at most eps, except on a return event of probability
// <= delta.
inline FourierEvaluation exact_ft_core(const VerticalMeasure& vm, double t_report,
                                       const FactorTable& factor, long long stop_level,
                                       std::size_t n_paths, std::uint64_t seed, double eps,
                                       double delta) {
    if (n_paths < 2) throw validation_error("exact_ft: need at least 2 paths");
    LevelWalkSampler jump(vm);
    double acc = 0, acc2 = 0;
    for (std::size_t i = 0; i < n_paths; ++i) {
        Rng rng = Rng::stream(seed, i);
        long long s = 0;
        double prod = 1;
        long long n = 0;
        for (;;) {
            prod *= factor(s);
            s += jump.jump(rng);
            if (s > stop_level) break;
            if (++n >= 100'000'000)
                throw convergence_error("exact_ft: path failed to escape the factor window");
        }
        acc += prod;
        acc2 += prod * prod;
    }
    const double n = static_cast<double>(n_paths);
    double mean = acc / n;
    double var = std::max(0.0, (acc2 / n - mean * mean) * n / (n - 1));
    return {t_report, {mean, 0.0}, std::sqrt(var / n), eps + 2 * delta};
}

// shared preamble: vertical measure, drift check, x-marginal, walk stats
struct ExactFtSetup {
    VerticalMeasure vm;
    SymmetricXMarginal sx;
    VerticalWalkStats stats;
    double beta = 0;
};

inline ExactFtSetup exact_ft_setup(const StepMeasure& mu, const VerticalWalkStats* stats_in,
                                   std::uint64_t seed) {
    ExactFtSetup s;
    s.vm = vertical_measure(mu);
    double alpha = vertical_drift(s.vm);
    if (alpha == 0) throw zero_drift_error("exact_ft: drift is zero");
    if (alpha < 0) throw validation_error("exact_ft: needs positive vertical drift");
    s.sx = symmetric_x_marginal(mu);
    if (stats_in) {
        s.stats = *stats_in;
    } else {
        try {
            s.stats = return_probability(s.vm, ReturnMethod::Exact2Atom);
        } catch (const method_mismatch_error&) {
            std::uint64_t sub = seed ^ 0xa5a5a5a5a5a5a5a5ull;
            s.stats = return_probability(s.vm, ReturnMethod::MonteCarlo, 200'000, splitmix64(sub));
        }
    }
    s.beta = std::exp(-s.vm.gamma);
    return s;
}

// smallest K with M * t^2 x_max^2 beta^{2(K+1)} / (2 (1-beta^2)) <= eps
inline long long factor_cutoff(double beta, double m_occ, double t_x_max, double eps) {
    double rhs = 2 * (1 - beta * beta) * eps / (m_occ * t_x_max * t_x_max);
    if (rhs >= 1) return 0;
    return std::max<long long>(0, static_cast<long long>(std::ceil(std::log(rhs) / (2 * std::log(beta)) - 1)));
}

}  // namespace detail

// nu^(t) = E prod_k f(k)^{n(zeta,k)} with f(k) = q0 + sum_r 2 q_r cos(t r beta^k),
// estimated by Monte Carlo over vertical paths
inline FourierEvaluation exact_ft_product(const StepMeasure& mu, double t, std::size_t n_paths,
                                          std::uint64_t seed, double eps = 1e-9, double delta = 1e-6,
                                          const VerticalWalkStats* stats_in = nullptr) {
    detail::ExactFtSetup s = detail::exact_ft_setup(mu, stats_in, seed);
    if (t == 0 || s.sx.x_max == 0) return {t, {1.0, 0.0}, 0.0, 0.0};
    TruncationPolicy policy = make_truncation(s.vm, delta);
    long long k_cut = detail::factor_cutoff(s.beta, s.stats.M, std::abs(t) * s.sx.x_max, eps);
    double beta = s.beta, q0 = s.sx.q0;
    auto pairs = s.sx.pairs;
    detail::FactorTable table(
        [beta, q0, pairs, t](long long k) {
            double f = q0;
            double bk = std::pow(beta, static_cast<double>(k));
            for (const auto& [r, q] : pairs) f += 2 * q * std::cos(t * r * bk);
            return f;
        },
        -64, k_cut + policy.delta_levels);
    return detail::exact_ft_core(s.vm, t, table, k_cut + policy.delta_levels, n_paths, seed, eps,
                                 delta);
}

// same estimator at the Pisot frequency t_l = 2 pi beta^l, with the factor
// cosines cos(2 pi r beta^{l+k}) evaluated through the integer power-sum
// witness so that deep negative l keeps full precision
inline FourierEvaluation exact_ft_product_witness(const StepMeasure& mu, const PisotCertificate& cert,
                                                  long long l, std::size_t n_paths, std::uint64_t seed,
                                                  double eps = 1e-9, double delta = 1e-6,
                                                  const VerticalWalkStats* stats_in = nullptr) {
    detail::ExactFtSetup s = detail::exact_ft_setup(mu, stats_in, seed);
    if (mu.pisot_poly != cert.poly)
        throw validation_error("exact_ft_witness: measure was not built against this certificate");
    if (std::abs(s.vm.gamma - std::log(cert.alpha)) > 1e-9)
        throw validation_error("exact_ft_witness: gamma does not match log(alpha)");
    std::vector<std::pair<long long, double>> int_pairs;
    for (const auto& [r, q] : s.sx.pairs) {
        long long ri = std::llround(r);
        if (std::abs(r - static_cast<double>(ri)) > 1e-12)
            throw validation_error("exact_ft_witness: x-support must be integer");
        int_pairs.push_back({ri, q});
    }
    const double t_l = 2 * std::numbers::pi * std::exp(-s.vm.gamma * static_cast<double>(l));
    if (s.sx.x_max == 0) return {t_l, {1.0, 0.0}, 0.0, 0.0};
    TruncationPolicy policy = make_truncation(s.vm, delta);
    // in j = l + k coordinates the cutoff condition is l-independent
    long long j_cut =
        detail::factor_cutoff(s.beta, s.stats.M, 2 * std::numbers::pi * s.sx.x_max, eps);
    long long k_cut = std::max<long long>(0, j_cut - l);
    double q0 = s.sx.q0;
    const PisotCertificate* cp = &cert;
    detail::FactorTable table(
        [cp, q0, int_pairs, l](long long k) {
            double f = q0;
            for (const auto& [r, q] : int_pairs)
                f += 2 * q * cos_2pi_r_beta_pow(*cp, r, static_cast<int>(l + k));
            return f;
        },
        -64, k_cut + policy.delta_levels);
    return detail::exact_ft_core(s.vm, t_l, table, k_cut + policy.delta_levels, n_paths, seed, eps,
                                 delta);
}

// lower bound c with nu^(t_l) >= c^M along t_l = 2 pi beta^l: explicit factors
// within |k| < L, the theta-envelope tail beyond
struct SingularityCertificate {
    double beta = 0, q0 = 0, q1 = 0, M = 1, theta = 0, c = 0;
    long long L = 0;
    std::vector<std::pair<long long, double>> log_factors;  // explicit window, (k, log factor)
};

inline SingularityCertificate erdos_certificate(const PisotCertificate& cert, double q0, double q1,
                                                double m_occ) {
    if (!(q0 > 0.5)) throw validation_error("erdos_certificate: q0 must exceed 1/2");
    if (q1 < 0 || std::abs(q0 + 2 * q1 - 1.0) > 1e-12)
        throw validation_error("erdos_certificate: weights must satisfy q0 + 2 q1 = 1");
    if (!(m_occ >= 1)) throw validation_error("erdos_certificate: occupation bound M must be >= 1");
    SingularityCertificate out;
    out.beta = 1.0 / cert.alpha;
    out.q0 = q0;
    out.q1 = q1;
    out.M = m_occ;
    out.theta = cert.theta;
    out.L = cert.L;
    double log_c = 0;
    for (long long k = -(cert.L - 1); k <= cert.L - 1; ++k) {
        double f = 2 * q1 * cos_2pi_beta_pow(cert, static_cast<int>(k)) + q0;
        if (!(f > 0)) throw numeric_error("erdos_certificate: nonpositive explicit factor");
        out.log_factors.push_back({k, std::log(f)});
        log_c += std::log(f);
    }
    // tail: 2 * sum_{k >= L} log(1 - 2 q1 theta^k), geometric to relative 1e-12
    double thk = std::pow(cert.theta, static_cast<double>(cert.L));
    for (long long k = cert.L;; ++k) {
        double term = std::log1p(-2 * q1 * thk);
        log_c += 2 * term;
        if (term == 0.0 || std::abs(term) < 1e-16 * std::abs(log_c)) break;
        thk *= cert.theta;
    }
    out.c = std::exp(log_c);
    if (!(out.c > 0)) throw numeric_error("erdos_certificate: certificate underflowed to zero");
    return out;
}

struct ProbeReport {
    SingularityCertificate certificate;
    std::vector<long long> ls;
    std::vector<FourierEvaluation> evaluations;
    double floor = 0;  // c^M
    std::string verdict;
};

// evaluates nu^ along the Pisot frequency ladder and compares with the
// certificate floor; a floor bounded away from 0 at arbitrarily large t_l is
// the singularity signature, decay below it the absolute-continuity one
inline ProbeReport singularity_probe(const StepMeasure& mu, const PisotCertificate& cert,
                                     long long l_lo, long long l_hi, std::size_t n_paths,
                                     std::uint64_t seed) {
    if (l_lo > l_hi) throw validation_error("singularity_probe: empty l range");
    detail::ExactFtSetup s = detail::exact_ft_setup(mu, nullptr, seed);
    double q1 = 0;
    for (const auto& [r, q] : s.sx.pairs) {
        if (std::abs(r - 1.0) > 1e-12)
            throw validation_error("singularity_probe: x-support must be {-1, 0, 1}");
        q1 = q;
    }
    ProbeReport rep;
    rep.certificate = erdos_certificate(cert, s.sx.q0, q1, s.stats.M);
    rep.floor = std::pow(rep.certificate.c, rep.certificate.M);
    bool all_above = true, any_below = false;
    double min_value = std::numeric_limits<double>::infinity();
    for (long long l = l_lo; l <= l_hi; ++l) {
        std::uint64_t sub_seed = Rng::stream(seed, static_cast<std::uint64_t>(l - l_lo)).next();
        FourierEvaluation ev =
            exact_ft_product_witness(mu, cert, l, n_paths, sub_seed, 1e-9, 1e-6, &s.stats);
        rep.ls.push_back(l);
        rep.evaluations.push_back(ev);
        double v = ev.value.real();
        min_value = std::min(min_value, v);
        if (v < rep.floor - 3 * ev.stat_err) all_above = false;
        if (v + 3 * ev.stat_err < 0.5 * rep.floor) any_below = true;
    }
    if (all_above && min_value > 0.5 * rep.floor)
        rep.verdict = "singular-signature";
    else if (any_below)
        rep.verdict = "ac-signature";
    else
        rep.verdict = "inconclusive";
    return rep;
}

// least-squares slope of log|value| against log t over the points that clear
// their own error bars; an estimate of the polynomial decay exponent -k
struct DecayFit {
    double slope = 0;
    double slope_stderr = 0;
    std::size_t n_used = 0;
    bool resolved = false;
};

inline DecayFit decay_exponent_fit(const std::vector<FourierEvaluation>& evals) {
    std::vector<double> lt, lv;
    for (const auto& ev : evals) {
        double mag = std::abs(ev.value);
        if (ev.t > 0 && mag > 3 * ev.stat_err + ev.trunc_err) {
            lt.push_back(std::log(ev.t));
            lv.push_back(std::log(mag));
        }
    }
    DecayFit fit;
    fit.n_used = lt.size();
    if (lt.size() < 10) return fit;  // no decay resolved
    LinearFit ls = least_squares(lt, lv);
    fit.slope = ls.slope;
    fit.slope_stderr = ls.slope_stderr;
    fit.resolved = fit.slope + 3.0 * fit.slope_stderr < 0.0;
    return fit;
}

// two density-scaling estimators on one sample set: Frostman ball-mass slopes
// averaged over probe centers, and the Grassberger-Procaccia pair-correlation
// slope; disagreement beyond 0.1 flags the estimate
struct DimensionEstimate {
    double local_dim = 0;
    double local_stderr = 0;
    double pair_dim = 0;
    std::size_t probes_used = 0;
    bool flagged = false;
};

inline DimensionEstimate local_dimension(const EmpiricalMeasure& em, const std::vector<double>& r_grid,
                                         std::size_t probe_count, std::uint64_t seed) {
    const std::vector<double>& s = em.samples;
    const double n = static_cast<double>(s.size());
    if (s.size() < 10'000) throw insufficient_samples_error("local_dimension: need at least 1e4 samples");
    if (r_grid.size() < 2) throw validation_error("local_dimension: need at least 2 radii");
    if (probe_count < 1) throw validation_error("local_dimension: need at least 1 probe");
    for (double r : r_grid)
        if (!(r > 0) || r < 10 * em.max_err)
            throw validation_error("local_dimension: radii must exceed 10x the sample resolution");

    Rng rng(seed);
    std::vector<double> slopes;
    for (std::size_t p = 0; p < probe_count; ++p) {
        double center = s[rng.next() % s.size()];
        std::vector<double> lr, lc;
        for (double r : r_grid) {
            auto lo = std::lower_bound(s.begin(), s.end(), center - r);
            auto hi = std::upper_bound(s.begin(), s.end(), center + r);
            auto cnt = hi - lo;
            if (cnt >= 5) {
                lr.push_back(std::log(r));
                lc.push_back(std::log(static_cast<double>(cnt) / n));
            }
        }
        if (lr.size() >= 2 && lr.front() != lr.back()) slopes.push_back(least_squares(lr, lc).slope);
    }
    if (slopes.empty()) throw insufficient_samples_error("local_dimension: no probe had enough mass");

    DimensionEstimate out;
    MeanVar mv = mean_var(slopes);
    out.local_dim = mv.mean;
    out.local_stderr = mv.std_error();
    out.probes_used = slopes.size();

    // pair correlation C(r) = P(|xi - xi'| <= r) by a two-pointer sweep
    std::vector<double> lr, lc;
    for (double r : r_grid) {
        std::size_t lo = 0;
        double pairs = 0;
        for (std::size_t hi = 0; hi < s.size(); ++hi) {
            while (s[hi] - s[lo] > r) ++lo;
            pairs += static_cast<double>(hi - lo);
        }
        if (pairs >= 5) {
            lr.push_back(std::log(r));
            lc.push_back(std::log(2 * pairs / (n * (n - 1))));
        }
    }
    if (lr.size() >= 2) out.pair_dim = least_squares(lr, lc).slope;
    out.flagged = lr.size() < 2 || std::abs(out.local_dim - out.pair_dim) > 0.1;
    return out;
}

// maximal sample fraction inside any window of width 10x the sample resolution;
// an empirical upper bound on the largest atom the data can resolve
inline double atom_diagnostic(const EmpiricalMeasure& em) {
    const std::vector<double>& s = em.samples;
    if (s.empty()) throw validation_error("atom_diagnostic: empty sample set");
    const double w = 10 * em.max_err;
    std::size_t best = 1;
    std::size_t lo = 0;
    for (std::size_t hi = 0; hi < s.size(); ++hi) {
        while (s[hi] - s[lo] > w) ++lo;
        best = std::max(best, hi - lo + 1);
    }
    return static_cast<double>(best) / static_cast<double>(s.size());
}

}  // namespace solwalk
