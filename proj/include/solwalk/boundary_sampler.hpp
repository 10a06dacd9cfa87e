#pragma once
#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "rng.hpp"
#include "sol_group.hpp"
#include "stats.hpp"
#include "step_measure.hpp"
#include "vertical_walk.hpp"

namespace solwalk {

// running walk product W_n in (S, U, V) coordinates:
// S_n = sum z_j,  U_n = sum x_j e^{-S_{j-1}},  V_n = sum y_j e^{S_{j-1}}
struct WalkState {
    long long n = 0;
    double S = 0, U = 0, V = 0;
};

inline WalkState step(WalkState st, const SolElement& g) {
    if (g.x != 0 && st.S < -700) throw numeric_error("step: exp(-S) overflows");
    if (g.y != 0 && st.S > 700) throw numeric_error("step: exp(S) overflows");
    st.U += g.x * std::exp(-st.S);
    st.V += g.y * std::exp(st.S);
    st.S += g.z;
    st.n += 1;
    return st;
}

struct BoundarySample {
    double xi = 0;
    double err_bound = 0;
    double err_confidence = 1;  // 1 - delta
    long long steps = 0;
    BoundarySide side = BoundarySide::Plus;
};

// Drives the walk until the remaining tail of the boundary series is certified
// below eps.  The side is chosen by the drift sign; a negative-drift walk is
// flipped through the automorphism (z,x,y) -> (-z,y,x), which swaps the two
// boundary series.
class XiSampler {
  public:
    XiSampler(const StepMeasure& mu, double eps, double delta) : pick_(weights(mu)), eps_(eps) {
        if (!(eps > 0 && eps < 1)) throw validation_error("sample_xi: eps must be in (0,1)");
        if (!(delta > 0 && delta < 1)) throw validation_error("sample_xi: delta must be in (0,1)");
        double alpha = drift(mu);
        if (alpha == 0) throw zero_drift_error("sample_xi: drift is zero, no boundary limit");
        side_ = alpha > 0 ? BoundarySide::Plus : BoundarySide::Minus;
        for (const auto& [g, w] : mu.atoms)
            atoms_.push_back(side_ == BoundarySide::Plus ? g : SolElement{-g.z, g.y, g.x});

        double x_max = 0, z_min = std::numeric_limits<double>::infinity();
        for (const auto& g : atoms_) {
            x_max = std::max(x_max, std::abs(g.x));
            z_min = std::min(z_min, g.z);
        }
        if (x_max == 0) {
            trivial_ = true;
            return;
        }
        if (z_min > 0) {
            // monotone ascent: the tail is dominated by the geometric series
            // x_max e^{-S_n} sum_k e^{-k z_min}, a sure bound
            threshold_ = std::log(x_max / (-std::expm1(-z_min) * eps_));
            confidence_ = 1.0;
            return;
        }
        // Markov certificate: for s in (0, min(1, theta*)),
        // E[|tail|^s | F_n] <= x_max^s e^{-s S_n} / (1 - phi(s))
        std::vector<std::pair<double, double>> zw;
        for (std::size_t i = 0; i < atoms_.size(); ++i) zw.push_back({atoms_[i].z, weight(mu, i)});
        double theta = lundberg_exponent_zw(zw);
        double s = std::isfinite(theta) ? std::min(1.0, theta / 2) : 1.0;
        double phi_s = 0;
        for (const auto& [z, w] : zw) phi_s += w * std::exp(-s * z);
        threshold_ = std::log(x_max / eps_) + std::log(1.0 / (delta * (1.0 - phi_s))) / s;
        confidence_ = 1.0 - delta;
    }

    BoundarySample sample(Rng& rng) const {
        if (trivial_) return {0.0, 0.0, 1.0, 1, side_};
        double S = 0, U = 0;
        long long n = 0;
        while (S < threshold_) {
            const SolElement& g = atoms_[pick_(rng)];
            U += g.x * std::exp(-S);
            S += g.z;
            if (++n >= 100'000'000)
                throw convergence_error("sample_xi: step cap reached before certification");
        }
        return {U, eps_, confidence_, n, side_};
    }

    BoundarySide side() const { return side_; }
    double threshold() const { return threshold_; }
    double confidence() const { return confidence_; }

  private:
    static std::vector<double> weights(const StepMeasure& mu) {
        validate_step_measure(mu);
        std::vector<double> w;
        for (const auto& [g, wt] : mu.atoms) w.push_back(wt);
        return w;
    }
    static double weight(const StepMeasure& mu, std::size_t i) { return mu.atoms[i].second; }

    std::vector<SolElement> atoms_;
    DiscreteSampler pick_;
    double eps_;
    double threshold_ = 0;
    double confidence_ = 1;
    bool trivial_ = false;
    BoundarySide side_ = BoundarySide::Plus;
};

inline BoundarySample sample_xi(const StepMeasure& mu, Rng& rng, double eps, double delta) {
    return XiSampler(mu, eps, delta).sample(rng);
}

struct EmpiricalMeasure {
    std::vector<double> samples;  // sorted ascending
    double max_err = 0;
    double err_confidence = 1;
    std::uint64_t seed = 0;
};

// N independent samples on per-index RNG streams: the output is a function of
// (mu, n, seed, eps, delta) alone, regardless of the thread count
inline EmpiricalMeasure sample_batch(const StepMeasure& mu, std::size_t n, std::uint64_t seed, double eps,
                                     double delta, unsigned threads = 1) {
    if (n < 1) throw validation_error("sample_batch: need n >= 1");
    XiSampler sampler(mu, eps, delta);
    std::vector<double> out(n);
    std::atomic<std::size_t> failures{0};
    std::exception_ptr fatal;
    std::mutex fatal_mu;

    auto worker = [&](std::size_t lo, std::size_t hi) {
        try {
            for (std::size_t i = lo; i < hi; ++i) {
                Rng rng = Rng::stream(seed, i);
                try {
                    out[i] = sampler.sample(rng).xi;
                } catch (const convergence_error&) {
                    out[i] = std::numeric_limits<double>::quiet_NaN();
                    failures.fetch_add(1, std::memory_order_relaxed);
                }
            }
        } catch (...) {
            std::lock_guard<std::mutex> lock(fatal_mu);
            if (!fatal) fatal = std::current_exception();
        }
    };

    unsigned t = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
    if (t <= 1 || n < 2 * t) {
        worker(0, n);
    } else {
        std::vector<std::thread> pool;
        std::size_t chunk = (n + t - 1) / t;
        for (unsigned k = 0; k < t; ++k) {
            std::size_t lo = k * chunk, hi = std::min(n, lo + chunk);
            if (lo < hi) pool.emplace_back(worker, lo, hi);
        }
        for (auto& th : pool) th.join();
    }
    if (fatal) std::rethrow_exception(fatal);
    if (failures.load() * 1000 > n)
        throw insufficient_samples_error("sample_batch: more than 0.1% of paths hit the step cap");
    if (failures.load() > 0)
        out.erase(std::remove_if(out.begin(), out.end(), [](double v) { return std::isnan(v); }), out.end());
    std::sort(out.begin(), out.end());
    return {std::move(out), eps, 1.0 - delta, seed};
}

struct SpeedEstimate {
    double mean_speed = 0;  // mean of S_n/n, signed
    double std_error = 0;
    double sandwich_lo = 0;  // mean of distance lower bound / n
    double sandwich_hi = 0;  // mean of distance upper bound / n
    long long n = 0;
    std::size_t trials = 0;
};

// empirical check of speed = |drift|: S_n/n and both ends of the distance
// sandwich d(id, W_n)/n concentrate at |alpha|
inline SpeedEstimate speed_estimate(const StepMeasure& mu, long long n, std::size_t trials,
                                    std::uint64_t seed) {
    validate_step_measure(mu);
    if (n < 1 || trials < 1) throw validation_error("speed_estimate: need n >= 1 and trials >= 1");
    bool flip = drift(mu) < 0;
    std::vector<SolElement> atoms;
    std::vector<double> w;
    for (const auto& [g, wt] : mu.atoms) {
        atoms.push_back(flip ? SolElement{-g.z, g.y, g.x} : g);
        w.push_back(wt);
    }
    DiscreteSampler pick(w);

    std::vector<double> speeds;
    speeds.reserve(trials);
    double lo_acc = 0, hi_acc = 0;
    const double dn = static_cast<double>(n);
    for (std::size_t trial = 0; trial < trials; ++trial) {
        Rng rng = Rng::stream(seed, trial);
        double S = 0, U = 0, Q = 0;  // Q = V e^{-S}, stable under Q <- (Q + y) e^{-z}
        for (long long i = 0; i < n; ++i) {
            const SolElement& g = atoms[pick(rng)];
            if (g.x != 0 && S < -700) throw numeric_error("speed_estimate: exp(-S) overflows");
            U += g.x * std::exp(-S);
            Q = (Q + g.y) * std::exp(-g.z);
            S += g.z;
        }
        double lu = std::log(std::abs(U));  // -inf at 0
        double lv = S + std::log(std::abs(Q));
        double lmax = std::max(lu, lv), lmin = std::min(lu, lv);
        double log_r = std::isinf(lmax) ? lmax : lmax + 0.5 * std::log1p(std::exp(2 * (lmin - lmax)));
        DistanceBounds db = distance_bounds_from_logr(S, log_r);
        speeds.push_back((flip ? -S : S) / dn);
        lo_acc += db.lower / dn;
        hi_acc += db.upper / dn;
    }
    MeanVar mv = mean_var(speeds);
    return {mv.mean, mv.std_error(), lo_acc / static_cast<double>(trials),
            hi_acc / static_cast<double>(trials), n, trials};
}

struct StationarityReport {
    double distance = 0;
    double threshold = 0;  // 99.9% two-sample null quantile by default
    bool pass = false;
    std::size_t n_original = 0, n_resampled = 0;
};

// stationarity nu = mu * nu: {g xi_i} with g ~ mu, xi_i ~ samples must be
// KS-indistinguishable from the samples themselves
inline StationarityReport stationarity_check(const StepMeasure& mu, const EmpiricalMeasure& em,
                                             std::size_t n_resample, std::uint64_t seed) {
    validate_step_measure(mu);
    if (em.samples.empty()) throw validation_error("stationarity_check: empty sample set");
    if (n_resample < 1) throw validation_error("stationarity_check: need n_resample >= 1");
    double alpha = drift(mu);
    if (alpha == 0) throw zero_drift_error("stationarity_check: drift is zero");
    BoundarySide side = alpha > 0 ? BoundarySide::Plus : BoundarySide::Minus;

    std::vector<double> w;
    for (const auto& [g, wt] : mu.atoms) w.push_back(wt);
    DiscreteSampler pick(w);
    std::vector<double> resampled(n_resample);
    for (std::size_t i = 0; i < n_resample; ++i) {
        Rng rng = Rng::stream(seed, i);
        const SolElement& g = mu.atoms[pick(rng)].first;
        double xi = em.samples[rng.next() % em.samples.size()];
        resampled[i] = boundary_action(g, xi, side);
    }
    std::sort(resampled.begin(), resampled.end());
    StationarityReport rep;
    rep.n_original = em.samples.size();
    rep.n_resampled = n_resample;
    rep.distance = ks_distance(em.samples, resampled);
    rep.threshold = ks_threshold(rep.n_original, rep.n_resampled);
    rep.pass = rep.distance <= rep.threshold;
    return rep;
}

}  // namespace solwalk
