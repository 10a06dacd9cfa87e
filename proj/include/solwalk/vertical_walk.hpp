#pragma once
#include <cmath>
#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "rng.hpp"

namespace solwalk {

// vertical step law supported on the lattice gamma*Z: atom (k, w) sits at z = k*gamma
struct VerticalMeasure {
    double gamma = 1.0;
    std::vector<std::pair<long long, double>> atoms;  // (level, weight)
};

inline void validate_vertical(const VerticalMeasure& mu) {
    if (!(mu.gamma > 0)) throw validation_error("vertical measure: gamma must be positive");
    if (mu.atoms.empty()) throw validation_error("vertical measure: no atoms");
    double total = 0;
    for (const auto& [k, w] : mu.atoms) {
        if (!(w > 0)) throw validation_error("vertical measure: weights must be positive");
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-12) throw validation_error("vertical measure: weights must sum to 1");
}

inline double vertical_drift(const VerticalMeasure& mu) {
    double s = 0;
    for (const auto& [k, w] : mu.atoms) s += w * static_cast<double>(k);
    return s * mu.gamma;
}

// unique theta* > 0 with phi(theta) = sum w_i exp(-theta z_i) = 1, by bisection;
// phi is convex with phi(0) = 1 and phi'(0) = -drift < 0, so the root exists iff
// the walk can move down at all.  Sentinel +inf when it cannot.  Generic-support
// version; the z_i need not lie on a lattice.
inline double lundberg_exponent_zw(const std::vector<std::pair<double, double>>& zw) {
    double alpha = 0;
    bool has_down = false;
    for (const auto& [z, w] : zw) {
        alpha += w * z;
        has_down = has_down || z < 0;
    }
    if (!(alpha > 0)) throw zero_drift_error("lundberg_exponent: needs positive drift");
    if (!has_down) return std::numeric_limits<double>::infinity();

    auto phi = [&](double theta) {
        double s = 0;
        for (const auto& [z, w] : zw) s += w * std::exp(-theta * z);
        return s;
    };
    double hi = 1.0;
    while (phi(hi) < 1.0) {
        hi *= 2;
        if (hi > 1e18) throw convergence_error("lundberg_exponent: bracketing failed");
    }
    double lo = 0.0;
    while (hi - lo > 1e-12) {
        double mid = 0.5 * (lo + hi);
        (phi(mid) < 1.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

inline double lundberg_exponent(const VerticalMeasure& mu) {
    validate_vertical(mu);
    std::vector<std::pair<double, double>> zw;
    for (const auto& [k, w] : mu.atoms) zw.push_back({mu.gamma * static_cast<double>(k), w});
    return lundberg_exponent_zw(zw);
}

struct VerticalWalkStats {
    double alpha = 0;                                          // drift
    double theta_star = std::numeric_limits<double>::infinity();  // Lundberg exponent
    double p_ret = 0;                                          // return probability to level 0
    double M = 1;                                              // = 1/(1 - p_ret), expected occupation of a visited level
};

// quantitative surrogate for "almost surely finitely many visits": once the walk
// has climbed delta_levels above a level, it revisits that level with probability
// at most exp(-theta* * gamma * delta_levels) <= delta
struct TruncationPolicy {
    double delta = 1e-6;
    long long delta_levels = 0;
};

inline TruncationPolicy make_truncation(const VerticalMeasure& mu, double delta) {
    if (!(delta > 0 && delta < 1)) throw validation_error("make_truncation: delta must be in (0,1)");
    double theta = lundberg_exponent(mu);
    TruncationPolicy policy{delta, 0};
    if (std::isfinite(theta))
        policy.delta_levels = static_cast<long long>(std::ceil(std::log(1.0 / delta) / (theta * mu.gamma)));
    return policy;
}

// one-step sampler for the level walk
class LevelWalkSampler {
  public:
    explicit LevelWalkSampler(const VerticalMeasure& mu) : pick_(weights(mu)) {
        for (const auto& [k, w] : mu.atoms) jumps_.push_back(k);
    }
    long long jump(Rng& rng) const { return jumps_[pick_(rng)]; }

  private:
    static std::vector<double> weights(const VerticalMeasure& mu) {
        validate_vertical(mu);
        std::vector<double> w;
        for (const auto& [k, wt] : mu.atoms) w.push_back(wt);
        return w;
    }
    DiscreteSampler pick_;
    std::vector<long long> jumps_;
};

enum class ReturnMethod { Exact2Atom, MonteCarlo };

inline VerticalWalkStats return_probability(const VerticalMeasure& mu, ReturnMethod method,
                                            std::size_t n_paths = 1'000'000, std::uint64_t seed = 1,
                                            double delta = 1e-9) {
    validate_vertical(mu);
    VerticalWalkStats stats;
    stats.alpha = vertical_drift(mu);
    if (stats.alpha == 0) throw zero_drift_error("return_probability: drift must be nonzero");
    VerticalMeasure dir = mu;  // flip a downward walk; returns to 0 are sign-symmetric
    if (stats.alpha < 0)
        for (auto& [k, w] : dir.atoms) k = -k;
    stats.theta_star = lundberg_exponent(dir);

    if (method == ReturnMethod::Exact2Atom) {
        if (dir.atoms.size() != 2 || dir.atoms[0].first != -dir.atoms[1].first)
            throw method_mismatch_error("return_probability: Exact2Atom needs atoms at +g and -g");
        double p = 0;
        for (const auto& [k, w] : dir.atoms)
            if (k > 0) p = w;
        // gambler's ruin: P[return] = (1-p) + p * P[down-crossing from above] = 2(1-p) for p > 1/2
        stats.p_ret = 2.0 * (1.0 - p);
    } else {
        TruncationPolicy policy = make_truncation(dir, delta);
        LevelWalkSampler step(dir);
        std::size_t returned = 0;
        for (std::size_t i = 0; i < n_paths; ++i) {
            Rng rng = Rng::stream(seed, i);
            long long s = 0;
            for (long long n = 0; n < 100'000'000; ++n) {
                s += step.jump(rng);
                if (s == 0) {
                    ++returned;
                    break;
                }
                if (s >= policy.delta_levels && policy.delta_levels > 0) break;  // counted as escaped; bias <= delta
                if (s > 0 && policy.delta_levels == 0) break;                    // no downward moves at all
            }
        }
        stats.p_ret = static_cast<double>(returned) / static_cast<double>(n_paths);
    }
    if (stats.p_ret >= 1) throw numeric_error("return_probability: estimated p_ret >= 1");
    stats.M = 1.0 / (1.0 - stats.p_ret);
    return stats;
}

// occupation profile n(zeta, k) = #{i >= 0 : S_i = k} of one sampled path, for
// k in [kmin, kmax].  The path is stopped once S exceeds kmax + delta_levels, at
// which point all counts in range are final except with probability <= delta.
inline std::vector<long long> occupation_counts(const VerticalMeasure& mu, Rng& rng, long long kmin,
                                                long long kmax, const TruncationPolicy& policy) {
    if (kmin > kmax) throw validation_error("occupation_counts: empty level range");
    if (!(vertical_drift(mu) > 0)) throw zero_drift_error("occupation_counts: needs positive drift");
    LevelWalkSampler step(mu);
    std::vector<long long> counts(static_cast<std::size_t>(kmax - kmin + 1), 0);
    long long s = 0;
    const long long stop = kmax + policy.delta_levels;
    for (long long n = 0; n < 100'000'000; ++n) {
        if (s >= kmin && s <= kmax) ++counts[static_cast<std::size_t>(s - kmin)];
        if (s >= stop) return counts;
        s += step.jump(rng);
    }
    throw convergence_error("occupation_counts: step cap reached before clearing the level range");
}

}  // namespace solwalk
