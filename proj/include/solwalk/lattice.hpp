#pragma once
#include <algorithm>
#include <array>
#include <boost/functional/hash.hpp>
#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "errors.hpp"
#include "sol_group.hpp"

namespace solwalk {

using bigint = boost::multiprecision::cpp_int;
using bigrational = boost::multiprecision::cpp_rational;

// Z ⋉_T Z^2 for a hyperbolic T in SL(2,Z): (r,v)·(r',v') = (r+r', v + T^r v').
// Conjugating T to diag(e^{-gamma}, e^{gamma}) embeds the lattice in Sol.
struct LatticeSpec {
    std::array<std::array<long long, 2>, 2> T{};
    double gamma = 0;
    // rows are unit-norm left eigenvectors of T (first entry positive);
    // row 0 has eigenvalue e^{-gamma}, row 1 has e^{gamma}
    std::array<std::array<double, 2>, 2> B{};
};

inline LatticeSpec make_lattice(const std::array<std::array<long long, 2>, 2>& T) {
    const long long a = T[0][0], b = T[0][1], c = T[1][0], d = T[1][1];
    if (a * d - b * c != 1) throw validation_error("make_lattice: determinant must be 1");
    const long long tr = a + d;
    if (tr <= 2) throw validation_error("make_lattice: trace must exceed 2 (hyperbolic)");
    // c = 0 with det 1 forces trace ±2, so both eigenvector rows below are valid
    LatticeSpec spec;
    spec.T = T;
    const double trd = static_cast<double>(tr);
    const double lam_plus = (trd + std::sqrt(trd * trd - 4.0)) / 2.0;
    const double lam_minus = 1.0 / lam_plus;
    spec.gamma = std::log(lam_plus);
    int row = 0;
    for (double lam : {lam_minus, lam_plus}) {
        // left eigenvector (c, lam - a): v T = lam v
        double v0 = static_cast<double>(c), v1 = lam - static_cast<double>(a);
        double n = std::hypot(v0, v1);
        double sgn = v0 > 0 ? 1.0 : -1.0;
        spec.B[row][0] = sgn * v0 / n;
        spec.B[row][1] = sgn * v1 / n;
        ++row;
    }
    return spec;
}

struct LatticeElement {
    long long r = 0;
    bigint p = 0;
    bigint q = 0;

    bool operator==(const LatticeElement& o) const { return r == o.r && p == o.p && q == o.q; }
    bool operator<(const LatticeElement& o) const {
        if (r != o.r) return r < o.r;
        if (p != o.p) return p < o.p;
        return q < o.q;
    }
};

struct LatticeElementHash {
    std::size_t operator()(const LatticeElement& e) const {
        std::size_t h = std::hash<long long>{}(e.r);
        boost::hash_combine(h, e.p);
        boost::hash_combine(h, e.q);
        return h;
    }
};

using BigMat = std::array<std::array<bigint, 2>, 2>;

inline BigMat mat_identity() { return {{{bigint(1), bigint(0)}, {bigint(0), bigint(1)}}}; }

inline BigMat mat_mul(const BigMat& x, const BigMat& y) {
    return {{{x[0][0] * y[0][0] + x[0][1] * y[1][0], x[0][0] * y[0][1] + x[0][1] * y[1][1]},
             {x[1][0] * y[0][0] + x[1][1] * y[1][0], x[1][0] * y[0][1] + x[1][1] * y[1][1]}}};
}

// T^r with exact integers; T^{-1} is the adjugate because det T = 1
inline BigMat mat_power(const LatticeSpec& spec, long long r) {
    BigMat base;
    if (r >= 0) {
        base = {{{bigint(spec.T[0][0]), bigint(spec.T[0][1])}, {bigint(spec.T[1][0]), bigint(spec.T[1][1])}}};
    } else {
        base = {{{bigint(spec.T[1][1]), bigint(-spec.T[0][1])}, {bigint(-spec.T[1][0]), bigint(spec.T[0][0])}}};
    }
    BigMat acc = mat_identity();
    for (long long e = r >= 0 ? r : -r; e > 0; e >>= 1) {
        if (e & 1) acc = mat_mul(acc, base);
        if (e > 1) base = mat_mul(base, base);
    }
    return acc;
}

inline LatticeElement lat_multiply(const LatticeSpec& spec, const LatticeElement& a, const LatticeElement& b) {
    BigMat m = mat_power(spec, a.r);
    return {a.r + b.r, a.p + m[0][0] * b.p + m[0][1] * b.q, a.q + m[1][0] * b.p + m[1][1] * b.q};
}

inline LatticeElement lat_inverse(const LatticeSpec& spec, const LatticeElement& a) {
    BigMat m = mat_power(spec, -a.r);
    return {-a.r, -(m[0][0] * a.p + m[0][1] * a.q), -(m[1][0] * a.p + m[1][1] * a.q)};
}

// injective homomorphism psi(r,v) = (r gamma, B v) into Sol
inline SolElement embed(const LatticeSpec& spec, const LatticeElement& e) {
    double p = static_cast<double>(e.p), q = static_cast<double>(e.q);
    return {static_cast<double>(e.r) * spec.gamma, spec.B[0][0] * p + spec.B[0][1] * q,
            spec.B[1][0] * p + spec.B[1][1] * q};
}

// the six standard generators: horizontal (0,±e_i), vertical (±1,0)
inline std::vector<LatticeElement> standard_generators() {
    return {{0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}, {1, 0, 0}, {-1, 0, 0}};
}

template <class W>
struct BasicLatticeMeasure {
    std::vector<std::pair<LatticeElement, W>> atoms;
};

using LatticeMeasure = BasicLatticeMeasure<double>;
using ExactLatticeMeasure = BasicLatticeMeasure<bigrational>;

namespace detail {
inline double weight_to_double(double w) { return w; }
inline double weight_to_double(const bigrational& w) { return static_cast<double>(w); }
}  // namespace detail

template <class W>
void validate_measure(const BasicLatticeMeasure<W>& mu) {
    if (mu.atoms.empty()) throw validation_error("lattice measure: no atoms");
    W total = 0;
    for (const auto& [e, w] : mu.atoms) {
        if (w < 0) throw validation_error("lattice measure: negative weight");
        total += w;
    }
    if (std::abs(detail::weight_to_double(total) - 1.0) > 1e-9)
        throw validation_error("lattice measure: weights must sum to 1");
}

// canonical order and merged duplicates; weight arithmetic is exact for the
// rational instantiation
template <class W>
BasicLatticeMeasure<W> normalize_measure(const LatticeSpec&, BasicLatticeMeasure<W> mu) {
    std::sort(mu.atoms.begin(), mu.atoms.end(),
              [](const auto& x, const auto& y) { return x.first < y.first; });
    std::vector<std::pair<LatticeElement, W>> merged;
    for (auto& [e, w] : mu.atoms) {
        if (!merged.empty() && merged.back().first == e)
            merged.back().second += w;
        else
            merged.emplace_back(std::move(e), std::move(w));
    }
    mu.atoms = std::move(merged);
    return mu;
}

struct ConvolutionBudget {
    std::size_t max_atoms = 10'000'000;
};

// one convolution step: distribution of g·h, g ~ mu, h ~ nu
template <class W>
BasicLatticeMeasure<W> convolve(const LatticeSpec& spec, const BasicLatticeMeasure<W>& mu,
                                const BasicLatticeMeasure<W>& nu, const ConvolutionBudget& budget,
                                int reached_k = 0) {
    std::unordered_map<LatticeElement, W, LatticeElementHash> acc;
    acc.reserve(mu.atoms.size() * 2);
    // group by left factor's r so T^r is computed once per distinct power
    long long cur_r = 0;
    BigMat m = mat_identity();
    bool have_m = false;
    for (const auto& [g, wg] : mu.atoms) {
        if (!have_m || g.r != cur_r) {
            cur_r = g.r;
            m = mat_power(spec, cur_r);
            have_m = true;
        }
        for (const auto& [h, wh] : nu.atoms) {
            LatticeElement prod{g.r + h.r, g.p + m[0][0] * h.p + m[0][1] * h.q,
                                g.q + m[1][0] * h.p + m[1][1] * h.q};
            acc[prod] += wg * wh;
            if (acc.size() > budget.max_atoms)
                throw budget_error("convolution: atom budget exceeded", reached_k);
        }
    }
    BasicLatticeMeasure<W> out;
    out.atoms.assign(acc.begin(), acc.end());
    return normalize_measure(spec, std::move(out));
}

template <class W>
BasicLatticeMeasure<W> convolution_power(const LatticeSpec& spec, const BasicLatticeMeasure<W>& mu, int k,
                                         const ConvolutionBudget& budget = {}) {
    if (k < 1) throw validation_error("convolution_power: k must be positive");
    validate_measure(mu);
    BasicLatticeMeasure<W> acc = normalize_measure(spec, mu);
    for (int j = 2; j <= k; ++j) acc = convolve(spec, acc, mu, budget, j - 1);
    return acc;
}

template <class W>
double lattice_entropy(const BasicLatticeMeasure<W>& mu) {
    double h = 0;
    for (const auto& [e, w] : mu.atoms) {
        double wd = detail::weight_to_double(w);
        if (wd > 0) h -= wd * std::log(wd);
    }
    return h;
}

struct EntropySequence {
    std::vector<std::pair<int, double>> h_over_k;  // (k, H(mu^{*k})/k)
    bool truncated = false;
    int reached_k = 0;
};

// H(mu^{*k})/k for k = 1..kmax; on budget exhaustion returns the completed prefix
template <class W>
EntropySequence entropy_sequence(const LatticeSpec& spec, const BasicLatticeMeasure<W>& mu, int kmax,
                                 const ConvolutionBudget& budget = {}) {
    if (kmax < 1) throw validation_error("entropy_sequence: kmax must be positive");
    validate_measure(mu);
    EntropySequence seq;
    BasicLatticeMeasure<W> acc = normalize_measure(spec, mu);
    seq.h_over_k.emplace_back(1, lattice_entropy(acc));
    seq.reached_k = 1;
    for (int k = 2; k <= kmax; ++k) {
        try {
            acc = convolve(spec, acc, mu, budget, k - 1);
        } catch (const budget_error&) {
            seq.truncated = true;
            return seq;
        }
        seq.h_over_k.emplace_back(k, lattice_entropy(acc) / static_cast<double>(k));
        seq.reached_k = k;
    }
    return seq;
}

}  // namespace solwalk
