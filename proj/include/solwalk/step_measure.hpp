#pragma once
#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "lattice.hpp"
#include "pisot.hpp"
#include "sol_group.hpp"
#include "vertical_walk.hpp"

namespace solwalk {

enum class YRule { Zero, IndependentSign };

// marginals of a product coupling pi_* mu = mu_z x mu_x (mu_y rides along)
struct ProductForm {
    double gamma = 0;
    std::vector<std::pair<double, double>> mu_z, mu_x, mu_y;  // (value, weight)
};

struct StepMeasure {
    std::vector<std::pair<SolElement, double>> atoms;
    std::optional<ProductForm> product_form;
    std::vector<long long> pisot_poly;  // nonempty when gamma = log of a certified Pisot root
};

namespace detail {
inline void validate_marginal(const std::vector<std::pair<double, double>>& m, const char* name) {
    if (m.empty()) throw validation_error(std::string("step measure: empty marginal ") + name);
    double total = 0;
    for (const auto& [v, w] : m) {
        if (!(w > 0)) throw validation_error(std::string("step measure: nonpositive weight in ") + name);
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-12)
        throw validation_error(std::string("step measure: weights of ") + name + " must sum to 1");
}
}  // namespace detail

inline void validate_step_measure(const StepMeasure& mu) {
    if (mu.atoms.empty()) throw validation_error("step measure: no atoms");
    double total = 0;
    for (const auto& [g, w] : mu.atoms) {
        if (!(w > 0)) throw validation_error("step measure: weights must be positive");
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-12) throw validation_error("step measure: weights must sum to 1");
    if (mu.product_form) {
        const ProductForm& pf = *mu.product_form;
        if (!(pf.gamma > 0)) throw validation_error("step measure: product form needs gamma > 0");
        detail::validate_marginal(pf.mu_z, "mu_z");
        detail::validate_marginal(pf.mu_x, "mu_x");
        detail::validate_marginal(pf.mu_y, "mu_y");
        if (mu.atoms.size() != pf.mu_z.size() * pf.mu_x.size() * pf.mu_y.size())
            throw validation_error("step measure: atom list does not match the product coupling");
    }
}

// duplicate atoms merged at 1e-12 coordinate tolerance (constructed supports are
// separated by far more, so tolerance chaining cannot occur)
inline std::vector<std::pair<SolElement, double>> merged_atoms(const StepMeasure& mu) {
    auto atoms = mu.atoms;
    std::sort(atoms.begin(), atoms.end(), [](const auto& a, const auto& b) {
        if (a.first.z != b.first.z) return a.first.z < b.first.z;
        if (a.first.x != b.first.x) return a.first.x < b.first.x;
        return a.first.y < b.first.y;
    });
    std::vector<std::pair<SolElement, double>> out;
    for (const auto& [g, w] : atoms) {
        if (!out.empty()) {
            const SolElement& h = out.back().first;
            if (std::abs(g.z - h.z) <= 1e-12 && std::abs(g.x - h.x) <= 1e-12 && std::abs(g.y - h.y) <= 1e-12) {
                out.back().second += w;
                continue;
            }
        }
        out.push_back({g, w});
    }
    return out;
}

inline double drift(const StepMeasure& mu) {
    double s = 0;
    for (const auto& [g, w] : mu.atoms) s += w * g.z;
    return s;
}

inline double shannon_entropy(const StepMeasure& mu) {
    double h = 0;
    for (const auto& [g, w] : merged_atoms(mu)) h -= w * std::log(w);
    return h;
}

inline StepMeasure from_product_form(ProductForm pf) {
    StepMeasure mu;
    for (const auto& [z, wz] : pf.mu_z)
        for (const auto& [x, wx] : pf.mu_x)
            for (const auto& [y, wy] : pf.mu_y) mu.atoms.push_back({{z, x, y}, wz * wx * wy});
    mu.product_form = std::move(pf);
    validate_step_measure(mu);
    return mu;
}

namespace detail {
inline std::vector<std::pair<double, double>> y_marginal(YRule rule) {
    if (rule == YRule::Zero) return {{0.0, 1.0}};
    return {{-1.0, 0.5}, {1.0, 0.5}};
}
}  // namespace detail

// mu_z = p d_{gamma} + (1-p) d_{-gamma}, mu_x uniform on {1,-1}
inline StepMeasure make_solomyak(double gamma, double p, YRule y_rule = YRule::Zero) {
    if (!(gamma > 0)) throw validation_error("make_solomyak: gamma must be positive");
    if (!(p > 0.5 && p < 1)) throw validation_error("make_solomyak: need 1/2 < p < 1");
    ProductForm pf;
    pf.gamma = gamma;
    pf.mu_z = {{-gamma, 1.0 - p}, {gamma, p}};
    pf.mu_x = {{-1.0, 0.5}, {1.0, 0.5}};
    pf.mu_y = detail::y_marginal(y_rule);
    return from_product_form(std::move(pf));
}

// mu_x = q1 d_1 + q1 d_{-1} + q0 d_0 with q0 > 1/2, vertical atoms on gamma*Z
// for gamma = log alpha, alpha the certified Pisot root
inline StepMeasure make_erdos(const PisotCertificate& cert, const std::vector<std::pair<long long, double>>& mu_z,
                              double q0, double q1, YRule y_rule = YRule::Zero) {
    if (!(q0 > 0.5)) throw validation_error("make_erdos: need q0 > 1/2");
    if (q1 < 0 || std::abs(q0 + 2 * q1 - 1.0) > 1e-12)
        throw validation_error("make_erdos: need q0 + 2*q1 = 1");
    if (mu_z.empty()) throw validation_error("make_erdos: empty vertical measure");
    double mean_level = 0;
    for (const auto& [k, w] : mu_z) mean_level += w * static_cast<double>(k);
    if (!(mean_level > 0)) throw zero_drift_error("make_erdos: vertical measure must have positive mean");

    ProductForm pf;
    pf.gamma = std::log(cert.alpha);
    for (const auto& [k, w] : mu_z) pf.mu_z.push_back({static_cast<double>(k) * pf.gamma, w});
    std::sort(pf.mu_z.begin(), pf.mu_z.end());
    if (q1 > 0)
        pf.mu_x = {{-1.0, q1}, {0.0, q0}, {1.0, q1}};
    else
        pf.mu_x = {{0.0, 1.0}};
    pf.mu_y = detail::y_marginal(y_rule);
    StepMeasure mu = from_product_form(std::move(pf));
    mu.pisot_poly = cert.poly;
    return mu;
}

// mu_l = (base + d_{g^l}) / 2: entropy stays bounded while the drift grows with l
inline LatticeMeasure make_singular_by_speed(const LatticeSpec& spec, const LatticeMeasure& base,
                                             const LatticeElement& g, int l) {
    if (g.r == 0) throw validation_error("make_singular_by_speed: g needs a nonzero vertical component");
    if (l < 1) throw validation_error("make_singular_by_speed: l must be >= 1");
    validate_measure(base);
    LatticeElement gl;
    for (int i = 0; i < l; ++i) gl = lat_multiply(spec, gl, g);
    LatticeMeasure out;
    for (const auto& [e, w] : base.atoms) out.atoms.push_back({e, 0.5 * w});
    out.atoms.push_back({gl, 0.5});
    return normalize_measure(spec, std::move(out));
}

inline double lattice_drift(const LatticeSpec& spec, const BasicLatticeMeasure<double>& mu) {
    double s = 0;
    for (const auto& [e, w] : mu.atoms) s += w * static_cast<double>(e.r);
    return s * spec.gamma;
}

// dim nu <= inf_k H(mu^{*k}) / (k |alpha|), capped at 1 (the boundary is a line)
inline double dimension_bound(const LatticeSpec& spec, const LatticeMeasure& mu, int kmax,
                              const ConvolutionBudget& budget = {}) {
    double alpha = lattice_drift(spec, mu);
    if (std::abs(alpha) < 1e-15 * spec.gamma) throw zero_drift_error("dimension_bound: drift is zero");
    EntropySequence seq = entropy_sequence(spec, mu, kmax, budget);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& [k, h_over_k] : seq.h_over_k) best = std::min(best, h_over_k);
    return std::min(1.0, best / std::abs(alpha));
}

// non-lattice support: only the k = 1 entropy bound is available
inline double dimension_bound(const StepMeasure& mu) {
    double alpha = drift(mu);
    if (alpha == 0) throw zero_drift_error("dimension_bound: drift is zero");
    return std::min(1.0, shannon_entropy(mu) / std::abs(alpha));
}

// sufficient (not necessary) check that the support generates a group, not just
// a semigroup: closure under inverse, or the identity reachable within kmax steps
inline bool nondegeneracy_hint(const LatticeSpec& spec, const LatticeMeasure& mu, int kmax,
                               const ConvolutionBudget& budget = {}) {
    validate_measure(mu);
    std::vector<LatticeElement> support;
    for (const auto& [e, w] : mu.atoms) support.push_back(e);
    std::sort(support.begin(), support.end());
    bool closed = true;
    for (const auto& e : support)
        closed = closed && std::binary_search(support.begin(), support.end(), lat_inverse(spec, e));
    if (closed) return true;
    const LatticeElement id{};
    try {
        LatticeMeasure acc = normalize_measure(spec, mu);
        for (int k = 1; k <= kmax; ++k) {
            for (const auto& [e, w] : acc.atoms)
                if (e == id) return true;
            if (k < kmax) acc = convolve(spec, acc, mu, budget, k);
        }
    } catch (const budget_error&) {
    }
    return false;
}

// bridge into Sol coordinates for boundary sampling
inline StepMeasure embed_measure(const LatticeSpec& spec, const LatticeMeasure& mu) {
    validate_measure(mu);
    StepMeasure out;
    for (const auto& [e, w] : mu.atoms) out.atoms.push_back({embed(spec, e), w});
    return out;
}

// extract the vertical level walk of a product-form measure
inline VerticalMeasure vertical_measure(const StepMeasure& mu) {
    validate_step_measure(mu);
    if (!mu.product_form)
        throw method_mismatch_error("vertical_measure: requires a product-form step measure");
    const ProductForm& pf = *mu.product_form;
    VerticalMeasure vm;
    vm.gamma = pf.gamma;
    for (const auto& [z, w] : pf.mu_z) {
        double kf = z / pf.gamma;
        long long k = std::llround(kf);
        if (std::abs(z - static_cast<double>(k) * pf.gamma) > 1e-9)
            throw validation_error("vertical_measure: mu_z is not supported on gamma*Z");
        vm.atoms.push_back({k, w});
    }
    std::sort(vm.atoms.begin(), vm.atoms.end());
    std::vector<std::pair<long long, double>> merged;
    for (const auto& [k, w] : vm.atoms) {
        if (!merged.empty() && merged.back().first == k)
            merged.back().second += w;
        else
            merged.push_back({k, w});
    }
    vm.atoms = std::move(merged);
    return vm;
}

}  // namespace solwalk
