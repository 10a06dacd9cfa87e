#pragma once
#include <array>
#include <cmath>

#include "errors.hpp"

namespace solwalk {

// Sol = R ⋉ R^2 with (z,x,y)·(z',x',y') = (z+z', x + e^{-z}x', y + e^{z}y').
// z is the vertical coordinate; the left-invariant metric is
// dz^2 + e^{2z}dx^2 + e^{-2z}dy^2.
struct SolElement {
    double z = 0;
    double x = 0;
    double y = 0;
};

enum class BoundarySide { Plus, Minus };

inline SolElement identity() { return {}; }

inline SolElement multiply(const SolElement& a, const SolElement& b) {
    return {a.z + b.z, a.x + std::exp(-a.z) * b.x, a.y + std::exp(a.z) * b.y};
}

inline SolElement inverse(const SolElement& g) {
    return {-g.z, -std::exp(g.z) * g.x, -std::exp(-g.z) * g.y};
}

// 3x3 affine image acting on column vectors (x', y', 1); a faithful
// representation used by tests to cross-check multiply/inverse
inline std::array<std::array<double, 3>, 3> to_matrix(const SolElement& g) {
    return {{{std::exp(-g.z), 0.0, g.x}, {0.0, std::exp(g.z), g.y}, {0.0, 0.0, 1.0}}};
}

// g^t = (tz, x·(e^{-tz}-1)/(e^{-z}-1), y·(e^{tz}-1)/(e^z-1)); the ratio has a
// removable singularity at z = 0 with limit t
inline SolElement real_power(const SolElement& g, double t) {
    if (std::abs(g.z) < 1e-12) return {t * g.z, t * g.x, t * g.y};
    double rx = std::expm1(-t * g.z) / std::expm1(-g.z);
    double ry = std::expm1(t * g.z) / std::expm1(g.z);
    return {t * g.z, g.x * rx, g.y * ry};
}

// exact distance from the identity to (0,x,0): 2·asinh(|x|/2)
inline double axis_distance(double x) { return 2.0 * std::asinh(std::abs(x) / 2.0); }

struct DistanceBounds {
    double lower = 0;
    double upper = 0;
};

// two-sided word-metric sandwich: the horizontal part is controlled by the
// exponential-distortion bounds 2log(r/4 + 1/2) <= d(id,(0,x,y)) <= 4log(r+1),
// r = ||(x,y)||, and the vertical offset enters through the triangle inequality
inline DistanceBounds distance_bounds(const SolElement& g) {
    double r = std::hypot(g.x, g.y);
    double az = std::abs(g.z);
    double upper = az + 4.0 * std::log1p(r);
    double lower = std::max(az, 2.0 * std::log(0.25 * r + 0.5) - az);
    return {lower, upper};
}

// same sandwich with r supplied in log scale, for walk positions whose
// horizontal coordinates overflow double
inline DistanceBounds distance_bounds_from_logr(double z, double log_r) {
    double az = std::abs(z);
    double l1p = log_r > 700 ? log_r : std::log1p(std::exp(log_r));
    double lhalf = log_r > 700 ? log_r - std::log(4.0) : std::log(0.25 * std::exp(log_r) + 0.5);
    return {std::max(az, 2.0 * lhalf - az), az + 4.0 * l1p};
}

// affine boundary action: g.xi = x + e^{-z}xi on the ascending boundary,
// g.xi = y + e^{z}xi on the descending one
inline double boundary_action(const SolElement& g, double xi, BoundarySide side) {
    return side == BoundarySide::Plus ? g.x + std::exp(-g.z) * xi : g.y + std::exp(g.z) * xi;
}

// unique fixed point of the boundary action, x/(1-e^{-z}) resp. y/(1-e^{z})
inline double fixed_point(const SolElement& g, BoundarySide side) {
    if (g.z == 0.0) throw degenerate_input_error("fixed_point: z = 0 acts by translation");
    if (side == BoundarySide::Plus) return g.x / -std::expm1(-g.z);
    return g.y / -std::expm1(g.z);
}

// a pair acts properly iff both elements translate vertically and their
// boundary fixed points are distinct
inline bool is_proper_pair(const SolElement& g, const SolElement& h, BoundarySide side) {
    if (g.z == 0.0 || h.z == 0.0) return false;
    return std::abs(fixed_point(g, side) - fixed_point(h, side)) > 1e-9;
}

}  // namespace solwalk
