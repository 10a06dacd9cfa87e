#pragma once
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "errors.hpp"

namespace solwalk {

struct MeanVar {
    double mean = 0;
    double var = 0;  // unbiased sample variance
    std::size_t n = 0;

    double std_error() const { return n > 1 ? std::sqrt(var / static_cast<double>(n)) : 0.0; }
};

inline MeanVar mean_var(const std::vector<double>& xs) {
    MeanVar mv;
    mv.n = xs.size();
    if (mv.n == 0) return mv;
    double s = 0;
    for (double x : xs) s += x;
    mv.mean = s / static_cast<double>(mv.n);
    if (mv.n > 1) {
        double ss = 0;
        for (double x : xs) ss += (x - mv.mean) * (x - mv.mean);
        mv.var = ss / static_cast<double>(mv.n - 1);
    }
    return mv;
}

struct LinearFit {
    double slope = 0;
    double intercept = 0;
    double slope_stderr = 0;
    std::size_t n = 0;
};

inline LinearFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw validation_error("least_squares: length mismatch");
    LinearFit fit;
    fit.n = x.size();
    if (fit.n < 2) throw validation_error("least_squares: need at least two points");
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < fit.n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(fit.n);
    my /= static_cast<double>(fit.n);
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < fit.n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx <= 0) throw degenerate_input_error("least_squares: degenerate abscissae");
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    if (fit.n > 2) {
        double rss = 0;
        for (std::size_t i = 0; i < fit.n; ++i) {
            double r = y[i] - fit.intercept - fit.slope * x[i];
            rss += r * r;
        }
        fit.slope_stderr = std::sqrt(rss / (static_cast<double>(fit.n - 2) * sxx));
    }
    return fit;
}

// two-sample Kolmogorov-Smirnov distance; inputs sorted ascending, ties handled
// by advancing both arrays through each distinct value before comparing
inline double ks_distance(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.empty() || b.empty()) throw validation_error("ks_distance: empty sample");
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0;
    while (i < a.size() || j < b.size()) {
        double v;
        if (i < a.size() && (j >= b.size() || a[i] <= b[j]))
            v = a[i];
        else
            v = b[j];
        while (i < a.size() && a[i] == v) ++i;
        while (j < b.size() && b[j] == v) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

// asymptotic two-sided rejection threshold at significance alpha:
// c(alpha) * sqrt((n+m)/(n*m)) with c = sqrt(-ln(alpha/2)/2)
inline double ks_threshold(std::size_t n, std::size_t m, double alpha = 0.001) {
    if (n == 0 || m == 0) throw validation_error("ks_threshold: empty sample");
    if (!(alpha > 0 && alpha < 1)) throw validation_error("ks_threshold: alpha out of range");
    double c = std::sqrt(-0.5 * std::log(alpha / 2));
    double nn = static_cast<double>(n), mm = static_cast<double>(m);
    return c * std::sqrt((nn + mm) / (nn * mm));
}

}  // namespace solwalk
