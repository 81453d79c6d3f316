// common.hpp -- shared numeric helpers (base-2 information quantities).
#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

namespace aht {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline const double kLog2e = std::log2(std::exp(1.0));  // log2(e)

inline double log2_safe(double x) {
    if (x <= 0.0) return -kInf;
    return std::log2(x);
}

// [x]^+
inline double pos(double x) { return x > 0.0 ? x : 0.0; }

// Entropy in bits with the 0 log 1/0 = 0 convention.
inline double entropy(std::span<const double> p) {
    double h = 0.0;
    for (double v : p) {
        if (v > 0.0) h -= v * std::log2(v);
    }
    return h;
}

inline double entropy(const std::vector<double>& p) {
    return entropy(std::span<const double>(p));
}

inline double binary_entropy(double p) {
    double h = 0.0;
    if (p > 0.0) h -= p * std::log2(p);
    if (p < 1.0) h -= (1.0 - p) * std::log2(1.0 - p);
    return h;
}

// KL divergence in bits. Conventions: 0 log a/0 = 0, and b log b/0 = +inf for b > 0.
inline double kl_divergence(std::span<const double> p, std::span<const double> q) {
    if (p.size() != q.size()) throw std::invalid_argument("kl_divergence: size mismatch");
    double d = 0.0;
    for (size_t z = 0; z < p.size(); ++z) {
        if (p[z] > 0.0) {
            if (q[z] <= 0.0) return kInf;
            d += p[z] * std::log2(p[z] / q[z]);
        }
    }
    return pos(d);  // clip tiny negative rounding
}

inline double kl_divergence(const std::vector<double>& p, const std::vector<double>& q) {
    return kl_divergence(std::span<const double>(p), std::span<const double>(q));
}

inline bool is_probability_vector(std::span<const double> p, double tol = 1e-12) {
    double s = 0.0;
    for (double v : p) {
        if (v < 0.0) return false;
        s += v;
    }
    return std::abs(s - 1.0) <= tol;
}

// log2(rho/(1-rho)), the log-odds of a single coordinate.
inline double log_odds(double rho) {
    if (rho <= 0.0) return -kInf;
    if (rho >= 1.0) return kInf;
    return std::log2(rho / (1.0 - rho));
}

}  // namespace aht
