// bounds.hpp -- explicit lower and upper bounds on the optimal expected total
// cost V*(rho) for the sequential testing problem with stopping cost
// min_j (1 - rho_j) L, plus the rate-reliability envelope.
//
// Several bounds involve constants whose closed forms are not reproduced here;
// they default to 0 and can be overridden. A bound whose evaluation hits an
// infinity is reported as the +inf sentinel, rendered as "vacuous" by callers.
#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "aht/games.hpp"
#include "aht/model.hpp"

namespace aht {

struct BoundParams {
    double K1_prime = 0.0;
    double K2_prime = 0.0;
    double K_prime = 0.0;
    double K3_prime = 0.0;
    double delta = 0.25;         // in (0, 0.5]
    double iota = 0.5;           // in (0, 1)
    double b = 1.0;              // > 0, for the truncated-jump bounds
    double threshold_rho = 0.9;  // in (0.5, 1)

    void check() const {
        if (K1_prime < 0.0 || K2_prime < 0.0 || K_prime < 0.0 || K3_prime < 0.0)
            throw std::invalid_argument("bounds: constants must be nonnegative");
        if (!(delta > 0.0) || delta > 0.5)
            throw std::invalid_argument("bounds: delta must lie in (0, 0.5]");
        if (!(iota > 0.0) || !(iota < 1.0))
            throw std::invalid_argument("bounds: iota must lie in (0, 1)");
        if (!(b > 0.0)) throw std::invalid_argument("bounds: b must be positive");
        if (!(threshold_rho > 0.5) || !(threshold_rho < 1.0))
            throw std::invalid_argument("bounds: threshold_rho must lie in (0.5, 1)");
    }

    // the asymptotic parameter choices the slope analysis is built on
    static BoundParams defaults_for(double L, size_t M) {
        BoundParams p;
        double lg = std::log2(std::max(L, 4.0));
        p.delta = std::min(0.5, std::pow(lg, -1.0 / 3.0));
        p.iota = std::pow(lg, -1.0 / 4.0);
        p.b = std::max(1.0, std::log2(std::log2(std::max(L * double(M), 4.0))));
        return p;
    }
};

struct BoundReport {
    double lb_v1 = 0.0;
    double lb_chernoff = 0.0;
    double lb_alpha_form = 0.0;
    double lb_v2 = 0.0;
    double lb_uniform = 0.0;
    double lb_v3 = 0.0;
    double ub_v1bar = kInf;
    double ub_v2bar = kInf;
    double ub_v2bar_refined = kInf;
    double ub_v3bar = kInf;
    BoundParams params;
};

// The stopping cost min_j (1 - rho_j) L must exceed 1, otherwise stopping
// immediately is optimal and the bounds below do not apply.
inline bool in_region_of_interest(const Belief& belief, double L) {
    double m = kInf;
    for (double r : belief.probs) m = std::min(m, (1.0 - r) * L);
    return m > 1.0;
}

namespace detail {

inline void require_region(const Belief& belief, double L, const char* who) {
    if (!(L > 1.0)) throw std::invalid_argument(std::string(who) + ": need L > 1");
    if (!in_region_of_interest(belief, L))
        throw std::invalid_argument(
            std::string(who) +
            ": belief outside the region of interest; min_j (1-rho_j) L <= 1, so the optimal "
            "cost is the immediate stopping cost");
}

}  // namespace detail

// [ sum_i rho_i max_{j!=i} (log2((1-1/L)/(1/L)) - log2(rho_i/rho_j)) /
//   max_a D(q_i^a||q_j^a)  - K'_1 ]^+
inline double lb_v1(const Belief& belief, double L, const GameQuantities& q,
                    const BoundParams& params) {
    params.check();
    detail::require_region(belief, L, "lb_v1");
    const size_t m = belief.size();
    double total = 0.0;
    double thresh = std::log2((1.0 - 1.0 / L) / (1.0 / L));
    for (size_t i = 0; i < m; ++i) {
        if (belief[i] <= 0.0) continue;
        double best = -kInf;
        for (size_t j = 0; j < m; ++j) {
            if (j == i) continue;
            double num = thresh - (std::log2(belief[i]) - log2_safe(belief[j]));
            best = std::max(best, num / q.pairwise_divergence[i][j]);
        }
        total += belief[i] * best;
    }
    return pos(total - params.K1_prime);
}

// Chernoff-style refinement; vacuous (reported as +inf sentinel) when the
// K' constant is left at 0, since log2(L / (K' log2(2L))) then diverges.
inline double lb_chernoff(const Belief& belief, double L, const GameQuantities& q,
                          const BoundParams& params) {
    params.check();
    detail::require_region(belief, L, "lb_chernoff");
    if (!(params.delta > 0.0) || !(params.delta < 1.0))
        throw std::invalid_argument("lb_chernoff: delta must lie in (0, 1)");
    if (!std::isfinite(q.xi)) return 0.0;  // the -M xi^2 term swallows everything
    if (!(params.K_prime > 0.0)) return kInf;

    const size_t m = belief.size();
    const double delta = params.delta;
    double klog = params.K_prime * std::log2(2.0 * L);
    double total = 0.0;
    for (size_t i = 0; i < m; ++i) {
        if (belief[i] <= 0.0) continue;
        double ratio = -kInf;
        for (size_t j = 0; j < m; ++j)
            if (j != i) ratio = std::max(ratio, std::log2(belief[i]) - log2_safe(belief[j]));
        double num = pos((1.0 - delta) * std::log2(L / klog) - ratio);
        double factor = 1.0 - 2.0 * double(m) * std::pow(klog / L, delta) / belief[i];
        total += belief[i] * num / (q.d_mu[i] + delta) * factor;
    }
    total -= double(m) * q.xi * q.xi / (delta * delta);
    return pos(total);
}

// Fully explicit lower bound with no unknown constants:
// [ (H(rho) - H([alpha,1-alpha]) - alpha log2(M-1)) / i_max + alpha L ]^+.
inline double lb_alpha_form(const Belief& belief, double L, size_t M, double i_max) {
    if (!(L > 1.0)) throw std::invalid_argument("lb_alpha_form: need L > 1");
    double a = (i_max > 0.0) ? alpha(L, M, i_max) : (double(M) - 1.0) / double(M);
    double tail = a * L;
    if (i_max <= 0.0) return pos(tail);
    double info =
        (entropy(belief.probs) - binary_entropy(a) - a * std::log2(double(M) - 1.0)) / i_max;
    return pos(info + tail);
}

inline double lb_v2(const Belief& belief, double L, const GameQuantities& q,
                    const BoundParams& params) {
    params.check();
    const size_t m = belief.size();
    if (!std::isfinite(q.xi)) return 0.0;
    if (!(L > std::max(1.0, std::log2(double(m)) / std::max(q.i_max, 1e-300))))
        throw std::invalid_argument(
            "lb_v2: L too small relative to log2(M)/I_max; in that regime guessing without "
            "observations is optimal and the bound does not apply");
    double first = (entropy(belief.probs) - binary_entropy(params.delta) -
                    params.delta * std::log2(double(m) - 1.0)) /
                   q.i_max;
    double second = 0.0;
    if (belief.max_coord() <= 1.0 - params.delta) {
        second = (std::log2((1.0 - 1.0 / L) / (1.0 / L)) -
                  std::log2((1.0 - params.delta) / params.delta) - q.xi) /
                 q.d_max;
    }
    return pos(first + second - params.K2_prime);
}

// Uniform-prior specialization with delta = 1/log2(2 M L).
inline double lb_uniform(double L, size_t M, const GameQuantities& q, const BoundParams& params) {
    params.check();
    if (!std::isfinite(q.xi)) return 0.0;
    if (!(L > std::max(2.0, std::log2(double(M)) / std::max(q.i_max, 1e-300))))
        throw std::invalid_argument("lb_uniform: need L > max{2, log2(M)/I_max}");
    double v = (std::log2(double(M)) - 2.0) / q.i_max +
               std::log2((1.0 - 1.0 / L) / (1.0 / L)) / q.d_max -
               (std::log2(std::log2(L * double(M))) + q.xi) / q.d_max - params.K2_prime;
    return pos(v);
}

// Lower bound under bounded expected overshoot instead of bounded jumps.
inline double lb_v3(const Model& model, const Belief& belief, double L, const GameQuantities& q,
                    const BoundParams& params) {
    params.check();
    const size_t m = belief.size();
    if (!(L > std::log2(double(m)) / std::max(q.i_max, 1e-300)))
        throw std::invalid_argument("lb_v3: need L > log2(M)/I_max");
    double psi_b = psi(model, params.b);
    if (!std::isfinite(psi_b)) return 0.0;
    double first = (entropy(belief.probs) - binary_entropy(params.delta) -
                    params.delta * std::log2(double(m) - 1.0)) /
                   q.i_max;
    double second = 0.0;
    if (belief.max_coord() <= 1.0 - params.delta) {
        second = (std::log2((1.0 - 1.0 / L) / (1.0 / L)) -
                  std::log2((1.0 - params.delta) / params.delta) - params.b) /
                 q.d_max;
    }
    return pos(first + second - params.K3_prime) / (1.0 + psi_b / q.d_max);
}

// Cost of the two-phase policy built on the pairwise games.
inline double ub_v1bar(const Belief& belief, double L, const GameQuantities& q,
                       const BoundParams& params) {
    params.check();
    detail::require_region(belief, L, "ub_v1bar");
    if (!(q.i_1 > 0.0) || !std::isfinite(q.xi)) return kInf;
    const size_t m = belief.size();
    const double iota = params.iota;
    const double rt = params.threshold_rho;

    double head = (entropy(belief.probs) + std::log2(double(m)) + std::log2(rt / (1.0 - rt))) /
                  q.i_1 * (1.0 + iota);
    double tail = 0.0;
    for (size_t i = 0; i < m; ++i) {
        if (belief[i] <= 0.0) continue;
        if (!(q.d_mu[i] > 0.0)) return kInf;
        tail += belief[i] * std::log2(L) / q.d_mu[i];
    }
    tail *= 1.0 + iota;

    double half = (iota / 2.0) / (1.0 + iota);
    double coeff =
        double(m) * (2.0 + 1.0 / (std::pow(half, 5.0) * std::pow(q.i_1 / (2.0 * q.xi), 4.0)));
    double expnt =
        (iota * iota * iota / ((1.0 + iota) * (1.0 + iota))) * q.i_1 * q.i_1 /
        (4.0 * q.xi * q.xi * q.xi);
    double slack = coeff * std::pow(L * (1.0 - belief.max_coord()), -expnt);
    return head + tail + slack + 2.0;
}

// Cost of the two-phase policy built on the mixture games. The refined form
// applies when the exploration floor exceeds the confirmation floor.
inline double ub_v2bar(const Belief& belief, double L, const GameQuantities& q,
                       const BoundParams& params, bool refined = false,
                       bool* used_refined = nullptr) {
    params.check();
    if (!(L > 1.0)) throw std::invalid_argument("ub_v2bar: need L > 1");
    if (used_refined) *used_refined = false;
    if (!(q.i_2 > 0.0) || !std::isfinite(q.xi)) return kInf;
    const size_t m = belief.size();
    const double rt = params.threshold_rho;

    double tail = 0.0;
    for (size_t i = 0; i < m; ++i) {
        if (belief[i] <= 0.0) continue;
        if (!(q.d_eta[i] > 0.0)) return kInf;
        tail += belief[i] * std::log2(L) / q.d_eta[i];
    }

    if (refined && q.i_eta0 > q.i_eta_threshold) {
        if (used_refined) *used_refined = true;
        double head = (entropy(belief.probs) + std::log2(rt / (1.0 - rt)) + q.xi) / q.i_eta0;
        double conf = ((1.0 - rt) * std::log2(double(m)) + (2.0 - rt) * q.xi + 4.0 + kLog2e) /
                      q.i_eta_threshold;
        return head + tail + conf + 1.0;
    }
    double head = (entropy(belief.probs) + std::log2(rt / (1.0 - rt)) + q.xi + kLog2e) / q.i_2;
    return head + tail + 1.0;
}

// ub_v2bar generalized to models with unbounded log-likelihood ratios, with
// jumps truncated at b. Infeasible parameterizations return the +inf sentinel.
inline double ub_v3(const Model& model, const Belief& belief, double L, const GameQuantities& q,
                    const BoundParams& params) {
    params.check();
    if (!(L > 1.0)) throw std::invalid_argument("ub_v3: need L > 1");
    double psi_b = psi(model, params.b);
    if (!std::isfinite(psi_b) || !(q.i_2 > psi_b)) return kInf;
    double factor = (1.0 + kLog2e / params.b) * std::exp2(-params.b) * psi_b / (q.i_2 - psi_b);
    if (!(factor >= 0.0) || factor >= 1.0) return kInf;
    const size_t m = belief.size();
    const double rt = params.threshold_rho;

    double tail = 0.0;
    for (size_t i = 0; i < m; ++i) {
        if (belief[i] <= 0.0) continue;
        if (!(q.d_eta[i] > psi_b)) return kInf;
        tail += belief[i] * std::log2(L) / (q.d_eta[i] - psi_b);
    }
    double head =
        (entropy(belief.probs) + std::log2(rt / (1.0 - rt)) + params.b + kLog2e) /
        (q.i_2 - psi_b);
    return (head + tail) / (1.0 - factor) + 1.0;
}

inline BoundReport evaluate_bounds(const Model& model, const Belief& belief, double L,
                                   const GameQuantities& q, const BoundParams& params) {
    BoundReport r;
    r.params = params;
    r.lb_v1 = lb_v1(belief, L, q, params);
    r.lb_chernoff = lb_chernoff(belief, L, q, params);
    r.lb_alpha_form = lb_alpha_form(belief, L, belief.size(), q.i_max);
    double lg_over = std::log2(double(belief.size())) / std::max(q.i_max, 1e-300);
    if (L > std::max(1.0, lg_over)) r.lb_v2 = lb_v2(belief, L, q, params);
    if (L > std::max(2.0, lg_over)) r.lb_uniform = lb_uniform(L, belief.size(), q, params);
    if (L > lg_over) r.lb_v3 = lb_v3(model, belief, L, q, params);
    r.ub_v1bar = ub_v1bar(belief, L, q, params);
    r.ub_v2bar = ub_v2bar(belief, L, q, params, false);
    r.ub_v2bar_refined = ub_v2bar(belief, L, q, params, true);
    r.ub_v3bar = ub_v3(model, belief, L, q, params);
    return r;
}

// Straight-line rate-reliability envelope over a family of model sizes.
struct ReliabilityRegion {
    double d_max_sup = 0.0;   // slope anchor of the converse line at R = 0
    double i_max_sup = 0.0;   // converse line's zero crossing
    double d2_inf = 0.0;      // achievable line at R = 0
    double i2_inf = 0.0;      // achievable line's zero crossing

    double upper(double R) const {
        if (i_max_sup <= 0.0) return 0.0;
        return pos(d_max_sup * (1.0 - R / i_max_sup));
    }
    double achievable(double R) const {
        if (i2_inf <= 0.0) return 0.0;
        return pos(d2_inf * (1.0 - R / i2_inf));
    }
};

inline ReliabilityRegion reliability_region(const std::vector<GameQuantities>& family) {
    if (family.empty()) throw std::invalid_argument("reliability_region: empty family");
    ReliabilityRegion r;
    r.d2_inf = kInf;
    r.i2_inf = kInf;
    for (const auto& q : family) {
        r.d_max_sup = std::max(r.d_max_sup, q.d_max);
        r.i_max_sup = std::max(r.i_max_sup, q.i_max);
        r.d2_inf = std::min(r.d2_inf, q.d2_harmonic);
        r.i2_inf = std::min(r.i2_inf, q.i_2);
    }
    return r;
}

// (1 - eps L)(V - 1), clipped: links a tolerated error probability eps to the
// minimum expected sample count.
inline double primal_lower(double V_star_value, double L, double epsilon) {
    if (!(epsilon > 0.0) || !(epsilon < 1.0))
        throw std::invalid_argument("primal_lower: epsilon must lie in (0, 1)");
    if (!(L > 1.0)) throw std::invalid_argument("primal_lower: need L > 1");
    return pos((1.0 - epsilon * L) * (V_star_value - 1.0));
}

// Expected hitting time of level B for a submartingale with drift >= K1 below
// zero, drift >= K2 above, and increments bounded by K3.
inline double submartingale_stopping_bound(double B, double U0, double K1, double K2, double K3) {
    if (!(K1 > 0.0) || K1 > K2 || K2 > K3)
        throw std::invalid_argument("submartingale_stopping_bound: need 0 < K1 <= K2 <= K3");
    if (!(B > pos(U0)))
        throw std::invalid_argument("submartingale_stopping_bound: need B > [U0]^+");
    double v = (B - U0) / K2 + (K3 + kLog2e) / K1;
    if (U0 < 0.0) v += U0 * (1.0 / K2 - 1.0 / K1);
    return v;
}

}  // namespace aht
