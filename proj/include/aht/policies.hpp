// policies.hpp -- decision rules mapping a belief to "sample from this action
// mixture" or "retire and declare". All tie-breaks go to the lowest index.
#pragma once

#include <cassert>
#include <stdexcept>

#include "aht/dp.hpp"
#include "aht/games.hpp"
#include "aht/model.hpp"

namespace aht {

struct Decision {
    bool declare = false;
    size_t hypothesis = 0;      // valid when declare
    ActionMixture mixture;      // valid when !declare

    static Decision declared(size_t i) {
        Decision d;
        d.declare = true;
        d.hypothesis = i;
        return d;
    }
    static Decision sample(ActionMixture m) {
        Decision d;
        d.mixture = std::move(m);
        return d;
    }
};

struct PolicyConfig {
    double L = 0.0;
    double threshold_rho = 0.9;
    GameQuantities quantities;

    void check() const {
        if (!(L > 1.0)) throw std::invalid_argument("policy: need L > 1");
        if (!(threshold_rho > 0.5) || !(threshold_rho < 1.0))
            throw std::invalid_argument("policy: threshold_rho must lie in (0.5, 1)");
    }
};

namespace detail {

// phase logic shared by the two two-phase policies; since the threshold
// exceeds 1/2 at most one coordinate can clear it
template <typename Mixtures>
inline Decision two_phase_decide(const PolicyConfig& cfg, const Belief& belief,
                                 const ActionMixture& explore, const Mixtures& confirm) {
    cfg.check();
    const double declare_at = 1.0 - 1.0 / cfg.L;
    for (size_t i = 0; i < belief.size(); ++i)
        if (belief[i] >= declare_at) return Decision::declared(i);
    for (size_t i = 0; i < belief.size(); ++i)
        if (belief[i] >= cfg.threshold_rho) return Decision::sample(confirm[i]);
    return Decision::sample(explore);
}

}  // namespace detail

inline Decision pi1_decide(const PolicyConfig& cfg, const Belief& belief) {
    return detail::two_phase_decide(cfg, belief, cfg.quantities.mu0, cfg.quantities.mu);
}

inline Decision pi2_decide(const PolicyConfig& cfg, const Belief& belief) {
    return detail::two_phase_decide(cfg, belief, cfg.quantities.eta0, cfg.quantities.eta);
}

// Sample the pairwise mixture of the currently most likely hypothesis; stop at
// the same declaration threshold as the two-phase policies.
inline Decision chernoff_decide(const PolicyConfig& cfg, const Belief& belief) {
    cfg.check();
    size_t star = belief.argmax();
    if (belief[star] >= 1.0 - 1.0 / cfg.L) return Decision::declared(star);
    return Decision::sample(cfg.quantities.mu[star]);
}

// One-step lookahead against the value grid: stop when the guessing cost is no
// worse than sampling once more, otherwise take the least costly action.
inline Decision grid_policy_decide(const ValueGrid& vg, const Model& model, double L,
                                   const Belief& belief) {
    if (vg.grid.M != model.num_hypotheses || vg.L != L)
        throw std::invalid_argument("grid policy: value grid built for a different (model, L)");
    double stop = stopping_cost(belief, L);
    size_t best_a = 0;
    double best = kInf;
    for (size_t a = 0; a < model.num_actions(); ++a) {
        double acc = 0.0;
        for (size_t z = 0; z < model.alphabet_size; ++z) {
            auto upd = bayes_update(model, belief, a, z);
            if (upd.marginal > 0.0) acc += upd.marginal * vg.at(upd.posterior);
        }
        if (acc < best) {
            best = acc;
            best_a = a;
        }
    }
    if (stop <= 1.0 + best) {
        size_t star = 0;
        for (size_t j = 1; j < belief.size(); ++j)
            if ((1.0 - belief[j]) * L < (1.0 - belief[star]) * L) star = j;
        return Decision::declared(star);
    }
    return Decision::sample(ActionMixture::point_mass(model.num_actions(), best_a));
}

}  // namespace aht
