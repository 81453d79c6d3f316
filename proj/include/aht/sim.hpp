// sim.hpp -- reproducible Monte Carlo: trial runner, cost estimator, drift
// checker, and the (rate, reliability) sweep.
//
// Every trial draws its randomness from a counter-derived stream, so results
// are independent of execution order and any single trial can be replayed.
#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "aht/common.hpp"
#include "aht/model.hpp"
#include "aht/policies.hpp"
#include "aht/rng.hpp"

namespace aht {

using PolicyFn = std::function<Decision(const Belief&)>;

struct TrialRecord {
    size_t true_theta = 0;
    size_t tau = 0;
    size_t declared = 0;
    bool correct = false;
    bool capped = false;
};

struct SimEstimate {
    size_t n_trials = 0;
    double mean_tau = 0.0;
    double tau_half_width = 0.0;  // 95% normal CI
    double pe = 0.0;
    double pe_upper = 0.0;        // one-sided 95% upper bound
    double total_cost = 0.0;      // mean_tau + L * pe
    double total_cost_upper = 0.0;
    uint64_t master_seed = 0;
    bool degenerate_ci = false;   // fewer than 2 trials
};

inline constexpr size_t kDefaultStepCap = 1000000;

inline TrialRecord run_trial(const Model& model, const PolicyFn& policy, double /*L*/,
                             size_t true_theta, const Belief& prior, Rng& rng,
                             size_t step_cap = kDefaultStepCap) {
    if (step_cap < 1) throw std::invalid_argument("run_trial: step cap must be >= 1");
    TrialRecord rec;
    rec.true_theta = true_theta;
    Belief belief = prior;
    for (;;) {
        Decision d = policy(belief);
        if (d.declare) {
            rec.declared = d.hypothesis;
            rec.correct = d.hypothesis == true_theta;
            return rec;
        }
        if (rec.tau >= step_cap) {
            rec.capped = true;
            return rec;
        }
        size_t a = rng.categorical(d.mixture.weights);
        size_t z = rng.categorical(model.row(a, true_theta));
        belief = bayes_update(model, belief, a, z).posterior;
        ++rec.tau;
    }
}

// One-sided 95% upper confidence bound on an error probability. With zero
// observed errors this is the exact binomial bound 1 - 0.05^(1/n); otherwise a
// normal approximation on top of the point estimate.
inline double pe_upper_bound(size_t errors, size_t n) {
    if (n == 0) return 1.0;
    if (errors == 0) return 1.0 - std::pow(0.05, 1.0 / double(n));
    double p = double(errors) / double(n);
    double up = p + 1.645 * std::sqrt(p * (1.0 - p) / double(n));
    return std::min(up, 1.0);
}

inline SimEstimate estimate(const Model& model, const PolicyFn& policy, double L,
                            const Belief& prior, size_t n_trials, uint64_t master_seed,
                            size_t step_cap = kDefaultStepCap) {
    if (n_trials < 1) throw std::invalid_argument("estimate: need at least one trial");
    SimEstimate est;
    est.n_trials = n_trials;
    est.master_seed = master_seed;
    double sum = 0.0, sumsq = 0.0;
    size_t errors = 0;
    for (size_t t = 0; t < n_trials; ++t) {
        Rng rng = Rng::for_trial(master_seed, t);
        size_t theta = rng.categorical(prior.probs);
        TrialRecord rec = run_trial(model, policy, L, theta, prior, rng, step_cap);
        sum += double(rec.tau);
        sumsq += double(rec.tau) * double(rec.tau);
        if (!rec.correct || rec.capped) ++errors;  // capped trials count as errors
    }
    est.mean_tau = sum / double(n_trials);
    if (n_trials >= 2) {
        double var = (sumsq - sum * sum / double(n_trials)) / double(n_trials - 1);
        est.tau_half_width = 1.96 * std::sqrt(std::max(var, 0.0) / double(n_trials));
    } else {
        est.degenerate_ci = true;
        est.tau_half_width = kInf;
    }
    est.pe = double(errors) / double(n_trials);
    est.pe_upper = pe_upper_bound(errors, n_trials);
    est.total_cost = est.mean_tau + L * est.pe;
    est.total_cost_upper = est.mean_tau + est.tau_half_width + L * est.pe_upper;
    return est;
}

struct DriftPhase {
    double mean_drift = 0.0;
    size_t steps = 0;
    bool sufficient = false;
};

struct DriftReport {
    DriftPhase phase1;  // log-odds below the confirmation threshold
    DriftPhase phase2;  // at or above the threshold
    double max_abs_step = 0.0;
};

// Simulates the shifted log-odds U_n = log2(rho_i/(1-rho_i)) - log2(rt/(1-rt))
// of the true hypothesis and measures the per-phase conditional drift plus the
// largest single-step move. Trials restart on declaration.
inline DriftReport drift_check(const Model& model, const PolicyFn& policy,
                               const PolicyConfig& cfg, size_t true_theta,
                               size_t steps_per_phase, uint64_t seed) {
    cfg.check();
    DriftReport rep;
    const double shift = log_odds(cfg.threshold_rho);
    double sum1 = 0.0, sum2 = 0.0;
    Rng rng(seed);
    const size_t budget = 50 * steps_per_phase + 1000;
    size_t spent = 0;
    while ((rep.phase1.steps < steps_per_phase || rep.phase2.steps < steps_per_phase) &&
           spent < budget) {
        Belief belief = Belief::uniform(model.num_hypotheses);
        for (;;) {
            if (spent >= budget) break;
            Decision d = policy(belief);
            if (d.declare) break;
            double u = log_odds(belief[true_theta]) - shift;
            size_t a = rng.categorical(d.mixture.weights);
            size_t z = rng.categorical(model.row(a, true_theta));
            // the log-odds increment is the log likelihood ratio of the true
            // row against the belief mixture of the alternatives; clamping to
            // the ordered pairwise log ratios is a no-op in exact arithmetic
            // and keeps the increment within xi under floating point rounding
            double qt = model.row(a, true_theta)[z];
            double alt = 0.0, wsum = 0.0, cap_pos = -kInf, cap_neg = -kInf;
            for (size_t j = 0; j < model.num_hypotheses; ++j) {
                if (j == true_theta) continue;
                wsum += belief[j];
                alt += belief[j] * model.row(a, j)[z];
                if (belief[j] > 0.0) {
                    double qj = model.row(a, j)[z];
                    cap_pos = std::max(cap_pos, std::log2(qt / qj));
                    cap_neg = std::max(cap_neg, std::log2(qj / qt));
                }
            }
            double du = alt > 0.0 ? std::log2(qt * wsum / alt) : cap_pos;
            double mag = std::min(std::abs(du), du >= 0.0 ? cap_pos : cap_neg);
            du = std::copysign(mag, du);
            belief = bayes_update(model, belief, a, z).posterior;
            rep.max_abs_step = std::max(rep.max_abs_step, std::abs(du));
            ++spent;
            if (u < 0.0) {
                sum1 += du;
                ++rep.phase1.steps;
            } else {
                sum2 += du;
                ++rep.phase2.steps;
            }
        }
    }
    if (rep.phase1.steps > 0) rep.phase1.mean_drift = sum1 / double(rep.phase1.steps);
    if (rep.phase2.steps > 0) rep.phase2.mean_drift = sum2 / double(rep.phase2.steps);
    rep.phase1.sufficient = rep.phase1.steps >= steps_per_phase;
    rep.phase2.sufficient = rep.phase2.steps >= steps_per_phase;
    return rep;
}

struct RatePoint {
    size_t M = 0;
    double rate = 0.0;         // log2(M) / mean tau
    double reliability = 0.0;  // -log2(pe upper bound) / mean tau
    SimEstimate estimate;
};

struct RateSweepEntry {
    size_t M = 0;
    const Model* model = nullptr;
    PolicyFn policy;
};

inline std::vector<RatePoint> rate_sweep(const std::vector<RateSweepEntry>& family, double L,
                                         size_t n_trials, uint64_t master_seed,
                                         size_t step_cap = kDefaultStepCap) {
    std::vector<RatePoint> out;
    uint64_t s = master_seed;
    for (const auto& entry : family) {
        RatePoint pt;
        pt.M = entry.M;
        Belief prior = Belief::uniform(entry.M);
        pt.estimate =
            estimate(*entry.model, entry.policy, L, prior, n_trials, splitmix64_next(s), step_cap);
        if (pt.estimate.mean_tau > 0.0) {
            pt.rate = std::log2(double(entry.M)) / pt.estimate.mean_tau;
            if (pt.estimate.pe_upper < 1.0)
                pt.reliability = -std::log2(pt.estimate.pe_upper) / pt.estimate.mean_tau;
        }
        out.push_back(std::move(pt));
    }
    return out;
}

}  // namespace aht
