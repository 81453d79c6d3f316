// model.hpp -- finite-alphabet observation model and belief-state calculus.
#pragma once

#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "aht/common.hpp"

namespace aht {

struct Belief {
    std::vector<double> probs;

    size_t size() const { return probs.size(); }
    double operator[](size_t i) const { return probs[i]; }

    static Belief uniform(size_t m) {
        return Belief{std::vector<double>(m, 1.0 / static_cast<double>(m))};
    }
    static Belief point_mass(size_t m, size_t i) {
        Belief b{std::vector<double>(m, 0.0)};
        b.probs[i] = 1.0;
        return b;
    }
    bool valid(double tol = 1e-12) const { return is_probability_vector(probs, tol); }

    double max_coord() const {
        double m = 0.0;
        for (double v : probs) m = std::max(m, v);
        return m;
    }
    size_t argmax() const {  // ties to lowest index
        size_t best = 0;
        for (size_t i = 1; i < probs.size(); ++i)
            if (probs[i] > probs[best]) best = i;
        return best;
    }
};

// M hypotheses x K actions x finite observation alphabet.
// kernels[a][i][z] = probability of symbol z under action a when hypothesis i is true.
struct Model {
    size_t num_hypotheses = 0;
    std::vector<std::string> actions;
    size_t alphabet_size = 0;
    std::vector<std::vector<std::vector<double>>> kernels;

    size_t num_actions() const { return actions.size(); }
    const std::vector<double>& row(size_t a, size_t i) const { return kernels[a][i]; }

    void check_shape() const {
        if (num_hypotheses < 2) throw std::invalid_argument("model: need at least 2 hypotheses");
        if (actions.empty()) throw std::invalid_argument("model: need at least 1 action");
        if (alphabet_size < 2) throw std::invalid_argument("model: alphabet size must be >= 2");
        if (kernels.size() != actions.size())
            throw std::invalid_argument("model: kernel tensor has wrong action count");
        for (const auto& per_action : kernels) {
            if (per_action.size() != num_hypotheses)
                throw std::invalid_argument("model: kernel tensor has wrong hypothesis count");
            for (const auto& r : per_action)
                if (r.size() != alphabet_size)
                    throw std::invalid_argument("model: kernel row has wrong alphabet size");
        }
    }
};

struct BeliefUpdateResult {
    Belief posterior;
    double marginal = 0.0;  // probability of the observed symbol under the prior
};

struct RowSumViolation {
    size_t action = 0;
    size_t hypothesis = 0;
    double sum = 0.0;
};

struct ValidationReport {
    bool ok = false;
    bool assumption1 = false;  // every ordered pair distinguishable by some action
    bool assumption2 = false;  // shared supports, so the log-likelihood ratios are bounded
    double xi = kInf;          // max_{i,j,a,z} log2(q_i^a(z)/q_j^a(z)); +inf when supports differ
    std::vector<RowSumViolation> row_sum_violations;
    std::vector<std::pair<size_t, size_t>> negative_entries;  // (action, hypothesis)
    std::vector<std::pair<size_t, size_t>> indistinguishable_pairs;
    // max_a D(q_i^a || q_j^a) for every ordered pair
    std::vector<std::vector<double>> pairwise_divergence;

    std::string summary() const {
        std::ostringstream os;
        os << "assumption1=" << (assumption1 ? "true" : "false")
           << " assumption2=" << (assumption2 ? "true" : "false") << " xi_M=";
        if (std::isinf(xi)) os << "infinite";
        else os << xi;
        for (const auto& v : row_sum_violations)
            os << "\nrow-sum violation: action=" << v.action << " hypothesis=" << v.hypothesis
               << " sum=" << v.sum;
        for (const auto& e : negative_entries)
            os << "\nnegative entry: action=" << e.first << " hypothesis=" << e.second;
        for (const auto& p : indistinguishable_pairs)
            os << "\nindistinguishable pair: (" << p.first << ", " << p.second << ")";
        return os.str();
    }
};

// D(q_i^a || q_j^a) in bits.
inline double kl(const Model& model, size_t i, size_t j, size_t a) {
    return kl_divergence(model.row(a, i), model.row(a, j));
}

inline ValidationReport validate(const Model& model, double row_tol = 1e-12) {
    model.check_shape();
    const size_t m = model.num_hypotheses;
    ValidationReport rep;
    rep.pairwise_divergence.assign(m, std::vector<double>(m, 0.0));

    for (size_t a = 0; a < model.num_actions(); ++a) {
        for (size_t i = 0; i < m; ++i) {
            double s = 0.0;
            bool neg = false;
            for (double v : model.row(a, i)) {
                if (v < 0.0) neg = true;
                s += v;
            }
            if (neg) rep.negative_entries.emplace_back(a, i);
            if (std::abs(s - 1.0) > row_tol) rep.row_sum_violations.push_back({a, i, s});
        }
    }

    rep.assumption1 = true;
    rep.assumption2 = true;
    double xi = -kInf;
    for (size_t i = 0; i < m; ++i) {
        for (size_t j = 0; j < m; ++j) {
            if (i == j) continue;
            double dmax = 0.0;
            for (size_t a = 0; a < model.num_actions(); ++a) {
                dmax = std::max(dmax, kl(model, i, j, a));
                for (size_t z = 0; z < model.alphabet_size; ++z) {
                    double qi = model.kernels[a][i][z];
                    double qj = model.kernels[a][j][z];
                    if (qi > 0.0) {
                        if (qj <= 0.0) {
                            rep.assumption2 = false;
                            xi = kInf;
                        } else {
                            xi = std::max(xi, std::log2(qi / qj));
                        }
                    }
                }
            }
            rep.pairwise_divergence[i][j] = dmax;
            if (!(dmax > 0.0)) {
                rep.assumption1 = false;
                if (i < j) rep.indistinguishable_pairs.emplace_back(i, j);
            }
        }
    }
    rep.xi = rep.assumption2 ? std::max(xi, 0.0) : kInf;
    rep.ok = rep.row_sum_violations.empty() && rep.negative_entries.empty();
    return rep;
}

// Marginal q_rho^a(z) = sum_i rho_i q_i^a(z).
inline double observation_marginal(const Model& model, const Belief& belief, size_t a, size_t z) {
    double s = 0.0;
    for (size_t i = 0; i < model.num_hypotheses; ++i)
        s += belief[i] * model.kernels[a][i][z];
    return s;
}

// One Bayes step. Zero-marginal symbols leave the belief unchanged.
inline BeliefUpdateResult bayes_update(const Model& model, const Belief& belief, size_t a,
                                       size_t z) {
    BeliefUpdateResult out;
    out.marginal = observation_marginal(model, belief, a, z);
    if (out.marginal <= 0.0) {
        out.posterior = belief;
        out.marginal = 0.0;
        return out;
    }
    out.posterior.probs.resize(model.num_hypotheses);
    for (size_t i = 0; i < model.num_hypotheses; ++i)
        out.posterior.probs[i] = belief[i] * model.kernels[a][i][z] / out.marginal;
    return out;
}

// (T^a g)(rho) = sum_z g(posterior(rho, z)) q_rho^a(z).
inline double markov_operator(const Model& model,
                              const std::function<double(const Belief&)>& g, size_t a,
                              const Belief& belief) {
    double acc = 0.0;
    for (size_t z = 0; z < model.alphabet_size; ++z) {
        auto upd = bayes_update(model, belief, a, z);
        if (upd.marginal > 0.0) acc += g(upd.posterior) * upd.marginal;
    }
    return acc;
}

// I(rho; q_rho^a) in bits, computed as sum_i rho_i D(q_i^a || q_rho^a).
inline double mutual_information(const Model& model, size_t a, const Belief& belief) {
    double acc = 0.0;
    for (size_t i = 0; i < model.num_hypotheses; ++i) {
        if (belief[i] <= 0.0) continue;
        double d = 0.0;
        for (size_t z = 0; z < model.alphabet_size; ++z) {
            double qi = model.kernels[a][i][z];
            if (qi > 0.0) d += qi * std::log2(qi / observation_marginal(model, belief, a, z));
        }
        acc += belief[i] * d;
    }
    return pos(acc);
}

// psi_M(b) = max_{i != j, a} sum_z q_i^a(z) log2(q_i^a(z)/q_j^a(z)) 1{log-ratio > b}.
inline double psi(const Model& model, double b) {
    if (b < 0.0) throw std::invalid_argument("psi: b must be nonnegative");
    double best = 0.0;
    for (size_t a = 0; a < model.num_actions(); ++a) {
        for (size_t i = 0; i < model.num_hypotheses; ++i) {
            for (size_t j = 0; j < model.num_hypotheses; ++j) {
                if (i == j) continue;
                double acc = 0.0;
                for (size_t z = 0; z < model.alphabet_size; ++z) {
                    double qi = model.kernels[a][i][z];
                    if (qi <= 0.0) continue;
                    double qj = model.kernels[a][j][z];
                    if (qj <= 0.0) return kInf;  // support violation
                    double ratio = std::log2(qi / qj);
                    if (ratio > b) acc += qi * ratio;
                }
                best = std::max(best, acc);
            }
        }
    }
    return best;
}

}  // namespace aht
