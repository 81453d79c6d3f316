// games.hpp -- the max-min information quantities driving the two-phase policies.
//
// Two families of optimizations over action mixtures:
//   * pairwise games: max over action mixtures of the worst-case pairwise KL
//     divergence (finite matrix games);
//   * mixture-discrimination games: the adversary mixes the alternative
//     hypotheses, giving a convex inner minimization. Solved by a double-oracle
//     loop: a restricted matrix game over the adversary's columns discovered so
//     far yields an upper bound and a fresh action mixture; a full inner solve
//     at that mixture yields a certified lower bound and a new column.
// All reported game values are certified lower bounds (inner solves subtract
// their Frank-Wolfe gap), so downstream upper bounds on the optimal cost stay
// valid even before full convergence.
#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "aht/matrix_game.hpp"
#include "aht/model.hpp"

namespace aht {

struct ActionMixture {
    std::vector<double> weights;

    bool valid(double tol = 1e-10) const { return is_probability_vector(weights, tol); }
    static ActionMixture point_mass(size_t k, size_t a) {
        ActionMixture m{std::vector<double>(k, 0.0)};
        m.weights[a] = 1.0;
        return m;
    }
    static ActionMixture uniform(size_t k) {
        return ActionMixture{std::vector<double>(k, 1.0 / static_cast<double>(k))};
    }
};

struct GameQuantities {
    ActionMixture mu0;
    std::vector<ActionMixture> mu;
    ActionMixture eta0;
    std::vector<ActionMixture> eta;
    double i_mu0 = 0.0;
    double i_1 = 0.0;
    std::vector<double> d_mu;
    double i_eta0 = 0.0;
    double i_eta_threshold = 0.0;
    double i_2 = 0.0;
    std::vector<double> d_eta;
    double i_max = 0.0;
    double d_max = 0.0;
    double xi = kInf;
    double d1_harmonic = 0.0;
    double d2_harmonic = 0.0;
    double threshold_rho = 0.9;
    // max_a D(q_i^a || q_j^a) for every ordered pair
    std::vector<std::vector<double>> pairwise_divergence;
};

namespace detail {

// sum_a lambda_a D(q_i^a || sum_j w_j q_j^a) and its gradient in w.
struct MixtureObjective {
    const Model* model;
    size_t i;
    const std::vector<double>* lambda;

    double value(const std::vector<double>& w) const {
        double acc = 0.0;
        for (size_t a = 0; a < model->num_actions(); ++a) {
            double la = (*lambda)[a];
            if (la <= 0.0) continue;
            const auto& qi = model->row(a, i);
            double d = 0.0;
            for (size_t z = 0; z < model->alphabet_size; ++z) {
                if (qi[z] <= 0.0) continue;
                double mix = 0.0;
                for (size_t j = 0; j < model->num_hypotheses; ++j)
                    mix += w[j] * model->kernels[a][j][z];
                if (mix <= 0.0) return kInf;
                d += qi[z] * std::log2(qi[z] / mix);
            }
            acc += la * d;
        }
        return pos(acc);
    }

    // gradient over the alternative coordinates (entry i is unused)
    std::vector<double> gradient(const std::vector<double>& w) const {
        const double inv_ln2 = 1.0 / std::log(2.0);
        std::vector<double> g(model->num_hypotheses, 0.0);
        for (size_t a = 0; a < model->num_actions(); ++a) {
            double la = (*lambda)[a];
            if (la <= 0.0) continue;
            const auto& qi = model->row(a, i);
            for (size_t z = 0; z < model->alphabet_size; ++z) {
                if (qi[z] <= 0.0) continue;
                double mix = 0.0;
                for (size_t j = 0; j < model->num_hypotheses; ++j)
                    mix += w[j] * model->kernels[a][j][z];
                if (mix <= 0.0) continue;
                double factor = la * inv_ln2 * qi[z] / mix;
                for (size_t j = 0; j < model->num_hypotheses; ++j) {
                    if (j == i) continue;
                    g[j] -= factor * model->kernels[a][j][z];
                }
            }
        }
        return g;
    }
};

struct InnerSolution {
    std::vector<double> w;   // mixture over the alternatives, entry i fixed at 0
    double value = kInf;     // objective at w
    double lower = 0.0;      // value minus the Frank-Wolfe gap: a true lower bound
    double gap = kInf;
};

// Minimizes the mixture objective over {w in simplex(j != i)}, optionally with
// w_k >= rho_tilde. Exponentiated gradient with an adaptive step, restarted
// from the vertices, with a Frank-Wolfe gap certificate at the end.
inline InnerSolution minimize_mixture_divergence(const Model& model, size_t i,
                                                 const std::vector<double>& lambda,
                                                 long constrained_k = -1,
                                                 double rho_tilde = 0.0,
                                                 size_t max_iters = 400, double tol = 1e-9) {
    const size_t m = model.num_hypotheses;
    MixtureObjective obj{&model, i, &lambda};

    auto project = [&](std::vector<double>& w) {
        double s = 0.0;
        for (size_t j = 0; j < m; ++j) {
            if (j == i) {
                w[j] = 0.0;
                continue;
            }
            w[j] = std::max(w[j], 0.0);
            s += w[j];
        }
        if (s <= 0.0) {
            for (size_t j = 0; j < m; ++j) w[j] = (j == i) ? 0.0 : 1.0 / double(m - 1);
            s = 1.0;
        } else {
            for (double& v : w) v /= s;
        }
        if (constrained_k >= 0) {
            size_t k = size_t(constrained_k);
            if (w[k] < rho_tilde) {
                double rest = 1.0 - w[k];
                double scale = rest > 0.0 ? (1.0 - rho_tilde) / rest : 0.0;
                for (size_t j = 0; j < m; ++j)
                    if (j != k) w[j] *= scale;
                w[k] = rho_tilde;
            }
        }
    };

    // candidate starts: uniform plus the (constraint-projected) vertices,
    // nudged toward the interior so multiplicative updates can leave them
    std::vector<std::vector<double>> starts;
    {
        std::vector<double> u(m, 1.0 / double(m - 1));
        u[i] = 0.0;
        project(u);
        starts.push_back(u);
        double best_vertex = kInf;
        std::vector<double> best_v;
        for (size_t j = 0; j < m; ++j) {
            if (j == i) continue;
            std::vector<double> v(m, 0.0);
            v[j] = 1.0;
            project(v);
            double fv = obj.value(v);
            if (fv < best_vertex) {
                best_vertex = fv;
                best_v = v;
            }
        }
        if (!best_v.empty() && std::isfinite(best_vertex)) {
            for (size_t j = 0; j < m; ++j) best_v[j] = 0.9 * best_v[j] + 0.1 * u[j];
            project(best_v);
            starts.push_back(best_v);
        }
    }

    InnerSolution best;
    for (auto& w : starts) {
        double f = obj.value(w);
        if (!std::isfinite(f)) continue;
        double step = 1.0;
        for (size_t it = 0; it < max_iters; ++it) {
            auto g = obj.gradient(w);
            double gmax = 0.0;
            for (size_t j = 0; j < m; ++j)
                if (j != i) gmax = std::max(gmax, std::abs(g[j]));
            if (gmax <= 0.0) break;
            std::vector<double> cand(m);
            bool moved = false;
            for (int tries = 0; tries < 20; ++tries) {
                for (size_t j = 0; j < m; ++j)
                    cand[j] = (j == i) ? 0.0 : w[j] * std::exp(-step / gmax * g[j]);
                project(cand);
                double fc = obj.value(cand);
                if (fc < f) {
                    w = cand;
                    f = fc;
                    step *= 1.3;
                    moved = true;
                    break;
                }
                step *= 0.5;
                if (step < 1e-14) break;
            }
            if (!moved) break;
        }
        // Frank-Wolfe gap over the feasible vertices
        auto g = obj.gradient(w);
        double wg = 0.0, gmin = kInf;
        for (size_t j = 0; j < m; ++j) {
            if (j == i) continue;
            wg += w[j] * g[j];
            gmin = std::min(gmin, g[j]);
        }
        double lin_min = (constrained_k >= 0)
                             ? rho_tilde * g[size_t(constrained_k)] + (1.0 - rho_tilde) * gmin
                             : gmin;
        double gap = std::max(0.0, wg - lin_min);
        if (f - gap > best.lower || !std::isfinite(best.value)) {
            best.w = w;
            best.value = f;
            best.gap = gap;
            best.lower = pos(f - gap);
        }
        if (best.gap <= tol) break;
    }
    if (best.w.empty()) {  // objective infinite everywhere we looked
        best.w.assign(m, 0.0);
        best.value = kInf;
        best.lower = kInf;
        best.gap = 0.0;
    }
    return best;
}

inline std::vector<double> divergence_column(const Model& model, size_t i,
                                             const std::vector<double>& w) {
    std::vector<double> col(model.num_actions(), 0.0);
    for (size_t a = 0; a < model.num_actions(); ++a) {
        const auto& qi = model.row(a, i);
        double d = 0.0;
        for (size_t z = 0; z < model.alphabet_size; ++z) {
            if (qi[z] <= 0.0) continue;
            double mix = 0.0;
            for (size_t j = 0; j < model.num_hypotheses; ++j)
                mix += w[j] * model.kernels[a][j][z];
            if (mix <= 0.0) {
                d = kInf;
                break;
            }
            d += qi[z] * std::log2(qi[z] / mix);
        }
        col[a] = std::isfinite(d) ? pos(d) : kInf;
    }
    return col;
}

}  // namespace detail

struct MuSolution {
    ActionMixture mu0;
    std::vector<ActionMixture> mu;
    double i_mu0 = 0.0;
    std::vector<double> d_mu;
    SolverReport report;
};

// Pairwise-KL games: rows are actions, columns are ordered hypothesis pairs.
inline MuSolution solve_mu(const Model& model, double tol = 1e-6) {
    const size_t m = model.num_hypotheses;
    const size_t k = model.num_actions();

    std::vector<std::vector<double>> all_pairs(k);
    std::vector<std::pair<size_t, size_t>> pair_index;
    for (size_t i = 0; i < m; ++i)
        for (size_t j = 0; j < m; ++j)
            if (i != j) pair_index.emplace_back(i, j);
    for (size_t a = 0; a < k; ++a) {
        all_pairs[a].resize(pair_index.size());
        for (size_t c = 0; c < pair_index.size(); ++c)
            all_pairs[a][c] = kl(model, pair_index[c].first, pair_index[c].second, a);
    }

    MuSolution out;
    auto g0 = solve_matrix_game(all_pairs, tol);
    out.mu0 = ActionMixture{g0.row_mixture};
    out.i_mu0 = g0.value;
    out.report = g0.report;

    out.mu.resize(m);
    out.d_mu.resize(m);
    for (size_t i = 0; i < m; ++i) {
        std::vector<std::vector<double>> payoff(k);
        for (size_t a = 0; a < k; ++a)
            for (size_t c = 0; c < pair_index.size(); ++c)
                if (pair_index[c].first == i) payoff[a].push_back(all_pairs[a][c]);
        auto gi = solve_matrix_game(payoff, tol);
        out.mu[i] = ActionMixture{gi.row_mixture};
        out.d_mu[i] = gi.value;
        out.report.best_response_gap =
            std::max(out.report.best_response_gap, gi.report.best_response_gap);
        out.report.iterations += gi.report.iterations;
        out.report.converged = out.report.converged && gi.report.converged;
    }
    return out;
}

struct EtaSolution {
    ActionMixture eta0;
    std::vector<ActionMixture> eta;
    double i_eta0 = 0.0;
    double i_eta_threshold = 0.0;
    double i_2 = 0.0;
    std::vector<double> d_eta;
    SolverReport report;
};

namespace detail {

struct OracleGameResult {
    std::vector<double> lambda;
    double lower = 0.0;
    double upper = kInf;
    size_t iterations = 0;
};

// Double oracle over adversary columns. `alternatives` lists the hypotheses the
// adversary may impersonate (one for the per-i game, all for the exploration
// game). Extra action mixtures are evaluated as candidates so that chained
// quantities stay ordered.
inline OracleGameResult solve_mixture_game(const Model& model,
                                           const std::vector<size_t>& alternatives,
                                           const std::vector<std::vector<double>>& extra_lambdas,
                                           double tol, size_t max_rounds = 60) {
    const size_t m = model.num_hypotheses;
    const size_t k = model.num_actions();

    std::vector<std::vector<double>> payoff(k);        // rows: actions
    std::vector<std::pair<size_t, std::vector<double>>> cols;  // (i, w)
    for (size_t i : alternatives) {
        for (size_t j = 0; j < m; ++j) {
            if (j == i) continue;
            std::vector<double> w(m, 0.0);
            w[j] = 1.0;
            auto col = divergence_column(model, i, w);
            for (size_t a = 0; a < k; ++a) payoff[a].push_back(col[a]);
            cols.emplace_back(i, std::move(w));
        }
    }

    OracleGameResult out;
    auto full_lower = [&](const std::vector<double>& lambda, bool add_columns) {
        double lo = kInf;
        for (size_t i : alternatives) {
            auto inner = minimize_mixture_divergence(model, i, lambda, -1, 0.0, 400, tol * 0.1);
            lo = std::min(lo, inner.lower);
            if (add_columns && !inner.w.empty() && std::isfinite(inner.value)) {
                auto col = divergence_column(model, i, inner.w);
                for (size_t a = 0; a < k; ++a) payoff[a].push_back(col[a]);
                cols.emplace_back(i, inner.w);
            }
        }
        return lo;
    };

    for (const auto& lam : extra_lambdas) {
        double lo = full_lower(lam, true);
        if (lo > out.lower || out.lambda.empty()) {
            out.lower = lo;
            out.lambda = lam;
        }
    }

    for (size_t round = 0; round < max_rounds; ++round) {
        auto game = solve_matrix_game(payoff, tol, 20000);
        out.upper = std::min(out.upper, game.value);
        out.iterations += game.report.iterations;
        double lo = full_lower(game.row_mixture, true);
        if (lo > out.lower || out.lambda.empty()) {
            out.lower = lo;
            out.lambda = game.row_mixture;
        }
        if (out.upper - out.lower <= tol) break;
    }
    if (out.lambda.empty()) out.lambda.assign(k, 1.0 / double(k));
    return out;
}

}  // namespace detail

// Mixture-discrimination games. The adversary's belief constraint set is
// relaxed to the full alternative simplex, which can only shrink the computed
// divergences; the resulting upper bounds on cost stay valid.
inline EtaSolution solve_eta(const Model& model, double /*L*/, double threshold_rho,
                             double tol = 1e-6) {
    if (!(threshold_rho > 0.5 && threshold_rho < 1.0))
        throw std::invalid_argument("solve_eta: threshold_rho must lie in (0.5, 1)");
    const size_t m = model.num_hypotheses;

    EtaSolution out;
    std::vector<size_t> all(m);
    for (size_t i = 0; i < m; ++i) all[i] = i;

    auto g0 = detail::solve_mixture_game(model, all, {}, tol);
    out.eta0 = ActionMixture{g0.lambda};
    out.report.iterations += g0.iterations;
    out.report.best_response_gap = g0.upper - g0.lower;

    out.eta.resize(m);
    out.d_eta.resize(m);
    for (size_t i = 0; i < m; ++i) {
        auto gi = detail::solve_mixture_game(model, {i}, {g0.lambda}, tol);
        out.eta[i] = ActionMixture{gi.lambda};
        out.d_eta[i] = gi.lower;
        out.report.iterations += gi.iterations;
        out.report.best_response_gap =
            std::max(out.report.best_response_gap, gi.upper - gi.lower);
    }

    // exploration floor: worst case over the true hypothesis under eta0
    out.i_eta0 = kInf;
    for (size_t i = 0; i < m; ++i) {
        auto inner =
            detail::minimize_mixture_divergence(model, i, out.eta0.weights, -1, 0.0, 400, tol * 0.1);
        out.i_eta0 = std::min(out.i_eta0, inner.lower);
    }

    // confirmation floor when a wrong hypothesis k holds the threshold
    out.i_eta_threshold = kInf;
    for (size_t i = 0; i < m; ++i) {
        for (size_t k = 0; k < m; ++k) {
            if (k == i) continue;
            auto inner = detail::minimize_mixture_divergence(
                model, i, out.eta[k].weights, long(k), threshold_rho, 400, tol * 0.1);
            out.i_eta_threshold = std::min(out.i_eta_threshold, inner.lower);
        }
    }

    out.i_2 = std::min(out.i_eta0, out.i_eta_threshold);
    out.report.converged = out.report.best_response_gap <= tol;
    return out;
}

struct CapacityResult {
    double i_max = 0.0;       // certified from above, within tol of the capacity
    size_t best_action = 0;
    SolverReport report;
};

// Per-action channel capacity by alternating maximization; returns the max.
inline CapacityResult solve_i_max(const Model& model, double tol = 1e-6,
                                  size_t max_iters = 100000) {
    CapacityResult out;
    out.report.converged = true;
    double best = -kInf;
    for (size_t a = 0; a < model.num_actions(); ++a) {
        const size_t m = model.num_hypotheses;
        std::vector<double> r(m, 1.0 / double(m));
        std::vector<double> d(m, 0.0);
        double upper = 0.0, lower = 0.0;
        size_t it = 0;
        bool conv = false;
        for (; it < max_iters; ++it) {
            upper = -kInf;
            lower = 0.0;
            for (size_t i = 0; i < m; ++i) {
                double di = 0.0;
                const auto& qi = model.row(a, i);
                for (size_t z = 0; z < model.alphabet_size; ++z) {
                    if (qi[z] <= 0.0) continue;
                    double qz = 0.0;
                    for (size_t j = 0; j < m; ++j) qz += r[j] * model.kernels[a][j][z];
                    di += qi[z] * std::log2(qi[z] / qz);
                }
                d[i] = di;
                upper = std::max(upper, di);
                lower += r[i] * di;
            }
            if (upper - lower <= tol) {
                conv = true;
                break;
            }
            double z = 0.0;
            for (size_t i = 0; i < m; ++i) {
                r[i] *= std::exp2(d[i]);
                z += r[i];
            }
            for (double& v : r) v /= z;
        }
        out.report.iterations += it;
        out.report.converged = out.report.converged && conv;
        out.report.best_response_gap = std::max(
            out.report.best_response_gap == kInf ? 0.0 : out.report.best_response_gap,
            upper - lower);
        if (upper > best) {
            best = upper;
            out.best_action = a;
        }
    }
    out.i_max = pos(best);
    return out;
}

// The exploration-rate correction used by the first two-phase policy's bound.
inline double compute_i1(const Model& model, const MuSolution& mu, double xi) {
    if (!std::isfinite(xi)) return 0.0;
    const size_t m = model.num_hypotheses;
    double inner = kInf;
    for (size_t i = 0; i < m; ++i) {
        for (size_t j = 0; j < m; ++j) {
            if (i == j) continue;
            double s = 0.0;
            for (size_t a = 0; a < model.num_actions(); ++a)
                s += mu.mu[j].weights[a] * kl(model, i, j, a);
            inner = std::min(inner, s);
        }
    }
    if (!(inner > 0.0) || !(mu.i_mu0 > 0.0)) return 0.0;
    double ratio = (std::log2(double(m)) + 4.0 * xi) / inner;
    return mu.i_mu0 / (ratio * ratio);
}

// (M-1) / (M-1 + 2^(L * i_max)), evaluated in log space for large exponents.
inline double alpha(double L, size_t M, double i_max) {
    if (!(L > 0.0) || M < 2) throw std::invalid_argument("alpha: need L > 0 and M >= 2");
    double e = L * i_max;
    double m1 = double(M - 1);
    if (e > 512.0) return m1 * std::exp2(-e);  // underflows to 0 for huge exponents
    return m1 / (m1 + std::exp2(e));
}

inline double harmonic_mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) {
        if (!(x > 0.0)) return 0.0;
        s += 1.0 / x;
    }
    return double(v.size()) / s;
}

inline GameQuantities compute_game_quantities(const Model& model, double L, double threshold_rho,
                                              double tol = 1e-6) {
    auto rep = validate(model);
    GameQuantities q;
    q.threshold_rho = threshold_rho;
    q.xi = rep.xi;
    q.pairwise_divergence = rep.pairwise_divergence;
    q.d_max = 0.0;
    for (const auto& row : rep.pairwise_divergence)
        for (double v : row) q.d_max = std::max(q.d_max, v);

    auto mu = solve_mu(model, tol);
    auto eta = solve_eta(model, L, threshold_rho, tol);

    // keep the chained quantities ordered: the eta mixtures are feasible in the
    // pairwise games, so they are legitimate candidates there too
    for (size_t i = 0; i < model.num_hypotheses; ++i) {
        double h = kInf;
        for (size_t j = 0; j < model.num_hypotheses; ++j) {
            if (j == i) continue;
            double s = 0.0;
            for (size_t a = 0; a < model.num_actions(); ++a)
                s += eta.eta[i].weights[a] * kl(model, i, j, a);
            h = std::min(h, s);
        }
        if (h > mu.d_mu[i]) {
            mu.d_mu[i] = h;
            mu.mu[i] = eta.eta[i];
        }
    }

    q.mu0 = mu.mu0;
    q.mu = mu.mu;
    q.i_mu0 = mu.i_mu0;
    q.d_mu = mu.d_mu;
    q.eta0 = eta.eta0;
    q.eta = eta.eta;
    q.i_eta0 = eta.i_eta0;
    q.i_eta_threshold = eta.i_eta_threshold;
    q.i_2 = eta.i_2;
    q.d_eta = eta.d_eta;
    q.i_1 = compute_i1(model, mu, q.xi);
    q.i_max = solve_i_max(model, tol).i_max;
    q.d1_harmonic = harmonic_mean(q.d_mu);
    q.d2_harmonic = harmonic_mean(q.d_eta);
    (void)L;
    return q;
}

}  // namespace aht
