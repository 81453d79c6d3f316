// matrix_game.hpp -- finite zero-sum matrix games: max over row mixtures of the
// column-wise minimum payoff. Solved by the classic linear-programming
// reduction with a dense tableau simplex; both sides of the duality gap are
// certified by explicit best-response evaluation of the recovered mixtures.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "aht/common.hpp"

namespace aht {

struct SolverReport {
    size_t iterations = 0;
    double best_response_gap = kInf;
    bool converged = false;
};

struct MatrixGameSolution {
    std::vector<double> row_mixture;
    double value = 0.0;  // certified: min over columns of the mixture payoff
    SolverReport report;
};

namespace detail {

// min_j sum_a x_a A[a][j]; also reports the minimizing column.
inline double column_min(const std::vector<std::vector<double>>& payoff,
                         const std::vector<double>& x, size_t* argmin_col = nullptr) {
    const size_t cols = payoff[0].size();
    double best = kInf;
    size_t best_j = 0;
    for (size_t j = 0; j < cols; ++j) {
        double v = 0.0;
        for (size_t a = 0; a < payoff.size(); ++a) v += x[a] * payoff[a][j];
        if (v < best) {
            best = v;
            best_j = j;
        }
    }
    if (argmin_col) *argmin_col = best_j;
    return best;
}

inline double row_max(const std::vector<std::vector<double>>& payoff,
                      const std::vector<double>& y) {
    double best = -kInf;
    for (const auto& r : payoff) {
        double v = 0.0;
        for (size_t j = 0; j < r.size(); ++j) v += y[j] * r[j];
        best = std::max(best, v);
    }
    return best;
}

// Primal simplex for  max 1'q  s.t.  B q <= 1, q >= 0  where B is m x n with
// positive entries. The slack basis is feasible because the right side is 1.
// On return q holds the maximizer and p the dual multipliers (reduced costs
// of the slacks), so q/1'q and p/1'p are the two players' optimal mixtures of
// the shifted game. Returns the number of pivots.
inline size_t game_simplex(const std::vector<std::vector<double>>& b, std::vector<double>& q,
                           std::vector<double>& p) {
    const size_t m = b.size();
    const size_t n = b[0].size();
    const size_t width = n + m + 1;
    std::vector<std::vector<double>> t(m + 1, std::vector<double>(width, 0.0));
    std::vector<size_t> basis(m);
    for (size_t i = 0; i < m; ++i) {
        for (size_t j = 0; j < n; ++j) t[i][j] = b[i][j];
        t[i][n + i] = 1.0;
        t[i][width - 1] = 1.0;
        basis[i] = n + i;
    }
    for (size_t j = 0; j < n; ++j) t[m][j] = -1.0;

    const size_t max_pivots = 50 * (m + n) + 2000;
    size_t pivots = 0;
    for (; pivots < max_pivots; ++pivots) {
        // Dantzig rule, with Bland's rule once degeneracy could cycle
        const bool bland = pivots > 10 * (m + n) + 200;
        size_t enter = width;
        double best = -1e-11;
        for (size_t j = 0; j + 1 < width; ++j) {
            if (t[m][j] < best) {
                best = t[m][j];
                enter = j;
                if (bland) break;
            }
        }
        if (enter == width) break;
        size_t leave = m;
        double best_ratio = kInf;
        for (size_t i = 0; i < m; ++i) {
            if (t[i][enter] > 1e-12) {
                double r = t[i][width - 1] / t[i][enter];
                if (r < best_ratio - 1e-15 ||
                    (bland && r < best_ratio + 1e-15 && basis[i] < basis[leave])) {
                    best_ratio = r;
                    leave = i;
                }
            }
        }
        if (leave == m) break;  // unbounded; cannot happen with positive entries
        double d = t[leave][enter];
        for (double& v : t[leave]) v /= d;
        for (size_t i = 0; i <= m; ++i) {
            if (i == leave) continue;
            double f = t[i][enter];
            if (f == 0.0) continue;
            for (size_t j = 0; j < width; ++j) t[i][j] -= f * t[leave][j];
        }
        basis[leave] = enter;
    }

    q.assign(n, 0.0);
    for (size_t i = 0; i < m; ++i)
        if (basis[i] < n) q[basis[i]] = std::max(0.0, t[i][width - 1]);
    p.assign(m, 0.0);
    for (size_t i = 0; i < m; ++i) p[i] = std::max(0.0, t[m][n + i]);
    return pivots;
}

}  // namespace detail

// Solves max_{x in simplex(rows)} min_j sum_a x_a payoff[a][j].
// Infinite payoff entries are clamped for the iteration; the reported value is
// evaluated against the clamped matrix, which can only understate the game value.
inline MatrixGameSolution solve_matrix_game(std::vector<std::vector<double>> payoff, double tol,
                                            size_t max_iters = 100000) {
    (void)max_iters;
    const size_t rows = payoff.size();
    if (rows == 0 || payoff[0].empty()) throw std::invalid_argument("matrix game: empty payoff");
    const size_t cols = payoff[0].size();

    double finite_max = 0.0;
    for (const auto& r : payoff)
        for (double v : r)
            if (std::isfinite(v)) finite_max = std::max(finite_max, std::abs(v));
    const double cap = 100.0 * finite_max + 1.0;
    for (auto& r : payoff)
        for (double& v : r) v = std::clamp(v, -cap, cap);

    auto evaluate = [&](const std::vector<double>& x) { return detail::column_min(payoff, x); };

    std::vector<double> best_x(rows, 1.0 / static_cast<double>(rows));
    double best_val = evaluate(best_x);
    auto consider = [&](const std::vector<double>& x) {
        double v = evaluate(x);
        if (v > best_val) {
            best_val = v;
            best_x = x;
        }
    };
    for (size_t a = 0; a < rows; ++a) {
        std::vector<double> x(rows, 0.0);
        x[a] = 1.0;
        consider(x);
    }

    // shift so every entry is positive, then solve the standard reduction.
    // the column player's constraint matrix has one row per payoff row.
    const double shift = cap + 1.0;
    std::vector<std::vector<double>> shifted(rows, std::vector<double>(cols));
    for (size_t a = 0; a < rows; ++a)
        for (size_t j = 0; j < cols; ++j) shifted[a][j] = payoff[a][j] + shift;
    std::vector<double> q, p;
    size_t pivots = detail::game_simplex(shifted, q, p);

    double pmass = 0.0;
    for (double v : p) pmass += v;
    if (pmass > 0.0) {
        std::vector<double> x(rows);
        for (size_t a = 0; a < rows; ++a) x[a] = p[a] / pmass;
        consider(x);
    }

    double dual = kInf;
    double qmass = 0.0;
    for (double v : q) qmass += v;
    if (qmass > 0.0) {
        std::vector<double> y(cols);
        for (size_t j = 0; j < cols; ++j) y[j] = q[j] / qmass;
        dual = detail::row_max(payoff, y);
    }
    for (size_t j = 0; j < cols; ++j) {
        std::vector<double> y(cols, 0.0);
        y[j] = 1.0;
        dual = std::min(dual, detail::row_max(payoff, y));
    }

    MatrixGameSolution out;
    out.row_mixture = best_x;
    out.value = best_val;
    out.report.iterations = pivots;
    out.report.best_response_gap = std::max(0.0, dual - best_val);
    out.report.converged = out.report.best_response_gap <= tol;
    return out;
}

}  // namespace aht
