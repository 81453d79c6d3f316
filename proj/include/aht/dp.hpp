// dp.hpp -- grid value iteration for the optimal expected total cost on the
// belief simplex; the small-M oracle the other modules are checked against.
//
// Off-lattice posteriors are interpolated barycentrically. The lattice is
// triangulated in cumulative-sum coordinates, where the simplex becomes a
// monotone staircase region and every cell vertex maps back to a valid lattice
// point (no negative coordinates at the boundary).
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "aht/model.hpp"

namespace aht {

struct SimplexGrid {
    size_t M = 0;
    size_t resolution = 0;  // lattice denominator N
    std::vector<std::vector<int>> points;
    std::unordered_map<uint64_t, size_t> index;

    static uint64_t key(const std::vector<int>& k) {
        uint64_t h = 0;
        for (int v : k) h = (h << 16) | uint64_t(v & 0xFFFF);
        return h;
    }

    static SimplexGrid build(size_t m, size_t n) {
        if (m < 2 || m > 4)
            throw std::invalid_argument("simplex grid: intended for 2 <= M <= 4");
        if (n < 10) throw std::invalid_argument("simplex grid: resolution must be >= 10");
        if (n > 60000) throw std::invalid_argument("simplex grid: resolution too large");
        SimplexGrid g;
        g.M = m;
        g.resolution = n;
        std::vector<int> k(m, 0);
        // lexicographic enumeration of compositions of n into m parts
        auto rec = [&](auto&& self, size_t pos, int rem) -> void {
            if (pos + 1 == m) {
                k[pos] = rem;
                g.index[key(k)] = g.points.size();
                g.points.push_back(k);
                return;
            }
            for (int v = 0; v <= rem; ++v) {
                k[pos] = v;
                self(self, pos + 1, rem - v);
            }
        };
        rec(rec, 0, int(n));
        return g;
    }

    Belief point_belief(size_t idx) const {
        Belief b;
        b.probs.resize(M);
        for (size_t i = 0; i < M; ++i)
            b.probs[i] = double(points[idx][i]) / double(resolution);
        return b;
    }

    struct Vertex {
        size_t index;
        double weight;
    };

    // barycentric weights of the cell containing rho
    std::vector<Vertex> locate(const Belief& rho) const {
        const size_t m = M;
        const double n = double(resolution);
        // cumulative tail sums s_i = N * sum_{j >= i} rho_j, i = 1..m-1
        std::vector<double> s(m, 0.0);
        double acc = 0.0;
        for (size_t i = m; i-- > 1;) {
            acc += rho[i];
            s[i] = std::min(acc * n, n);
        }
        std::vector<int> base(m, 0);
        std::vector<double> frac(m, 0.0);
        for (size_t i = 1; i < m; ++i) {
            base[i] = int(std::floor(s[i]));
            if (base[i] >= int(resolution)) base[i] = int(resolution);
            frac[i] = s[i] - double(base[i]);
        }
        std::vector<size_t> order;
        for (size_t i = 1; i < m; ++i) order.push_back(i);
        std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
            if (frac[a] != frac[b]) return frac[a] > frac[b];
            return a < b;  // ties toward lower coordinate keep vertices monotone
        });

        std::vector<Vertex> out;
        std::vector<int> cur = base;
        auto emit = [&](double w) {
            if (w <= 1e-14) return;
            // map the staircase vertex back to lattice occupation counts
            std::vector<int> k(m, 0);
            int prev = int(resolution);
            for (size_t i = 1; i < m; ++i) {
                k[i - 1] = prev - cur[i];
                prev = cur[i];
            }
            k[m - 1] = prev;
            for (int v : k)
                if (v < 0) return;  // zero-weight numeric stragglers only
            auto it = index.find(key(k));
            if (it == index.end()) return;
            out.push_back({it->second, w});
        };

        double prev_f = 1.0;
        for (size_t t = 0; t < order.size(); ++t) {
            emit(prev_f - frac[order[t]]);
            cur[order[t]] += 1;
            prev_f = frac[order[t]];
        }
        emit(prev_f);

        // renormalize against dropped zero-weight vertices
        double total = 0.0;
        for (const auto& v : out) total += v.weight;
        if (total > 0.0)
            for (auto& v : out) v.weight /= total;
        return out;
    }
};

struct ValueGrid {
    SimplexGrid grid;
    double L = 0.0;
    std::vector<double> values;
    double convergence = kInf;  // final sup-norm sweep change
    size_t sweeps = 0;
    bool converged = false;

    double at(const Belief& rho) const {
        double v = 0.0;
        for (const auto& vert : grid.locate(rho)) v += vert.weight * values[vert.index];
        return v;
    }
};

inline double stopping_cost(const Belief& rho, double L) {
    double m = kInf;
    for (double r : rho.probs) m = std::min(m, (1.0 - r) * L);
    return m;
}

// One application of min{ 1 + min_a (T^a V)(rho), min_j (1-rho_j) L }.
inline double bellman_backup(const Model& model, const ValueGrid& vg, const Belief& rho) {
    double stop = stopping_cost(rho, vg.L);
    double best = kInf;
    for (size_t a = 0; a < model.num_actions(); ++a) {
        double acc = 0.0;
        for (size_t z = 0; z < model.alphabet_size; ++z) {
            auto upd = bayes_update(model, rho, a, z);
            if (upd.marginal > 0.0) acc += upd.marginal * vg.at(upd.posterior);
        }
        best = std::min(best, acc);
    }
    return std::min(stop, 1.0 + best);
}

inline ValueGrid value_iterate(const Model& model, double L, size_t resolution, double tol = 1e-4,
                               size_t max_sweeps = 100000) {
    model.check_shape();
    if (!(L > 1.0)) throw std::invalid_argument("value_iterate: need L > 1");
    ValueGrid vg;
    vg.grid = SimplexGrid::build(model.num_hypotheses, resolution);
    vg.L = L;
    const size_t n = vg.grid.points.size();
    vg.values.resize(n);
    for (size_t p = 0; p < n; ++p) vg.values[p] = stopping_cost(vg.grid.point_belief(p), L);

    std::vector<double> next(n);
    for (vg.sweeps = 0; vg.sweeps < max_sweeps; ++vg.sweeps) {
        double change = 0.0;
        for (size_t p = 0; p < n; ++p) {
            double v = bellman_backup(model, vg, vg.grid.point_belief(p));
            v = std::min(v, vg.values[p]);  // keep the sweep monotone under interpolation wobble
            change = std::max(change, vg.values[p] - v);
            next[p] = v;
        }
        vg.values.swap(next);
        vg.convergence = change;
        if (change <= tol) {
            vg.converged = true;
            ++vg.sweeps;
            break;
        }
    }
    return vg;
}

struct CertificateReport {
    double max_violation = 0.0;  // worst V(rho) - min{beta + min_a T^a V, beta * stop cost}
    size_t worst_point = 0;
    size_t violating_points = 0;
    bool holds(double tol = 0.0) const { return max_violation <= tol; }
};

// Checks the scaled-certificate inequality: if some V satisfies
// V <= min{ beta + min_a T^a V, beta * min_j (1-rho_j) L } everywhere,
// then V / beta is a lower bound on the optimal cost.
inline CertificateReport check_lower_bound_certificate(const Model& model, double L, double beta,
                                                  const ValueGrid& candidate) {
    if (!(beta > 0.0)) throw std::invalid_argument("certificate: beta must be positive");
    if (candidate.grid.M != model.num_hypotheses)
        throw std::invalid_argument("certificate: grid/model mismatch");
    CertificateReport rep;
    for (size_t p = 0; p < candidate.grid.points.size(); ++p) {
        Belief rho = candidate.grid.point_belief(p);
        double sample = kInf;
        for (size_t a = 0; a < model.num_actions(); ++a) {
            double acc = 0.0;
            for (size_t z = 0; z < model.alphabet_size; ++z) {
                auto upd = bayes_update(model, rho, a, z);
                if (upd.marginal > 0.0) acc += upd.marginal * candidate.at(upd.posterior);
            }
            sample = std::min(sample, acc);
        }
        double rhs = std::min(beta + sample, beta * stopping_cost(rho, L));
        double viol = candidate.values[p] - rhs;
        if (viol > 0.0) ++rep.violating_points;
        if (viol > rep.max_violation) {
            rep.max_violation = viol;
            rep.worst_point = p;
        }
    }
    return rep;
}

}  // namespace aht
