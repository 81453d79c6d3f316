// shared test fixtures: canonical small models and a random model generator
#pragma once

#include <vector>

#include "aht/model.hpp"
#include "aht/nds.hpp"
#include "aht/rng.hpp"

namespace tests {

// two hypotheses, one binary symmetric channel with flip probability p
inline aht::Model bsc_model(double p) {
    aht::Model m;
    m.num_hypotheses = 2;
    m.alphabet_size = 2;
    m.actions = {"probe"};
    m.kernels = {{{1.0 - p, p}, {p, 1.0 - p}}};
    return m;
}

// two hypotheses, one action per flip probability
inline aht::Model bsc_bank(const std::vector<double>& ps) {
    aht::Model m;
    m.num_hypotheses = 2;
    m.alphabet_size = 2;
    for (double p : ps) {
        m.actions.push_back("bsc" + std::to_string(p));
        m.kernels.push_back({{1.0 - p, p}, {p, 1.0 - p}});
    }
    return m;
}

// M hypotheses, one singleton inspection per location, flip probability p
inline aht::Model inspection_model(size_t m, double p) {
    return aht::build_model(
        aht::NdsSpec::size_independent(m, p, aht::NdsActionFamily::singletons));
}

// strictly positive random kernels (bounded log-likelihood ratios)
inline aht::Model random_model(aht::Rng& rng, size_t max_m = 5, size_t max_k = 4,
                               size_t max_z = 6) {
    size_t m = 2 + rng.next_u64() % (max_m - 1);
    size_t k = 1 + rng.next_u64() % max_k;
    size_t z = 2 + rng.next_u64() % (max_z - 1);
    aht::Model model;
    model.num_hypotheses = m;
    model.alphabet_size = z;
    for (size_t a = 0; a < k; ++a) {
        model.actions.push_back("a" + std::to_string(a));
        std::vector<std::vector<double>> rows(m);
        for (size_t i = 0; i < m; ++i) {
            rows[i].resize(z);
            double s = 0.0;
            for (size_t c = 0; c < z; ++c) {
                rows[i][c] = 0.05 + rng.uniform();
                s += rows[i][c];
            }
            for (double& v : rows[i]) v /= s;
        }
        model.kernels.push_back(std::move(rows));
    }
    return model;
}

inline aht::Belief random_belief(aht::Rng& rng, size_t m) {
    std::vector<double> p(m);
    double s = 0.0;
    for (double& v : p) {
        v = 0.01 + rng.uniform();
        s += v;
    }
    for (double& v : p) v /= s;
    return aht::Belief{p};
}

}  // namespace tests
