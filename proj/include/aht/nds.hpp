// nds.hpp -- noisy dynamic search models: one target among M locations,
// inspect a subset, observe a bit flipped with a size-dependent probability.
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "aht/model.hpp"

namespace aht {

enum class NdsActionFamily { singletons, all_subsets, dyadic_intervals };

struct NdsSpec {
    size_t M = 2;
    // p[n-1] is the flip probability when inspecting a subset of size n
    std::vector<double> noise_profile;
    NdsActionFamily action_family = NdsActionFamily::singletons;

    static NdsSpec size_independent(size_t m, double p, NdsActionFamily fam) {
        NdsSpec s;
        s.M = m;
        s.noise_profile.assign(m, p);
        s.action_family = fam;
        return s;
    }

    void check() const {
        if (M < 2) throw std::invalid_argument("nds: need at least 2 locations");
        if (noise_profile.empty() || noise_profile.size() < M)
            throw std::invalid_argument("nds: noise profile must cover sizes 1..M");
        double prev = 0.0;
        for (double p : noise_profile) {
            if (!(p > 0.0) || !(p < 0.5))
                throw std::invalid_argument("nds: flip probabilities must lie in (0, 0.5)");
            if (p + 1e-15 < prev)
                throw std::invalid_argument("nds: noise profile must be nondecreasing in size");
            prev = p;
        }
        if (action_family == NdsActionFamily::all_subsets && M > 12)
            throw std::invalid_argument("nds: all_subsets is limited to M <= 12");
        if (action_family == NdsActionFamily::dyadic_intervals) {
            if ((M & (M - 1)) != 0)
                throw std::invalid_argument("nds: dyadic_intervals needs M to be a power of 2");
        }
    }
};

namespace detail {

inline std::string subset_name(uint64_t mask, size_t m) {
    std::string s = "inspect{";
    bool first = true;
    for (size_t i = 0; i < m; ++i) {
        if (mask & (uint64_t(1) << i)) {
            if (!first) s += ",";
            s += std::to_string(i);
            first = false;
        }
    }
    s += "}";
    return s;
}

}  // namespace detail

// Subset masks of the chosen family; always nonempty proper subsets.
inline std::vector<uint64_t> nds_action_masks(const NdsSpec& spec) {
    spec.check();
    std::vector<uint64_t> masks;
    const uint64_t full = (spec.M >= 64) ? ~uint64_t(0) : ((uint64_t(1) << spec.M) - 1);
    switch (spec.action_family) {
        case NdsActionFamily::singletons:
            for (size_t i = 0; i < spec.M; ++i) masks.push_back(uint64_t(1) << i);
            break;
        case NdsActionFamily::all_subsets:
            for (uint64_t mask = 1; mask < full; ++mask) masks.push_back(mask);
            break;
        case NdsActionFamily::dyadic_intervals:
            for (size_t len = 1; len < spec.M; len *= 2) {
                for (size_t start = 0; start < spec.M; start += len) {
                    uint64_t mask = 0;
                    for (size_t i = start; i < start + len; ++i) mask |= uint64_t(1) << i;
                    masks.push_back(mask);
                }
            }
            break;
    }
    return masks;
}

// Binary alphabet: symbol 1 means "seen". If the target is in the inspected
// subset of size n the observation is Bernoulli(1 - p_n), otherwise Bernoulli(p_n).
inline Model build_model(const NdsSpec& spec) {
    auto masks = nds_action_masks(spec);
    Model m;
    m.num_hypotheses = spec.M;
    m.alphabet_size = 2;
    for (uint64_t mask : masks) {
        m.actions.push_back(detail::subset_name(mask, spec.M));
        size_t n = size_t(__builtin_popcountll(mask));
        double p = spec.noise_profile[n - 1];
        std::vector<std::vector<double>> rows(spec.M);
        for (size_t i = 0; i < spec.M; ++i) {
            bool in = (mask >> i) & 1;
            double hit = in ? 1.0 - p : p;
            rows[i] = {1.0 - hit, hit};
        }
        m.kernels.push_back(std::move(rows));
    }
    m.check_shape();
    return m;
}

struct NdsClosedForms {
    double d_eta_closed = 0.0;  // (1-2p1) log2((1-p1)/p1)
    double i2_lower = 0.0;      // 1 - sup_n H([p_n, 1-p_n])
    double i_max_upper = 0.0;   // 1 - H([p1, 1-p1])
};

inline NdsClosedForms closed_forms(const NdsSpec& spec) {
    spec.check();
    NdsClosedForms cf;
    double p1 = spec.noise_profile[0];
    cf.d_eta_closed = (1.0 - 2.0 * p1) * std::log2((1.0 - p1) / p1);
    double hmax = 0.0;
    for (size_t n = 0; n < spec.M; ++n)
        hmax = std::max(hmax, binary_entropy(spec.noise_profile[n]));
    cf.i2_lower = 1.0 - hmax;
    cf.i_max_upper = 1.0 - binary_entropy(p1);
    return cf;
}

}  // namespace aht
