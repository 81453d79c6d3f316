// rng.hpp -- counter-based deterministic RNG for reproducible Monte Carlo runs.
//
// Each trial gets its own stream derived from (master_seed, trial_index), so
// any trial can be replayed in isolation and aggregation order does not matter.
#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace aht {

inline constexpr const char* kRngId = "splitmix64-counter-v1";

inline uint64_t splitmix64_next(uint64_t& state) {
    uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

class Rng {
public:
    explicit Rng(uint64_t seed) : state_(seed) {}

    static Rng for_trial(uint64_t master_seed, uint64_t trial_index) {
        uint64_t s = master_seed;
        uint64_t h = splitmix64_next(s);
        // decorrelate streams across trial indices
        uint64_t t = h ^ (trial_index * 0xD1342543DE82EF95ULL + 0x2545F4914F6CDD1DULL);
        return Rng(splitmix64_next(t));
    }

    uint64_t next_u64() { return splitmix64_next(state_); }

    double uniform() {  // [0, 1)
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    bool bernoulli(double p) { return uniform() < p; }

    // Index sampled from an (unnormalized tolerated) pmf via its CDF.
    size_t categorical(std::span<const double> pmf) {
        double u = uniform();
        double acc = 0.0;
        for (size_t i = 0; i < pmf.size(); ++i) {
            acc += pmf[i];
            if (u < acc) return i;
        }
        // rounding: return last index with positive mass
        for (size_t i = pmf.size(); i-- > 0;) {
            if (pmf[i] > 0.0) return i;
        }
        throw std::invalid_argument("categorical: empty pmf");
    }

    size_t categorical(const std::vector<double>& pmf) {
        return categorical(std::span<const double>(pmf));
    }

private:
    uint64_t state_;
};

}  // namespace aht
