#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "aht/games.hpp"
#include "aht/nds.hpp"

using namespace aht;

TEST_CASE("spec validation") {
    auto good = NdsSpec::size_independent(4, 0.25, NdsActionFamily::singletons);
    CHECK_NOTHROW(good.check());

    auto bad = good;
    bad.noise_profile[2] = 0.5;
    CHECK_THROWS_AS(bad.check(), std::invalid_argument);

    bad = good;
    bad.noise_profile = {0.3, 0.2, 0.2, 0.2};  // decreasing in size
    CHECK_THROWS_AS(bad.check(), std::invalid_argument);

    bad = good;
    bad.noise_profile = {0.25, 0.25};  // does not cover all sizes
    CHECK_THROWS_AS(bad.check(), std::invalid_argument);

    CHECK_THROWS_AS(NdsSpec::size_independent(13, 0.25, NdsActionFamily::all_subsets).check(),
                    std::invalid_argument);
    CHECK_THROWS_AS(NdsSpec::size_independent(6, 0.25, NdsActionFamily::dyadic_intervals).check(),
                    std::invalid_argument);
    CHECK_THROWS_AS(NdsSpec::size_independent(1, 0.25, NdsActionFamily::singletons).check(),
                    std::invalid_argument);
}

TEST_CASE("singleton inspections build symmetric-channel rows") {
    auto m = build_model(NdsSpec::size_independent(2, 0.25, NdsActionFamily::singletons));
    CHECK(m.num_actions() == 2);
    CHECK(m.alphabet_size == 2);
    // inspecting location 0: hit bit is Bernoulli(0.75) under hypothesis 0
    CHECK(m.kernels[0][0][1] == doctest::Approx(0.75));
    CHECK(m.kernels[0][1][1] == doctest::Approx(0.25));
    CHECK(m.kernels[1][0][1] == doctest::Approx(0.25));
    CHECK(m.kernels[1][1][1] == doctest::Approx(0.75));
    CHECK(validate(m).xi == doctest::Approx(std::log2(3.0)));
}

TEST_CASE("subset families enumerate the expected actions") {
    auto all = nds_action_masks(NdsSpec::size_independent(3, 0.25, NdsActionFamily::all_subsets));
    CHECK(all.size() == 6);  // nonempty proper subsets of a 3-set
    for (uint64_t mask : all) {
        CHECK(mask != 0);
        CHECK(mask != 7);  // inspecting everything is as uninformative as nothing
    }

    auto dyadic =
        nds_action_masks(NdsSpec::size_independent(8, 0.25, NdsActionFamily::dyadic_intervals));
    CHECK(dyadic.size() == 14);  // 8 + 4 + 2 proper dyadic intervals
    // level-0 intervals are the singletons
    for (size_t i = 0; i < 8; ++i) CHECK(dyadic[i] == (uint64_t(1) << i));

    auto singles =
        nds_action_masks(NdsSpec::size_independent(5, 0.25, NdsActionFamily::singletons));
    CHECK(singles.size() == 5);
}

TEST_CASE("size-dependent noise picks the profile entry for the subset size") {
    NdsSpec spec;
    spec.M = 4;
    spec.noise_profile = {0.1, 0.2, 0.3, 0.3};
    spec.action_family = NdsActionFamily::all_subsets;
    auto m = build_model(spec);
    for (size_t a = 0; a < m.num_actions(); ++a) {
        auto masks = nds_action_masks(spec);
        size_t n = size_t(__builtin_popcountll(masks[a]));
        double p = spec.noise_profile[n - 1];
        bool in0 = masks[a] & 1;
        CHECK(m.kernels[a][0][1] == doctest::Approx(in0 ? 1.0 - p : p));
    }
}

TEST_CASE("complement actions carry the same pairwise information") {
    auto spec = NdsSpec::size_independent(3, 0.25, NdsActionFamily::all_subsets);
    auto masks = nds_action_masks(spec);
    auto m = build_model(spec);
    for (size_t a = 0; a < masks.size(); ++a) {
        uint64_t comp = (~masks[a]) & 0x7;
        size_t ca = 0;
        while (masks[ca] != comp) ++ca;
        // same size means same flip probability, outputs merely relabeled
        if (__builtin_popcountll(masks[a]) != __builtin_popcountll(comp)) continue;
        for (size_t i = 0; i < 3; ++i)
            for (size_t j = 0; j < 3; ++j)
                if (i != j)
                    CHECK(kl(m, i, j, a) == doctest::Approx(kl(m, i, j, ca)).epsilon(1e-12));
    }
}

TEST_CASE("closed forms at the standard operating point") {
    auto spec = NdsSpec::size_independent(4, 0.25, NdsActionFamily::all_subsets);
    auto cf = closed_forms(spec);
    CHECK(cf.d_eta_closed == doctest::Approx(0.5 * std::log2(3.0)).epsilon(1e-12));
    CHECK(cf.i_max_upper == doctest::Approx(1.0 - binary_entropy(0.25)).epsilon(1e-12));
    // size-independent profile: the two entropy expressions coincide
    CHECK(cf.i2_lower == doctest::Approx(cf.i_max_upper).epsilon(1e-15));
}

TEST_CASE("information floor stays positive while noise is below one half") {
    for (double p : {0.4, 0.45, 0.49, 0.499}) {
        auto cf = closed_forms(NdsSpec::size_independent(4, p, NdsActionFamily::singletons));
        CHECK(cf.i2_lower > 0.0);
    }
    // and degrades toward zero
    auto far = closed_forms(NdsSpec::size_independent(4, 0.4, NdsActionFamily::singletons));
    auto near = closed_forms(NdsSpec::size_independent(4, 0.499, NdsActionFamily::singletons));
    CHECK(near.i2_lower < far.i2_lower);
}

TEST_CASE("solver cross-check on a small search model") {
    auto spec = NdsSpec::size_independent(4, 0.25, NdsActionFamily::all_subsets);
    auto m = build_model(spec);
    auto cf = closed_forms(spec);
    auto eta = solve_eta(m, 1000.0, 0.9, 1e-5);
    for (size_t i = 0; i < 4; ++i)
        CHECK(eta.d_eta[i] == doctest::Approx(cf.d_eta_closed).epsilon(2e-3));
    CHECK(solve_i_max(m, 1e-8).i_max <= cf.i_max_upper + 1e-6);
    CHECK(eta.i_2 >= cf.i2_lower - 1e-3);
}
