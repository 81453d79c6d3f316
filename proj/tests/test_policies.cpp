#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "aht/policies.hpp"
#include "helpers.hpp"

using namespace aht;

namespace {

PolicyConfig bsc_config(double L, double rt = 0.9) {
    PolicyConfig cfg;
    cfg.L = L;
    cfg.threshold_rho = rt;
    cfg.quantities = compute_game_quantities(tests::bsc_model(0.25), L, rt, 1e-7);
    return cfg;
}

}  // namespace

TEST_CASE("two-phase policy thresholds") {
    auto cfg = bsc_config(100.0);

    auto d = pi1_decide(cfg, Belief{std::vector<double>{0.999, 0.001}});
    CHECK(d.declare);
    CHECK(d.hypothesis == 0);

    // confirmation phase at rho in [0.9, 0.99)
    d = pi1_decide(cfg, Belief{std::vector<double>{0.95, 0.05}});
    CHECK(!d.declare);
    CHECK(d.mixture.weights == cfg.quantities.mu[0].weights);

    // boundary rho_i = rho~ belongs to the confirmation phase
    d = pi2_decide(cfg, Belief{std::vector<double>{0.9, 0.1}});
    CHECK(!d.declare);
    CHECK(d.mixture.weights == cfg.quantities.eta[0].weights);

    d = pi1_decide(cfg, Belief::uniform(2));
    CHECK(!d.declare);
    CHECK(d.mixture.weights == cfg.quantities.mu0.weights);

    d = pi2_decide(cfg, Belief::uniform(2));
    CHECK(!d.declare);
    CHECK(d.mixture.weights == cfg.quantities.eta0.weights);
}

TEST_CASE("declaration threshold is exactly 1 - 1/L") {
    auto cfg = bsc_config(100.0);
    auto d = pi2_decide(cfg, Belief{std::vector<double>{0.99, 0.01}});
    CHECK(d.declare);
    d = pi2_decide(cfg, Belief{std::vector<double>{0.989999, 0.010001}});
    CHECK(!d.declare);
}

TEST_CASE("two hypotheses: both two-phase policies coincide") {
    auto cfg = bsc_config(1000.0);
    for (double r = 0.01; r < 1.0; r += 0.007) {
        Belief b{std::vector<double>{r, 1.0 - r}};
        auto d1 = pi1_decide(cfg, b);
        auto d2 = pi2_decide(cfg, b);
        CHECK(d1.declare == d2.declare);
        if (d1.declare) {
            CHECK(d1.hypothesis == d2.hypothesis);
        } else {
            for (size_t a = 0; a < d1.mixture.weights.size(); ++a)
                CHECK(d1.mixture.weights[a] == doctest::Approx(d2.mixture.weights[a]).epsilon(1e-6));
        }
    }
}

TEST_CASE("most-likely-first scheme") {
    PolicyConfig cfg;
    cfg.L = 100.0;
    cfg.threshold_rho = 0.9;
    cfg.quantities = compute_game_quantities(tests::inspection_model(3, 0.25), 100.0, 0.9, 1e-6);

    // tie at uniform goes to the lowest index
    auto d = chernoff_decide(cfg, Belief::uniform(3));
    CHECK(!d.declare);
    CHECK(d.mixture.weights == cfg.quantities.mu[0].weights);

    d = chernoff_decide(cfg, Belief{std::vector<double>{0.1, 0.6, 0.3}});
    CHECK(!d.declare);
    CHECK(d.mixture.weights == cfg.quantities.mu[1].weights);

    d = chernoff_decide(cfg, Belief{std::vector<double>{0.005, 0.992, 0.003}});
    CHECK(d.declare);
    CHECK(d.hypothesis == 1);
}

TEST_CASE("phase partition is exhaustive and exclusive") {
    auto cfg = bsc_config(50.0);
    Rng rng(41);
    for (int t = 0; t < 500; ++t) {
        Belief b = tests::random_belief(rng, 2);
        auto d = pi2_decide(cfg, b);
        if (d.declare) {
            CHECK(b[d.hypothesis] >= 1.0 - 1.0 / cfg.L);
        } else {
            CHECK(ActionMixture{d.mixture.weights}.valid(1e-9));
            // never samples past the declaration threshold
            for (double r : b.probs) CHECK(r < 1.0 - 1.0 / cfg.L);
        }
    }
}

TEST_CASE("label equivariance of the threshold logic") {
    auto cfg = bsc_config(100.0);
    PolicyConfig swapped = cfg;
    std::swap(swapped.quantities.eta[0], swapped.quantities.eta[1]);
    std::swap(swapped.quantities.mu[0], swapped.quantities.mu[1]);
    Rng rng(43);
    for (int t = 0; t < 200; ++t) {
        Belief b = tests::random_belief(rng, 2);
        Belief rb{std::vector<double>{b[1], b[0]}};
        auto d = pi2_decide(cfg, b);
        auto rd = pi2_decide(swapped, rb);
        CHECK(d.declare == rd.declare);
        if (d.declare) CHECK(rd.hypothesis == 1 - d.hypothesis);
        else CHECK(d.mixture.weights == rd.mixture.weights);
    }
}

TEST_CASE("grid policy declares in the cheap-stop region and matches the DP") {
    Model m = tests::bsc_model(0.25);
    double L = 100.0;
    auto vg = value_iterate(m, L, 400, 1e-6);

    // min_j (1 - rho_j) L <= 1: stopping dominates
    auto d = grid_policy_decide(vg, m, L, Belief{std::vector<double>{0.995, 0.005}});
    CHECK(d.declare);
    CHECK(d.hypothesis == 0);

    // uniform belief with an informative channel: sampling wins
    d = grid_policy_decide(vg, m, L, Belief::uniform(2));
    CHECK(!d.declare);
    CHECK(d.mixture.weights[0] == 1.0);

    CHECK_THROWS_AS(grid_policy_decide(vg, m, 50.0, Belief::uniform(2)), std::invalid_argument);
    Model m3 = tests::inspection_model(3, 0.25);
    CHECK_THROWS_AS(grid_policy_decide(vg, m3, L, Belief::uniform(3)), std::invalid_argument);
}

TEST_CASE("grid policy on a flat value grid always declares") {
    Model flat = tests::bsc_model(0.5);
    double L = 50.0;
    auto vg = value_iterate(flat, L, 40, 1e-9, 200);
    Rng rng(47);
    for (int t = 0; t < 100; ++t) {
        Belief b = tests::random_belief(rng, 2);
        auto d = grid_policy_decide(vg, flat, L, b);
        CHECK(d.declare);
    }
}

TEST_CASE("config validation") {
    PolicyConfig cfg;
    cfg.L = 0.5;
    CHECK_THROWS_AS(cfg.check(), std::invalid_argument);
    cfg.L = 10.0;
    cfg.threshold_rho = 0.4;
    CHECK_THROWS_AS(cfg.check(), std::invalid_argument);
}
