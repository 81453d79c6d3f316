#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "aht/model.hpp"
#include "aht/model_io.hpp"
#include "aht/rng.hpp"
#include "helpers.hpp"

using namespace aht;

TEST_CASE("entropy and kl conventions") {
    CHECK(entropy(std::vector<double>{0.5, 0.5}) == doctest::Approx(1.0));
    CHECK(entropy(std::vector<double>{1.0, 0.0}) == doctest::Approx(0.0));
    CHECK(binary_entropy(0.25) == doctest::Approx(0.25 * std::log2(4.0) + 0.75 * std::log2(4.0 / 3.0)));

    // 0 log(a/0) = 0
    CHECK(kl_divergence({1.0, 0.0}, {0.5, 0.5}) == doctest::Approx(1.0));
    // b log(b/0) = +inf
    CHECK(std::isinf(kl_divergence({0.5, 0.5}, {1.0, 0.0})));
    CHECK(kl_divergence({0.3, 0.7}, {0.3, 0.7}) == doctest::Approx(0.0));
    CHECK_THROWS_AS(kl_divergence(std::vector<double>{1.0}, std::vector<double>{0.5, 0.5}),
                    std::invalid_argument);
}

TEST_CASE("log odds") {
    CHECK(log_odds(0.5) == doctest::Approx(0.0));
    CHECK(log_odds(0.9) == doctest::Approx(std::log2(9.0)));
    CHECK(std::isinf(log_odds(1.0)));
    CHECK(std::isinf(log_odds(0.0)));
}

TEST_CASE("model shape validation") {
    Model m = tests::bsc_model(0.25);
    CHECK_NOTHROW(m.check_shape());

    Model bad = m;
    bad.num_hypotheses = 1;
    CHECK_THROWS_AS(bad.check_shape(), std::invalid_argument);

    bad = m;
    bad.kernels[0].pop_back();
    CHECK_THROWS_AS(bad.check_shape(), std::invalid_argument);

    bad = m;
    bad.kernels[0][0].push_back(0.0);
    CHECK_THROWS_AS(bad.check_shape(), std::invalid_argument);
}

TEST_CASE("validate reports assumptions and xi") {
    auto rep = validate(tests::bsc_model(0.25));
    CHECK(rep.ok);
    CHECK(rep.assumption1);
    CHECK(rep.assumption2);
    CHECK(rep.xi == doctest::Approx(std::log2(3.0)));
    CHECK(rep.pairwise_divergence[0][1] == doctest::Approx(0.5 * std::log2(3.0)));
    CHECK(rep.pairwise_divergence[1][0] == doctest::Approx(0.5 * std::log2(3.0)));

    // identical rows: indistinguishable pair, assumption 1 fails
    Model flat = tests::bsc_model(0.5);
    auto rep2 = validate(flat);
    CHECK(!rep2.assumption1);
    CHECK(rep2.indistinguishable_pairs.size() == 1);
    CHECK(rep2.xi == doctest::Approx(0.0));

    // support mismatch: xi infinite
    Model disjoint = tests::bsc_model(0.25);
    disjoint.kernels[0][0] = {1.0, 0.0};
    auto rep3 = validate(disjoint);
    CHECK(!rep3.assumption2);
    CHECK(std::isinf(rep3.xi));

    Model neg = tests::bsc_model(0.25);
    neg.kernels[0][0] = {1.25, -0.25};
    auto rep4 = validate(neg);
    CHECK(!rep4.ok);
    CHECK(rep4.negative_entries.size() == 1);
    CHECK(rep4.summary().find("negative entry") != std::string::npos);
}

TEST_CASE("bayes update and martingale identity") {
    Model m = tests::bsc_model(0.25);
    Belief prior = Belief::uniform(2);
    auto upd = bayes_update(m, prior, 0, 0);
    CHECK(upd.marginal == doctest::Approx(0.5));
    CHECK(upd.posterior[0] == doctest::Approx(0.75));

    // sum_z q_rho(z) * posterior(z) = prior, coordinatewise
    Rng rng(7);
    for (int t = 0; t < 50; ++t) {
        Model model = tests::random_model(rng);
        Belief rho = tests::random_belief(rng, model.num_hypotheses);
        for (size_t a = 0; a < model.num_actions(); ++a) {
            std::vector<double> recon(model.num_hypotheses, 0.0);
            for (size_t z = 0; z < model.alphabet_size; ++z) {
                auto u = bayes_update(model, rho, a, z);
                for (size_t i = 0; i < model.num_hypotheses; ++i)
                    recon[i] += u.marginal * u.posterior[i];
            }
            for (size_t i = 0; i < model.num_hypotheses; ++i)
                CHECK(recon[i] == doctest::Approx(rho[i]).epsilon(1e-12));
        }
    }
}

TEST_CASE("zero-marginal symbol leaves belief unchanged") {
    Model m = tests::bsc_model(0.25);
    m.alphabet_size = 3;
    m.kernels = {{{0.75, 0.25, 0.0}, {0.25, 0.75, 0.0}}};
    Belief prior = Belief::uniform(2);
    auto upd = bayes_update(m, prior, 0, 2);
    CHECK(upd.marginal == 0.0);
    CHECK(upd.posterior[0] == prior[0]);
    CHECK(upd.posterior[1] == prior[1]);
}

TEST_CASE("mutual information equals expected entropy drop") {
    Rng rng(11);
    for (int t = 0; t < 50; ++t) {
        Model model = tests::random_model(rng);
        Belief rho = tests::random_belief(rng, model.num_hypotheses);
        for (size_t a = 0; a < model.num_actions(); ++a) {
            double th = markov_operator(
                model, [](const Belief& b) { return entropy(b.probs); }, a, rho);
            double mi = mutual_information(model, a, rho);
            CHECK(mi == doctest::Approx(entropy(rho.probs) - th).epsilon(1e-10));
            CHECK(mi >= 0.0);
        }
    }
}

TEST_CASE("markov operator is an expectation") {
    Model m = tests::bsc_model(0.25);
    Belief rho{std::vector<double>{0.6, 0.4}};
    double one = markov_operator(m, [](const Belief&) { return 1.0; }, 0, rho);
    CHECK(one == doctest::Approx(1.0));
}

TEST_CASE("psi of the log-likelihood tail") {
    Model m = tests::bsc_model(0.25);
    double xi = std::log2(3.0);
    CHECK(psi(m, xi) == doctest::Approx(0.0));
    // below the max ratio the 0.75-mass symbol contributes
    CHECK(psi(m, 0.5) == doctest::Approx(0.75 * std::log2(3.0)));
    CHECK(psi(m, 0.0) == doctest::Approx(0.75 * std::log2(3.0)));
    CHECK_THROWS_AS(psi(m, -0.1), std::invalid_argument);

    // monotone nonincreasing on random models
    Rng rng(3);
    for (int t = 0; t < 20; ++t) {
        Model model = tests::random_model(rng);
        double prev = psi(model, 0.0);
        for (double b : {0.2, 0.5, 1.0, 2.0, 5.0}) {
            double cur = psi(model, b);
            CHECK(cur <= prev + 1e-12);
            prev = cur;
        }
    }
}

TEST_CASE("model json round trip and hash") {
    Model m = tests::bsc_bank({0.1, 0.25});
    auto path = std::filesystem::temp_directory_path() / "aht_test_model.json";
    save_model(m, path.string());
    Model loaded = load_model(path.string());
    CHECK(loaded.num_hypotheses == m.num_hypotheses);
    CHECK(loaded.actions == m.actions);
    CHECK(loaded.kernels == m.kernels);
    CHECK(model_hash(loaded) == model_hash(m));
    CHECK(model_hash(m).size() == 16);

    Model other = tests::bsc_bank({0.1, 0.3});
    CHECK(model_hash(other) != model_hash(m));
    std::filesystem::remove(path);
}

TEST_CASE("model load tolerates tiny row-sum drift and rejects worse") {
    auto j = model_to_json(tests::bsc_model(0.25));
    j["kernels"][0][0] = {0.75 + 3e-10, 0.25};
    Model ok = model_from_json(j);
    double s = ok.kernels[0][0][0] + ok.kernels[0][0][1];
    CHECK(s == doctest::Approx(1.0).epsilon(1e-15));

    j["kernels"][0][0] = {0.76, 0.25};
    CHECK_THROWS_AS(model_from_json(j), std::invalid_argument);

    j["kernels"][0][0] = {1.25, -0.25};
    CHECK_THROWS_AS(model_from_json(j), std::invalid_argument);
}

TEST_CASE("rng determinism and stream separation") {
    Rng a(42), b(42);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

    Rng t0 = Rng::for_trial(1, 0);
    Rng t1 = Rng::for_trial(1, 1);
    CHECK(t0.next_u64() != t1.next_u64());

    Rng r0 = Rng::for_trial(9, 5);
    Rng r1 = Rng::for_trial(9, 5);
    CHECK(r0.next_u64() == r1.next_u64());
}

TEST_CASE("categorical sampling hits support boundaries") {
    Rng rng(1);
    std::vector<double> pmf = {0.0, 1.0, 0.0};
    for (int i = 0; i < 20; ++i) CHECK(rng.categorical(pmf) == 1);

    // empirical frequencies roughly match
    std::vector<double> p = {0.2, 0.5, 0.3};
    std::vector<int> counts(3, 0);
    for (int i = 0; i < 20000; ++i) ++counts[rng.categorical(p)];
    CHECK(counts[1] > 9000);
    CHECK(counts[1] < 11000);
    CHECK_THROWS_AS(rng.categorical(std::vector<double>{0.0, 0.0}), std::invalid_argument);
}
