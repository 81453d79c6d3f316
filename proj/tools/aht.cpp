// aht -- command-line front end: model validation, game solving, bound
// evaluation, Monte Carlo simulation, grid DP, and search-model generation.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "aht/bounds.hpp"
#include "aht/dp.hpp"
#include "aht/games.hpp"
#include "aht/model.hpp"
#include "aht/model_io.hpp"
#include "aht/nds.hpp"
#include "aht/policies.hpp"
#include "aht/rng.hpp"
#include "aht/sim.hpp"

namespace {

constexpr const char* kToolVersion = "1.0.0";

std::vector<double> parse_list(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(std::stod(item));
    }
    return out;
}

aht::Belief parse_prior(const std::string& spec, size_t m) {
    if (spec == "uniform") return aht::Belief::uniform(m);
    auto v = parse_list(spec);
    if (v.size() != m) throw CLI::ValidationError("--prior", "prior length does not match M");
    aht::Belief b{v};
    if (!b.valid(1e-9)) throw CLI::ValidationError("--prior", "prior is not a distribution");
    double s = 0.0;
    for (double x : b.probs) s += x;
    for (double& x : b.probs) x /= s;
    return b;
}

struct Output {
    std::ofstream file;
    bool to_file = false;
    std::ostream& stream() { return to_file ? file : std::cout; }
    void open(const std::string& path) {
        if (path.empty()) return;
        file.open(path);
        if (!file) throw std::runtime_error("cannot open output file: " + path);
        to_file = true;
    }
};

void metadata(std::ostream& os, const std::string& subcommand, const aht::Model* model,
              uint64_t seed, const std::string& policy, const std::string& L) {
    os << "# tool: aht " << kToolVersion << "\n";
    os << "# subcommand: " << subcommand << "\n";
    os << "# rng: " << aht::kRngId << "\n";
    os << "# seed: " << seed << "\n";
    if (model) os << "# model_hash: " << aht::model_hash(*model) << "\n";
    if (!policy.empty()) os << "# policy: " << policy << "\n";
    if (!L.empty()) os << "# L: " << L << "\n";
}

std::string render(double v) {
    if (!std::isfinite(v)) return "vacuous";
    std::ostringstream os;
    os.precision(12);
    os << v;
    return os.str();
}

aht::PolicyFn make_policy(const std::string& id, const aht::PolicyConfig& cfg,
                          const aht::Model& model, const aht::ValueGrid* grid) {
    if (id == "pi1") return [cfg](const aht::Belief& b) { return aht::pi1_decide(cfg, b); };
    if (id == "pi2") return [cfg](const aht::Belief& b) { return aht::pi2_decide(cfg, b); };
    if (id == "chernoff")
        return [cfg](const aht::Belief& b) { return aht::chernoff_decide(cfg, b); };
    if (id == "dp") {
        if (!grid) throw std::runtime_error("dp policy requires a value grid");
        const aht::Model* mp = &model;
        double L = cfg.L;
        return [grid, mp, L](const aht::Belief& b) {
            return aht::grid_policy_decide(*grid, *mp, L, b);
        };
    }
    throw CLI::ValidationError("--policy", "unknown policy: " + id);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Active sequential hypothesis testing toolkit"};
    app.require_subcommand(1);

    std::string model_path, out_path, prior_spec = "uniform", policy_id = "pi2", L_csv = "100";
    double rho_tilde = 0.9, tol = 1e-6, nds_p = 0.25;
    size_t trials = 1000, resolution = 100, nds_M = 8;
    uint64_t seed = 1;
    size_t step_cap = aht::kDefaultStepCap;
    std::string family = "singletons", M_csv = "4,8";
    double beta = 1.0, epsilon = 0.0;

    auto add_common = [&](CLI::App* sub, bool needs_model) {
        if (needs_model) sub->add_option("--model", model_path, "model JSON file")->required();
        sub->add_option("--out", out_path, "output CSV path (default stdout)");
    };

    auto* validate = app.add_subcommand("validate", "check a model file and its assumptions");
    add_common(validate, true);

    auto* solve_game = app.add_subcommand("solve-game", "compute the max-min game quantities");
    add_common(solve_game, true);
    solve_game->add_option("--L", L_csv, "penalty (single value)");
    solve_game->add_option("--rho-tilde", rho_tilde, "confirmation threshold");
    solve_game->add_option("--tol", tol, "solver tolerance");

    auto* bounds_cmd = app.add_subcommand("bounds", "evaluate the cost bounds");
    add_common(bounds_cmd, true);
    bounds_cmd->add_option("--L", L_csv, "comma list of penalties");
    bounds_cmd->add_option("--prior", prior_spec, "uniform or comma list");
    bounds_cmd->add_option("--rho-tilde", rho_tilde, "confirmation threshold");
    bounds_cmd->add_option("--tol", tol, "solver tolerance");

    auto* simulate = app.add_subcommand("simulate", "Monte Carlo policy evaluation");
    add_common(simulate, true);
    simulate->add_option("--policy", policy_id, "pi1|pi2|chernoff|dp");
    simulate->add_option("--L", L_csv, "comma list of penalties");
    simulate->add_option("--prior", prior_spec, "uniform or comma list");
    simulate->add_option("--rho-tilde", rho_tilde, "confirmation threshold");
    simulate->add_option("--trials", trials, "trials per L");
    simulate->add_option("--seed", seed, "master seed");
    simulate->add_option("--resolution", resolution, "grid resolution (dp policy)");
    simulate->add_option("--step-cap", step_cap, "per-trial step cap");
    simulate->add_option("--tol", tol, "solver tolerance");

    auto* dp_solve = app.add_subcommand("dp-solve", "value iteration on the belief lattice");
    add_common(dp_solve, true);
    dp_solve->add_option("--L", L_csv, "penalty (single value)");
    dp_solve->add_option("--resolution", resolution, "lattice denominator N");
    dp_solve->add_option("--tol", tol, "sup-norm convergence tolerance");

    auto* rate = app.add_subcommand("rate-sweep", "(rate, reliability) sweep over a search family");
    add_common(rate, false);
    rate->add_option("--p", nds_p, "flip probability");
    rate->add_option("--M-list", M_csv, "comma list of location counts");
    rate->add_option("--family", family, "singletons|all_subsets|dyadic_intervals");
    rate->add_option("--policy", policy_id, "pi1|pi2|chernoff");
    rate->add_option("--L", L_csv, "penalty (single value)");
    rate->add_option("--trials", trials, "trials per M");
    rate->add_option("--seed", seed, "master seed");
    rate->add_option("--rho-tilde", rho_tilde, "confirmation threshold");
    rate->add_option("--tol", tol, "solver tolerance");

    auto* nds_cmd = app.add_subcommand("nds", "emit a noisy-search model file");
    nds_cmd->add_option("--M", nds_M, "number of locations")->required();
    nds_cmd->add_option("--p", nds_p, "flip probability (size independent)");
    nds_cmd->add_option("--family", family, "singletons|all_subsets|dyadic_intervals");
    nds_cmd->add_option("--out", out_path, "model file path")->required();

    auto* sandwich = app.add_subcommand("sandwich", "full pipeline: bounds vs DP vs simulation");
    add_common(sandwich, true);
    sandwich->add_option("--L", L_csv, "comma list of penalties");
    sandwich->add_option("--resolution", resolution, "DP lattice denominator");
    sandwich->add_option("--trials", trials, "simulation trials per L");
    sandwich->add_option("--seed", seed, "master seed");
    sandwich->add_option("--rho-tilde", rho_tilde, "confirmation threshold");
    sandwich->add_option("--tol", tol, "solver tolerance");

    (void)beta;
    (void)epsilon;

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*validate) {
            aht::Model model = aht::load_model(model_path);
            auto rep = aht::validate(model);
            Output out;
            out.open(out_path);
            metadata(out.stream(), "validate", &model, 0, "", "");
            out.stream() << rep.summary() << "\n";
            return rep.ok ? 0 : 1;
        }

        if (*solve_game) {
            aht::Model model = aht::load_model(model_path);
            double L = parse_list(L_csv).at(0);
            auto q = aht::compute_game_quantities(model, L, rho_tilde, tol);
            Output out;
            out.open(out_path);
            auto& os = out.stream();
            metadata(os, "solve-game", &model, 0, "", L_csv);
            os << "quantity,value\n";
            os << "i_mu0," << render(q.i_mu0) << "\n";
            os << "i_1," << render(q.i_1) << "\n";
            os << "i_eta0," << render(q.i_eta0) << "\n";
            os << "i_eta_threshold," << render(q.i_eta_threshold) << "\n";
            os << "i_2," << render(q.i_2) << "\n";
            os << "i_max," << render(q.i_max) << "\n";
            os << "d_max," << render(q.d_max) << "\n";
            os << "xi," << render(q.xi) << "\n";
            os << "d1_harmonic," << render(q.d1_harmonic) << "\n";
            os << "d2_harmonic," << render(q.d2_harmonic) << "\n";
            for (size_t i = 0; i < q.d_mu.size(); ++i)
                os << "d_mu_" << i << "," << render(q.d_mu[i]) << "\n";
            for (size_t i = 0; i < q.d_eta.size(); ++i)
                os << "d_eta_" << i << "," << render(q.d_eta[i]) << "\n";
            for (size_t a = 0; a < q.mu0.weights.size(); ++a)
                os << "mu0_" << model.actions[a] << "," << render(q.mu0.weights[a]) << "\n";
            for (size_t a = 0; a < q.eta0.weights.size(); ++a)
                os << "eta0_" << model.actions[a] << "," << render(q.eta0.weights[a]) << "\n";
            return 0;
        }

        if (*bounds_cmd) {
            aht::Model model = aht::load_model(model_path);
            auto rep = aht::validate(model);
            if (!rep.ok) {
                std::cerr << rep.summary() << "\n";
                return 1;
            }
            aht::Belief prior = parse_prior(prior_spec, model.num_hypotheses);
            Output out;
            out.open(out_path);
            auto& os = out.stream();
            metadata(os, "bounds", &model, 0, "", L_csv);
            os << "L,lb_v1,lb_chernoff,lb_alpha_form,lb_v2,lb_uniform,lb_v3,"
                  "ub_v1bar,ub_v2bar,ub_v2bar_refined,ub_v3bar\n";
            for (double L : parse_list(L_csv)) {
                auto q = aht::compute_game_quantities(model, L, rho_tilde, tol);
                auto params = aht::BoundParams::defaults_for(L, model.num_hypotheses);
                params.threshold_rho = rho_tilde;
                auto b = aht::evaluate_bounds(model, prior, L, q, params);
                os << L << ',' << render(b.lb_v1) << ',' << render(b.lb_chernoff) << ','
                   << render(b.lb_alpha_form) << ',' << render(b.lb_v2) << ','
                   << render(b.lb_uniform) << ',' << render(b.lb_v3) << ','
                   << render(b.ub_v1bar) << ',' << render(b.ub_v2bar) << ','
                   << render(b.ub_v2bar_refined) << ',' << render(b.ub_v3bar) << "\n";
            }
            return 0;
        }

        if (*simulate) {
            aht::Model model = aht::load_model(model_path);
            auto rep = aht::validate(model);
            if (!rep.ok) {
                std::cerr << rep.summary() << "\n";
                return 1;
            }
            aht::Belief prior = parse_prior(prior_spec, model.num_hypotheses);
            Output out;
            out.open(out_path);
            auto& os = out.stream();
            metadata(os, "simulate", &model, seed, policy_id, L_csv);
            os << "L,trials,mean_tau,tau_half_width,pe,pe_upper,total_cost\n";
            for (double L : parse_list(L_csv)) {
                aht::PolicyConfig cfg;
                cfg.L = L;
                cfg.threshold_rho = rho_tilde;
                aht::ValueGrid grid;
                if (policy_id == "dp") {
                    grid = aht::value_iterate(model, L, resolution, tol);
                } else {
                    cfg.quantities = aht::compute_game_quantities(model, L, rho_tilde, tol);
                }
                auto policy = make_policy(policy_id, cfg, model, &grid);
                auto est = aht::estimate(model, policy, L, prior, trials, seed, step_cap);
                os << L << ',' << est.n_trials << ',' << est.mean_tau << ','
                   << est.tau_half_width << ',' << est.pe << ',' << est.pe_upper << ','
                   << est.total_cost << "\n";
            }
            return 0;
        }

        if (*dp_solve) {
            aht::Model model = aht::load_model(model_path);
            double L = parse_list(L_csv).at(0);
            auto vg = aht::value_iterate(model, L, resolution, tol);
            Output out;
            out.open(out_path);
            auto& os = out.stream();
            metadata(os, "dp-solve", &model, 0, "", L_csv);
            os << "# resolution: " << vg.grid.resolution << "\n";
            os << "# sweeps: " << vg.sweeps << " converged: " << (vg.converged ? 1 : 0)
               << " final_change: " << vg.convergence << "\n";
            for (size_t i = 0; i < model.num_hypotheses; ++i) os << "rho_" << i << ',';
            os << "value\n";
            for (size_t p = 0; p < vg.grid.points.size(); ++p) {
                auto b = vg.grid.point_belief(p);
                for (double v : b.probs) os << v << ',';
                os << vg.values[p] << "\n";
            }
            return 0;
        }

        if (*rate) {
            aht::NdsActionFamily fam = aht::NdsActionFamily::singletons;
            if (family == "all_subsets") fam = aht::NdsActionFamily::all_subsets;
            else if (family == "dyadic_intervals") fam = aht::NdsActionFamily::dyadic_intervals;
            else if (family != "singletons")
                throw CLI::ValidationError("--family", "unknown family: " + family);
            double L = parse_list(L_csv).at(0);
            std::vector<aht::Model> models;
            std::vector<aht::PolicyConfig> cfgs;
            std::vector<size_t> Ms;
            for (double mv : parse_list(M_csv)) Ms.push_back(size_t(mv));
            for (size_t m : Ms) {
                auto spec = aht::NdsSpec::size_independent(m, nds_p, fam);
                models.push_back(aht::build_model(spec));
            }
            for (size_t i = 0; i < models.size(); ++i) {
                aht::PolicyConfig cfg;
                cfg.L = L;
                cfg.threshold_rho = rho_tilde;
                cfg.quantities = aht::compute_game_quantities(models[i], L, rho_tilde, tol);
                cfgs.push_back(std::move(cfg));
            }
            std::vector<aht::RateSweepEntry> fam_entries;
            for (size_t i = 0; i < models.size(); ++i) {
                aht::PolicyFn policy = make_policy(policy_id, cfgs[i], models[i], nullptr);
                fam_entries.push_back({Ms[i], &models[i], policy});
            }
            auto points = aht::rate_sweep(fam_entries, L, trials, seed);
            Output out;
            out.open(out_path);
            auto& os = out.stream();
            metadata(os, "rate-sweep", nullptr, seed, policy_id, L_csv);
            os << "M,rate,reliability,mean_tau,pe_upper\n";
            for (const auto& pt : points)
                os << pt.M << ',' << pt.rate << ',' << pt.reliability << ','
                   << pt.estimate.mean_tau << ',' << pt.estimate.pe_upper << "\n";
            return 0;
        }

        if (*nds_cmd) {
            aht::NdsActionFamily fam = aht::NdsActionFamily::singletons;
            if (family == "all_subsets") fam = aht::NdsActionFamily::all_subsets;
            else if (family == "dyadic_intervals") fam = aht::NdsActionFamily::dyadic_intervals;
            else if (family != "singletons")
                throw CLI::ValidationError("--family", "unknown family: " + family);
            auto spec = aht::NdsSpec::size_independent(nds_M, nds_p, fam);
            aht::save_model(aht::build_model(spec), out_path);
            return 0;
        }

        if (*sandwich) {
            aht::Model model = aht::load_model(model_path);
            auto rep = aht::validate(model);
            if (!rep.ok) {
                std::cerr << rep.summary() << "\n";
                return 1;
            }
            aht::Belief prior = aht::Belief::uniform(model.num_hypotheses);
            Output out;
            out.open(out_path);
            auto& os = out.stream();
            metadata(os, "sandwich", &model, seed, "pi2", L_csv);
            os << "L,lb_alpha_form,v_grid,simulated_cost,ub_v2bar,ordered\n";
            bool all_ordered = true;
            for (double L : parse_list(L_csv)) {
                auto q = aht::compute_game_quantities(model, L, rho_tilde, tol);
                auto params = aht::BoundParams::defaults_for(L, model.num_hypotheses);
                params.threshold_rho = rho_tilde;
                double lb = aht::lb_alpha_form(prior, L, model.num_hypotheses, q.i_max);
                auto vg = aht::value_iterate(model, L, resolution, tol);
                double vstar = vg.at(prior);
                aht::PolicyConfig cfg;
                cfg.L = L;
                cfg.threshold_rho = rho_tilde;
                cfg.quantities = q;
                auto est = aht::estimate(
                    model, [cfg](const aht::Belief& b) { return aht::pi2_decide(cfg, b); }, L,
                    prior, trials, seed);
                double ub = aht::ub_v2bar(prior, L, q, params);
                double margin = vg.convergence * 10.0 + est.tau_half_width +
                                L * est.pe_upper + 1.0;
                bool ordered = lb <= vstar + margin && vstar <= est.total_cost + margin &&
                               est.total_cost <= ub + margin;
                all_ordered = all_ordered && ordered;
                os << L << ',' << render(lb) << ',' << render(vstar) << ','
                   << render(est.total_cost) << ',' << render(ub) << ',' << (ordered ? 1 : 0)
                   << "\n";
            }
            return all_ordered ? 0 : 1;
        }
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
