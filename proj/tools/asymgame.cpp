/*
 Copyright 2026 The asymgame Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/
// asymgame: solve, simulate and generate scenarios for two-player zero-sum
// LQG games with asymmetric information.

#include "asymgame/config.hpp"
#include "asymgame/error.hpp"
#include "asymgame/finite_solver.hpp"
#include "asymgame/lqg.hpp"
#include "asymgame/simulator.hpp"
#include "asymgame/solution_io.hpp"
#include "asymgame/stationary_solver.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

namespace fs = std::filesystem;
using namespace asymgame;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitNotConverged = 2;

struct SolveArgs {
    std::string model;
    std::string mode;
    std::optional<std::size_t> horizon;
    std::optional<double> tol;
    std::optional<std::size_t> max_iter;
    double damping = 1.0;
    bool fixed_gamma = false;
    bool refresh_gamma = false;
    double cond_cap = 1e12;
    bool jitter = false;
    std::string output;
    std::string baseline;
};

struct SimulateArgs {
    std::string solution;
    std::string x0, z0_1, z0_2;
    std::optional<std::size_t> steps;
    std::size_t samples = 1;
    std::uint64_t seed = 0;
    bool mean_only = false;
    bool stationary_start = false;
    std::string output_dir = ".";
};

struct ScenarioArgs {
    std::string name;
    std::string output;
};

Vec parse_vector(const std::string& text, const char* flag) {
    std::vector<double> values;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            values.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw Error(ErrorKind::InvalidArgument, fmt::format("{}: '{}' is not a number", flag, item));
        }
    }
    return Eigen::Map<Vec>(values.data(), static_cast<Index>(values.size()));
}

void emit(const json& doc, const std::string& path) {
    if (path.empty()) return;
    write_text_file(path, doc.dump(2) + "\n");
}

int run_solve(const SolveArgs& a) {
    if (a.fixed_gamma && a.refresh_gamma) {
        throw Error(ErrorKind::InvalidArgument, "--fixed-gamma and --refresh-gamma are exclusive");
    }
    const ModelConfig cfg = read_model_config(a.model);
    std::string mode = a.mode;
    if (mode.empty()) mode = (cfg.horizon || a.horizon) ? "finite" : "infinite";
    const GammaPolicy gamma = a.refresh_gamma ? GammaPolicy::RefreshFromCost : GammaPolicy::Fixed;
    InnovationOptions innov;
    innov.cond_cap = a.cond_cap;
    innov.jitter = a.jitter ? 1e-9 : 0.0;
    if (a.cond_cap > 1e12) {
        std::cerr << fmt::format("note: innovation condition cap raised to {:.0e}\n", a.cond_cap);
    }

    if (mode == "infinite") {
        const ValidatedStationary model = validate_model(to_stationary(cfg));
        StationaryOptions opts;
        opts.tol = a.tol.value_or(1e-10);
        opts.max_iter = a.max_iter.value_or(100000);
        opts.gamma = gamma;
        opts.innovation = innov;
        const StationarySolution sol = value_iterate(model, opts);
        json doc = stationary_solution_document(model.get(), sol, opts);
        const auto& d = sol.diagnostics;
        fmt::print("J = {:.6e}\n", sol.J);
        fmt::print("J (Lyapunov) = {:.6e}\n", sol.J_lyapunov);
        fmt::print("{} after {} iterations, residual {:.3e}, spectral radius {:.6f}\n",
                   d.converged ? "converged" : "NOT converged", d.iterations, d.residual, d.spectral_radius);
        if (a.baseline == "lqg") {
            const LqgSolution lqg = classical_lqg(model->m);
            fmt::print("LQG baseline J = {:.6e}\n", lqg.J);
            doc["baseline"] = {{"lqg", lqg.J}};
        }
        emit(doc, a.output);
        if (!d.stable) {
            std::cerr << fmt::format("error: UnstableClosedLoop: spectral radius {:.6f}\n", d.spectral_radius);
            return kExitError;
        }
        return d.converged ? kExitOk : kExitNotConverged;
    }
    if (mode != "finite") throw Error(ErrorKind::InvalidArgument, "--mode must be finite or infinite");
    if (a.baseline == "lqg") throw Error(ErrorKind::InvalidArgument, "--baseline lqg needs --mode infinite");

    const ValidatedGame model = validate_model(to_game(cfg, a.horizon));
    FiniteOptions opts;
    opts.tol = a.tol.value_or(1e-9);
    opts.max_iter = a.max_iter.value_or(10000);
    opts.damping = a.damping;
    opts.gamma = gamma;
    opts.innovation = innov;
    const FiniteEquilibrium eq = solve_finite(model, opts);
    const json doc = finite_solution_document(model.get(), eq, opts);
    const auto& d = eq.diagnostics;
    fmt::print("J = {:.6e}\n", finite_value(eq, model->x0_mean, model->x0_cov));
    fmt::print("horizon {}: {} after {} iterations, residual {:.3e}\n", model->horizon(),
               d.converged ? "converged" : "NOT converged", d.iterations, d.residual);
    emit(doc, a.output);
    return d.converged ? kExitOk : kExitNotConverged;
}

int run_simulate(const SimulateArgs& a) {
    const LoadedSolution sol = load_solution(read_json_file(a.solution));
    const Dimensions d = sol.loop.dims();
    const bool finite = sol.solver == "finite";
    if (finite && sol.loop.stages.empty()) throw Error(ErrorKind::InvalidArgument, "solution has zero horizon");
    const std::size_t T = finite ? sol.loop.stages.size() : a.steps.value_or(200);
    if (finite && a.steps && *a.steps != T) {
        throw Error(ErrorKind::InvalidArgument,
                    fmt::format("finite-horizon solution covers {} steps, --steps {} given", T, *a.steps));
    }
    if (a.samples == 0) throw Error(ErrorKind::InvalidArgument, "--samples must be positive");

    InitSpec init;
    if (a.stationary_start) {
        if (finite || sol.state_covariance.size() == 0) {
            throw Error(ErrorKind::InvalidArgument, "--stationary-start needs a stable stationary solution");
        }
        init = InitSpec::stationary(sol.state_covariance);
    } else {
        const Vec mean = finite ? (*sol.game)->x0_mean : Vec::Zero(d.n);
        const bool random_x0 = finite && a.x0.empty() && !(*sol.game)->x0_cov.isZero(0.0);
        if (random_x0) {
            init = InitSpec::gaussian(mean, (*sol.game)->x0_cov);
        } else {
            const Vec x0 = a.x0.empty() ? mean : parse_vector(a.x0, "--x0");
            const Vec z1 = a.z0_1.empty() ? mean : parse_vector(a.z0_1, "--z0-1");
            const Vec z2 = a.z0_2.empty() ? mean : parse_vector(a.z0_2, "--z0-2");
            init = InitSpec::fixed(x0, z1, z2);
        }
    }

    fs::create_directories(a.output_dir);
    const auto out = [&](const std::string& name) { return (fs::path(a.output_dir) / name).string(); };

    const std::size_t keep = std::min<std::size_t>(a.samples, 10);
    for (std::size_t k = 0; k < keep; ++k) {
        write_text_file(out(fmt::format("rollout_{:04d}.csv", k)), trajectory_csv(rollout(sol.loop, init, T, a.seed, k)));
    }
    const RolloutStats st = monte_carlo(sol.loop, init, a.samples, T, a.seed);
    write_text_file(out("mean_trajectory.csv"), mean_trajectory_csv(st));
    if (a.mean_only) {
        write_text_file(out("mean_propagation.csv"), trajectory_csv(rollout(sol.loop, init, T, a.seed, 0, false)));
    }

    const double emp = finite ? st.mean_total_cost : st.average_stage_cost;
    const double se = finite ? st.stderr_total_cost : st.stderr_average_stage_cost;
    json stats = {{"solution", a.solution},
                  {"solver", sol.solver},
                  {"model_hash", hex_hash(sol.model_hash)},
                  {"seed", a.seed},
                  {"samples", a.samples},
                  {"steps", T},
                  {"empirical_cost", emp},
                  {"standard_error", se},
                  {"analytic_J", std::isfinite(sol.J) ? json(sol.J) : json(nullptr)},
                  {"cost_kind", finite ? "total" : "average_stage"},
                  {"tool", "asymgame"},
                  {"version", kToolVersion}};
    write_text_file(out("stats.json"), stats.dump(2) + "\n");

    fmt::print("{} cost: {:.6e} +/- {:.3e} (N = {}, T = {})\n", finite ? "empirical total" : "empirical average", emp,
               se, a.samples, T);
    fmt::print("analytic J: {:.6e}\n", sol.J);
    if (se > 0.0) fmt::print("deviation: {:.2f} standard errors\n", (emp - sol.J) / se);
    return kExitOk;
}

int run_scenario(const ScenarioArgs& a) {
    const std::string text = scenario(a.name).dump(2) + "\n";
    if (a.output.empty()) {
        std::cout << text;
    } else {
        write_text_file(a.output, text);
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Equilibrium solver and simulator for zero-sum LQG games with asymmetric information"};
    app.require_subcommand(1);

    SolveArgs solve;
    auto* s = app.add_subcommand("solve", "Compute equilibrium gains and filters");
    s->add_option("--model", solve.model, "Model config (JSON)")->required()->check(CLI::ExistingFile);
    s->add_option("--mode", solve.mode, "finite or infinite (default: from the model's horizon)")
        ->check(CLI::IsMember({"finite", "infinite"}));
    s->add_option("--horizon", solve.horizon, "Horizon T for --mode finite");
    s->add_option("--tol", solve.tol, "Convergence tolerance (finite 1e-9, infinite 1e-10)");
    s->add_option("--max-iter", solve.max_iter, "Iteration cap (finite 10000, infinite 100000)");
    s->add_option("--damping", solve.damping, "Gain relaxation in (0, 1] (finite mode)");
    s->add_flag("--fixed-gamma", solve.fixed_gamma, "Hold the filter weight at blockdiag(I, -I) (default)");
    s->add_flag("--refresh-gamma", solve.refresh_gamma, "Refresh the filter weight from P each iteration");
    s->add_option("--cond-cap", solve.cond_cap, "Innovation covariance condition cap (default 1e12)");
    s->add_flag("--jitter", solve.jitter, "Add 1e-9 I to innovation covariances");
    s->add_option("--output", solve.output, "Write the solution document here");
    s->add_option("--baseline", solve.baseline, "Also report a baseline (lqg)")->check(CLI::IsMember({"lqg"}));

    SimulateArgs sim;
    auto* m = app.add_subcommand("simulate", "Monte Carlo rollouts of a solved game");
    m->add_option("--solution", sim.solution, "Solution document from solve")->required()->check(CLI::ExistingFile);
    m->add_option("--x0", sim.x0, "Initial state, comma separated (use --x0=-10,0,0,0)");
    m->add_option("--z0-1", sim.z0_1, "Minimizer's initial estimate");
    m->add_option("--z0-2", sim.z0_2, "Maximizer's initial estimate");
    m->add_option("--steps", sim.steps, "Steps per rollout (stationary solutions; default 200)");
    m->add_option("--samples", sim.samples, "Number of rollouts");
    m->add_option("--seed", sim.seed, "Base seed");
    m->add_flag("--mean-only", sim.mean_only, "Also write the noise-free mean propagation");
    m->add_flag("--stationary-start", sim.stationary_start, "Start from the stationary distribution");
    m->add_option("--output-dir", sim.output_dir, "Directory for CSVs and stats.json");

    ScenarioArgs scen;
    auto* c = app.add_subcommand("scenario", "Write a built-in pursuit-evasion model config");
    c->add_option("name", scen.name, "Scenario name")->required();
    c->add_option("--output", scen.output, "Output path (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitError;
    }

    try {
        if (*s) return run_solve(solve);
        if (*m) return run_simulate(sim);
        if (*c) return run_scenario(scen);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitError;
}
