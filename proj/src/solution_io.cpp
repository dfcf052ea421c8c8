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
#include "asymgame/solution_io.hpp"

#include "asymgame/error.hpp"

#include <fmt/format.h>

#include <cmath>
#include <limits>

namespace asymgame {

namespace {

// JSON has no NaN or infinity; those become null.
json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json history_json(const std::vector<double>& h) {
    json out = json::array();
    for (double v : h) out.push_back(number(v));
    return out;
}

json flags_json(const GammaFlags& f) { return {{"gamma11_positive", f.g11_positive}, {"gamma22_negative", f.g22_negative}}; }

const json& need(const json& j, const char* key, const std::string& path) {
    if (!j.is_object() || !j.contains(key)) throw Error(ErrorKind::ParseError, fmt::format("{}.{}: missing", path, key));
    return j[key];
}

std::string row(const std::vector<const Vec*>& parts, std::size_t t, std::optional<double> cost, Index pad) {
    std::string line = fmt::format("{}", t);
    for (const Vec* v : parts) {
        for (Index i = 0; i < v->size(); ++i) line += fmt::format(",{:.17g}", (*v)(i));
    }
    for (Index i = 0; i < pad; ++i) line += ",";
    line += cost ? fmt::format(",{:.17g}", *cost) : std::string(",");
    line += "\n";
    return line;
}

std::string header(Index n, Index m1, Index m2) {
    std::string h = "t";
    for (Index i = 1; i <= n; ++i) h += fmt::format(",x_{}", i);
    for (Index i = 1; i <= n; ++i) h += fmt::format(",z1_{}", i);
    for (Index i = 1; i <= n; ++i) h += fmt::format(",z2_{}", i);
    for (Index i = 1; i <= m1; ++i) h += fmt::format(",u1_{}", i);
    for (Index i = 1; i <= m2; ++i) h += fmt::format(",u2_{}", i);
    return h + ",stage_cost\n";
}

}  // namespace

json stage_gains_to_json(const GainStage& g) { return {{"K1", matrix_to_json(g.K1)}, {"K2", matrix_to_json(g.K2)}}; }

GainStage stage_gains_from_json(const json& j, const std::string& path) {
    return {matrix_from_json(need(j, "K1", path), path + ".K1"), matrix_from_json(need(j, "K2", path), path + ".K2")};
}

json filter_to_json(const FilterStage& f) {
    return {{"A1", matrix_to_json(f.A1)},       {"A2", matrix_to_json(f.A2)},       {"Bbar1", matrix_to_json(f.Bbar1)},
            {"Bbar2", matrix_to_json(f.Bbar2)}, {"Lbar1", matrix_to_json(f.Lbar1)}, {"Lbar2", matrix_to_json(f.Lbar2)},
            {"L1", matrix_to_json(f.L1)},       {"L2", matrix_to_json(f.L2)}};
}

FilterStage filter_from_json(const json& j, const std::string& path) {
    FilterStage f;
    f.A1 = matrix_from_json(need(j, "A1", path), path + ".A1");
    f.A2 = matrix_from_json(need(j, "A2", path), path + ".A2");
    f.Bbar1 = matrix_from_json(need(j, "Bbar1", path), path + ".Bbar1");
    f.Bbar2 = matrix_from_json(need(j, "Bbar2", path), path + ".Bbar2");
    f.Lbar1 = matrix_from_json(need(j, "Lbar1", path), path + ".Lbar1");
    f.Lbar2 = matrix_from_json(need(j, "Lbar2", path), path + ".Lbar2");
    f.L1 = matrix_from_json(need(j, "L1", path), path + ".L1");
    f.L2 = matrix_from_json(need(j, "L2", path), path + ".L2");
    return f;
}

json stationary_solution_document(const StationaryModel& model, const StationarySolution& sol,
                                  const StationaryOptions& opts) {
    const json m = save_model(model);
    const auto& d = sol.diagnostics;
    json doc;
    doc["tool"] = "asymgame";
    doc["version"] = kToolVersion;
    doc["solver"] = "stationary";
    doc["model"] = m;
    doc["model_hash"] = hex_hash(model_hash(m));
    doc["options"] = {{"tol", opts.tol},
                      {"max_iter", opts.max_iter},
                      {"gamma", opts.gamma == GammaPolicy::Fixed ? "fixed" : "refresh"},
                      {"cond_cap", opts.innovation.cond_cap},
                      {"jitter", opts.innovation.jitter}};
    doc["J"] = number(sol.J);
    doc["J_lyapunov"] = number(sol.J_lyapunov);
    doc["gains"] = json::array({stage_gains_to_json(sol.gains)});
    doc["filters"] = json::array({filter_to_json(sol.filter)});
    doc["P"] = matrix_to_json(sol.P.P);
    doc["sigma"] = matrix_to_json(sol.sigma.sigma);
    doc["gamma"] = matrix_to_json(sol.gamma.gamma);
    doc["state_covariance"] = matrix_to_json(sol.state_covariance);
    doc["diagnostics"] = {{"converged", d.converged},
                          {"iterations", d.iterations},
                          {"residual", number(d.residual)},
                          {"spectral_radius", number(d.spectral_radius)},
                          {"stable", d.stable},
                          {"gamma_flags", flags_json(d.gamma_flags)},
                          {"gamma_fallbacks", d.gamma_fallbacks},
                          {"filter_gain_residual", number(d.filter_gain_residual)},
                          {"stationarity_residual", number(d.stationarity_residual)},
                          {"sigma0", matrix_to_json(d.sigma0)}};
    return doc;
}

json finite_solution_document(const GameModel& model, const FiniteEquilibrium& eq, const FiniteOptions& opts) {
    const json m = save_model(model);
    const auto& d = eq.diagnostics;
    json doc;
    doc["tool"] = "asymgame";
    doc["version"] = kToolVersion;
    doc["solver"] = "finite";
    doc["model"] = m;
    doc["model_hash"] = hex_hash(model_hash(m));
    doc["options"] = {{"tol", opts.tol},
                      {"max_iter", opts.max_iter},
                      {"damping", opts.damping},
                      {"gamma", opts.gamma == GammaPolicy::Fixed ? "fixed" : "refresh"},
                      {"cond_cap", opts.innovation.cond_cap},
                      {"jitter", opts.innovation.jitter}};
    doc["J"] = number(finite_value(eq, model.x0_mean, model.x0_cov));
    json gains = json::array(), filters = json::array(), P = json::array(), r = json::array(),
         sigma = json::array(), gamma = json::array(), flags = json::array();
    for (const auto& g : eq.gains) gains.push_back(stage_gains_to_json(g));
    for (const auto& f : eq.filters()) filters.push_back(filter_to_json(f));
    for (const auto& c : eq.costs) {
        P.push_back(matrix_to_json(c.P));
        r.push_back(c.r);
    }
    sigma.push_back(matrix_to_json(eq.forward.initial.sigma));
    for (const auto& s : eq.forward.apriori) sigma.push_back(matrix_to_json(s.sigma));
    for (const auto& g : eq.gammas) gamma.push_back(matrix_to_json(g.gamma));
    for (const auto& f : d.gamma_flags) flags.push_back(flags_json(f));
    doc["gains"] = std::move(gains);
    doc["filters"] = std::move(filters);
    doc["P"] = std::move(P);
    doc["r"] = std::move(r);
    doc["sigma"] = std::move(sigma);
    doc["gamma"] = std::move(gamma);
    doc["diagnostics"] = {{"converged", d.converged},
                          {"iterations", d.iterations},
                          {"residual", number(d.residual)},
                          {"history", history_json(d.history)},
                          {"gamma_flags", std::move(flags)},
                          {"gamma_fallbacks", d.gamma_fallbacks},
                          {"filter_gain_residual", number(d.max_filter_gain_residual)},
                          {"stationarity_residual", number(d.max_stationarity_residual)}};
    return doc;
}

LoadedSolution load_solution(const json& doc) {
    LoadedSolution out;
    out.solver = need(doc, "solver", "solution").get<std::string>();
    const json& m = need(doc, "model", "solution");
    out.model_hash = model_hash(m);
    const json& J = need(doc, "J", "solution");
    out.J = J.is_number() ? J.get<double>() : std::numeric_limits<double>::quiet_NaN();

    const json& gains = need(doc, "gains", "solution");
    const json& filters = need(doc, "filters", "solution");
    if (!gains.is_array() || !filters.is_array() || gains.size() != filters.size()) {
        throw Error(ErrorKind::ParseError, "solution: gains and filters must be arrays of equal length");
    }
    for (std::size_t t = 0; t < gains.size(); ++t) {
        out.loop.gains.push_back(stage_gains_from_json(gains[t], fmt::format("gains[{}]", t)));
        out.loop.filters.push_back(filter_from_json(filters[t], fmt::format("filters[{}]", t)));
    }

    const ModelConfig cfg = parse_model_config(m);
    if (out.solver == "stationary") {
        out.stationary = validate_model(to_stationary(cfg));
        out.loop.stages = {(*out.stationary)->m};
        out.costs.push_back({matrix_from_json(need(doc, "P", "solution"), "P"), 0.0, 0});
        if (doc.contains("state_covariance")) {
            out.state_covariance = matrix_from_json(doc["state_covariance"], "state_covariance");
        }
    } else if (out.solver == "finite") {
        out.game = validate_model(to_game(cfg));
        out.loop.stages = (*out.game)->stages;
        out.loop.terminal_cost = (*out.game)->Q_T;
        const json& P = need(doc, "P", "solution");
        const json& r = need(doc, "r", "solution");
        if (!P.is_array() || !r.is_array() || P.size() != r.size()) {
            throw Error(ErrorKind::ParseError, "solution: P and r must be arrays of equal length");
        }
        for (std::size_t t = 0; t < P.size(); ++t) {
            out.costs.push_back({matrix_from_json(P[t], fmt::format("P[{}]", t)), r[t].get<double>(), t});
        }
    } else {
        throw Error(ErrorKind::ParseError, fmt::format("solution.solver: unknown kind '{}'", out.solver));
    }
    if (out.loop.stages.size() != out.loop.gains.size() && !(out.loop.stages.empty() && out.loop.gains.empty())) {
        throw Error(ErrorKind::DimensionMismatch, "solution: gains do not cover the model's stages");
    }
    return out;
}

double LoadedSolution::reevaluate() const {
    if (stationary) return average_cost(costs.front(), loop.filters.front(), (*stationary)->m);
    return finite_value(costs.front(), (*game)->x0_mean, (*game)->x0_cov);
}

std::string trajectory_csv(const Trajectory& tr) {
    const Index n = tr.x.front().size();
    const Index m1 = tr.u1.empty() ? 0 : tr.u1.front().size();
    const Index m2 = tr.u2.empty() ? 0 : tr.u2.front().size();
    std::string out = header(n, m1, m2);
    for (std::size_t t = 0; t < tr.steps(); ++t) {
        out += row({&tr.x[t], &tr.z1[t], &tr.z2[t], &tr.u1[t], &tr.u2[t]}, t, tr.stage_cost[t], 0);
    }
    const std::size_t T = tr.steps();
    out += row({&tr.x[T], &tr.z1[T], &tr.z2[T]}, T, tr.terminal_cost, m1 + m2);
    return out;
}

std::string mean_trajectory_csv(const RolloutStats& st) {
    const Index n = st.mean_x.front().size();
    const Index m1 = st.mean_u1.empty() ? 0 : st.mean_u1.front().size();
    const Index m2 = st.mean_u2.empty() ? 0 : st.mean_u2.front().size();
    std::string out = header(n, m1, m2);
    for (std::size_t t = 0; t < st.steps; ++t) {
        out += row({&st.mean_x[t], &st.mean_z1[t], &st.mean_z2[t], &st.mean_u1[t], &st.mean_u2[t]}, t,
                   st.mean_stage_cost[t], 0);
    }
    const std::size_t T = st.steps;
    out += row({&st.mean_x[T], &st.mean_z1[T], &st.mean_z2[T]}, T, std::nullopt, m1 + m2);
    return out;
}

}  // namespace asymgame
