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
#include "asymgame/config.hpp"
#include "asymgame/error.hpp"
#include "asymgame/solution_io.hpp"
#include "fixtures.hpp"

#include <doctest.h>

#include <sstream>
#include <string>

using namespace asymgame;

namespace {

const std::string kGolden = ASYMGAME_TEST_DATA "/golden/";

json minimal_doc() {
    json doc = scenario("pe-baseline");
    doc.erase("scenario");
    return doc;
}

std::string parse_error(const json& doc) {
    try {
        parse_model_config(doc);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::ParseError);
        return e.what();
    }
    FAIL("expected a parse error");
    return {};
}

bool contains(const std::string& s, const std::string& part) { return s.find(part) != std::string::npos; }

}  // namespace

TEST_CASE("template supplies the double integrator") {
    const ModelConfig cfg = parse_model_config(minimal_doc());
    REQUIRE(cfg.time_invariant());
    CHECK_FALSE(cfg.horizon.has_value());
    const auto& s = cfg.stages[0];
    const auto ref = fixture::pursuit();
    CHECK(s.A == ref.A);
    CHECK(s.B1 == ref.B1);
    CHECK(s.B2 == ref.B2);
    CHECK(s.W.isApprox(ref.W, 1e-15));
    CHECK(s.S == ref.S);
}

TEST_CASE("explicit matrices override the template; R2 aliases S") {
    json doc = minimal_doc();
    doc["matrices"]["B2"] = matrix_to_json(Mat::Constant(4, 2, 0.5));
    doc["matrices"]["R2"] = doc["matrices"]["S"];
    doc["matrices"].erase("S");
    const ModelConfig cfg = parse_model_config(doc);
    CHECK(cfg.stages[0].B2 == Mat::Constant(4, 2, 0.5));
    CHECK(cfg.stages[0].S == -8.0 * Mat::Identity(2, 2));

    doc["matrices"]["S"] = doc["matrices"]["R2"];
    CHECK(contains(parse_error(doc), "R2"));
}

TEST_CASE("parse errors name the field") {
    json doc = minimal_doc();
    doc["matrices"]["Q"][1][2] = "x";
    CHECK(contains(parse_error(doc), "matrices.Q"));

    doc = minimal_doc();
    doc["matrices"]["Z"] = 1.0;
    CHECK(contains(parse_error(doc), "matrices.Z"));

    doc = minimal_doc();
    doc["horizon"] = -3;
    CHECK(contains(parse_error(doc), "horizon"));

    doc = minimal_doc();
    doc["matrices"].erase("C1");
    CHECK(contains(parse_error(doc), "matrices.C1"));

    doc = minimal_doc();
    doc["template"]["name"] = "triple_integrator";
    CHECK(contains(parse_error(doc), "template.name"));
}

TEST_CASE("per-stage matrices") {
    json doc = minimal_doc();
    doc["horizon"] = 3;
    json q = json::array();
    for (int t = 0; t < 3; ++t) q.push_back(matrix_to_json((t + 1) * 1e-3 * Mat::Identity(4, 4)));
    doc["matrices"]["Q"] = q;
    doc["matrices"].erase("Q_T");
    const ModelConfig cfg = parse_model_config(doc);
    REQUIRE(cfg.stages.size() == 3);
    CHECK(cfg.stages[2].Q == 3e-3 * Mat::Identity(4, 4));
    CHECK(cfg.Q_T == cfg.stages[2].Q);  // Q_T defaults to the last Q
    CHECK_THROWS_AS(to_game(cfg, 5), Error);
    CHECK(to_game(cfg).horizon() == 3);

    doc["horizon"] = 4;
    CHECK(contains(parse_error(doc), "matrices.Q"));
    doc["horizon"] = "infinite";
    CHECK(contains(parse_error(doc), "finite horizon"));
}

TEST_CASE("load dispatches on the horizon") {
    json doc = minimal_doc();
    CHECK(std::holds_alternative<ValidatedStationary>(load_model(doc)));
    doc["horizon"] = 10;
    const auto loaded = load_model(doc);
    REQUIRE(std::holds_alternative<ValidatedGame>(loaded));
    CHECK(std::get<ValidatedGame>(loaded)->horizon() == 10);

    doc["matrices"]["R"] = matrix_to_json(-Mat::Identity(2, 2));
    try {
        load_model(doc);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::DefinitenessViolation);
    }
}

TEST_CASE("built-in scenarios match the golden documents") {
    for (const auto& name : scenario_names()) {
        CAPTURE(name);
        const json golden = read_json_file(kGolden + "scenario_" + name + ".json");
        CHECK(scenario(name) == golden);
        CHECK_NOTHROW(load_model(golden));
    }
    try {
        scenario("pe-nothing");
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::UnknownScenario);
        CHECK(contains(e.what(), "pe-baseline"));
    }
}

TEST_CASE("shipped example model is the baseline scenario") {
    json shipped = read_json_file(ASYMGAME_TEST_DATA "/../data/scenarios/pursuit_evasion.json");
    CHECK(shipped == scenario("pe-baseline"));
}

TEST_CASE("model round trip is exact") {
    auto g = fixture::pursuit_game(4, {.b1_y = 0.07});
    g.stages[2].Q = 2e-3 * Mat::Identity(4, 4);
    g.x0_mean << 0.1, 1.0 / 3.0, -2.0, 1e-300;
    g.x0_cov = 1.0 / 7.0 * Mat::Identity(4, 4);
    const json doc = save_model(g);
    CHECK(doc["matrices"]["A"][0].is_array());      // invariant: one matrix
    CHECK(doc["matrices"]["Q"][0][0].is_array());   // varying: per stage
    const auto back = std::get<ValidatedGame>(load_model(json::parse(doc.dump())));
    for (std::size_t t = 0; t < 4; ++t) {
        CHECK(back->stages[t].Q == g.stages[t].Q);
        CHECK(back->stages[t].B1 == g.stages[t].B1);
        CHECK(back->stages[t].W == g.stages[t].W);
    }
    CHECK(back->x0_mean == g.x0_mean);
    CHECK(back->x0_cov == g.x0_cov);
    CHECK(model_hash(save_model(back.get())) == model_hash(doc));
    CHECK(hex_hash(model_hash(doc)).size() == 16);
}

TEST_CASE("stationary solution document round trip") {
    const auto model = validate_model(StationaryModel{fixture::pursuit()});
    const StationaryOptions opts;
    const auto sol = value_iterate(model, opts);
    const json doc = json::parse(stationary_solution_document(model.get(), sol, opts).dump());
    CHECK(doc["solver"] == "stationary");
    CHECK(doc["tool"] == "asymgame");
    const LoadedSolution loaded = load_solution(doc);
    CHECK(loaded.solver == "stationary");
    CHECK(loaded.J == sol.J);
    CHECK(std::abs(loaded.reevaluate() - sol.J) <= 1e-12 * sol.J);
    REQUIRE(loaded.loop.broadcast());
    CHECK(loaded.loop.gains[0].K1 == sol.gains.K1);
    CHECK(loaded.loop.filters[0].Lbar2 == sol.filter.Lbar2);
    CHECK(loaded.state_covariance == sol.state_covariance);
}

TEST_CASE("golden baseline solution") {
    const json golden = read_json_file(kGolden + "solution_pe-baseline.json");
    const auto model = std::get<ValidatedStationary>(load_model(golden["model"]));
    const auto sol = value_iterate(model);
    const LoadedSolution ref = load_solution(golden);
    CHECK(sol.J == doctest::Approx(ref.J).epsilon(1e-9));
    CHECK((sol.gains.K1 - ref.loop.gains[0].K1).norm() < 1e-8 * sol.gains.K1.norm());
    CHECK((sol.gains.K2 - ref.loop.gains[0].K2).norm() < 1e-8 * sol.gains.K2.norm());
    CHECK(golden["model_hash"] == hex_hash(model_hash(golden["model"])));
}

TEST_CASE("finite solution document round trip") {
    auto g = fixture::pursuit_game(12);
    g.x0_mean << -10, 0, 0, 0;
    g.x0_cov = 0.1 * Mat::Identity(4, 4);
    const auto model = validate_model(g);
    const FiniteOptions opts;
    const auto eq = solve_finite(model, opts);
    const double v = finite_value(eq, g.x0_mean, g.x0_cov);
    const LoadedSolution loaded = load_solution(json::parse(finite_solution_document(g, eq, opts).dump()));
    CHECK(loaded.solver == "finite");
    CHECK(loaded.loop.stages.size() == 12);
    CHECK(loaded.loop.gains[5].K2 == eq.gains[5].K2);
    CHECK(std::abs(loaded.reevaluate() - v) <= 1e-12 * std::abs(v));
    CHECK(loaded.J == doctest::Approx(v).epsilon(1e-12));
}

TEST_CASE("trajectory CSV layout") {
    const auto model = validate_model(StationaryModel{fixture::pursuit()});
    const auto sol = value_iterate(model);
    const auto loop = ClosedLoop::stationary(model, sol);
    const Vec x0 = (Vec(4) << -10, 0, 0, 0).finished();
    const auto tr = rollout(loop, InitSpec::fixed(x0, x0, x0), 5, 1, 0);
    const std::string csv = trajectory_csv(tr);
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    CHECK(line == "t,x_1,x_2,x_3,x_4,z1_1,z1_2,z1_3,z1_4,z2_1,z2_2,z2_3,z2_4,u1_1,u1_2,u2_1,u2_2,stage_cost");
    std::vector<std::string> rows;
    while (std::getline(in, line)) rows.push_back(line);
    REQUIRE(rows.size() == 6);
    // Second row: x_1 printed with 17 significant digits parses back exactly.
    std::istringstream row(rows[1]);
    std::string cell;
    std::getline(row, cell, ',');
    CHECK(cell == "1");
    std::getline(row, cell, ',');
    CHECK(std::stod(cell) == tr.x[1](0));
    CHECK(contains(rows[5], ",,"));  // t = T has no inputs
}
