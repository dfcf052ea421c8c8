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

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <fstream>
#include <sstream>

namespace asymgame {

namespace {

constexpr std::array<const char*, 11> kStageFields = {"A", "B1", "B2", "W", "C1", "C2", "V1", "V2", "Q", "R", "S"};

Mat& field(StageMatrices& s, const std::string& name) {
    if (name == "A") return s.A;
    if (name == "B1") return s.B1;
    if (name == "B2") return s.B2;
    if (name == "W") return s.W;
    if (name == "C1") return s.C1;
    if (name == "C2") return s.C2;
    if (name == "V1") return s.V1;
    if (name == "V2") return s.V2;
    if (name == "Q") return s.Q;
    if (name == "R") return s.R;
    return s.S;
}

const Mat& field(const StageMatrices& s, const std::string& name) {
    return field(const_cast<StageMatrices&>(s), name);
}

[[noreturn]] void parse_fail(const std::string& msg) { throw Error(ErrorKind::ParseError, msg); }

bool is_stage_list(const json& j) {
    return j.is_array() && !j.empty() && j.front().is_array() && !j.front().empty() && j.front().front().is_array();
}

}  // namespace

json matrix_to_json(const Mat& m) {
    json rows = json::array();
    for (Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k) + 0.0);  // + 0.0 drops the sign of zero
        rows.push_back(std::move(row));
    }
    return rows;
}

Mat matrix_from_json(const json& j, const std::string& path) {
    if (j.is_number()) return Mat::Constant(1, 1, j.get<double>());
    if (!j.is_array()) parse_fail(fmt::format("{}: expected a 2-D array", path));
    const auto rows = static_cast<Index>(j.size());
    if (rows == 0) return Mat(0, 0);
    if (!j.front().is_array()) parse_fail(fmt::format("{}: expected a 2-D array", path));
    const auto cols = static_cast<Index>(j.front().size());
    Mat m(rows, cols);
    for (Index i = 0; i < rows; ++i) {
        const json& row = j[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<Index>(row.size()) != cols) {
            parse_fail(fmt::format("{}[{}]: ragged row (expected {} entries)", path, i, cols));
        }
        for (Index k = 0; k < cols; ++k) {
            const json& v = row[static_cast<std::size_t>(k)];
            if (!v.is_number()) parse_fail(fmt::format("{}[{}][{}]: not a number", path, i, k));
            m(i, k) = v.get<double>();
        }
    }
    return m;
}

json vector_to_json(const Vec& v) {
    json out = json::array();
    for (Index i = 0; i < v.size(); ++i) out.push_back(v(i) + 0.0);
    return out;
}

Vec vector_from_json(const json& j, const std::string& path) {
    if (!j.is_array()) parse_fail(fmt::format("{}: expected an array", path));
    Vec v(static_cast<Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number()) parse_fail(fmt::format("{}[{}]: not a number", path, i));
        v(static_cast<Index>(i)) = j[i].get<double>();
    }
    return v;
}

void double_integrator_2d(double dt, Mat& A, Mat& B) {
    A = Mat::Identity(4, 4);
    A(0, 2) = dt;
    A(1, 3) = dt;
    B = Mat::Zero(4, 2);
    B(2, 0) = dt;
    B(3, 1) = dt;
}

ModelConfig parse_model_config(const json& doc) {
    if (!doc.is_object()) parse_fail("document: expected an object");
    ModelConfig cfg;

    if (!doc.contains("horizon")) parse_fail("horizon: missing field");
    const json& h = doc["horizon"];
    if (h.is_string()) {
        if (h.get<std::string>() != "infinite") parse_fail("horizon: expected an integer or \"infinite\"");
    } else if (h.is_number_integer() && h.get<long long>() >= 0) {
        cfg.horizon = h.get<std::size_t>();
    } else {
        parse_fail("horizon: expected a nonnegative integer or \"infinite\"");
    }

    if (!doc.contains("matrices") || !doc["matrices"].is_object()) parse_fail("matrices: missing object");
    json mats = doc["matrices"];
    if (mats.contains("R2")) {
        if (mats.contains("S")) parse_fail("matrices.R2: both S and its alias R2 given");
        mats["S"] = mats["R2"];
        mats.erase("R2");
    }

    Mat tA, tB;
    bool have_template = false;
    if (doc.contains("template")) {
        const json& t = doc["template"];
        if (!t.is_object() || !t.contains("name") || !t["name"].is_string()) parse_fail("template.name: missing");
        const std::string name = t["name"].get<std::string>();
        if (name != "double_integrator_2d") parse_fail(fmt::format("template.name: unknown template '{}'", name));
        if (!t.contains("dt") || !t["dt"].is_number()) parse_fail("template.dt: missing number");
        const double dt = t["dt"].get<double>();
        if (!(dt > 0.0)) parse_fail("template.dt: must be positive");
        double_integrator_2d(dt, tA, tB);
        have_template = true;
    }

    for (const auto& [key, value] : mats.items()) {
        bool known = key == "Q_T" || key == "x0_mean" || key == "x0_cov";
        for (const char* f : kStageFields) known = known || key == f;
        if (!known) parse_fail(fmt::format("matrices.{}: unknown field", key));
    }

    // Sequence length per field: 1 (time-invariant) or T.
    std::size_t stages = 1;
    for (const char* f : kStageFields) {
        if (mats.contains(f) && is_stage_list(mats[f])) {
            if (!cfg.horizon) parse_fail(fmt::format("matrices.{}: per-stage list needs a finite horizon", f));
            if (mats[f].size() != *cfg.horizon) {
                parse_fail(fmt::format("matrices.{}: {} stages given, horizon is {}", f, mats[f].size(),
                                       *cfg.horizon));
            }
            stages = *cfg.horizon;
        }
    }
    if (stages == 0) stages = 1;
    cfg.stages.assign(stages, StageMatrices{});

    for (const char* f : kStageFields) {
        const std::string name = f;
        const std::string path = "matrices." + name;
        if (!mats.contains(f)) {
            if (have_template && (name == "A" || name == "B1" || name == "B2")) {
                const Mat value = name == "A" ? tA : (name == "B1" ? tB : Mat(-tB));
                for (auto& s : cfg.stages) field(s, name) = value;
                continue;
            }
            parse_fail(fmt::format("{}: missing field", path));
        }
        const json& j = mats[f];
        if (is_stage_list(j)) {
            for (std::size_t t = 0; t < stages; ++t) {
                field(cfg.stages[t], name) = matrix_from_json(j[t], fmt::format("{}[{}]", path, t));
            }
        } else {
            const Mat value = matrix_from_json(j, path);
            for (auto& s : cfg.stages) field(s, name) = value;
        }
    }

    const Index n = cfg.stages.front().A.rows();
    cfg.Q_T = mats.contains("Q_T") ? matrix_from_json(mats["Q_T"], "matrices.Q_T") : cfg.stages.back().Q;
    cfg.x0_mean = mats.contains("x0_mean") ? vector_from_json(mats["x0_mean"], "matrices.x0_mean") : Vec::Zero(n);
    cfg.x0_cov = mats.contains("x0_cov") ? matrix_from_json(mats["x0_cov"], "matrices.x0_cov") : Mat::Zero(n, n);
    return cfg;
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Io, fmt::format("cannot open '{}'", path));
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::ParseError, fmt::format("{}: {}", path, e.what()));
    }
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::Io, fmt::format("cannot write '{}'", path));
    out << text;
    if (!out) throw Error(ErrorKind::Io, fmt::format("write to '{}' failed", path));
}

ModelConfig read_model_config(const std::string& path) { return parse_model_config(read_json_file(path)); }

GameModel to_game(const ModelConfig& cfg, std::optional<std::size_t> horizon) {
    const std::optional<std::size_t> T = horizon ? horizon : cfg.horizon;
    if (!T) throw Error(ErrorKind::InvalidArgument, "an infinite-horizon model needs an explicit horizon");
    if (!cfg.time_invariant() && cfg.stages.size() != *T) {
        throw Error(ErrorKind::InvalidArgument,
                    fmt::format("model has {} per-stage matrices, horizon {} requested", cfg.stages.size(), *T));
    }
    GameModel g;
    g.stages = cfg.time_invariant() ? std::vector<StageMatrices>(*T, cfg.stages.front()) : cfg.stages;
    g.Q_T = cfg.Q_T;
    g.x0_mean = cfg.x0_mean;
    g.x0_cov = cfg.x0_cov;
    return g;
}

StationaryModel to_stationary(const ModelConfig& cfg) {
    if (!cfg.time_invariant()) throw Error(ErrorKind::InvalidArgument, "average-cost solve needs a time-invariant model");
    return {cfg.stages.front()};
}

LoadedModel load_model(const json& doc) {
    const ModelConfig cfg = parse_model_config(doc);
    if (cfg.horizon) return validate_model(to_game(cfg));
    return validate_model(to_stationary(cfg));
}

LoadedModel load_model(const std::string& path) { return load_model(read_json_file(path)); }

json save_model(const GameModel& m) {
    json doc;
    doc["horizon"] = m.horizon();
    json mats = json::object();
    for (const char* f : kStageFields) {
        const std::string name = f;
        bool invariant = !m.stages.empty();
        for (const auto& s : m.stages) invariant = invariant && field(s, name) == field(m.stages.front(), name);
        if (invariant) {
            mats[name] = matrix_to_json(field(m.stages.front(), name));
        } else {
            json list = json::array();
            for (const auto& s : m.stages) list.push_back(matrix_to_json(field(s, name)));
            mats[name] = std::move(list);
        }
    }
    mats["Q_T"] = matrix_to_json(m.Q_T);
    mats["x0_mean"] = vector_to_json(m.x0_mean);
    mats["x0_cov"] = matrix_to_json(m.x0_cov);
    doc["matrices"] = std::move(mats);
    return doc;
}

json save_model(const StationaryModel& m) {
    json doc;
    doc["horizon"] = "infinite";
    json mats = json::object();
    for (const char* f : kStageFields) mats[f] = matrix_to_json(field(m.m, f));
    doc["matrices"] = std::move(mats);
    return doc;
}

std::uint64_t model_hash(const json& doc) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (const unsigned char c : doc.dump()) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string hex_hash(std::uint64_t h) { return fmt::format("{:016x}", h); }

const std::vector<std::string>& scenario_names() {
    static const std::vector<std::string> names = {"pe-baseline",           "pe-slow-pursuer", "pe-noisy-pursuer",
                                                   "pe-fast-noisy-pursuer", "table1-case2",    "table1-case3"};
    return names;
}

json scenario(const std::string& name) {
    const auto& names = scenario_names();
    if (std::find(names.begin(), names.end(), name) == names.end()) {
        std::string list;
        for (const auto& n : names) list += (list.empty() ? "" : ", ") + n;
        throw Error(ErrorKind::UnknownScenario, fmt::format("unknown scenario '{}'; valid names: {}", name, list));
    }
    constexpr double dt = 0.1;
    Mat A, B;
    double_integrator_2d(dt, A, B);

    // Relative-state disturbance, velocity channels only. The per-player velocity
    // noise (2e-2 combined) enters through the input channel, hence the dt^2.
    Mat W = Mat::Zero(4, 4);
    W(2, 2) = W(3, 3) = dt * dt * 2e-2;
    Mat C = Mat::Zero(2, 4);
    C(0, 0) = C(1, 1) = 1.0;
    const Mat I2 = Mat::Identity(2, 2);
    Mat B1 = B, V1 = I2, V2 = I2, S = -8.0 * I2;

    if (name == "pe-slow-pursuer") {
        B1(3, 1) = 0.7 * dt;
    } else if (name == "pe-noisy-pursuer") {
        V1(1, 1) = 50.0;
    } else if (name == "pe-fast-noisy-pursuer") {
        B1(3, 1) = 1.5 * dt;
        V1(1, 1) = 50.0;
    } else if (name == "table1-case2") {
        V1 = 1e-6 * I2;
        V2 = 1e6 * I2;
        S = -2.6 * I2;
    } else if (name == "table1-case3") {
        V1 = 1e6 * I2;
        V2 = 1e-6 * I2;
        S = -1.3e5 * I2;
    }

    json doc;
    doc["scenario"] = name;
    doc["horizon"] = "infinite";
    doc["template"] = {{"name", "double_integrator_2d"}, {"dt", dt}};
    json mats = json::object();
    if (B1 != B) mats["B1"] = matrix_to_json(B1);
    mats["W"] = matrix_to_json(W);
    mats["C1"] = matrix_to_json(C);
    mats["C2"] = matrix_to_json(C);
    mats["V1"] = matrix_to_json(V1);
    mats["V2"] = matrix_to_json(V2);
    mats["Q"] = matrix_to_json(1e-3 * Mat::Identity(4, 4));
    mats["R"] = matrix_to_json(I2);
    mats["S"] = matrix_to_json(S);
    mats["Q_T"] = matrix_to_json(1e-3 * Mat::Identity(4, 4));
    mats["x0_mean"] = vector_to_json(Vec::Zero(4));
    mats["x0_cov"] = matrix_to_json(Mat::Zero(4, 4));
    doc["matrices"] = std::move(mats);
    return doc;
}

}  // namespace asymgame
