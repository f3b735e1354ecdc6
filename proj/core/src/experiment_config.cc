// Copyright 2026 The Unravel Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "unravel/error.h"
#include "unravel/experiment.h"

namespace unravel {

using Json = nlohmann::ordered_json;

std::string_view to_string(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::Discrete1q:
            return "discrete-1q";
        case ExperimentKind::Discrete2q:
            return "discrete-2q";
        case ExperimentKind::ContinuousRf:
            return "continuous-rf";
        case ExperimentKind::Calibrate:
            return "calibrate";
    }
    return "?";
}

std::string_view to_string(ModeSelection m) {
    switch (m) {
        case ModeSelection::Exact:
            return "exact";
        case ModeSelection::Sampled:
            return "sampled";
        case ModeSelection::Both:
            return "both";
    }
    return "?";
}

std::string_view to_string(RfUnraveling u) {
    return u == RfUnraveling::Jump ? "jump" : "homodyne";
}

ExperimentKind parse_kind(std::string_view s) {
    for (auto k : {ExperimentKind::Discrete1q, ExperimentKind::Discrete2q, ExperimentKind::ContinuousRf,
                   ExperimentKind::Calibrate}) {
        if (s == to_string(k)) {
            return k;
        }
    }
    throw ConfigError("unknown experiment kind '" + std::string(s) + "'");
}

ModeSelection parse_mode(std::string_view s) {
    for (auto m : {ModeSelection::Exact, ModeSelection::Sampled, ModeSelection::Both}) {
        if (s == to_string(m)) {
            return m;
        }
    }
    throw ConfigError("unknown mode '" + std::string(s) + "' (expected exact, sampled or both)");
}

RfUnraveling parse_rf_unraveling(std::string_view s) {
    if (s == "jump") {
        return RfUnraveling::Jump;
    }
    if (s == "homodyne") {
        return RfUnraveling::Homodyne;
    }
    throw ConfigError("unknown continuous unraveling '" + std::string(s) + "' (expected jump or homodyne)");
}

int ExperimentConfig::qubits() const noexcept {
    switch (kind) {
        case ExperimentKind::Discrete1q:
        case ExperimentKind::ContinuousRf:
            return 1;
        case ExperimentKind::Discrete2q:
            return 2;
        case ExperimentKind::Calibrate:
            return n_qubits;
    }
    return n_qubits;
}

bool ExperimentConfig::mitigation_enabled() const noexcept {
    return mitigation.value_or(qubits() == 2);
}

ProtocolSpec ExperimentConfig::protocol_spec(Unraveling u) const {
    ProtocolSpec spec;
    spec.n_qubits = qubits();
    spec.omega = omega;
    spec.delta = delta;
    spec.coupling_j = kind == ExperimentKind::Discrete2q ? coupling_j : 0.0;
    spec.t1 = t1;
    spec.t2 = t2;
    spec.t_grid = t_grid;
    spec.unraveling = u;
    spec.shots_per_time = shots_per_time;
    spec.seed = seed;
    return spec;
}

RFParams ExperimentConfig::rf_params() const {
    RFParams p;
    p.omega = omega;
    p.delta = delta;
    p.gamma = gamma;
    p.dt = dt;
    p.t_max = t_max;
    p.n_traj = n_traj;
    p.seed = seed;
    p.record_every = record_every;
    p.start_excited = start_excited;
    return p;
}

void ExperimentConfig::validate() const {
    switch (kind) {
        case ExperimentKind::Discrete1q:
        case ExperimentKind::Discrete2q: {
            if (unravelings.empty()) {
                throw ConfigError("config: unravelings must not be empty");
            }
            std::set<Unraveling> seen(unravelings.begin(), unravelings.end());
            if (seen.size() != unravelings.size()) {
                throw ConfigError("config: duplicate unraveling");
            }
            for (auto u : unravelings) {
                protocol_spec(u).validate();
            }
            if (bootstrap_resamples != 0 && bootstrap_resamples < 100) {
                throw ConfigError("config: bootstrap_resamples must be 0 (disabled) or >= 100");
            }
            readout.validate();
            if (calibration_shots < 1) {
                throw ConfigError("config: calibration_shots must be >= 1");
            }
            break;
        }
        case ExperimentKind::ContinuousRf:
            rf_params().validate();
            if (n_traj < 2) {
                throw ConfigError("config: n_traj must be >= 2");
            }
            if (rf_unravelings.empty()) {
                throw ConfigError("config: rf_unravelings must not be empty");
            }
            break;
        case ExperimentKind::Calibrate:
            if (n_qubits != 1 && n_qubits != 2) {
                throw ConfigError("config: n_qubits must be 1 or 2");
            }
            readout.validate();
            if (calibration_shots < 1) {
                throw ConfigError("config: calibration_shots must be >= 1");
            }
            break;
    }
}

namespace {

const std::set<std::string> &allowed_keys(ExperimentKind kind) {
    static const std::set<std::string> discrete1 = {
        "kind",         "seed",      "output_dir", "omega",         "delta",
        "t1",           "t2",        "t_grid",     "t_final",       "grid_points",
        "unravelings",  "mode",      "mitigation", "shots_per_time", "bootstrap_resamples",
        "readout_p00",  "readout_p11", "readout_fidelity", "calibration_shots"};
    static const std::set<std::string> discrete2 = [] {
        auto s = discrete1;
        s.insert("coupling_j");
        return s;
    }();
    static const std::set<std::string> rf = {"kind",   "seed",         "output_dir",    "omega",
                                             "delta",  "gamma",        "dt",            "t_max",
                                             "n_traj", "record_every", "initial",       "rf_unravelings"};
    static const std::set<std::string> cal = {"kind",        "seed",        "output_dir",       "n_qubits",
                                              "readout_p00", "readout_p11", "readout_fidelity", "calibration_shots"};
    switch (kind) {
        case ExperimentKind::Discrete1q:
            return discrete1;
        case ExperimentKind::Discrete2q:
            return discrete2;
        case ExperimentKind::ContinuousRf:
            return rf;
        case ExperimentKind::Calibrate:
            return cal;
    }
    return cal;
}

class Reader {
   public:
    explicit Reader(const Json &j) : j_(j) {
    }

    bool has(const std::string &key) const {
        return j_.contains(key);
    }

    void require(const std::string &key) const {
        if (!has(key)) {
            throw ConfigError("config: missing required key '" + key + "'");
        }
    }

    double number(const std::string &key) const {
        const auto &v = j_.at(key);
        if (!v.is_number()) {
            throw ConfigError("config: '" + key + "' must be a number");
        }
        return v.get<double>();
    }

    std::uint64_t unsigned_int(const std::string &key) const {
        const auto &v = j_.at(key);
        if (!v.is_number_unsigned()) {
            throw ConfigError("config: '" + key + "' must be a non-negative integer");
        }
        return v.get<std::uint64_t>();
    }

    bool boolean(const std::string &key) const {
        const auto &v = j_.at(key);
        if (v.is_boolean()) {
            return v.get<bool>();
        }
        if (v.is_string() && (v == "on" || v == "off")) {
            return v == "on";
        }
        throw ConfigError("config: '" + key + "' must be true/false or \"on\"/\"off\"");
    }

    std::string string(const std::string &key) const {
        const auto &v = j_.at(key);
        if (!v.is_string()) {
            throw ConfigError("config: '" + key + "' must be a string");
        }
        return v.get<std::string>();
    }

    std::vector<double> numbers(const std::string &key) const {
        const auto &v = j_.at(key);
        if (!v.is_array()) {
            throw ConfigError("config: '" + key + "' must be an array of numbers");
        }
        std::vector<double> out;
        for (const auto &e : v) {
            if (!e.is_number()) {
                throw ConfigError("config: '" + key + "' must be an array of numbers");
            }
            out.push_back(e.get<double>());
        }
        return out;
    }

    std::vector<std::string> strings(const std::string &key) const {
        const auto &v = j_.at(key);
        if (!v.is_array()) {
            throw ConfigError("config: '" + key + "' must be an array of strings");
        }
        std::vector<std::string> out;
        for (const auto &e : v) {
            if (!e.is_string()) {
                throw ConfigError("config: '" + key + "' must be an array of strings");
            }
            out.push_back(e.get<std::string>());
        }
        return out;
    }

   private:
    const Json &j_;
};

void read_readout(const Reader &r, ExperimentConfig &c) {
    if (r.has("readout_fidelity")) {
        if (r.has("readout_p00") || r.has("readout_p11")) {
            throw ConfigError("config: readout_fidelity conflicts with readout_p00/readout_p11");
        }
        c.readout = ReadoutNoiseParams::from_fidelity(r.number("readout_fidelity"));
    } else {
        if (r.has("readout_p00")) {
            c.readout.p00 = r.number("readout_p00");
        }
        if (r.has("readout_p11")) {
            c.readout.p11 = r.number("readout_p11");
        }
    }
    if (r.has("calibration_shots")) {
        c.calibration_shots = r.unsigned_int("calibration_shots");
    }
}

ExperimentConfig from_json(const Json &j) {
    if (!j.is_object()) {
        throw ConfigError("config: top level must be a JSON object");
    }
    if (j.contains("config") && j.contains("software")) {
        return from_json(j.at("config"));
    }
    Reader r(j);
    r.require("kind");
    ExperimentConfig c;
    c.kind = parse_kind(r.string("kind"));
    const auto &allowed = allowed_keys(c.kind);
    for (const auto &item : j.items()) {
        if (!allowed.count(item.key())) {
            throw ConfigError("config: key '" + item.key() + "' is not valid for kind " +
                              std::string(to_string(c.kind)));
        }
    }
    if (r.has("seed")) {
        c.seed = r.unsigned_int("seed");
    }
    if (r.has("output_dir")) {
        c.output_dir = r.string("output_dir");
    }

    switch (c.kind) {
        case ExperimentKind::Discrete1q:
        case ExperimentKind::Discrete2q: {
            for (const char *key : {"omega", "delta", "t1", "t2"}) {
                r.require(key);
            }
            c.omega = r.number("omega");
            c.delta = r.number("delta");
            c.t1 = r.number("t1");
            c.t2 = r.number("t2");
            if (c.kind == ExperimentKind::Discrete2q) {
                r.require("coupling_j");
                c.coupling_j = r.number("coupling_j");
            }
            if (r.has("t_grid")) {
                if (r.has("t_final") || r.has("grid_points")) {
                    throw ConfigError("config: t_grid conflicts with t_final/grid_points");
                }
                c.t_grid = r.numbers("t_grid");
            } else {
                r.require("t_final");
                std::uint64_t points = r.has("grid_points") ? r.unsigned_int("grid_points") : 51;
                if (points < 2) {
                    throw ConfigError("config: grid_points must be >= 2");
                }
                c.t_grid = make_grid(r.number("t_final"), points, {c.t1, c.t2});
            }
            if (r.has("unravelings")) {
                c.unravelings.clear();
                for (const auto &s : r.strings("unravelings")) {
                    try {
                        c.unravelings.push_back(parse_unraveling(s));
                    } catch (const Error &e) {
                        throw ConfigError(std::string("config: ") + e.what());
                    }
                }
            }
            if (r.has("mode")) {
                c.mode = parse_mode(r.string("mode"));
            }
            if (c.mode != ModeSelection::Exact) {
                r.require("shots_per_time");
            }
            if (r.has("shots_per_time")) {
                c.shots_per_time = r.unsigned_int("shots_per_time");
            }
            if (r.has("mitigation")) {
                c.mitigation = r.boolean("mitigation");
            }
            if (r.has("bootstrap_resamples")) {
                c.bootstrap_resamples = r.unsigned_int("bootstrap_resamples");
            }
            read_readout(r, c);
            break;
        }
        case ExperimentKind::ContinuousRf: {
            for (const char *key : {"omega", "delta", "dt", "t_max", "n_traj"}) {
                r.require(key);
            }
            c.omega = r.number("omega");
            c.delta = r.number("delta");
            c.dt = r.number("dt");
            c.t_max = r.number("t_max");
            c.n_traj = r.unsigned_int("n_traj");
            if (r.has("gamma")) {
                c.gamma = r.number("gamma");
            }
            if (r.has("record_every")) {
                c.record_every = r.unsigned_int("record_every");
            }
            if (r.has("initial")) {
                auto s = r.string("initial");
                if (s != "ground" && s != "excited") {
                    throw ConfigError("config: initial must be \"ground\" or \"excited\"");
                }
                c.start_excited = s == "excited";
            }
            if (r.has("rf_unravelings")) {
                c.rf_unravelings.clear();
                for (const auto &s : r.strings("rf_unravelings")) {
                    c.rf_unravelings.push_back(parse_rf_unraveling(s));
                }
            }
            break;
        }
        case ExperimentKind::Calibrate: {
            r.require("n_qubits");
            c.n_qubits = static_cast<int>(r.unsigned_int("n_qubits"));
            read_readout(r, c);
            break;
        }
    }
    c.validate();
    return c;
}

}  // namespace

ExperimentConfig parse_config(std::string_view json_text) {
    Json j;
    try {
        j = Json::parse(json_text);
    } catch (const nlohmann::json::parse_error &e) {
        throw ConfigError(std::string("config: malformed JSON: ") + e.what());
    }
    return from_json(j);
}

ExperimentConfig load_config(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open config file " + path.string());
    }
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str());
}

std::string config_to_json(const ExperimentConfig &c) {
    Json j;
    j["kind"] = to_string(c.kind);
    j["seed"] = c.seed;
    j["output_dir"] = c.output_dir;
    switch (c.kind) {
        case ExperimentKind::Discrete1q:
        case ExperimentKind::Discrete2q: {
            j["omega"] = c.omega;
            j["delta"] = c.delta;
            if (c.kind == ExperimentKind::Discrete2q) {
                j["coupling_j"] = c.coupling_j;
            }
            j["t1"] = c.t1;
            j["t2"] = c.t2;
            j["t_grid"] = c.t_grid;
            Json us = Json::array();
            for (auto u : c.unravelings) {
                us.push_back(to_string(u));
            }
            j["unravelings"] = us;
            j["mode"] = to_string(c.mode);
            j["shots_per_time"] = c.shots_per_time;
            j["mitigation"] = c.mitigation_enabled();
            j["bootstrap_resamples"] = c.bootstrap_resamples;
            j["readout_p00"] = c.readout.p00;
            j["readout_p11"] = c.readout.p11;
            j["calibration_shots"] = c.calibration_shots;
            break;
        }
        case ExperimentKind::ContinuousRf: {
            j["omega"] = c.omega;
            j["delta"] = c.delta;
            j["gamma"] = c.gamma;
            j["dt"] = c.dt;
            j["t_max"] = c.t_max;
            j["n_traj"] = c.n_traj;
            j["record_every"] = c.record_every;
            j["initial"] = c.start_excited ? "excited" : "ground";
            Json us = Json::array();
            for (auto u : c.rf_unravelings) {
                us.push_back(to_string(u));
            }
            j["rf_unravelings"] = us;
            break;
        }
        case ExperimentKind::Calibrate:
            j["n_qubits"] = c.n_qubits;
            j["readout_p00"] = c.readout.p00;
            j["readout_p11"] = c.readout.p11;
            j["calibration_shots"] = c.calibration_shots;
            break;
    }
    return j.dump(2);
}

}  // namespace unravel
