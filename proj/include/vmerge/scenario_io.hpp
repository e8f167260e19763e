// Scenario file parsing and serialization. Files are strict JSON documents;
// unknown keys are rejected and omitted controller fields fall back to the
// default experiment values.
#pragma once

#include <fstream>
#include <numbers>
#include <set>
#include <sstream>
#include <string>

#include <json.hpp>

#include "vmerge/sim_engine.hpp"

namespace vmerge {

class ScenarioError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

using nlohmann::json;

inline void require_keys(const json& obj, const std::string& where,
                         const std::set<std::string>& allowed) {
    for (const auto& [key, _] : obj.items())
        if (!allowed.count(key))
            throw ScenarioError(where + ": unknown key '" + key + "'");
}

inline double get_number(const json& obj, const std::string& where, const std::string& key,
                         double fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number())
        throw ScenarioError(where + "." + key + ": expected a number");
    return obj[key].get<double>();
}

inline std::vector<double> get_number_array(const json& obj, const std::string& where,
                                            const std::string& key) {
    if (!obj.contains(key)) return {};
    if (!obj[key].is_array())
        throw ScenarioError(where + "." + key + ": expected an array of numbers");
    std::vector<double> out;
    for (const auto& v : obj[key]) {
        if (!v.is_number()) throw ScenarioError(where + "." + key + ": expected a number");
        out.push_back(v.get<double>());
    }
    return out;
}

inline std::vector<VehicleInit> parse_lane(const json& obj, const std::string& where,
                                           const char* prefix, double default_speed) {
    require_keys(obj, where, {"positions", "speeds", "ids", "r0", "dtheta0_deg"});
    const auto positions = get_number_array(obj, where, "positions");
    if (positions.empty()) throw ScenarioError(where + ".positions: required and nonempty");
    const auto speeds = get_number_array(obj, where, "speeds");
    const auto r0 = get_number_array(obj, where, "r0");
    const auto dtheta0 = get_number_array(obj, where, "dtheta0_deg");
    std::vector<std::string> ids;
    if (obj.contains("ids")) {
        if (!obj["ids"].is_array()) throw ScenarioError(where + ".ids: expected an array");
        for (const auto& v : obj["ids"]) {
            if (!v.is_string()) throw ScenarioError(where + ".ids: expected strings");
            ids.push_back(v.get<std::string>());
        }
    }
    for (const auto* arr : {&speeds, &r0, &dtheta0})
        if (!arr->empty() && arr->size() != positions.size())
            throw ScenarioError(where + ": per-vehicle arrays must match positions length");
    if (!ids.empty() && ids.size() != positions.size())
        throw ScenarioError(where + ": per-vehicle arrays must match positions length");

    std::vector<VehicleInit> out;
    for (std::size_t i = 0; i < positions.size(); ++i) {
        VehicleInit v;
        v.id = ids.empty() ? prefix + std::to_string(i + 1) : ids[i];
        v.x = positions[i];
        v.v = speeds.empty() ? default_speed : speeds[i];
        v.r0 = r0.empty() ? 0.0 : r0[i];
        v.dtheta0 = dtheta0.empty() ? 0.0 : dtheta0[i] * std::numbers::pi / 180.0;
        out.push_back(v);
    }
    return out;
}

inline PathGeometry parse_path(const json& arr, double merge_s, const std::string& where) {
    if (!arr.is_array() || arr.empty())
        throw ScenarioError(where + ": expected a nonempty array of segments");
    PathGeometry path;
    path.merge_arclength = merge_s;
    for (const auto& seg : arr) {
        if (!seg.is_object()) throw ScenarioError(where + ": segments must be objects");
        require_keys(seg, where, {"length", "curvature"});
        PathSegment s;
        s.length = get_number(seg, where, "length", 0.0);
        s.curvature = get_number(seg, where, "curvature", 0.0);
        path.segments.push_back(s);
    }
    path.validate();
    return path;
}

} // namespace detail

inline ScenarioConfig parse_scenario_json(const nlohmann::json& doc) {
    using detail::get_number;
    using detail::require_keys;
    if (!doc.is_object()) throw ScenarioError("scenario: expected a JSON object");
    require_keys(doc, "scenario",
                 {"mainline", "ramp", "random", "controller", "leader", "sim", "path", "seed"});

    ScenarioConfig cfg;
    if (doc.contains("seed")) {
        if (!doc["seed"].is_number_unsigned())
            throw ScenarioError("scenario.seed: expected a non-negative integer");
        cfg.seed = doc["seed"].get<std::uint64_t>();
    }

    if (doc.contains("controller")) {
        const auto& c = doc["controller"];
        require_keys(c, "controller",
                     {"omega_e", "omega_v", "tau", "standstill", "u_min", "u_max", "scheme",
                      "flip_velocity_gain"});
        cfg.controller.omega_e = get_number(c, "controller", "omega_e", cfg.controller.omega_e);
        cfg.controller.omega_v = get_number(c, "controller", "omega_v", cfg.controller.omega_v);
        cfg.controller.tau = get_number(c, "controller", "tau", cfg.controller.tau);
        cfg.controller.standstill =
            get_number(c, "controller", "standstill", cfg.controller.standstill);
        cfg.controller.u_min = get_number(c, "controller", "u_min", cfg.controller.u_min);
        cfg.controller.u_max = get_number(c, "controller", "u_max", cfg.controller.u_max);
        if (c.contains("scheme")) {
            const auto s = c["scheme"].get<std::string>();
            if (s == "equal") cfg.controller.scheme = WeightScheme::Equal;
            else if (s == "geometric") cfg.controller.scheme = WeightScheme::Geometric;
            else throw ScenarioError("controller.scheme: expected 'equal' or 'geometric'");
        }
        if (c.contains("flip_velocity_gain")) {
            if (!c["flip_velocity_gain"].is_boolean())
                throw ScenarioError("controller.flip_velocity_gain: expected a boolean");
            cfg.controller.flip_velocity_gain = c["flip_velocity_gain"].get<bool>();
        }
    }

    if (doc.contains("leader")) {
        const auto& l = doc["leader"];
        require_keys(l, "leader",
                     {"kind", "v_init", "amplitude", "omega", "brake_start", "brake_rate", "v_low",
                      "accel_start", "accel_rate"});
        if (l.contains("kind")) {
            const auto s = l["kind"].get<std::string>();
            if (s == "constant") cfg.leader.kind = LeaderProfile::Kind::Constant;
            else if (s == "sine") cfg.leader.kind = LeaderProfile::Kind::Sine;
            else if (s == "brake_accel") cfg.leader.kind = LeaderProfile::Kind::BrakeAccel;
            else throw ScenarioError("leader.kind: expected constant|sine|brake_accel");
        }
        cfg.leader.v_init = get_number(l, "leader", "v_init", cfg.leader.v_init);
        cfg.leader.amplitude = get_number(l, "leader", "amplitude", cfg.leader.amplitude);
        cfg.leader.omega = get_number(l, "leader", "omega", cfg.leader.omega);
        cfg.leader.brake_start = get_number(l, "leader", "brake_start", cfg.leader.brake_start);
        cfg.leader.brake_rate = get_number(l, "leader", "brake_rate", cfg.leader.brake_rate);
        cfg.leader.v_low = get_number(l, "leader", "v_low", cfg.leader.v_low);
        cfg.leader.accel_start = get_number(l, "leader", "accel_start", cfg.leader.accel_start);
        cfg.leader.accel_rate = get_number(l, "leader", "accel_rate", cfg.leader.accel_rate);
    }

    if (doc.contains("sim")) {
        const auto& s = doc["sim"];
        require_keys(s, "sim",
                     {"duration", "dt", "control_period", "resequence_period", "merge_point_x",
                      "transient_cut"});
        cfg.duration = get_number(s, "sim", "duration", cfg.duration);
        cfg.dt = get_number(s, "sim", "dt", cfg.dt);
        cfg.control_period = get_number(s, "sim", "control_period", cfg.dt);
        cfg.resequence_period = get_number(s, "sim", "resequence_period", cfg.resequence_period);
        cfg.merge_point_x = get_number(s, "sim", "merge_point_x", cfg.merge_point_x);
        cfg.transient_cut = get_number(s, "sim", "transient_cut", cfg.transient_cut);
    }

    if (doc.contains("mainline"))
        cfg.mainline = detail::parse_lane(doc["mainline"], "mainline", "m", cfg.leader.v_init);
    if (doc.contains("ramp"))
        cfg.ramp = detail::parse_lane(doc["ramp"], "ramp", "r", cfg.leader.v_init);

    if (doc.contains("random")) {
        const auto& r = doc["random"];
        require_keys(r, "random", {"mainline", "ramp", "mean_gap", "jitter"});
        RandomInit ri;
        ri.n_mainline = static_cast<int>(get_number(r, "random", "mainline", 7));
        ri.n_ramp = static_cast<int>(get_number(r, "random", "ramp", 5));
        ri.mean_gap = get_number(r, "random", "mean_gap", ri.mean_gap);
        ri.jitter = get_number(r, "random", "jitter", ri.jitter);
        cfg.random_init = ri;
    }

    if (doc.contains("path")) {
        const auto& p = doc["path"];
        require_keys(p, "path",
                     {"mainline_segments", "ramp_segments", "mainline_merge_s", "ramp_merge_s",
                      "pi1", "pi2", "pi3", "mu_limit", "plant"});
        PlanarSetup planar;
        if (!p.contains("mainline_segments") || !p.contains("ramp_segments"))
            throw ScenarioError("path: mainline_segments and ramp_segments are required");
        planar.mainline_path =
            detail::parse_path(p["mainline_segments"], get_number(p, "path", "mainline_merge_s", 0.0),
                               "path.mainline_segments");
        planar.ramp_path = detail::parse_path(
            p["ramp_segments"], get_number(p, "path", "ramp_merge_s", 0.0), "path.ramp_segments");
        planar.weights.pi1 = get_number(p, "path", "pi1", 1.0);
        planar.weights.pi2 = get_number(p, "path", "pi2", 1.0);
        planar.weights.pi3 = get_number(p, "path", "pi3", 1.0);
        planar.mu_limit = get_number(p, "path", "mu_limit", planar.mu_limit);
        if (p.contains("plant")) {
            const auto s = p["plant"].get<std::string>();
            if (s == "exact") planar.plant = LateralPlant::Exact;
            else if (s == "linearized") planar.plant = LateralPlant::Linearized;
            else throw ScenarioError("path.plant: expected 'exact' or 'linearized'");
        }
        cfg.planar = planar;
    }

    try {
        cfg.validate();
    } catch (const std::invalid_argument& err) {
        throw ScenarioError(err.what());
    }
    return cfg;
}

/// Parses and validates a scenario file. Errors carry the offending field
/// path (semantic errors) or line/column (syntax errors).
inline ScenarioConfig parse_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ScenarioError("cannot open scenario file '" + path + "'");
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& err) {
        throw ScenarioError(std::string("scenario file is not valid JSON: ") + err.what());
    }
    return parse_scenario_json(doc);
}

/// Canonical single-line JSON echo of a configuration (trace headers).
inline std::string scenario_to_json(const ScenarioConfig& cfg) {
    nlohmann::json doc;
    auto lane_json = [](const std::vector<VehicleInit>& lane) {
        nlohmann::json obj;
        auto positions = nlohmann::json::array(), speeds = nlohmann::json::array(),
             ids = nlohmann::json::array();
        bool any_lateral = false;
        for (const auto& v : lane) {
            positions.push_back(v.x);
            speeds.push_back(v.v);
            ids.push_back(v.id);
            any_lateral = any_lateral || v.r0 != 0.0 || v.dtheta0 != 0.0;
        }
        obj["positions"] = positions;
        obj["speeds"] = speeds;
        obj["ids"] = ids;
        if (any_lateral) {
            auto r0 = nlohmann::json::array(), th0 = nlohmann::json::array();
            for (const auto& v : lane) {
                r0.push_back(v.r0);
                th0.push_back(v.dtheta0 * 180.0 / std::numbers::pi);
            }
            obj["r0"] = r0;
            obj["dtheta0_deg"] = th0;
        }
        return obj;
    };
    if (!cfg.mainline.empty()) doc["mainline"] = lane_json(cfg.mainline);
    if (!cfg.ramp.empty()) doc["ramp"] = lane_json(cfg.ramp);
    if (cfg.random_init) {
        doc["random"] = {{"mainline", cfg.random_init->n_mainline},
                         {"ramp", cfg.random_init->n_ramp},
                         {"mean_gap", cfg.random_init->mean_gap},
                         {"jitter", cfg.random_init->jitter}};
    }
    doc["controller"] = {
        {"omega_e", cfg.controller.omega_e},
        {"omega_v", cfg.controller.omega_v},
        {"tau", cfg.controller.tau},
        {"standstill", cfg.controller.standstill},
        {"u_min", cfg.controller.u_min},
        {"u_max", cfg.controller.u_max},
        {"scheme", cfg.controller.scheme == WeightScheme::Equal ? "equal" : "geometric"}};
    const char* kind = cfg.leader.kind == LeaderProfile::Kind::Constant ? "constant"
                       : cfg.leader.kind == LeaderProfile::Kind::Sine  ? "sine"
                                                                       : "brake_accel";
    doc["leader"] = {{"kind", kind}, {"v_init", cfg.leader.v_init}};
    if (cfg.leader.kind == LeaderProfile::Kind::Sine) {
        doc["leader"]["amplitude"] = cfg.leader.amplitude;
        doc["leader"]["omega"] = cfg.leader.omega;
    } else if (cfg.leader.kind == LeaderProfile::Kind::BrakeAccel) {
        doc["leader"]["brake_start"] = cfg.leader.brake_start;
        doc["leader"]["brake_rate"] = cfg.leader.brake_rate;
        doc["leader"]["v_low"] = cfg.leader.v_low;
        doc["leader"]["accel_start"] = cfg.leader.accel_start;
        doc["leader"]["accel_rate"] = cfg.leader.accel_rate;
    }
    doc["sim"] = {{"duration", cfg.duration},
                  {"dt", cfg.dt},
                  {"control_period", cfg.control_period},
                  {"resequence_period", cfg.resequence_period},
                  {"merge_point_x", cfg.merge_point_x}};
    doc["seed"] = cfg.seed;
    if (cfg.planar) {
        nlohmann::json segs_m = nlohmann::json::array(), segs_r = nlohmann::json::array();
        for (const auto& s : cfg.planar->mainline_path.segments)
            segs_m.push_back({{"length", s.length}, {"curvature", s.curvature}});
        for (const auto& s : cfg.planar->ramp_path.segments)
            segs_r.push_back({{"length", s.length}, {"curvature", s.curvature}});
        doc["path"] = {{"mainline_segments", segs_m},
                       {"ramp_segments", segs_r},
                       {"mainline_merge_s", cfg.planar->mainline_path.merge_arclength},
                       {"ramp_merge_s", cfg.planar->ramp_path.merge_arclength},
                       {"pi1", cfg.planar->weights.pi1},
                       {"pi2", cfg.planar->weights.pi2},
                       {"pi3", cfg.planar->weights.pi3},
                       {"mu_limit", cfg.planar->mu_limit}};
    }
    return doc.dump();
}

} // namespace vmerge
