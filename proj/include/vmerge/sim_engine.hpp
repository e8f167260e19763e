// Deterministic fixed-step merging simulation: sequencing, topology,
// longitudinal control, optional planar (lateral) dynamics, and the
// evaluation metrics used by the experiment scenarios.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "vmerge/comm_topology.hpp"
#include "vmerge/lateral_control.hpp"
#include "vmerge/longitudinal_control.hpp"
#include "vmerge/stability_analysis.hpp"
#include "vmerge/virtual_axis.hpp"

namespace vmerge {

/// Speed/acceleration profile of the platoon leader.
struct LeaderProfile {
    enum class Kind { Constant, Sine, BrakeAccel };
    Kind kind = Kind::Constant;
    double v_init = 20.0;

    // Sine: v = v_init + amplitude * sin(omega * t)
    double amplitude = 3.0;
    double omega = 0.5; // rad/s

    // BrakeAccel: cruise, brake at brake_rate down to v_low, cruise, then
    // accelerate at accel_rate back to v_init.
    double brake_start = 13.0;
    double brake_rate = 2.0;
    double v_low = 10.0;
    double accel_start = 26.0;
    double accel_rate = 2.0;

    double brake_end() const { return brake_start + (v_init - v_low) / brake_rate; }
    double accel_end() const { return accel_start + (v_init - v_low) / accel_rate; }

    void validate(const ControllerConfig& cfg) const {
        if (!(v_init >= 0.0)) throw std::invalid_argument("leader v_init must be >= 0");
        if (kind == Kind::Sine) {
            if (!(amplitude >= 0.0 && omega > 0.0))
                throw std::invalid_argument("sine profile needs amplitude >= 0 and omega > 0");
            if (v_init - amplitude < 0.0)
                throw std::invalid_argument("sine profile would drive speed below zero");
            if (amplitude * omega > cfg.u_max || -amplitude * omega < cfg.u_min)
                throw std::invalid_argument("sine profile exceeds the acceleration bounds");
        } else if (kind == Kind::BrakeAccel) {
            if (!(brake_rate > 0.0 && accel_rate > 0.0))
                throw std::invalid_argument("brake/accel rates must be > 0");
            if (!(v_low >= 0.0 && v_low <= v_init))
                throw std::invalid_argument("need 0 <= v_low <= v_init");
            if (accel_start < brake_end())
                throw std::invalid_argument("acceleration phase overlaps the braking phase");
            if (brake_rate > -cfg.u_min || accel_rate > cfg.u_max)
                throw std::invalid_argument("profile rates exceed the acceleration bounds");
        }
    }
};

struct LeaderState {
    double v = 0.0;
    double a = 0.0;
};

/// Analytic leader speed and acceleration at time t.
inline LeaderState leader_state(const LeaderProfile& p, double t) {
    switch (p.kind) {
    case LeaderProfile::Kind::Constant:
        return {p.v_init, 0.0};
    case LeaderProfile::Kind::Sine:
        return {p.v_init + p.amplitude * std::sin(p.omega * t),
                p.amplitude * p.omega * std::cos(p.omega * t)};
    case LeaderProfile::Kind::BrakeAccel: {
        if (t < p.brake_start) return {p.v_init, 0.0};
        if (t < p.brake_end()) return {p.v_init - p.brake_rate * (t - p.brake_start), -p.brake_rate};
        if (t < p.accel_start) return {p.v_low, 0.0};
        if (t < p.accel_end()) return {p.v_low + p.accel_rate * (t - p.accel_start), p.accel_rate};
        return {p.v_init, 0.0};
    }
    }
    return {p.v_init, 0.0};
}

/// Seeded generator for the randomized initial layout: adjacent virtual gaps
/// of mean_gap +- jitter, lanes assigned by drawing ramp slots uniformly.
struct RandomInit {
    int n_mainline = 7;
    int n_ramp = 5;
    double mean_gap = 20.0;
    double jitter = 10.0;
};

struct VehicleInit {
    std::string id;
    double x = 0.0;
    double v = 20.0;
    double r0 = 0.0;       // planar mode only
    double dtheta0 = 0.0;
};

/// Lane centerlines plus lateral-controller settings; presence switches the
/// simulation into planar mode.
struct PlanarSetup {
    PathGeometry mainline_path;
    PathGeometry ramp_path;
    LateralWeights weights;
    double mu_limit = 0.5;          // |angular rate| clamp [rad/s]
    LateralPlant plant = LateralPlant::Exact;
};

struct ScenarioConfig {
    std::vector<VehicleInit> mainline;
    std::vector<VehicleInit> ramp;
    std::optional<RandomInit> random_init;
    ControllerConfig controller;
    LeaderProfile leader;
    double duration = 80.0;
    double dt = 1e-3;
    double control_period = 1e-3;
    double resequence_period = 1.0;
    double merge_point_x = 0.0; // coordinate of O on the virtual axis
    std::optional<PlanarSetup> planar;
    std::uint64_t seed = 0;
    double transient_cut = 20.0; // metrics ignore oscillation before this time

    void validate() const {
        controller.validate();
        leader.validate(controller);
        if (!(duration > 0.0)) throw std::invalid_argument("duration must be > 0");
        if (!(dt > 0.0)) throw std::invalid_argument("dt must be > 0");
        if (duration < dt) throw std::invalid_argument("duration must cover at least one step");
        check_multiple(control_period, "control period");
        check_multiple(resequence_period, "resequence period");
        if (random_init && (!mainline.empty() || !ramp.empty()))
            throw std::invalid_argument("random_init excludes explicit vehicle lists");
        if (!random_init && mainline.empty() && ramp.empty())
            throw std::invalid_argument("scenario has no vehicles");
        if (random_init && (random_init->n_mainline + random_init->n_ramp < 1))
            throw std::invalid_argument("random_init has no vehicles");
        if (planar) {
            planar->mainline_path.validate();
            planar->ramp_path.validate();
            planar->weights.validate();
            if (!(planar->mu_limit > 0.0))
                throw std::invalid_argument("angular-rate limit must be > 0");
        }
    }

private:
    void check_multiple(double period, const char* what) const {
        if (!(period >= dt)) throw std::invalid_argument(std::string(what) + " must be >= dt");
        const double ratio = period / dt;
        if (std::abs(ratio - std::round(ratio)) > 1e-9)
            throw std::invalid_argument(std::string(what) + " must be an integer multiple of dt");
    }
};

struct TraceEvent {
    enum class Type { MergePass, Saturation, FifoInsert, Collision, SmallAngle };
    Type type = Type::MergePass;
    double t = 0.0;
    std::string detail;
};

inline const char* event_name(TraceEvent::Type t) {
    switch (t) {
    case TraceEvent::Type::MergePass: return "merge_pass";
    case TraceEvent::Type::Saturation: return "saturation";
    case TraceEvent::Type::FifoInsert: return "fifo_insert";
    case TraceEvent::Type::Collision: return "collision";
    case TraceEvent::Type::SmallAngle: return "small_angle";
    }
    return "unknown";
}

/// Channels of one vehicle, sampled on the uniform time grid. The planar
/// channels are populated only in planar mode.
struct VehicleSeries {
    std::string id;
    Lane lane = Lane::Mainline;
    std::vector<double> x, v, a, e;
    std::vector<double> s, r, dtheta, mu, px, py;
};

struct SimulationTrace {
    double dt = 1e-3;
    double merge_point_x = 0.0;
    std::vector<double> time;
    std::vector<VehicleSeries> vehicles; // virtual-sequence order
    VirtualSequence seq;
    CommTopology topology;
    std::vector<TraceEvent> events;
    bool collided = false;
    bool planar = false;
    bool small_angle_violated = false;
    std::uint64_t seed = 0;
    std::string config_echo;
    int schema_version = 1;

    std::size_t samples() const { return time.size(); }
    std::size_t vehicle_count() const { return vehicles.size(); }
};

namespace detail {

inline double uniform01(std::mt19937_64& gen) {
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

inline std::pair<std::vector<VehicleInit>, std::vector<VehicleInit>>
materialize_vehicles(const ScenarioConfig& cfg) {
    if (!cfg.random_init) {
        auto mainline = cfg.mainline;
        auto ramp = cfg.ramp;
        for (std::size_t i = 0; i < mainline.size(); ++i)
            if (mainline[i].id.empty()) mainline[i].id = "m" + std::to_string(i + 1);
        for (std::size_t i = 0; i < ramp.size(); ++i)
            if (ramp[i].id.empty()) ramp[i].id = "r" + std::to_string(i + 1);
        return {mainline, ramp};
    }
    const auto& ri = *cfg.random_init;
    const int n = ri.n_mainline + ri.n_ramp;
    std::mt19937_64 gen(cfg.seed);
    std::vector<double> pos(static_cast<std::size_t>(n));
    for (int i = 1; i < n; ++i) {
        const double gap = ri.mean_gap + ri.jitter * (2.0 * uniform01(gen) - 1.0);
        pos[static_cast<std::size_t>(i)] = pos[static_cast<std::size_t>(i - 1)] - gap;
    }
    // Draw ramp slots by a partial Fisher-Yates over the sequence indices.
    std::vector<int> idx(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
    std::vector<bool> is_ramp(static_cast<std::size_t>(n), false);
    for (int k = 0; k < ri.n_ramp; ++k) {
        const int j = k + static_cast<int>(uniform01(gen) * (n - k));
        std::swap(idx[static_cast<std::size_t>(k)], idx[static_cast<std::size_t>(j)]);
        is_ramp[static_cast<std::size_t>(idx[static_cast<std::size_t>(k)])] = true;
    }
    std::vector<VehicleInit> mainline, ramp;
    for (int i = 0; i < n; ++i) {
        VehicleInit v;
        v.x = pos[static_cast<std::size_t>(i)];
        v.v = cfg.leader.v_init;
        if (is_ramp[static_cast<std::size_t>(i)]) {
            v.id = "r" + std::to_string(ramp.size() + 1);
            ramp.push_back(v);
        } else {
            v.id = "m" + std::to_string(mainline.size() + 1);
            mainline.push_back(v);
        }
    }
    return {mainline, ramp};
}

} // namespace detail

/// Runs the scenario with synchronous forward-Euler stepping. Commands are
/// recomputed every control period from the previous step's states and held
/// in between; identical configurations give bit-identical traces.
inline SimulationTrace run(const ScenarioConfig& cfg) {
    cfg.validate();
    auto [mainline_init, ramp_init] = detail::materialize_vehicles(cfg);

    std::vector<LaneVehicle> mains, ramps;
    for (const auto& v : mainline_init) mains.push_back({v.id, v.x, v.v});
    for (const auto& v : ramp_init) ramps.push_back({v.id, v.x, v.v});
    LanePool pool = pool_union(mains, ramps);
    VirtualSequence seq = sequence(pool);
    CommTopology topo = build_topology(seq.flags);
    const int n = static_cast<int>(seq.size());

    SimulationTrace trace;
    trace.dt = cfg.dt;
    trace.merge_point_x = cfg.merge_point_x;
    trace.seq = seq;
    trace.topology = topo;
    trace.planar = cfg.planar.has_value();
    trace.seed = cfg.seed;
    trace.vehicles.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        trace.vehicles[static_cast<std::size_t>(i)].id = seq.source_ids[static_cast<std::size_t>(i)];
        trace.vehicles[static_cast<std::size_t>(i)].lane = seq.flags[static_cast<std::size_t>(i)];
    }

    std::vector<VehicleState> states(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        states[static_cast<std::size_t>(i)] = {seq.positions[static_cast<std::size_t>(i)],
                                               seq.speeds[static_cast<std::size_t>(i)], 0.0};

    std::vector<WeightVector> weights(static_cast<std::size_t>(n));
    for (int i = 2; i <= n; ++i) {
        const int nk = static_cast<int>(predecessor_set(topo, i).size());
        weights[static_cast<std::size_t>(i - 1)] = make_weights(cfg.controller.scheme, nk);
    }

    // Planar state. The curvilinear abscissa is tied to the virtual axis:
    // s = x - merge_point_x + merge_arclength of the vehicle's own path.
    std::vector<CurvilinearState> lat(static_cast<std::size_t>(n));
    std::vector<LateralGains> lat_gains(static_cast<std::size_t>(n));
    std::vector<double> held_mu(static_cast<std::size_t>(n), 0.0);
    std::vector<bool> angle_warned(static_cast<std::size_t>(n), false);
    if (cfg.planar) {
        std::unordered_map<std::string, const VehicleInit*> init_by_id;
        for (const auto& v : mainline_init) init_by_id[v.id] = &v;
        for (const auto& v : ramp_init) init_by_id[v.id] = &v;
        for (int i = 0; i < n; ++i) {
            const auto& path = seq.flags[static_cast<std::size_t>(i)] == Lane::Mainline
                                   ? cfg.planar->mainline_path
                                   : cfg.planar->ramp_path;
            const auto* init = init_by_id.at(seq.source_ids[static_cast<std::size_t>(i)]);
            CurvilinearState c;
            c.s = states[static_cast<std::size_t>(i)].x - cfg.merge_point_x + path.merge_arclength;
            c.r = init->r0;
            c.dtheta = init->dtheta0;
            if (c.s < 0.0 || c.s > path.total_length())
                throw std::invalid_argument("vehicle '" + init->id + "' starts off its path");
            lat[static_cast<std::size_t>(i)] = c;
        }
    }

    const auto n_steps = static_cast<std::int64_t>(std::llround(cfg.duration / cfg.dt));
    const auto control_stride = static_cast<std::int64_t>(std::llround(cfg.control_period / cfg.dt));
    const auto reseq_stride =
        static_cast<std::int64_t>(std::llround(cfg.resequence_period / cfg.dt));

    std::vector<double> held_u(static_cast<std::size_t>(n), 0.0);
    std::vector<bool> saturated(static_cast<std::size_t>(n), false);
    std::vector<bool> rate_limited(static_cast<std::size_t>(n), false);

    auto record = [&](double t, const std::vector<double>& applied) {
        trace.time.push_back(t);
        for (int i = 0; i < n; ++i) {
            auto& ch = trace.vehicles[static_cast<std::size_t>(i)];
            const auto& st = states[static_cast<std::size_t>(i)];
            ch.x.push_back(st.x);
            ch.v.push_back(st.v);
            ch.a.push_back(applied[static_cast<std::size_t>(i)]);
            double e = 0.0;
            if (i >= 1) {
                const auto& preds = predecessor_set(topo, i + 1);
                std::vector<double> px;
                px.reserve(preds.size());
                for (int p : preds) px.push_back(states[static_cast<std::size_t>(p - 1)].x);
                e = spacing_error(st.x, st.v, px, weights[static_cast<std::size_t>(i)],
                                  cfg.controller);
            }
            ch.e.push_back(e);
            if (cfg.planar) {
                const auto& c = lat[static_cast<std::size_t>(i)];
                const auto& path = ch.lane == Lane::Mainline ? cfg.planar->mainline_path
                                                             : cfg.planar->ramp_path;
                const auto pose = to_global(path, c);
                ch.s.push_back(c.s);
                ch.r.push_back(c.r);
                ch.dtheta.push_back(c.dtheta);
                ch.mu.push_back(held_mu[static_cast<std::size_t>(i)]);
                ch.px.push_back(pose.x);
                ch.py.push_back(pose.y);
            }
        }
    };

    std::vector<double> applied(static_cast<std::size_t>(n), 0.0);
    for (std::int64_t step = 0; step < n_steps && !trace.collided; ++step) {
        const double t = static_cast<double>(step) * cfg.dt;

        if (step > 0 && step % reseq_stride == 0) {
            std::vector<LaneVehicle> ms, rs;
            for (int i = 0; i < n; ++i) {
                const LaneVehicle lv{seq.source_ids[static_cast<std::size_t>(i)],
                                     states[static_cast<std::size_t>(i)].x,
                                     states[static_cast<std::size_t>(i)].v};
                (seq.flags[static_cast<std::size_t>(i)] == Lane::Mainline ? ms : rs).push_back(lv);
            }
            std::sort(ms.begin(), ms.end(),
                      [](const LaneVehicle& a, const LaneVehicle& b) { return a.position > b.position; });
            std::sort(rs.begin(), rs.end(),
                      [](const LaneVehicle& a, const LaneVehicle& b) { return a.position > b.position; });
            const VirtualSequence reseq = resequence(seq, pool_union(ms, rs));
            // No arrivals mid-run, so the FIFO lock keeps the order fixed.
            seq.positions = reseq.positions;
            seq.speeds = reseq.speeds;
        }

        if (step % control_stride == 0) {
            for (int i = 2; i <= n; ++i) {
                const double u = control_command(states, i, predecessor_set(topo, i),
                                                 weights[static_cast<std::size_t>(i - 1)],
                                                 cfg.controller);
                held_u[static_cast<std::size_t>(i - 1)] = u;
                const bool sat = u <= cfg.controller.u_min || u >= cfg.controller.u_max;
                if (sat && !saturated[static_cast<std::size_t>(i - 1)])
                    trace.events.push_back({TraceEvent::Type::Saturation, t,
                                            trace.vehicles[static_cast<std::size_t>(i - 1)].id});
                saturated[static_cast<std::size_t>(i - 1)] = sat;
            }
        }
        held_u[0] = leader_state(cfg.leader, t).a;

        // Planar command update runs every integration step (rolling horizon).
        if (cfg.planar) {
            for (int i = 0; i < n; ++i) {
                auto& c = lat[static_cast<std::size_t>(i)];
                const auto& st = states[static_cast<std::size_t>(i)];
                const double cos_th = std::cos(c.dtheta);
                if (std::abs(c.dtheta) >= std::numbers::pi / 2.0 || cos_th <= 1e-6)
                    throw std::runtime_error("angular deviation reached 90 degrees; "
                                             "curvilinear projection is no longer valid");
                c.v_tilde = st.v / cos_th;
                auto& g = lat_gains[static_cast<std::size_t>(i)];
                if (c.v_tilde > 0.0 &&
                    std::abs(g.speed - c.v_tilde) > 1e-12 * std::max(1.0, c.v_tilde))
                    g = lateral_gains(c.v_tilde, cfg.planar->weights);
                const auto& path = seq.flags[static_cast<std::size_t>(i)] == Lane::Mainline
                                       ? cfg.planar->mainline_path
                                       : cfg.planar->ramp_path;
                const double kappa = path.curvature_at(std::min(c.s, path.total_length()));
                const double mu_raw = c.v_tilde > 0.0 ? lateral_command(c, g, kappa) : 0.0;
                const double mu = std::clamp(mu_raw, -cfg.planar->mu_limit, cfg.planar->mu_limit);
                if (mu != mu_raw && !rate_limited[static_cast<std::size_t>(i)])
                    trace.events.push_back({TraceEvent::Type::Saturation, t,
                                            trace.vehicles[static_cast<std::size_t>(i)].id +
                                                " angular-rate limit"});
                rate_limited[static_cast<std::size_t>(i)] = mu != mu_raw;
                held_mu[static_cast<std::size_t>(i)] = mu;

                if (std::abs(c.dtheta) > kSmallAngleLimitRad &&
                    !angle_warned[static_cast<std::size_t>(i)]) {
                    trace.events.push_back({TraceEvent::Type::SmallAngle, t,
                                            trace.vehicles[static_cast<std::size_t>(i)].id});
                    angle_warned[static_cast<std::size_t>(i)] = true;
                    trace.small_angle_violated = true;
                }
            }
        }

        // Synchronous Euler update; the speed floor adjusts the applied
        // acceleration so the Euler identities stay exact.
        std::vector<double> x_old(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            auto& st = states[static_cast<std::size_t>(i)];
            x_old[static_cast<std::size_t>(i)] = st.x;
            const double u = held_u[static_cast<std::size_t>(i)];
            const double a = (st.v + cfg.dt * u < 0.0) ? -st.v / cfg.dt : u;
            applied[static_cast<std::size_t>(i)] = a;
        }
        record(t, applied); // row for [t, t+dt): state at t, acceleration applied over the step
        for (int i = 0; i < n; ++i) {
            auto& st = states[static_cast<std::size_t>(i)];
            const double a = applied[static_cast<std::size_t>(i)];
            if (cfg.planar) {
                auto& c = lat[static_cast<std::size_t>(i)];
                const auto& path = seq.flags[static_cast<std::size_t>(i)] == Lane::Mainline
                                       ? cfg.planar->mainline_path
                                       : cfg.planar->ramp_path;
                const double kappa = path.curvature_at(std::min(c.s, path.total_length()));
                CurvilinearState next = lateral_step(c, held_mu[static_cast<std::size_t>(i)],
                                                     kappa, cfg.dt, cfg.planar->plant);
                // Keep the abscissa tied to the longitudinal axis exactly.
                next.s = c.s + cfg.dt * st.v;
                next.s = std::min(next.s, path.total_length());
                lat[static_cast<std::size_t>(i)] = next;
            }
            st.x += cfg.dt * st.v;
            st.v += cfg.dt * a;
            st.a = a;
        }

        const double t_next = static_cast<double>(step + 1) * cfg.dt;
        for (int i = 0; i < n; ++i) {
            if (x_old[static_cast<std::size_t>(i)] < cfg.merge_point_x &&
                states[static_cast<std::size_t>(i)].x >= cfg.merge_point_x)
                trace.events.push_back({TraceEvent::Type::MergePass, t_next,
                                        trace.vehicles[static_cast<std::size_t>(i)].id});
        }

        // Collision: physical same-lane contact, or contact past the merge
        // point where the lanes have joined. Cross-lane overlap upstream of O
        // is legal (the vehicles are on different roads).
        for (int i = 0; i + 1 < n && !trace.collided; ++i) {
            const auto& ahead = states[static_cast<std::size_t>(i)];
            for (int j = i + 1; j < n; ++j) {
                const auto& behind = states[static_cast<std::size_t>(j)];
                const bool same_lane = seq.flags[static_cast<std::size_t>(i)] ==
                                       seq.flags[static_cast<std::size_t>(j)];
                const bool merged = ahead.x >= cfg.merge_point_x && behind.x >= cfg.merge_point_x;
                if (!same_lane && !merged) continue;
                // Only the nearest relevant pair can make first contact.
                if (ahead.x - behind.x <= 0.0) {
                    trace.events.push_back(
                        {TraceEvent::Type::Collision, t_next,
                         trace.vehicles[static_cast<std::size_t>(i)].id + "/" +
                             trace.vehicles[static_cast<std::size_t>(j)].id});
                    trace.collided = true;
                }
                break;
            }
        }
        if (trace.collided || step + 1 == n_steps) {
            std::vector<double> final_a = applied;
            record(t_next, final_a);
        }
    }
    return trace;
}

/// Per-vehicle and aggregate evaluation quantities of a finished trace.
struct VehicleMetrics {
    double ptp_speed = 0.0;      // peak-to-peak speed after the transient cut
    double energy_abs = 0.0;
    double energy_dev = 0.0;
    bool verdict_abs = true;
    bool verdict_dev = true;
    double mean_abs_e_last10 = 0.0;
    double convergence_time = 0.0; // last time |e| >= 0.1 m (0 if always below)
};

struct MetricsReport {
    std::vector<VehicleMetrics> vehicles;
    bool all_verdicts_abs = true;
    bool all_verdicts_dev = true;
    double min_same_lane_gap = 0.0;
    double min_virtual_gap = 0.0;
    std::vector<double> void_time;     // 1 Hz samples
    std::vector<double> void_deficit;  // sum of max(0, desired - gap) over adjacent pairs
    std::vector<double> void_excess;   // sum of max(0, gap - desired)
    bool collided = false;
    std::size_t saturation_events = 0;
};

inline MetricsReport metrics(const SimulationTrace& trace, const CommTopology& topo,
                             const ScenarioConfig& cfg) {
    const std::size_t n = trace.vehicle_count();
    const std::size_t m = trace.samples();
    if (m < 2) throw std::invalid_argument("trace shorter than 2 samples");
    MetricsReport rep;
    rep.collided = trace.collided;
    for (const auto& ev : trace.events)
        if (ev.type == TraceEvent::Type::Saturation) ++rep.saturation_events;

    std::vector<std::vector<double>> speeds(n);
    std::vector<double> v_ref(n);
    for (std::size_t i = 0; i < n; ++i) {
        speeds[i] = trace.vehicles[i].v;
        v_ref[i] = trace.vehicles[i].v.front();
    }
    const EnergyReport energy = energy_report(trace.dt, speeds, v_ref, topo);
    rep.all_verdicts_abs = energy.all_verdicts_abs;
    rep.all_verdicts_dev = energy.all_verdicts_dev;

    const double t_end = trace.time.back();
    rep.vehicles.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto& vm = rep.vehicles[i];
        vm.energy_abs = energy.energy_abs[i];
        vm.energy_dev = energy.energy_dev[i];
        vm.verdict_abs = energy.verdict_abs[i];
        vm.verdict_dev = energy.verdict_dev[i];
        double vmin = std::numeric_limits<double>::infinity(), vmax = -vmin;
        double e_sum = 0.0;
        std::size_t e_count = 0;
        for (std::size_t k = 0; k < m; ++k) {
            const double t = trace.time[k];
            if (t >= cfg.transient_cut) {
                vmin = std::min(vmin, trace.vehicles[i].v[k]);
                vmax = std::max(vmax, trace.vehicles[i].v[k]);
            }
            if (t >= t_end - 10.0) {
                e_sum += std::abs(trace.vehicles[i].e[k]);
                ++e_count;
            }
            if (std::abs(trace.vehicles[i].e[k]) >= 0.1) vm.convergence_time = t;
        }
        vm.ptp_speed = vmax >= vmin ? vmax - vmin : 0.0;
        vm.mean_abs_e_last10 = e_count ? e_sum / static_cast<double>(e_count) : 0.0;
    }

    rep.min_virtual_gap = std::numeric_limits<double>::infinity();
    rep.min_same_lane_gap = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < m; ++k) {
        for (std::size_t i = 0; i + 1 < n; ++i) {
            const double gap = trace.vehicles[i].x[k] - trace.vehicles[i + 1].x[k];
            rep.min_virtual_gap = std::min(rep.min_virtual_gap, gap);
        }
        for (Lane lane : {Lane::Mainline, Lane::Ramp}) {
            double prev_x = 0.0;
            bool have_prev = false;
            for (std::size_t i = 0; i < n; ++i) {
                if (trace.vehicles[i].lane != lane) continue;
                if (have_prev)
                    rep.min_same_lane_gap =
                        std::min(rep.min_same_lane_gap, prev_x - trace.vehicles[i].x[k]);
                prev_x = trace.vehicles[i].x[k];
                have_prev = true;
            }
        }
    }

    // Void sampled at 1 Hz over adjacent virtual pairs against the desired
    // gap of the following vehicle.
    const auto stride = static_cast<std::size_t>(std::max(1LL, std::llround(1.0 / trace.dt)));
    for (std::size_t k = 0; k < m; k += stride) {
        double deficit = 0.0, excess = 0.0;
        for (std::size_t i = 0; i + 1 < n; ++i) {
            const double gap = trace.vehicles[i].x[k] - trace.vehicles[i + 1].x[k];
            const double desired =
                cfg.controller.standstill + cfg.controller.tau * trace.vehicles[i + 1].v[k];
            deficit += std::max(0.0, desired - gap);
            excess += std::max(0.0, gap - desired);
        }
        rep.void_time.push_back(trace.time[k]);
        rep.void_deficit.push_back(deficit);
        rep.void_excess.push_back(excess);
    }
    return rep;
}

/// Smallest control-area length (merge point distance ahead of the leader's
/// start) for which every vehicle is converged (|e| < 0.1 m) when it reaches
/// the merge point and no collision occurs. Bisection over [lo, hi];
/// assumes feasibility is monotone in the distance.
inline double min_control_range(ScenarioConfig cfg, double lo = 50.0, double hi = 1000.0,
                                double tol = 1.0) {
    auto feasible = [&](double dist) {
        ScenarioConfig c = cfg;
        c.merge_point_x = dist;
        const SimulationTrace trace = run(c);
        if (trace.collided) return false;
        for (std::size_t i = 1; i < trace.vehicle_count(); ++i) {
            bool passed = false;
            for (std::size_t k = 0; k < trace.samples(); ++k) {
                if (trace.vehicles[i].x[k] >= dist) {
                    passed = true;
                    if (std::abs(trace.vehicles[i].e[k]) >= 0.1) return false;
                    break;
                }
            }
            if (!passed) return false; // horizon too short to certify
        }
        return true;
    };
    if (!feasible(hi))
        throw std::runtime_error("upper control-range bound is not feasible");
    if (feasible(lo)) return lo;
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        (feasible(mid) ? hi : lo) = mid;
    }
    return hi;
}

} // namespace vmerge
