// Pinned experiment scenarios: the 12-CAV oscillating-leader run, the 4-CAV
// extreme spacing test, the curved-ramp lateral run, and the two-vehicle
// frequency-response probe.
#pragma once

#include <numbers>

#include "vmerge/sim_engine.hpp"

namespace vmerge {

/// 12 CAVs (7 mainline, 5 ramp), sine leader, default gains; the merge point
/// sits 600 m ahead of the lead vehicle.
inline ScenarioConfig twelve_cav_scenario(WeightScheme scheme = WeightScheme::Equal) {
    ScenarioConfig cfg;
    const std::vector<double> xm = {0, -30, -46, -68, -89, -165, -186};
    const std::vector<double> xr = {-20, -109, -132, -154, -198};
    for (std::size_t i = 0; i < xm.size(); ++i)
        cfg.mainline.push_back({"m" + std::to_string(i + 1), xm[i], 20.0});
    for (std::size_t i = 0; i < xr.size(); ++i)
        cfg.ramp.push_back({"r" + std::to_string(i + 1), xr[i], 20.0});
    cfg.controller.scheme = scheme;
    cfg.leader.kind = LeaderProfile::Kind::Sine;
    cfg.leader.v_init = 20.0;
    cfg.leader.amplitude = 3.0;
    cfg.leader.omega = 0.5;
    cfg.duration = 80.0;
    cfg.merge_point_x = 600.0;
    return cfg;
}

/// 4 CAVs starting inside the safety envelope (virtual gaps 2/6/1 m) with a
/// brake-then-accelerate leader.
inline ScenarioConfig extreme_four_cav_scenario(double duration = 40.0) {
    ScenarioConfig cfg;
    cfg.mainline = {{"m1", 0.0, 20.0}, {"m2", -8.0, 20.0}};
    cfg.ramp = {{"r1", -2.0, 20.0}, {"r2", -9.0, 20.0}};
    cfg.leader.kind = LeaderProfile::Kind::BrakeAccel;
    cfg.leader.v_init = 20.0;
    cfg.leader.brake_start = 13.0;
    cfg.leader.brake_rate = 2.0;
    cfg.leader.v_low = 10.0;
    cfg.leader.accel_start = 26.0;
    cfg.leader.accel_rate = 2.0;
    cfg.duration = duration;
    cfg.merge_point_x = 600.0;
    return cfg;
}

/// Single ramp CAV entering a 300 m circular ramp arc (R_c = 300 m) that
/// joins the straight mainline tangentially at the merge point, with an
/// initial lateral offset of 1 m and 5 degrees of heading error.
inline ScenarioConfig lateral_arc_scenario(double radius = 300.0, double arc_length = 300.0,
                                           double duration = 25.0) {
    ScenarioConfig cfg;
    cfg.ramp = {{"r1", -arc_length, 20.0, 1.0, 5.0 * std::numbers::pi / 180.0}};
    cfg.leader.kind = LeaderProfile::Kind::Constant;
    cfg.leader.v_init = 20.0;
    cfg.duration = duration;
    cfg.merge_point_x = 0.0;

    PlanarSetup planar;
    planar.ramp_path.segments = {{arc_length, 1.0 / radius}, {400.0, 0.0}};
    planar.ramp_path.merge_arclength = arc_length;
    planar.mainline_path.segments = {{arc_length + 400.0, 0.0}};
    planar.mainline_path.merge_arclength = arc_length;
    cfg.planar = planar;
    return cfg;
}

/// Two-vehicle chain probing the frequency response: leader speed
/// v_init + amplitude * sin(omega t), follower at equilibrium spacing.
inline ScenarioConfig frequency_probe_scenario(double omega, double amplitude, double duration) {
    ScenarioConfig cfg;
    cfg.mainline = {{"m1", 0.0, 20.0}, {"m2", -25.0, 20.0}};
    cfg.leader.kind = LeaderProfile::Kind::Sine;
    cfg.leader.v_init = 20.0;
    cfg.leader.amplitude = amplitude;
    cfg.leader.omega = omega;
    cfg.duration = duration;
    cfg.merge_point_x = 1e6; // keep the merge far ahead; this probe is 1-D
    return cfg;
}

} // namespace vmerge
