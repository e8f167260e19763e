// Maps traces, energy reports, and gain-region grids onto the SVG charts the
// replicate subcommands emit.
#pragma once

#include <filesystem>
#include <numbers>
#include <string>
#include <vector>

#include "vmerge/svg_chart.hpp"
#include "vmerge/trace_io.hpp"

namespace vmerge {

namespace detail {

inline std::string join_path(const std::string& dir, const std::string& name) {
    return (std::filesystem::path(dir) / name).string();
}

inline Series channel_series(const SimulationTrace& trace, std::size_t i,
                             const std::vector<double>& values) {
    return Series{trace.vehicles[i].id, trace.time, values};
}

} // namespace detail

/// Four state panels: virtual-axis positions, speeds, accelerations, and the
/// mainline-lane positions. Returns the written file paths.
inline std::vector<std::string> render_state_plots(const SimulationTrace& trace,
                                                   const std::string& dir,
                                                   const std::string& prefix) {
    std::vector<Series> pos, spd, acc, lane_pos;
    for (std::size_t i = 0; i < trace.vehicle_count(); ++i) {
        pos.push_back(detail::channel_series(trace, i, trace.vehicles[i].x));
        spd.push_back(detail::channel_series(trace, i, trace.vehicles[i].v));
        acc.push_back(detail::channel_series(trace, i, trace.vehicles[i].a));
        if (trace.vehicles[i].lane == Lane::Mainline)
            lane_pos.push_back(detail::channel_series(trace, i, trace.vehicles[i].x));
    }
    std::vector<std::string> files;
    files.push_back(detail::join_path(dir, prefix + "_position_z.svg"));
    write_line_chart(files.back(), "Platoon position on the virtual axis", "t [s]", "x [m]", pos);
    files.push_back(detail::join_path(dir, prefix + "_speed.svg"));
    write_line_chart(files.back(), "Speed", "t [s]", "v [m/s]", spd);
    files.push_back(detail::join_path(dir, prefix + "_accel.svg"));
    write_line_chart(files.back(), "Acceleration", "t [s]", "a [m/s^2]", acc);
    files.push_back(detail::join_path(dir, prefix + "_position_mainline.svg"));
    if (!lane_pos.empty())
        write_line_chart(files.back(), "Mainline-lane positions", "t [s]", "x [m]", lane_pos);
    else
        files.pop_back();
    return files;
}

/// Spacing-error panel (deviation from the target spacing).
inline std::string render_spacing_plot(const SimulationTrace& trace, const std::string& dir,
                                       const std::string& prefix) {
    std::vector<Series> err;
    for (std::size_t i = 1; i < trace.vehicle_count(); ++i)
        err.push_back(detail::channel_series(trace, i, trace.vehicles[i].e));
    const std::string file = detail::join_path(dir, prefix + "_spacing_error.svg");
    write_line_chart(file, "Deviation from target spacing", "t [s]", "e [m]", err);
    return file;
}

/// Per-vehicle energy bars colored by source lane.
inline std::string render_energy_chart(const SimulationTrace& trace,
                                       const std::vector<double>& energies,
                                       const std::string& dir, const std::string& prefix) {
    std::vector<std::string> labels, colors;
    for (std::size_t i = 0; i < trace.vehicle_count(); ++i) {
        labels.push_back(trace.vehicles[i].id);
        colors.push_back(trace.vehicles[i].lane == Lane::Mainline ? "#d62728" : "#1f77b4");
    }
    const std::string file = detail::join_path(dir, prefix + "_energy.svg");
    write_bar_chart(file, "Squared L2 norm of absolute velocity", "energy [m^2/s]", labels,
                    energies, colors);
    return file;
}

/// Lateral panels: lateral deviation and angular deviation over time.
inline std::vector<std::string> render_lateral_plots(const SimulationTrace& trace,
                                                     const std::string& dir,
                                                     const std::string& prefix) {
    std::vector<Series> r_series, th_series;
    for (std::size_t i = 0; i < trace.vehicle_count(); ++i) {
        if (trace.vehicles[i].r.empty()) continue;
        r_series.push_back(detail::channel_series(trace, i, trace.vehicles[i].r));
        std::vector<double> deg;
        deg.reserve(trace.vehicles[i].dtheta.size());
        for (double th : trace.vehicles[i].dtheta) deg.push_back(th * 180.0 / std::numbers::pi);
        th_series.push_back(Series{trace.vehicles[i].id, trace.time, deg});
    }
    std::vector<std::string> files;
    files.push_back(detail::join_path(dir, prefix + "_lateral_deviation.svg"));
    write_line_chart(files.back(), "Lateral deviation", "t [s]", "r [m]", r_series);
    files.push_back(detail::join_path(dir, prefix + "_angular_deviation.svg"));
    write_line_chart(files.back(), "Angular deviation", "t [s]", "dtheta [deg]", th_series);
    return files;
}

} // namespace vmerge
