// Trace serialization: CSV with '#' header comments (schema version, config
// echo, seed, vehicle map) and '#' footer lines carrying simulation events.
#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "vmerge/sim_engine.hpp"

namespace vmerge {

inline constexpr const char* kTraceSchema = "vmerge-trace/1";

namespace detail {

inline std::string fmt9(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

} // namespace detail

/// Writes the trace as CSV. Row layout: time plus a fixed channel block per
/// vehicle; floats carry 9 significant digits.
inline void write_trace(const SimulationTrace& trace, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");

    const std::size_t n = trace.vehicle_count();
    out << "# " << kTraceSchema << "\n";
    out << "# seed: " << trace.seed << "\n";
    if (!trace.config_echo.empty()) out << "# config: " << trace.config_echo << "\n";
    out << "# vehicles:";
    for (std::size_t i = 0; i < n; ++i)
        out << ' ' << (i + 1) << '=' << trace.vehicles[i].id << '('
            << lane_letter(trace.vehicles[i].lane) << ')';
    out << "\n";

    out << "t";
    for (std::size_t i = 0; i < n; ++i) {
        const std::string k = std::to_string(i + 1);
        out << ",x_" << k << ",v_" << k << ",a_" << k << ",e_" << k << ",lane_" << k;
        if (trace.planar)
            out << ",s_" << k << ",r_" << k << ",dtheta_" << k << ",mu_" << k << ",px_" << k
                << ",py_" << k;
    }
    out << "\n";

    for (std::size_t row = 0; row < trace.samples(); ++row) {
        out << detail::fmt9(trace.time[row]);
        for (std::size_t i = 0; i < n; ++i) {
            const auto& ch = trace.vehicles[i];
            out << ',' << detail::fmt9(ch.x[row]) << ',' << detail::fmt9(ch.v[row]) << ','
                << detail::fmt9(ch.a[row]) << ',' << detail::fmt9(ch.e[row]) << ','
                << static_cast<int>(ch.lane);
            if (trace.planar)
                out << ',' << detail::fmt9(ch.s[row]) << ',' << detail::fmt9(ch.r[row]) << ','
                    << detail::fmt9(ch.dtheta[row]) << ',' << detail::fmt9(ch.mu[row]) << ','
                    << detail::fmt9(ch.px[row]) << ',' << detail::fmt9(ch.py[row]);
        }
        out << "\n";
    }

    for (const auto& ev : trace.events)
        out << "# event: " << event_name(ev.type) << " t=" << detail::fmt9(ev.t) << " "
            << ev.detail << "\n";
    if (trace.collided) out << "# status: collision\n";
    if (!out) throw std::runtime_error("write failure on '" + path + "'");
}

/// Parsed CSV trace: header metadata, column names, numeric rows, and the
/// footer event lines verbatim.
struct TraceTable {
    std::string schema;
    std::uint64_t seed = 0;
    std::string config_echo;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    std::vector<std::string> event_lines;
    bool collided = false;
};

inline TraceTable read_trace(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    TraceTable table;
    std::string line;
    bool header_done = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            const std::string body = line.substr(line.find_first_not_of("# "));
            if (!header_done && body.rfind("vmerge-trace", 0) == 0) table.schema = body;
            else if (body.rfind("seed: ", 0) == 0) table.seed = std::stoull(body.substr(6));
            else if (body.rfind("config: ", 0) == 0) table.config_echo = body.substr(8);
            else if (body.rfind("event: ", 0) == 0) table.event_lines.push_back(body.substr(7));
            else if (body == "status: collision") table.collided = true;
            continue;
        }
        std::stringstream ss(line);
        std::string cell;
        if (!header_done) {
            while (std::getline(ss, cell, ',')) table.columns.push_back(cell);
            header_done = true;
            continue;
        }
        std::vector<double> row;
        row.reserve(table.columns.size());
        while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
        if (row.size() != table.columns.size())
            throw std::runtime_error("malformed trace row in '" + path + "'");
        table.rows.push_back(std::move(row));
    }
    if (table.schema.empty()) throw std::runtime_error("missing trace schema header");
    return table;
}

} // namespace vmerge
