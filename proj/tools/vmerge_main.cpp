// vmerge CLI: simulate merging scenarios, analyze string stability, sweep
// feasible gain regions, and replicate the built-in experiments.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <string>
#include <vector>

#include "vmerge/comm_topology.hpp"
#include "vmerge/plots.hpp"
#include "vmerge/scenario_io.hpp"
#include "vmerge/scenarios.hpp"
#include "vmerge/sim_engine.hpp"
#include "vmerge/stability_analysis.hpp"
#include "vmerge/svg_chart.hpp"
#include "vmerge/trace_io.hpp"
#include "vmerge/virtual_axis.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitConfig = 2;
constexpr int kExitCollision = 3;
constexpr int kExitInfeasible = 4;

namespace fs = std::filesystem;

std::vector<double> parse_number_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        if (cell.empty()) continue;
        out.push_back(std::stod(cell));
    }
    return out;
}

void write_metrics_csv(const vmerge::SimulationTrace& trace, const vmerge::MetricsReport& rep,
                       const std::string& path) {
    std::ofstream out(path);
    out << "seq_id,source_id,lane,ptp_speed,energy_abs,energy_dev,verdict_abs,verdict_dev,"
           "mean_abs_e_last10,convergence_time\n";
    for (std::size_t i = 0; i < rep.vehicles.size(); ++i) {
        const auto& vm = rep.vehicles[i];
        out << (i + 1) << ',' << trace.vehicles[i].id << ','
            << vmerge::lane_letter(trace.vehicles[i].lane) << ',' << vm.ptp_speed << ','
            << vm.energy_abs << ',' << vm.energy_dev << ',' << (vm.verdict_abs ? 1 : 0) << ','
            << (vm.verdict_dev ? 1 : 0) << ',' << vm.mean_abs_e_last10 << ','
            << vm.convergence_time << '\n';
    }
}

void write_voids_csv(const vmerge::MetricsReport& rep, const std::string& path) {
    std::ofstream out(path);
    out << "t,void_deficit,void_excess\n";
    for (std::size_t i = 0; i < rep.void_time.size(); ++i)
        out << rep.void_time[i] << ',' << rep.void_deficit[i] << ',' << rep.void_excess[i]
            << '\n';
}

void write_region_csv(const vmerge::RegionGrid& grid, const std::string& path) {
    std::ofstream out(path);
    out << "omega_e,omega_v,feasible\n";
    for (int r = 0; r < grid.rows; ++r)
        for (int c = 0; c < grid.cols; ++c)
            out << (c + 0.5) * grid.cell_w() << ',' << (r + 0.5) * grid.cell_h() << ','
                << (grid.cell(r, c) ? 1 : 0) << '\n';
}

int run_simulation(const vmerge::ScenarioConfig& cfg, const std::string& out_dir,
                   const std::string& name, bool plots) {
    fs::create_directories(out_dir);
    vmerge::SimulationTrace trace = vmerge::run(cfg);
    trace.config_echo = vmerge::scenario_to_json(cfg);
    vmerge::write_trace(trace, (fs::path(out_dir) / (name + "_trace.csv")).string());
    const vmerge::MetricsReport rep = vmerge::metrics(trace, trace.topology, cfg);
    write_metrics_csv(trace, rep, (fs::path(out_dir) / (name + "_metrics.csv")).string());
    write_voids_csv(rep, (fs::path(out_dir) / (name + "_voids.csv")).string());
    if (plots) {
        vmerge::render_state_plots(trace, out_dir, name);
        if (trace.vehicle_count() > 1) vmerge::render_spacing_plot(trace, out_dir, name);
        std::vector<double> energies;
        for (const auto& vm : rep.vehicles) energies.push_back(vm.energy_abs);
        vmerge::render_energy_chart(trace, energies, out_dir, name);
        if (trace.planar) vmerge::render_lateral_plots(trace, out_dir, name);
    }
    if (trace.collided) {
        std::cerr << "simulation ended with a collision event\n";
        return kExitCollision;
    }
    std::cout << "wrote " << name << "_trace.csv (" << trace.samples() << " samples, "
              << trace.vehicle_count() << " vehicles) to " << out_dir << "\n";
    return kExitOk;
}

int cmd_analyze(vmerge::WeightScheme scheme, double omega_e, double omega_v, double tau, int n,
                const std::string& csv_path) {
    const auto rep = vmerge::analyze_gains(scheme, omega_e, omega_v, tau, n);
    std::cout << "scheme:           "
              << (scheme == vmerge::WeightScheme::Equal ? "equal" : "geometric") << "\n"
              << "gains:            omega_e=" << omega_e << " omega_v=" << omega_v
              << " tau=" << tau << " N=" << n << "\n"
              << "locally stable:   " << (rep.locally_stable ? "yes" : "NO") << "\n";
    for (std::size_t k = 0; k < rep.per_rank.size(); ++k)
        std::cout << "||Q_" << (k + 1) << "||_inf:       " << rep.per_rank[k].value
                  << "  (argmax omega = " << rep.per_rank[k].argmax_omega << " rad/s)\n";
    std::cout << "per-rank bound:   " << (rep.per_rank_condition ? "holds" : "violated")
              << " (<= 1/N)\n"
              << "closed form:      margin = " << rep.closed_form.margin << " ("
              << (rep.closed_form.holds ? "holds" : "violated") << ")\n"
              << "sum condition:    sum = " << rep.sum.value << " ("
              << (rep.sum.holds ? "holds" : "violated") << ")\n";
    const bool feasible = rep.locally_stable && rep.closed_form.holds;
    std::cout << "verdict:          "
              << (!rep.locally_stable ? "locally unstable"
                  : feasible          ? "string stable"
                                      : "string unstable")
              << "\n";
    if (!csv_path.empty()) {
        std::ofstream out(csv_path);
        out << "k,hinf,argmax_omega\n";
        for (std::size_t k = 0; k < rep.per_rank.size(); ++k)
            out << (k + 1) << ',' << rep.per_rank[k].value << ',' << rep.per_rank[k].argmax_omega
                << '\n';
        out << "# margin," << rep.closed_form.margin << "\n# sum," << rep.sum.value << "\n";
    }
    return feasible ? kExitOk : kExitInfeasible;
}

int cmd_replicate(const std::string& which, const std::string& out_dir) {
    fs::create_directories(out_dir);
    using vmerge::WeightScheme;
    if (which == "fig6") {
        for (WeightScheme scheme : {WeightScheme::Equal, WeightScheme::Geometric}) {
            const std::string tag = scheme == WeightScheme::Equal ? "equal" : "geometric";
            for (double tau : {0.5, 1.0, 1.5}) {
                std::vector<vmerge::RegionGrid> grids;
                for (int n = 1; n <= 6; ++n) {
                    grids.push_back(vmerge::feasible_region(scheme, tau, n));
                    write_region_csv(grids.back(),
                                     (fs::path(out_dir) / ("fig6_" + tag + "_tau" +
                                                           std::to_string(tau).substr(0, 3) +
                                                           "_n" + std::to_string(n) + ".csv"))
                                         .string());
                }
                vmerge::write_region_panel(
                    (fs::path(out_dir) / ("fig6_" + tag + "_tau" +
                                          std::to_string(tau).substr(0, 3) + ".svg"))
                        .string(),
                    "Feasible gain region (" + tag + ", tau=" + std::to_string(tau).substr(0, 3) +
                        " s)",
                    grids);
            }
        }
        std::cout << "wrote feasible-region panels to " << out_dir << "\n";
        return kExitOk;
    }
    if (which == "fig8" || which == "fig9") {
        const auto scheme = which == "fig8" ? WeightScheme::Equal : WeightScheme::Geometric;
        auto cfg = vmerge::twelve_cav_scenario(scheme);
        vmerge::SimulationTrace trace = vmerge::run(cfg);
        trace.config_echo = vmerge::scenario_to_json(cfg);
        vmerge::write_trace(trace, (fs::path(out_dir) / (which + "_trace.csv")).string());
        const auto rep = vmerge::metrics(trace, trace.topology, cfg);
        write_metrics_csv(trace, rep, (fs::path(out_dir) / (which + "_metrics.csv")).string());
        write_voids_csv(rep, (fs::path(out_dir) / (which + "_voids.csv")).string());
        vmerge::render_state_plots(trace, out_dir, which);
        return trace.collided ? kExitCollision : kExitOk;
    }
    if (which == "fig10") {
        for (WeightScheme scheme : {WeightScheme::Equal, WeightScheme::Geometric}) {
            const std::string tag =
                scheme == WeightScheme::Equal ? "fig10_case1" : "fig10_case2";
            auto cfg = vmerge::twelve_cav_scenario(scheme);
            vmerge::SimulationTrace trace = vmerge::run(cfg);
            const auto rep = vmerge::metrics(trace, trace.topology, cfg);
            std::vector<double> energies;
            for (const auto& vm : rep.vehicles) energies.push_back(vm.energy_abs);
            vmerge::render_energy_chart(trace, energies, out_dir, tag);
            write_metrics_csv(trace, rep, (fs::path(out_dir) / (tag + "_metrics.csv")).string());
        }
        std::cout << "wrote energy charts to " << out_dir << "\n";
        return kExitOk;
    }
    if (which == "fig11") {
        auto cfg = vmerge::extreme_four_cav_scenario();
        vmerge::SimulationTrace trace = vmerge::run(cfg);
        trace.config_echo = vmerge::scenario_to_json(cfg);
        vmerge::write_trace(trace, (fs::path(out_dir) / "fig11_trace.csv").string());
        const auto rep = vmerge::metrics(trace, trace.topology, cfg);
        write_metrics_csv(trace, rep, (fs::path(out_dir) / "fig11_metrics.csv").string());
        vmerge::render_state_plots(trace, out_dir, "fig11");
        vmerge::render_spacing_plot(trace, out_dir, "fig11");
        std::vector<double> energies;
        for (const auto& vm : rep.vehicles) energies.push_back(vm.energy_abs);
        vmerge::render_energy_chart(trace, energies, out_dir, "fig11");
        return trace.collided ? kExitCollision : kExitOk;
    }
    if (which == "fig13") {
        auto cfg = vmerge::lateral_arc_scenario();
        vmerge::SimulationTrace trace = vmerge::run(cfg);
        trace.config_echo = vmerge::scenario_to_json(cfg);
        vmerge::write_trace(trace, (fs::path(out_dir) / "fig13_trace.csv").string());
        vmerge::render_lateral_plots(trace, out_dir, "fig13");
        return trace.collided ? kExitCollision : kExitOk;
    }
    std::cerr << "unknown replicate target '" << which
              << "' (expected fig6|fig8|fig9|fig10|fig11|fig13)\n";
    return kExitUsage;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"virtual-rotation merging control simulator and analysis toolkit"};
    app.require_subcommand(1);

    // simulate
    auto* sim = app.add_subcommand("simulate", "run a scenario file");
    std::string cfg_path, out_dir = "out", sim_name = "sim";
    bool plots = false;
    sim->add_option("--config", cfg_path, "scenario JSON file")->required();
    sim->add_option("--out", out_dir, "output directory");
    sim->add_option("--name", sim_name, "output basename");
    sim->add_flag("--plots", plots, "emit SVG panels next to the trace");

    // analyze
    auto* ana = app.add_subcommand("analyze", "string-stability report for one gain set");
    std::string scheme_name = "equal", ana_csv;
    double omega_e = 1.4, omega_v = 0.3, tau = 1.0;
    int n_preds = 1;
    ana->add_option("--scheme", scheme_name, "equal|geometric");
    ana->add_option("--omega-e", omega_e, "spacing-error gain");
    ana->add_option("--omega-v", omega_v, "velocity-deviation gain");
    ana->add_option("--tau", tau, "time gap [s]");
    ana->add_option("--n", n_preds, "number of active predecessors")->check(CLI::PositiveNumber);
    ana->add_option("--csv", ana_csv, "also write a CSV report");

    // region
    auto* reg = app.add_subcommand("region", "feasible gain region grid");
    std::string reg_scheme = "equal", reg_out = "out";
    double reg_tau = 1.0, reg_we_max = 3.0, reg_wv_max = 1.5;
    int reg_n = 1, reg_cols = 60, reg_rows = 30;
    reg->add_option("--scheme", reg_scheme, "equal|geometric");
    reg->add_option("--tau", reg_tau, "time gap [s]");
    reg->add_option("--n", reg_n, "number of active predecessors")->check(CLI::PositiveNumber);
    reg->add_option("--omega-e-max", reg_we_max, "grid extent for omega_e");
    reg->add_option("--omega-v-max", reg_wv_max, "grid extent for omega_v");
    reg->add_option("--cols", reg_cols, "grid columns");
    reg->add_option("--rows", reg_rows, "grid rows");
    reg->add_option("--out", reg_out, "output directory");

    // sequence
    auto* seq_cmd = app.add_subcommand("sequence", "print the virtual following order as CSV");
    std::string seq_main, seq_ramp, seq_main_v, seq_ramp_v;
    seq_cmd->add_option("--mainline", seq_main, "comma-separated mainline positions");
    seq_cmd->add_option("--ramp", seq_ramp, "comma-separated ramp positions");
    seq_cmd->add_option("--mainline-speeds", seq_main_v, "optional mainline speeds");
    seq_cmd->add_option("--ramp-speeds", seq_ramp_v, "optional ramp speeds");

    // topology
    auto* topo_cmd = app.add_subcommand("topology", "print adjacency and predecessor sets");
    std::string flags_text;
    topo_cmd->add_option("--flags", flags_text, "lane flags, e.g. MRMMR or 10110")->required();

    // replicate
    auto* rep_cmd = app.add_subcommand("replicate", "run a built-in experiment");
    std::string rep_which, rep_out = "out";
    rep_cmd->add_option("which", rep_which, "fig6|fig8|fig9|fig10|fig11|fig13")->required();
    rep_cmd->add_option("--out", rep_out, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (sim->parsed()) {
            const auto cfg = vmerge::parse_scenario(cfg_path);
            return run_simulation(cfg, out_dir, sim_name, plots);
        }
        if (ana->parsed()) {
            if (scheme_name != "equal" && scheme_name != "geometric") {
                std::cerr << "--scheme must be equal or geometric\n";
                return kExitUsage;
            }
            const auto scheme = scheme_name == "equal" ? vmerge::WeightScheme::Equal
                                                       : vmerge::WeightScheme::Geometric;
            return cmd_analyze(scheme, omega_e, omega_v, tau, n_preds, ana_csv);
        }
        if (reg->parsed()) {
            if (reg_scheme != "equal" && reg_scheme != "geometric") {
                std::cerr << "--scheme must be equal or geometric\n";
                return kExitUsage;
            }
            const auto scheme = reg_scheme == "equal" ? vmerge::WeightScheme::Equal
                                                      : vmerge::WeightScheme::Geometric;
            const auto grid =
                vmerge::feasible_region(scheme, reg_tau, reg_n, reg_we_max, reg_wv_max, reg_cols,
                                        reg_rows);
            fs::create_directories(reg_out);
            write_region_csv(grid, (fs::path(reg_out) / "region.csv").string());
            vmerge::write_region_panel((fs::path(reg_out) / "region.svg").string(),
                                       "Feasible gain region", {grid});
            std::cout << "wrote region.csv and region.svg to " << reg_out << "\n";
            return kExitOk;
        }
        if (seq_cmd->parsed()) {
            const auto xm = parse_number_list(seq_main);
            const auto xr = parse_number_list(seq_ramp);
            const auto vm = parse_number_list(seq_main_v);
            const auto vr = parse_number_list(seq_ramp_v);
            std::vector<vmerge::LaneVehicle> mains, ramps;
            for (std::size_t i = 0; i < xm.size(); ++i)
                mains.push_back({"m" + std::to_string(i + 1), xm[i],
                                 i < vm.size() ? vm[i] : 20.0});
            for (std::size_t i = 0; i < xr.size(); ++i)
                ramps.push_back({"r" + std::to_string(i + 1), xr[i],
                                 i < vr.size() ? vr[i] : 20.0});
            const auto seq = vmerge::sequence(vmerge::pool_union(mains, ramps));
            std::cout << "seq_id,source_id,lane,position,speed\n";
            for (std::size_t i = 0; i < seq.size(); ++i)
                std::cout << seq.seq_ids[i] << ',' << seq.source_ids[i] << ','
                          << vmerge::lane_letter(seq.flags[i]) << ',' << seq.positions[i] << ','
                          << seq.speeds[i] << '\n';
            return kExitOk;
        }
        if (topo_cmd->parsed()) {
            std::vector<vmerge::Lane> flags;
            for (char c : flags_text) {
                if (c == 'M' || c == 'm' || c == '1') flags.push_back(vmerge::Lane::Mainline);
                else if (c == 'R' || c == 'r' || c == '0') flags.push_back(vmerge::Lane::Ramp);
                else {
                    std::cerr << "flag characters must be M/R or 1/0\n";
                    return kExitUsage;
                }
            }
            const auto topo = vmerge::build_topology(flags);
            std::cout << "adjacency (row i -> column j means j listens to i):\n";
            for (int i = 1; i <= topo.n; ++i) {
                for (int j = 1; j <= topo.n; ++j)
                    std::cout << int(topo.adjacency[i - 1][j - 1])
                              << (j == topo.n ? '\n' : ' ');
            }
            std::cout << "predecessors (nearest first):\n";
            for (int j = 1; j <= topo.n; ++j) {
                std::cout << j << ':';
                for (int p : vmerge::predecessor_set(topo, j)) std::cout << ' ' << p;
                std::cout << '\n';
            }
            return kExitOk;
        }
        if (rep_cmd->parsed()) return cmd_replicate(rep_which, rep_out);
    } catch (const vmerge::ScenarioError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    return kExitUsage;
}
