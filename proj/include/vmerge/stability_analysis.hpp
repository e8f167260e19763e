// Frequency-domain string-stability analysis of the longitudinal controller:
// the per-rank transfer functions Q_k(s) = P_k(s)/J_k(s), their H-infinity
// norms, the closed-form feasibility conditions for both weight schemes, and
// the L2-energy verification of the time-domain definition.
#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "vmerge/comm_topology.hpp"
#include "vmerge/longitudinal_control.hpp"

namespace vmerge {

/// Fixed ingredients of the Q_k transfer functions for one vehicle:
///   J(s)   = s^2 + omega_e (1 + tau_bar s) - omega_v s          (common denominator)
///   P_k(s) = omega_e alpha_b[k] - omega_v gamma_b[k] s + alpha_f[k] s^2
/// with tau_bar = tau * sum_k alpha_b[k] * k.
struct TransferSpec {
    double omega_e = 1.4;
    double omega_v = 0.3;
    double tau = 1.0;
    WeightVector weights;

    int n_preds() const { return static_cast<int>(weights.size()); }

    /// Weighted mean predecessor rank sum_k alpha_b[k] * k.
    double theta() const {
        double t = 0.0;
        for (std::size_t k = 0; k < weights.size(); ++k) t += weights.alpha_b[k] * (k + 1);
        return t;
    }

    double tau_bar() const { return tau * theta(); }

    static TransferSpec make(WeightScheme scheme, double omega_e, double omega_v, double tau,
                             int n_preds) {
        return TransferSpec{omega_e, omega_v, tau, make_weights(scheme, n_preds)};
    }
};

/// Q_k(j*omega) for the rank-k predecessor path (k is 1-based).
inline std::complex<double> q_eval(const TransferSpec& spec, int k, double omega) {
    if (k < 1 || k > spec.n_preds()) throw std::out_of_range("rank k out of range");
    if (!(omega >= 0.0)) throw std::invalid_argument("omega must be >= 0");
    const double ab = spec.weights.alpha_b[k - 1];
    const double af = spec.weights.alpha_f[k - 1];
    const double gb = spec.weights.gamma_b[k - 1];
    const std::complex<double> num(spec.omega_e * ab - omega * omega * af,
                                   -omega * spec.omega_v * gb);
    const std::complex<double> den(spec.omega_e - omega * omega,
                                   omega * (spec.omega_e * spec.tau_bar() - spec.omega_v));
    return num / den;
}

/// True iff J(s) is Hurwitz (Routh for s^2 + (omega_e tau_bar - omega_v) s + omega_e).
inline bool locally_stable(const TransferSpec& spec) {
    return spec.omega_e > 0.0 && spec.omega_e * spec.tau_bar() - spec.omega_v > 0.0;
}

/// J(j*omega) has a zero on the imaginary axis iff omega_e * tau_bar == omega_v
/// (the zero then sits at omega = sqrt(omega_e)).
inline bool has_imaginary_axis_pole(const TransferSpec& spec) {
    return spec.omega_e * spec.tau_bar() - spec.omega_v == 0.0;
}

struct HinfResult {
    double value = 0.0;
    double argmax_omega = 0.0; // +inf when the supremum sits in the high-frequency limit
};

struct SweepOptions {
    double omega_lo = 1e-3;
    double omega_hi = 1e3;
    int grid_points = 4096;
    double rel_tol = 1e-7; // golden-section stop on the bracket width
};

namespace detail {

inline double q_mag(const TransferSpec& spec, int k, double omega) {
    return std::abs(q_eval(spec, k, omega));
}

// Golden-section maximisation of |Q_k| on [lo, hi] in log-omega.
inline HinfResult golden_refine(const TransferSpec& spec, int k, double lo, double hi,
                                double rel_tol) {
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = std::log(lo), b = std::log(hi);
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = q_mag(spec, k, std::exp(x1)), f2 = q_mag(spec, k, std::exp(x2));
    while (b - a > rel_tol) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = q_mag(spec, k, std::exp(x2));
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = q_mag(spec, k, std::exp(x1));
        }
    }
    const double w = std::exp(0.5 * (a + b));
    return HinfResult{q_mag(spec, k, w), w};
}

} // namespace detail

/// sup over omega >= 0 of |Q_k(j*omega)|, by logarithmic sweep plus
/// golden-section refinement around the grid maximum, together with the
/// analytic end limits |Q_k(0)| = alpha_b[k] and |Q_k(inf)| = alpha_f[k].
/// Returns +inf if J has an imaginary-axis zero.
inline HinfResult hinf_norm(const TransferSpec& spec, int k, const SweepOptions& opt = {}) {
    if (k < 1 || k > spec.n_preds()) throw std::out_of_range("rank k out of range");
    if (has_imaginary_axis_pole(spec))
        return HinfResult{std::numeric_limits<double>::infinity(), std::sqrt(spec.omega_e)};

    const double log_lo = std::log(opt.omega_lo), log_hi = std::log(opt.omega_hi);
    int best_i = 0;
    double best = -1.0;
    std::vector<double> omegas(static_cast<std::size_t>(opt.grid_points));
    for (int i = 0; i < opt.grid_points; ++i) {
        const double w =
            std::exp(log_lo + (log_hi - log_lo) * i / static_cast<double>(opt.grid_points - 1));
        omegas[static_cast<std::size_t>(i)] = w;
        const double m = detail::q_mag(spec, k, w);
        if (m > best) {
            best = m;
            best_i = i;
        }
    }
    const double lo = omegas[static_cast<std::size_t>(std::max(0, best_i - 1))];
    const double hi =
        omegas[static_cast<std::size_t>(std::min(opt.grid_points - 1, best_i + 1))];
    HinfResult interior = detail::golden_refine(spec, k, lo, hi, opt.rel_tol);

    // The rational function is monotone past its last interior extremum, so
    // the analytic limits bound both tails.
    const double at_zero = spec.weights.alpha_b[k - 1];
    const double at_inf = spec.weights.alpha_f[k - 1];
    HinfResult result = interior;
    if (at_zero >= result.value) result = {at_zero, 0.0};
    if (at_inf > result.value)
        result = {at_inf, std::numeric_limits<double>::infinity()};
    return result;
}

struct ClosedFormResult {
    bool holds = false;
    double margin = 0.0;
};

/// Closed-form string-stability test.
/// Equal weights:      margin = omega_e * tau * (1 + N) / 4 - omega_v
/// Geometric weights:  margin = omega_e * tau * theta - 2 * omega_v
/// The condition holds iff margin >= 0.
inline ClosedFormResult closed_form_condition(WeightScheme scheme, double omega_e, double omega_v,
                                              double tau, int n_preds) {
    if (n_preds < 1) throw std::invalid_argument("need at least one predecessor");
    double margin = 0.0;
    if (scheme == WeightScheme::Equal) {
        margin = omega_e * tau * (1.0 + n_preds) / 4.0 - omega_v;
    } else {
        const auto w = make_weights(scheme, n_preds);
        double theta = 0.0;
        for (std::size_t k = 0; k < w.size(); ++k) theta += w.alpha_b[k] * (k + 1);
        margin = omega_e * tau * theta - 2.0 * omega_v;
    }
    return ClosedFormResult{margin >= 0.0, margin};
}

struct SumConditionResult {
    bool holds = false;
    double value = 0.0;
};

/// Sum condition sum_k ||Q_k||_inf <= 1 (head-to-tail sufficient bound).
inline SumConditionResult sum_condition(const TransferSpec& spec, const SweepOptions& opt = {}) {
    double total = 0.0;
    for (int k = 1; k <= spec.n_preds(); ++k) total += hinf_norm(spec, k, opt).value;
    return SumConditionResult{total <= 1.0 + 1e-9, total};
}

/// Everything the `analyze` report needs for one gain/topology combination.
struct StabilityReport {
    TransferSpec spec;
    WeightScheme scheme = WeightScheme::Equal;
    bool locally_stable = false;
    std::vector<HinfResult> per_rank;  // ||Q_k||_inf, nearest rank first
    bool per_rank_condition = false;   // all ||Q_k||_inf <= 1/N
    ClosedFormResult closed_form;
    SumConditionResult sum;
};

inline StabilityReport analyze_gains(WeightScheme scheme, double omega_e, double omega_v,
                                     double tau, int n_preds, const SweepOptions& opt = {}) {
    StabilityReport rep;
    rep.scheme = scheme;
    rep.spec = TransferSpec::make(scheme, omega_e, omega_v, tau, n_preds);
    rep.locally_stable = locally_stable(rep.spec);
    rep.per_rank_condition = true;
    const double bound = 1.0 / n_preds + 1e-9;
    for (int k = 1; k <= n_preds; ++k) {
        rep.per_rank.push_back(hinf_norm(rep.spec, k, opt));
        if (!(rep.per_rank.back().value <= bound)) rep.per_rank_condition = false;
    }
    rep.closed_form = closed_form_condition(scheme, omega_e, omega_v, tau, n_preds);
    rep.sum = sum_condition(rep.spec, opt);
    return rep;
}

/// Rectangular gain grid with per-cell feasibility and the analytic boundary
/// polyline omega_v = slope * omega_e clipped to the grid.
struct RegionGrid {
    WeightScheme scheme = WeightScheme::Equal;
    double tau = 1.0;
    int n_preds = 1;
    double omega_e_max = 3.0;
    double omega_v_max = 1.5;
    int cols = 0, rows = 0;
    std::vector<std::uint8_t> feasible; // row-major, rows * cols
    double boundary_slope = 0.0;
    std::vector<std::pair<double, double>> boundary; // (omega_e, omega_v)

    bool cell(int r, int c) const {
        return feasible[static_cast<std::size_t>(r) * cols + c] != 0;
    }
    double cell_w() const { return omega_e_max / cols; }
    double cell_h() const { return omega_v_max / rows; }
    /// Feasible fraction of the grid area.
    double area_fraction() const {
        std::size_t on = 0;
        for (auto f : feasible) on += f;
        return feasible.empty() ? 0.0 : static_cast<double>(on) / feasible.size();
    }
};

inline RegionGrid feasible_region(WeightScheme scheme, double tau, int n_preds,
                                  double omega_e_max = 3.0, double omega_v_max = 1.5,
                                  int cols = 60, int rows = 30) {
    if (cols < 1 || rows < 1) throw std::invalid_argument("grid resolution must be positive");
    if (!(omega_e_max > 0.0 && omega_v_max > 0.0))
        throw std::invalid_argument("grid ranges must be positive");
    RegionGrid g;
    g.scheme = scheme;
    g.tau = tau;
    g.n_preds = n_preds;
    g.omega_e_max = omega_e_max;
    g.omega_v_max = omega_v_max;
    g.cols = cols;
    g.rows = rows;
    g.feasible.assign(static_cast<std::size_t>(cols) * rows, 0);
    for (int r = 0; r < rows; ++r) {
        const double wv = (r + 0.5) * omega_v_max / rows;
        for (int c = 0; c < cols; ++c) {
            const double we = (c + 0.5) * omega_e_max / cols;
            g.feasible[static_cast<std::size_t>(r) * cols + c] =
                closed_form_condition(scheme, we, wv, tau, n_preds).holds ? 1 : 0;
        }
    }
    if (scheme == WeightScheme::Equal) {
        g.boundary_slope = tau * (1.0 + n_preds) / 4.0;
    } else {
        const auto w = make_weights(scheme, n_preds);
        double theta = 0.0;
        for (std::size_t k = 0; k < w.size(); ++k) theta += w.alpha_b[k] * (k + 1);
        g.boundary_slope = tau * theta / 2.0;
    }
    const double we_end =
        g.boundary_slope > 0.0 ? std::min(omega_e_max, omega_v_max / g.boundary_slope)
                               : omega_e_max;
    const int n_pts = 64;
    for (int i = 0; i <= n_pts; ++i) {
        const double we = we_end * i / n_pts;
        g.boundary.emplace_back(we, g.boundary_slope * we);
    }
    return g;
}

/// L2 energies and Definition-1 verdicts over uniformly sampled speed series.
struct EnergyReport {
    std::vector<double> energy_abs;       // sum v^2 dt
    std::vector<double> energy_dev;       // sum (v - v_ref)^2 dt
    std::vector<bool> verdict_abs;        // energy_i <= mean of active predecessors'
    std::vector<bool> verdict_dev;
    bool all_verdicts_abs = true;         // vacuously true for a leader-only trace
    bool all_verdicts_dev = true;
};

/// `speeds[i]` is the speed series of sequence vehicle i+1; `v_ref[i]` the
/// reference (initial) speed used by the deviation mode.
inline EnergyReport energy_report(double dt, const std::vector<std::vector<double>>& speeds,
                                  const std::vector<double>& v_ref, const CommTopology& topo) {
    const std::size_t n = speeds.size();
    if (static_cast<int>(n) != topo.n)
        throw std::invalid_argument("speed series count does not match topology");
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be > 0");
    EnergyReport rep;
    rep.energy_abs.resize(n);
    rep.energy_dev.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (speeds[i].size() < 2) throw std::invalid_argument("trace shorter than 2 samples");
        double ea = 0.0, ed = 0.0;
        for (double v : speeds[i]) {
            ea += v * v * dt;
            const double d = v - v_ref[i];
            ed += d * d * dt;
        }
        rep.energy_abs[i] = ea;
        rep.energy_dev[i] = ed;
    }
    rep.verdict_abs.assign(n, true);
    rep.verdict_dev.assign(n, true);
    for (std::size_t i = 1; i < n; ++i) {
        const auto& preds = topo.predecessor_sets[i];
        if (preds.empty()) continue;
        double mean_abs = 0.0, mean_dev = 0.0;
        for (int p : preds) {
            mean_abs += rep.energy_abs[static_cast<std::size_t>(p) - 1];
            mean_dev += rep.energy_dev[static_cast<std::size_t>(p) - 1];
        }
        mean_abs /= static_cast<double>(preds.size());
        mean_dev /= static_cast<double>(preds.size());
        const double slack = 1e-9;
        rep.verdict_abs[i] = rep.energy_abs[i] <= mean_abs * (1.0 + slack);
        rep.verdict_dev[i] = rep.energy_dev[i] <= mean_dev * (1.0 + slack) + slack;
        rep.all_verdicts_abs = rep.all_verdicts_abs && rep.verdict_abs[i];
        rep.all_verdicts_dev = rep.all_verdicts_dev && rep.verdict_dev[i];
    }
    return rep;
}

} // namespace vmerge
