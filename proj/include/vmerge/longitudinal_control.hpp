// Multi-predecessor feedback + feedforward longitudinal controller under the
// constant-time-headway spacing policy.
#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

namespace vmerge {

enum class WeightScheme { Equal, Geometric };

/// Gains and physical parameters of the longitudinal controller.
struct ControllerConfig {
    double omega_e = 1.4;    // spacing-error gain [1/s^2]
    double omega_v = 0.3;    // velocity-deviation gain [1/s]
    double tau = 1.0;        // desired time gap [s]
    double standstill = 5.0; // standstill distance incl. vehicle length [m]
    double u_min = -3.0;     // acceleration saturation [m/s^2]
    double u_max = 3.0;
    WeightScheme scheme = WeightScheme::Equal;
    // Experimental opposite sign on the velocity term; the published law adds
    // +omega_v * (v_i - v_eq).
    bool flip_velocity_gain = false;

    void validate() const {
        if (!(tau > 0.0)) throw std::invalid_argument("tau must be > 0");
        if (!(standstill > 0.0)) throw std::invalid_argument("standstill distance must be > 0");
        if (!(u_min < 0.0 && 0.0 < u_max)) throw std::invalid_argument("need u_min < 0 < u_max");
        if (!(omega_e > 0.0)) throw std::invalid_argument("omega_e must be > 0");
        if (!(omega_v >= 0.0)) throw std::invalid_argument("omega_v must be >= 0");
    }
};

/// Per-rank weighting of predecessor information. alpha_b weights spacing
/// feedback, alpha_f acceleration feedforward, gamma_b velocity feedback;
/// each list sums to 1 and in this controller the three are identical.
struct WeightVector {
    std::vector<double> alpha_b;
    std::vector<double> alpha_f;
    std::vector<double> gamma_b;

    std::size_t size() const { return alpha_b.size(); }
};

/// Weight vector for a vehicle with n_preds active predecessors.
/// Equal: 1/N each. Geometric: 1/2^k for k < N and 1/2^(N-1) for k = N.
inline WeightVector make_weights(WeightScheme scheme, int n_preds) {
    if (n_preds < 1)
        throw std::invalid_argument("weights need at least one predecessor; the platoon "
                                    "leader follows an external profile");
    std::vector<double> w(static_cast<std::size_t>(n_preds));
    if (scheme == WeightScheme::Equal) {
        for (auto& x : w) x = 1.0 / n_preds;
    } else {
        for (int k = 1; k < n_preds; ++k) w[k - 1] = std::ldexp(1.0, -k);
        w[n_preds - 1] = std::ldexp(1.0, -(n_preds - 1));
    }
    return WeightVector{w, w, w};
}

/// Kinematic state of one vehicle on the virtual axis; `a` is the most
/// recently applied acceleration.
struct VehicleState {
    double x = 0.0;
    double v = 0.0;
    double a = 0.0;
};

/// Desired distance to the rank-k predecessor: k * (L + tau * v).
inline double desired_spacing(int rank, double v, const ControllerConfig& cfg) {
    if (rank < 1) throw std::invalid_argument("predecessor rank must be >= 1");
    return rank * (cfg.standstill + cfg.tau * v);
}

/// Weighted spacing error e_i = sum_k alpha_b[k] * ((x_{i-k} - x_i) - k(L + tau v_i)).
/// `pred_x` holds predecessor positions nearest-first.
inline double spacing_error(double x_i, double v_i, std::span<const double> pred_x,
                            const WeightVector& w, const ControllerConfig& cfg) {
    if (pred_x.empty()) throw std::invalid_argument("spacing_error needs predecessors");
    double e = 0.0;
    for (std::size_t k = 0; k < pred_x.size(); ++k) {
        const int rank = static_cast<int>(k) + 1;
        e += w.alpha_b[k] * ((pred_x[k] - x_i) - desired_spacing(rank, v_i, cfg));
    }
    return e;
}

/// Deviation from the weighted equilibrium velocity: v_i - sum_k gamma_b[k] * v_{i-k}.
inline double velocity_deviation(double v_i, std::span<const double> pred_v,
                                 const WeightVector& w) {
    if (pred_v.empty()) throw std::invalid_argument("velocity_deviation needs predecessors");
    double v_eq = 0.0;
    for (std::size_t k = 0; k < pred_v.size(); ++k) v_eq += w.gamma_b[k] * pred_v[k];
    return v_i - v_eq;
}

/// Acceleration command: saturate(omega_e * e + omega_v * dv + sum_k alpha_f[k] * a_{i-k}).
/// `pred_a` holds the predecessors' applied accelerations from the previous
/// control step, nearest-first.
inline double control_command(double e, double dv, std::span<const double> pred_a,
                              const WeightVector& w, const ControllerConfig& cfg) {
    const double sign_v = cfg.flip_velocity_gain ? -1.0 : 1.0;
    double u = cfg.omega_e * e + sign_v * cfg.omega_v * dv;
    for (std::size_t k = 0; k < pred_a.size(); ++k) u += w.alpha_f[k] * pred_a[k];
    if (!std::isfinite(u)) throw std::invalid_argument("non-finite controller input");
    return std::clamp(u, cfg.u_min, cfg.u_max);
}

/// Convenience wrapper evaluating the full law from state snapshots.
/// `states` is indexed by sequence id - 1; `preds` are 1-based sequence ids
/// nearest-first, as produced by predecessor_set().
inline double control_command(const std::vector<VehicleState>& states, int i,
                              const std::vector<int>& preds, const WeightVector& w,
                              const ControllerConfig& cfg) {
    std::vector<double> px, pv, pa;
    px.reserve(preds.size());
    for (int p : preds) {
        const auto& s = states.at(static_cast<std::size_t>(p) - 1);
        px.push_back(s.x);
        pv.push_back(s.v);
        pa.push_back(s.a);
    }
    const auto& self = states.at(static_cast<std::size_t>(i) - 1);
    const double e = spacing_error(self.x, self.v, px, w, cfg);
    const double dv = velocity_deviation(self.v, pv, w);
    return control_command(e, dv, pa, w, cfg);
}

} // namespace vmerge
