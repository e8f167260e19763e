// Curvilinear-coordinate lateral dynamics and the extended-LQR lateral
// controller: stabilizing Riccati solution, feedback/feedforward gains, and
// the kinematic state update for curved ramps.
#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace vmerge {

/// Stabilizing solution P of A'P + PA - P B R^-1 B' P + Q = 0 via the
/// stable invariant subspace of the Hamiltonian matrix.
inline Eigen::MatrixXd solve_care(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                                  const Eigen::MatrixXd& Q, const Eigen::MatrixXd& R) {
    const Eigen::Index n = A.rows();
    if (A.cols() != n || B.rows() != n || Q.rows() != n || Q.cols() != n ||
        R.rows() != B.cols() || R.cols() != B.cols())
        throw std::invalid_argument("inconsistent Riccati dimensions");

    const Eigen::MatrixXd S = B * R.inverse() * B.transpose();
    Eigen::MatrixXd ham(2 * n, 2 * n);
    ham << A, -S, -Q, -A.transpose();

    Eigen::EigenSolver<Eigen::MatrixXd> es(ham);
    if (es.info() != Eigen::Success) throw std::runtime_error("Hamiltonian eigensolve failed");

    Eigen::MatrixXcd basis(2 * n, n);
    Eigen::Index found = 0;
    for (Eigen::Index j = 0; j < 2 * n; ++j) {
        if (es.eigenvalues()[j].real() < 0.0) {
            if (found == n) throw std::runtime_error("too many stable Hamiltonian eigenvalues");
            basis.col(found++) = es.eigenvectors().col(j);
        }
    }
    if (found != n)
        throw std::runtime_error("system not stabilizable: no n-dimensional stable subspace");

    const Eigen::MatrixXcd x1 = basis.topRows(n);
    const Eigen::MatrixXcd x2 = basis.bottomRows(n);
    Eigen::MatrixXd P = (x2 * x1.inverse()).real();
    P = 0.5 * (P + P.transpose().eval());

    const Eigen::MatrixXd residual =
        A.transpose() * P + P * A - P * S * P + Q;
    if (residual.cwiseAbs().maxCoeff() > 1e-8)
        throw std::runtime_error("Riccati residual exceeds tolerance");
    return P;
}

/// LQR weights for the lateral regulator: Q = diag(pi1, pi2) on (r, dtheta),
/// R = pi3 on the angular-rate input.
struct LateralWeights {
    double pi1 = 1.0;
    double pi2 = 1.0;
    double pi3 = 1.0;

    void validate() const {
        if (!(pi1 > 0.0 && pi2 > 0.0 && pi3 > 0.0))
            throw std::invalid_argument("lateral weights must be positive");
    }
};

/// Riccati solution for the two-state lateral chain A = [[0, v], [0, 0]],
/// B = [0, 1]'. Requires forward motion (v > 0) for stabilizability.
inline Eigen::Matrix2d care_solve(double v, const LateralWeights& w) {
    w.validate();
    if (!(v > 0.0)) throw std::invalid_argument("not stabilizable: need forward speed v > 0");
    Eigen::MatrixXd A(2, 2), B(2, 1), Q(2, 2), R(1, 1);
    A << 0.0, v, 0.0, 0.0;
    B << 0.0, 1.0;
    Q << w.pi1, 0.0, 0.0, w.pi2;
    R << w.pi3;
    return solve_care(A, B, Q, R);
}

/// Feedback gain k_b on (r, dtheta) and feedforward gain k_f on the exogenous
/// curvature drift D = [0, -v*kappa]'. Both depend on the current speed and
/// are meant to be recomputed as it changes (rolling horizon).
struct LateralGains {
    Eigen::Matrix2d P = Eigen::Matrix2d::Zero();
    Eigen::RowVector2d k_b = Eigen::RowVector2d::Zero();
    Eigen::RowVector2d k_f = Eigen::RowVector2d::Zero();
    double speed = 0.0;
};

inline LateralGains lateral_gains(double v, const LateralWeights& w) {
    LateralGains g;
    g.speed = v;
    g.P = care_solve(v, w);
    Eigen::Matrix2d A;
    A << 0.0, v, 0.0, 0.0;
    const Eigen::Vector2d B(0.0, 1.0);
    g.k_b = -(1.0 / w.pi3) * (B.transpose() * g.P);
    // Exogenous-input LQR: u = k_b x + R^-1 B' ((A - B R^-1 B' P)')^-1 P d.
    // The closed-loop matrix is Hurwitz for the stabilizing P, so the inverse
    // exists; the resulting feedforward cancels the curvature drift exactly.
    const Eigen::Matrix2d a_cl = A - B * (1.0 / w.pi3) * (B.transpose() * g.P);
    g.k_f = (1.0 / w.pi3) * B.transpose() * a_cl.transpose().inverse() * g.P;
    return g;
}

/// Lateral state in path coordinates: curvilinear abscissa s, lateral offset
/// r (left of the centerline positive), heading error dtheta, and the speed
/// v_tilde along the vehicle heading.
struct CurvilinearState {
    double s = 0.0;
    double r = 0.0;
    double dtheta = 0.0;
    double v_tilde = 0.0;
};

/// Angular-rate command mu = k_b * [r, dtheta]' + k_f * [0, -v*kappa]'.
/// Unclamped; callers apply their own rate limit.
inline double lateral_command(const CurvilinearState& state, const LateralGains& gains,
                              double kappa) {
    const Eigen::Vector2d m(state.r, state.dtheta);
    const Eigen::Vector2d d(0.0, -state.v_tilde * kappa);
    return gains.k_b.dot(m) + gains.k_f.dot(d);
}

enum class LateralPlant { Exact, Linearized };

/// Forward-Euler step of the path-coordinate kinematics. The exact plant
/// integrates the trigonometric model; the linearized variant matches the
/// small-angle design model and exists for debugging.
inline CurvilinearState lateral_step(const CurvilinearState& state, double mu, double kappa,
                                     double dt, LateralPlant plant = LateralPlant::Exact) {
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be > 0");
    CurvilinearState next = state;
    if (plant == LateralPlant::Exact) {
        const double c = std::cos(state.dtheta);
        next.s = state.s + dt * state.v_tilde * c;
        next.r = state.r + dt * state.v_tilde * std::sin(state.dtheta);
        next.dtheta = state.dtheta + dt * (mu - state.v_tilde * c * kappa);
    } else {
        next.s = state.s + dt * state.v_tilde;
        next.r = state.r + dt * state.v_tilde * state.dtheta;
        next.dtheta = state.dtheta + dt * (mu - state.v_tilde * kappa);
    }
    return next;
}

/// Validity bound of the small-angle design model.
inline constexpr double kSmallAngleLimitRad = 14.0 * std::numbers::pi / 180.0;

/// Piecewise constant-curvature centerline, parameterized by arc length and
/// anchored so that the merge point O sits at the global origin with heading
/// zero. Mainline segments are straight (curvature 0); a ramp arc carries
/// curvature 1/R_c.
struct PathSegment {
    double length = 0.0;
    double curvature = 0.0;
};

struct PathGeometry {
    std::vector<PathSegment> segments;
    double merge_arclength = 0.0;

    struct Pose {
        double x = 0.0;
        double y = 0.0;
        double heading = 0.0;
    };

    double total_length() const {
        double t = 0.0;
        for (const auto& seg : segments) t += seg.length;
        return t;
    }

    void validate() const {
        if (segments.empty()) throw std::invalid_argument("path needs at least one segment");
        for (const auto& seg : segments)
            if (!(seg.length > 0.0)) throw std::invalid_argument("segment lengths must be > 0");
        if (merge_arclength < 0.0 || merge_arclength > total_length())
            throw std::invalid_argument("merge point must lie on the path");
    }

    double curvature_at(double s) const {
        if (s < 0.0 || s > total_length() + 1e-9)
            throw std::out_of_range("arc length outside path");
        double cum = 0.0;
        for (const auto& seg : segments) {
            if (s <= cum + seg.length) return seg.curvature;
            cum += seg.length;
        }
        return segments.back().curvature;
    }

    Pose pose_at(double s) const {
        if (s < -1e-9 || s > total_length() + 1e-9)
            throw std::out_of_range("arc length outside path");
        const Pose rel = relative_pose(s);
        const Pose anchor = relative_pose(merge_arclength);
        const double c = std::cos(-anchor.heading), sn = std::sin(-anchor.heading);
        const double dx = rel.x - anchor.x, dy = rel.y - anchor.y;
        return Pose{c * dx - sn * dy, sn * dx + c * dy, rel.heading - anchor.heading};
    }

private:
    // Pose walked from the path start at the origin with heading 0.
    Pose relative_pose(double s) const {
        Pose p;
        double remaining = std::max(0.0, s);
        for (const auto& seg : segments) {
            const double d = std::min(remaining, seg.length);
            if (d > 0.0) {
                if (std::abs(seg.curvature) < 1e-12) {
                    p.x += std::cos(p.heading) * d;
                    p.y += std::sin(p.heading) * d;
                } else {
                    const double h1 = p.heading + seg.curvature * d;
                    p.x += (std::sin(h1) - std::sin(p.heading)) / seg.curvature;
                    p.y += (std::cos(p.heading) - std::cos(h1)) / seg.curvature;
                    p.heading = h1;
                }
                remaining -= d;
            }
            if (remaining <= 0.0) break;
        }
        return p;
    }
};

/// Global pose of a vehicle at arc length s offset r along the left normal;
/// heading is the centerline tangent plus the angular deviation.
inline PathGeometry::Pose to_global(const PathGeometry& path, const CurvilinearState& state) {
    const auto c = path.pose_at(state.s);
    return PathGeometry::Pose{c.x - state.r * std::sin(c.heading),
                              c.y + state.r * std::cos(c.heading), c.heading + state.dtheta};
}

} // namespace vmerge
