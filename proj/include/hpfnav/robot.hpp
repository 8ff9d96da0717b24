#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <variant>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "hpfnav/errors.hpp"
#include "hpfnav/geometry.hpp"

namespace hpfnav {

enum class RobotKind { DdrKinematic, FsrKinematic, DdrDynamic };

inline bool is_dynamic(RobotKind k) { return k == RobotKind::DdrDynamic; }

/// Physical parameters shared by the DDR and FSR models.
struct RobotParams {
    double wheel_radius = 1.0;   // r [m]
    double width = 1.0;          // W [m], DDR wheel-to-wheel
    double wheelbase = 1.0;      // L [m], FSR steering-to-drive axle
    double mass = 1.0;           // M [kg]
    double inertia = 1.0;        // I [kg m^2]
    double phi_max = 1.4;        // FSR steering limit [rad], < pi/2
};

// Below this tangential speed the FSR steering inverse saturates instead of
// following the atan2 branch flip.
constexpr double kFsrSpeedDeadZone = 1e-6;

/// Global pose plus local velocity state. theta is stored unwrapped.
struct RobotState {
    Vec2 position;
    double theta = 0.0;
    double v = 0.0;      // tangential speed in local coordinates [m/s]
    double omega = 0.0;  // angular speed [rad/s]
};

struct PoseRate {
    double x_dot = 0.0;
    double y_dot = 0.0;
    double theta_dot = 0.0;
};

struct LocalAccel {
    double v_dot = 0.0;
    double omega_dot = 0.0;
};

/// Control vector variants per model.
struct DdrKinematicControl {
    double omega_right = 0.0;  // [rad/s]
    double omega_left = 0.0;
};
struct FsrKinematicControl {
    double omega_hub = 0.0;  // rear-wheel angular speed [rad/s]
    double phi = 0.0;        // steering angle [rad], |phi| <= phi_max
};
struct DdrDynamicControl {
    double torque_right = 0.0;  // [N m]
    double torque_left = 0.0;
};

using ControlVector = std::variant<DdrKinematicControl, FsrKinematicControl, DdrDynamicControl>;

inline double control_channel(const ControlVector& u, int i) {
    return std::visit(
        [i](const auto& c) {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, DdrKinematicControl>)
                return i == 0 ? c.omega_right : c.omega_left;
            else if constexpr (std::is_same_v<T, FsrKinematicControl>)
                return i == 0 ? c.omega_hub : c.phi;
            else
                return i == 0 ? c.torque_right : c.torque_left;
        },
        u);
}

// ---------- DDR kinematics ----------
// Actuation stage: v = r (w_R + w_L) / 2, omega = r (w_R - w_L) / W, the
// exact inverse of w_R = v/r + W omega/(2r), w_L = v/r - W omega/(2r).

inline PoseRate pose_rate_from_local(double theta, double v, double omega) {
    return {v * std::cos(theta), v * std::sin(theta), omega};
}

inline PoseRate ddr_forward_kinematic(const RobotState& s, const DdrKinematicControl& u,
                                      const RobotParams& p) {
    const double v = p.wheel_radius * (u.omega_right + u.omega_left) / 2.0;
    const double omega = p.wheel_radius * (u.omega_right - u.omega_left) / p.width;
    return pose_rate_from_local(s.theta, v, omega);
}

inline DdrKinematicControl ddr_actuation_inverse(double v, double omega, const RobotParams& p) {
    const double r = p.wheel_radius;
    return {v / r + p.width * omega / (2.0 * r), v / r - p.width * omega / (2.0 * r)};
}

// ---------- FSR kinematics ----------

inline PoseRate fsr_forward_kinematic(const RobotState& s, const FsrKinematicControl& u,
                                      const RobotParams& p) {
    if (std::abs(u.phi) > p.phi_max)
        throw SteeringOutOfRange("steering angle " + std::to_string(u.phi) + " exceeds phi_max");
    const double v = p.wheel_radius * u.omega_hub;
    const double omega = v * std::tan(u.phi) / p.wheelbase;
    return pose_rate_from_local(s.theta, v, omega);
}

/// Total via clamping: steering saturates at +-phi_max, and inside the speed
/// dead zone a pure-rotation request pins the steering hard over.
inline FsrKinematicControl fsr_actuation_inverse(double v, double omega, const RobotParams& p) {
    FsrKinematicControl u;
    u.omega_hub = v / p.wheel_radius;
    if (std::abs(v) < kFsrSpeedDeadZone && omega != 0.0) {
        u.phi = omega > 0.0 ? p.phi_max : -p.phi_max;
    } else if (std::abs(v) < kFsrSpeedDeadZone) {
        u.phi = 0.0;
    } else {
        u.phi = std::clamp(std::atan2(omega * p.wheelbase, v), -p.phi_max, p.phi_max);
    }
    return u;
}

// ---------- DDR dynamics ----------
// Rigid-body actuation stage: v_dot = (T_R + T_L)/(M r),
// omega_dot = W (T_R - T_L)/(2 I r).

struct DynamicRates {
    PoseRate pose;
    LocalAccel accel;
};

inline DynamicRates ddr_forward_dynamic(const RobotState& s, const DdrDynamicControl& u,
                                        const RobotParams& p) {
    DynamicRates out;
    out.pose = pose_rate_from_local(s.theta, s.v, s.omega);
    out.accel.v_dot = (u.torque_right + u.torque_left) / (p.mass * p.wheel_radius);
    out.accel.omega_dot =
        p.width * (u.torque_right - u.torque_left) / (2.0 * p.inertia * p.wheel_radius);
    return out;
}

/// Inverse of the dynamic actuation stage: torques realizing a commanded
/// local acceleration (v_dot, omega_dot).
inline DdrDynamicControl ddr_dynamic_inverse(double v_dot, double omega_dot,
                                             const RobotParams& p) {
    const double sum = p.mass * p.wheel_radius * v_dot;                            // T_R + T_L
    const double diff = 2.0 * p.inertia * p.wheel_radius * omega_dot / p.width;    // T_R - T_L
    return {(sum + diff) / 2.0, (sum - diff) / 2.0};
}

// ---------- Generalized inversion ----------

/// Moore-Penrose pseudo-inverse via SVD with the usual rank cutoff. Satisfies
/// A A+ A = A, A+ A A+ = A+, and symmetry of A A+ and A+ A to 1e-9.
inline Eigen::MatrixXd pseudo_inverse(const Eigen::MatrixXd& a) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const double tol = std::max(a.rows(), a.cols()) *
                       std::numeric_limits<double>::epsilon() *
                       (svd.singularValues().size() > 0 ? svd.singularValues()(0) : 0.0);
    Eigen::VectorXd inv = svd.singularValues();
    for (Eigen::Index i = 0; i < inv.size(); ++i) inv(i) = inv(i) > tol ? 1.0 / inv(i) : 0.0;
    return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

/// U = A+ lambda for an actuation stage linearized as lambda = A U. Reduces
/// to exact inversion when A is square and full rank; otherwise gives the
/// least-squares / minimum-norm control.
inline Eigen::VectorXd actuation_inverse_general(const Eigen::VectorXd& local_velocity,
                                                 const Eigen::MatrixXd& actuation) {
    return pseudo_inverse(actuation) * local_velocity;
}

}  // namespace hpfnav
