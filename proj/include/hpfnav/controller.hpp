#pragma once

#include <cmath>
#include <optional>

#include "hpfnav/geometry.hpp"
#include "hpfnav/robot.hpp"

namespace hpfnav {

// Guidance below this magnitude counts as "at the pinned target": the
// synchronizing signal is zeroed and convergence is decided by position.
constexpr double kZeroGuidance = 1e-15;

/// Controller gains. K1 scales the tangential channel, K2 the angular one;
/// KD1/KD2 damp the dynamic model. The Prop-5 style guarantee needs
/// KD1 > K1 and KD2 > 0; that is checked as a warning, not an error, so the
/// undamped instability experiment stays expressible.
struct GainSet {
    double k1 = 1.0;
    double k2 = 4.0;
    double kd1 = 2.0;
    double kd2 = 2.0;
};

enum class DampingMode { Omni, Selective };

/// Synchronizing signal: tangential channel s1, angular channel s2. The
/// dynamic controller also uses this shape for the damping components.
struct SyncSignal {
    double s1 = 0.0;
    double s2 = 0.0;
};

/// Heading error = arg(guidance) - theta wrapped to (-pi, pi]. Empty when the
/// guidance magnitude is below kZeroGuidance.
inline std::optional<double> heading_error(Vec2 guidance, double theta) {
    if (norm(guidance) < kZeroGuidance) return std::nullopt;
    return wrap_to_pi(std::atan2(guidance.y, guidance.x) - theta);
}

/// Kinematic synchronizing law: s1 = K1 |g| cos(dtheta), s2 = K2 dtheta.
/// Zero guidance yields the zero signal.
inline SyncSignal sync_kinematic(Vec2 guidance, double theta, const GainSet& g) {
    const auto dtheta = heading_error(guidance, theta);
    if (!dtheta) return {};
    return {g.k1 * norm(guidance) * std::cos(*dtheta), g.k2 * *dtheta};
}

/// Dynamic synchronizing force: s1 = K1 (|g| - v) cos(dtheta), s2 = K2 dtheta.
inline SyncSignal sync_dynamic(Vec2 guidance, double v, double theta, const GainSet& g) {
    const auto dtheta = heading_error(guidance, theta);
    if (!dtheta) return {};
    return {g.k1 * (norm(guidance) - v) * std::cos(*dtheta), g.k2 * *dtheta};
}

/// Damping force (KD1 eta1 v, KD2 eta2 omega). Omni: eta1 = eta2 = 1.
/// Selective: eta1 = 1 - cos(dtheta) so tangential damping vanishes when the
/// velocity is aligned with the guidance; eta1 = 1 on zero guidance.
inline SyncSignal damping_force(Vec2 guidance, const RobotState& s, const GainSet& g,
                                DampingMode mode) {
    double eta1 = 1.0;
    if (mode == DampingMode::Selective) {
        const auto dtheta = heading_error(guidance, s.theta);
        eta1 = dtheta ? 1.0 - std::cos(*dtheta) : 1.0;
    }
    return {g.kd1 * eta1 * s.v, g.kd2 * s.omega};
}

/// Kinematic control: U = Q^-1(S) through the model's actuation inverse.
inline ControlVector control_kinematic(const SyncSignal& sig, RobotKind kind,
                                       const RobotParams& p) {
    if (kind == RobotKind::FsrKinematic)
        return fsr_actuation_inverse(sig.s1, sig.s2, p);
    return ddr_actuation_inverse(sig.s1, sig.s2, p);
}

/// Dynamic control: (T_R, T_L) = Qd^-1(S - Sd).
inline DdrDynamicControl control_dynamic(const SyncSignal& sync, const SyncSignal& damp,
                                         const RobotParams& p) {
    return ddr_dynamic_inverse(sync.s1 - damp.s1, sync.s2 - damp.s2, p);
}

}  // namespace hpfnav
