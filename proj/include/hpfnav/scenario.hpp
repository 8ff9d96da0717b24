#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hpfnav/controller.hpp"
#include "hpfnav/errors.hpp"
#include "hpfnav/robot.hpp"
#include "hpfnav/solver.hpp"
#include "hpfnav/workspace.hpp"

namespace hpfnav {

enum class Integrator { Euler, Rk4 };

/// Closed-loop integration settings.
struct SimConfig {
    double dt = 1e-3;        // [s]
    double t_max = 60.0;     // [s]
    Integrator integrator = Integrator::Rk4;
    std::uint64_t seed = 0;
    double pos_tol = 0.05;   // convergence radius around the target [m]
    bool stop_on_converge = true;
};

/// Actuator disturbance model: independent uniform noise per channel, then an
/// absolute clamp or a clamp at a fraction of the undisturbed run's peak.
struct Disturbance {
    double noise_amplitude = 0.0;               // uniform half-width, control units
    std::optional<double> saturation_limit;     // absolute clamp per channel
    std::optional<double> saturation_fraction;  // in (0, 1], times the reference maximum
};

/// Full declarative description of one experiment. Immutable after loading;
/// safe to share across concurrent readers.
struct Scenario {
    Workspace workspace;
    BvpSpec bvp;
    RobotKind robot_kind = RobotKind::DdrKinematic;
    RobotParams robot;
    std::optional<RobotParams> model_error;  // controller-side parameters, if erroneous
    GainSet gains;
    DampingMode damping = DampingMode::Selective;
    RobotState initial;
    Disturbance disturbance;
    SimConfig sim;
    SolverConfig solver;
    std::vector<std::string> warnings;  // soft gain-condition findings

    /// Parameters the controller inverts with (model_error when present).
    const RobotParams& controller_params() const { return model_error ? *model_error : robot; }
};

namespace detail {

inline void require(bool ok, const std::string& message) {
    if (!ok) throw ValidationError(message);
}

}  // namespace detail

/// Cross-field invariants that the per-field parsers cannot see. Fills the
/// warnings list; throws ValidationError naming the first hard violation.
inline void validate(Scenario& sc) {
    const Workspace& ws = sc.workspace;
    detail::require(ws.width_cells > 0 && ws.height_cells > 0, "grid dimensions must be positive");
    detail::require(ws.cell_size > 0.0, "cell_size must be positive");
    detail::require(ws.cells.size() == static_cast<size_t>(ws.cell_count()),
                    "cells length must be width*height");
    detail::require(std::count(ws.cells.begin(), ws.cells.end(), CellClass::Free) > 0,
                    "workspace has no Free cell");
    if (!ws.gamma.empty()) {
        detail::require(ws.gamma.size() == static_cast<size_t>(ws.cell_count()),
                        "gamma length must be width*height");
        for (double g : ws.gamma)
            detail::require(g >= 0.0 && g <= 1.0, "gamma values must lie in [0,1]");
    }
    detail::require((sc.bvp.kind == BvpKind::Gamma) == !ws.gamma.empty(),
                    "gamma map present if and only if bvp kind is \"gamma\"");

    const CellIndex s = snap_to_free(ws, sc.bvp.start, "start");
    const CellIndex t = snap_to_free(ws, sc.bvp.target, "target");
    detail::require(s.ix != t.ix || s.iy != t.iy, "start and target must be distinct cells");
    if (sc.bvp.kind == BvpKind::Orientation) {
        detail::require(std::isfinite(sc.bvp.heading), "heading must be finite");
        detail::require(sc.bvp.epsilon_cells > 0.0, "epsilon_cells must be positive");
    }
    if (sc.bvp.kind == BvpKind::Directional) {
        detail::require(!sc.bvp.directional_region.empty(),
                        "directional kind requires directional_region");
        for (size_t c = 0; c < sc.bvp.directional_region.size(); ++c) {
            if (!sc.bvp.directional_region[c]) continue;
            const double n = norm(sc.bvp.directional_field[c]);
            detail::require(std::abs(n - 1.0) < 1e-6,
                            "directional_field vectors must have unit norm on the region");
        }
    }
    detail::require(sc.bvp.sigma_forward > 0.0 && sc.bvp.sigma_backward > 0.0,
                    "sigma_forward and sigma_backward must be positive");

    const RobotParams& p = sc.robot;
    detail::require(p.wheel_radius > 0 && p.width > 0 && p.wheelbase > 0 && p.mass > 0 &&
                        p.inertia > 0,
                    "robot parameters must be positive");
    detail::require(p.phi_max > 0.0 && p.phi_max < kPi / 2.0, "phi_max must lie in (0, pi/2)");

    detail::require(sc.gains.k1 > 0.0 && sc.gains.k2 > 0.0, "K1 and K2 must be positive");
    detail::require(sc.gains.kd1 >= 0.0 && sc.gains.kd2 >= 0.0, "KD1 and KD2 must be non-negative");
    if (is_dynamic(sc.robot_kind) &&
        (sc.gains.kd1 <= sc.gains.k1 || sc.gains.kd2 <= 0.0)) {
        sc.warnings.push_back(
            "dynamic stability guarantee needs KD1 > K1 and KD2 > 0 (KD1=" +
            std::to_string(sc.gains.kd1) + ", K1=" + std::to_string(sc.gains.k1) +
            ", KD2=" + std::to_string(sc.gains.kd2) + ")");
    }

    detail::require(is_admissible(ws, sc.initial.position),
                    "initial position must lie in a Free cell");
    detail::require(std::isfinite(sc.initial.theta) && std::isfinite(sc.initial.v) &&
                        std::isfinite(sc.initial.omega),
                    "initial state must be finite");

    detail::require(sc.disturbance.noise_amplitude >= 0.0, "noise_amplitude must be >= 0");
    detail::require(!(sc.disturbance.saturation_limit && sc.disturbance.saturation_fraction),
                    "at most one of saturation_limit / saturation_fraction may be set");
    if (sc.disturbance.saturation_limit)
        detail::require(*sc.disturbance.saturation_limit > 0.0, "saturation_limit must be > 0");
    if (sc.disturbance.saturation_fraction)
        detail::require(*sc.disturbance.saturation_fraction > 0.0 &&
                            *sc.disturbance.saturation_fraction <= 1.0,
                        "saturation_fraction must lie in (0, 1]");

    detail::require(sc.sim.dt > 0.0, "dt must be positive");
    detail::require(sc.sim.t_max >= sc.sim.dt, "t_max must be at least dt");
    detail::require(sc.sim.pos_tol > 0.0, "pos_tol must be positive");

    detail::require(sc.solver.relaxation_factor > 0.0 && sc.solver.relaxation_factor < 2.0,
                    "relaxation_factor must lie in (0, 2)");
    detail::require(sc.solver.tolerance > 0.0, "solver tolerance must be positive");
    detail::require(sc.solver.max_iterations >= 1, "max_iterations must be >= 1");
    detail::require(sc.solver.picard_max >= 1, "picard_max must be >= 1");
    detail::require(sc.solver.picard_relax > 0.0 && sc.solver.picard_relax <= 1.0,
                    "picard_relax must lie in (0, 1]");
}

}  // namespace hpfnav
