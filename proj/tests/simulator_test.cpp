#include "hpfnav/simulator.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "test_support.hpp"

using namespace hpfnav;
using testsupport::free_workspace;

namespace {

/// Uniform-guidance fixture: linear ramp over a free corridor, guidance
/// (0.5, 0) everywhere (the ramp goes negative; only its slope matters),
/// target cell at the right end on the centerline.
struct RampFixture {
    Workspace ws;
    PotentialField field;
    double slope = 0.5;  // |guidance|

    RampFixture(int w = 160, int h = 40, double cell_size = 0.05) {
        ws = free_workspace(w, h, cell_size, {0.0, 0.0});
        std::vector<double> values(ws.cell_count());
        for (int iy = 0; iy < h; ++iy)
            for (int ix = 0; ix < w; ++ix)
                values[ws.index(ix, iy)] = 1.0 - slope * ws.cell_center(ix, iy).x;
        field = testsupport::synthetic_field(ws, values, {w - 2, h / 2});
    }
};

Scenario ramp_scenario(const RampFixture& fx, RobotKind kind) {
    Scenario sc;
    sc.workspace = fx.ws;
    sc.bvp.start = fx.ws.cell_center(1, fx.ws.height_cells / 2);
    sc.bvp.target = fx.field.target_position;
    sc.robot_kind = kind;
    sc.initial.position = sc.bvp.start;
    sc.sim.dt = 1e-3;
    sc.sim.t_max = 30.0;
    sc.sim.pos_tol = 0.05;
    return sc;
}

}  // namespace

// ---------- rng ----------

TEST(Rng, GoldenFirstOutputForSeedZero) {
    // reference vector of the documented mixing recipe
    Rng rng(0);
    EXPECT_EQ(rng.next_u64(), 0xE220A8397B1DCDAFULL);
    const auto [value, next_state] = rng_next(0);
    EXPECT_DOUBLE_EQ(value,
                     static_cast<double>(0xE220A8397B1DCDAFULL >> 11) * 0x1.0p-53);
    EXPECT_EQ(next_state, 0x9E3779B97F4A7C15ULL);
}

TEST(Rng, SameSeedSameSequence) {
    Rng a(123456789), b(123456789);
    for (int i = 0; i < 1000; ++i) EXPECT_EQ(a.next_u64(), b.next_u64());
}

TEST(Rng, MillionDrawMeanIsCentered) {
    Rng rng(42);
    double sum = 0.0;
    for (int i = 0; i < 1000000; ++i) sum += rng.uniform01();
    EXPECT_NEAR(sum / 1e6, 0.5, 0.002);
}

// ---------- apply_disturbance ----------

TEST(ApplyDisturbance, ZeroAmplitudeNoClampIsIdentity) {
    Rng rng(1);
    const ControlVector u = DdrKinematicControl{0.8, -0.3};
    const ControlVector out = apply_disturbance(u, Disturbance{}, rng);
    EXPECT_DOUBLE_EQ(control_channel(out, 0), 0.8);
    EXPECT_DOUBLE_EQ(control_channel(out, 1), -0.3);
    EXPECT_EQ(rng.state, Rng(1).state);  // no draw consumed
}

TEST(ApplyDisturbance, AbsoluteClampAtHalf) {
    Rng rng(1);
    Disturbance d;
    d.saturation_limit = 0.5;
    const ControlVector out = apply_disturbance(DdrDynamicControl{0.8, -0.9}, d, rng);
    EXPECT_DOUBLE_EQ(control_channel(out, 0), 0.5);
    EXPECT_DOUBLE_EQ(control_channel(out, 1), -0.5);
}

TEST(ApplyDisturbance, FractionalClampUsesReferenceMaximum) {
    Rng rng(1);
    Disturbance d;
    d.saturation_fraction = 0.002;
    // reference maximum torque 0.103 N m -> clamp at 0.000206 N m
    const ControlVector out =
        apply_disturbance(DdrDynamicControl{0.05, -0.0001}, d, rng, 0.103);
    EXPECT_DOUBLE_EQ(control_channel(out, 0), 0.000206);
    EXPECT_DOUBLE_EQ(control_channel(out, 1), -0.0001);
    EXPECT_THROW(apply_disturbance(DdrDynamicControl{0.05, 0.0}, d, rng), MissingReferenceMax);
}

TEST(ApplyDisturbance, NoiseIsBoundedAndDeterministic) {
    Disturbance d;
    d.noise_amplitude = 0.2;
    Rng a(7), b(7);
    for (int i = 0; i < 200; ++i) {
        const ControlVector ua = apply_disturbance(FsrKinematicControl{1.0, 0.1}, d, a);
        const ControlVector ub = apply_disturbance(FsrKinematicControl{1.0, 0.1}, d, b);
        EXPECT_EQ(control_channel(ua, 0), control_channel(ub, 0));
        EXPECT_EQ(control_channel(ua, 1), control_channel(ub, 1));
        EXPECT_LE(std::abs(control_channel(ua, 0) - 1.0), 0.2);
        EXPECT_LE(std::abs(control_channel(ua, 1) - 0.1), 0.2);
    }
}

// ---------- reference_path ----------

TEST(ReferencePath, StraightOnRampField) {
    const RampFixture fx;
    SimConfig cfg;
    cfg.dt = 0.01;
    cfg.t_max = 2000.0;
    cfg.pos_tol = 0.05;
    const Vec2 start = fx.ws.cell_center(1, fx.ws.height_cells / 2);
    const std::vector<Vec2> path = reference_path(fx.field, start, cfg);
    ASSERT_GT(path.size(), 10u);
    for (const Vec2& p : path) {
        EXPECT_NEAR(p.y, start.y, 1e-9);
        EXPECT_TRUE(is_admissible(fx.ws, p));
    }
    EXPECT_LE(distance(path.back(), fx.field.target_position), cfg.pos_tol);
    // uniform speed |g| = slope: vertices advance by slope*dt
    EXPECT_NEAR(path[1].x - path[0].x, fx.slope * cfg.dt, 1e-12);
}

TEST(ReferencePath, ObstacleFieldReachesTargetAdmissibly) {
    Workspace ws = free_workspace(41, 41, 0.1, {0.0, 0.0});
    for (int iy = 12; iy < 29; ++iy)
        for (int ix = 18; ix < 23; ++ix) ws.cells[ws.index(ix, iy)] = CellClass::Obstacle;
    BvpSpec spec;
    spec.kind = BvpKind::Neumann;
    spec.start = {0.55, 2.05};
    spec.target = {3.55, 2.05};
    SolverConfig scfg;
    const PotentialField f = solve_neumann(ws, spec, scfg);
    SimConfig cfg;
    cfg.dt = 0.005;
    cfg.t_max = 4000.0;
    cfg.pos_tol = 0.05;
    const std::vector<Vec2> path = reference_path(f, spec.start, cfg);
    for (const Vec2& p : path) ASSERT_TRUE(is_admissible(ws, p));
    EXPECT_LE(distance(path.back(), f.target_position), cfg.pos_tol);
}

TEST(ReferencePath, StalledFieldThrows) {
    // flat zero field: no guidance anywhere, start far from target
    Workspace ws = free_workspace(9, 9, 1.0);
    const PotentialField f =
        testsupport::synthetic_field(ws, std::vector<double>(81, 0.25), {8, 8});
    SimConfig cfg;
    EXPECT_THROW(reference_path(f, {1.5, 1.5}, cfg), StalledPath);
}

TEST(ReferencePath, StepHalvingConvergence) {
    // curved field: point-to-point solve in free space
    Workspace ws = free_workspace(61, 61, 0.05, {0.0, 0.0});
    BvpSpec spec;
    spec.kind = BvpKind::Neumann;
    spec.start = {0.52, 0.52};
    spec.target = {2.52, 2.02};
    const PotentialField f = solve_neumann(ws, spec, SolverConfig{});

    // trace from a regular point: the start pin itself is an unstable
    // equilibrium whose outgoing ray is not a convergence test
    const Vec2 trace_start{0.77, 0.77};
    auto trace = [&](double dt, Integrator integ) {
        SimConfig cfg;
        cfg.dt = dt;
        cfg.t_max = 2000.0;
        cfg.pos_tol = 0.05;
        cfg.integrator = integ;
        return reference_path(f, trace_start, cfg);
    };
    auto path_gap = [&](const std::vector<Vec2>& a, const std::vector<Vec2>& b) {
        // geometric one-sided Hausdorff distance via the deviation machinery,
        // excluding the stopping disc where the last big step dominates
        Trajectory traj;
        for (const Vec2& p : a) {
            if (distance(p, f.target_position) < 0.4) continue;
            TrajectorySample s;
            s.x = p.x;
            s.y = p.y;
            traj.samples.push_back(s);
        }
        return deviation_trace(traj, b).max_abs;
    };
    const double euler_08 =
        path_gap(trace(0.08, Integrator::Euler), trace(0.04, Integrator::Euler));
    const double euler_04 =
        path_gap(trace(0.04, Integrator::Euler), trace(0.02, Integrator::Euler));
    const double rk4_08 = path_gap(trace(0.08, Integrator::Rk4), trace(0.04, Integrator::Rk4));
    EXPECT_LT(euler_08, 2e-3);
    EXPECT_LT(euler_04, 0.6 * euler_08);   // halving dt halves the discrepancy
    EXPECT_LT(rk4_08, 0.05 * euler_08);    // high-order scheme is far tighter
}

// ---------- step ----------

TEST(Step, AlignedKinematicStepIsPureTranslation) {
    const RampFixture fx;
    Scenario sc = ramp_scenario(fx, RobotKind::DdrKinematic);
    sc.gains = GainSet{2.0, 4.0, 0.0, 0.0};
    sc.initial.theta = 0.0;  // aligned with guidance
    Rng rng(0);
    const RobotState next = step(sc.initial, fx.field, sc, rng);
    const double expected_v = sc.gains.k1 * fx.slope;
    EXPECT_NEAR(next.position.x, sc.initial.position.x + expected_v * sc.sim.dt, 1e-12);
    EXPECT_NEAR(next.position.y, sc.initial.position.y, 1e-15);
    EXPECT_NEAR(next.theta, 0.0, 1e-15);
    EXPECT_NEAR(next.v, expected_v, 1e-15);
}

TEST(Step, ZeroTorqueDynamicStepIsBallistic) {
    const RampFixture fx;
    Scenario sc = ramp_scenario(fx, RobotKind::DdrDynamic);
    sc.gains.k1 = 0.0;  // no synchronizing force
    sc.gains.k2 = 0.0;
    sc.gains.kd1 = 0.0;
    sc.gains.kd2 = 0.0;
    sc.initial.theta = kPi / 2.0;
    sc.initial.v = 0.4;
    sc.initial.omega = 0.0;
    Rng rng(0);
    const RobotState next = step(sc.initial, fx.field, sc, rng);
    EXPECT_NEAR(next.v, 0.4, 1e-15);
    EXPECT_NEAR(next.omega, 0.0, 1e-15);
    EXPECT_NEAR(next.position.y, sc.initial.position.y + 0.4 * sc.sim.dt, 1e-12);
    EXPECT_NEAR(next.position.x, sc.initial.position.x, 1e-12);
}

TEST(Step, CollisionAndBlowupThrowFromTheSingleStepApi) {
    const RampFixture fx;
    Scenario sc = ramp_scenario(fx, RobotKind::DdrKinematic);
    // aim down at the bottom wall from just inside it (not fully
    // perpendicular to the guidance: cos(dtheta) must stay away from 0)
    sc.initial.position = {1.0, 0.02};
    sc.initial.theta = -kPi / 2.0 + 0.7;
    sc.gains = GainSet{400.0, 0.1, 0.0, 0.0};  // fast enough to cross in one step
    Rng rng(0);
    EXPECT_THROW(step(sc.initial, fx.field, sc, rng), LeftAdmissibleSpace);

    sc.initial.v = 2e9;  // beyond the blowup threshold after one step
    sc.robot_kind = RobotKind::DdrDynamic;
    sc.initial.position = {1.0, 1.0};
    Rng rng2(0);
    EXPECT_THROW(step(sc.initial, fx.field, sc, rng2), NumericalBlowup);
}

// ---------- deviation_trace ----------

TEST(DeviationTrace, IdenticalPathIsZero) {
    std::vector<Vec2> ref;
    Trajectory traj;
    for (int i = 0; i <= 100; ++i) {
        const Vec2 p{0.1 * i, 0.05 * i};
        ref.push_back(p);
        TrajectorySample s;
        s.x = p.x;
        s.y = p.y;
        traj.samples.push_back(s);
    }
    const DeviationTrace dev = deviation_trace(traj, ref);
    EXPECT_NEAR(dev.max_abs, 0.0, 1e-12);
}

TEST(DeviationTrace, ConstantLateralOffsetKeepsSignAndMagnitude) {
    std::vector<Vec2> ref;
    Trajectory left, right;
    for (int i = 0; i <= 200; ++i) {
        ref.push_back({0.05 * i, 0.0});  // travel along +x
        TrajectorySample s;
        s.x = 0.05 * i;
        s.y = 0.1;  // left of travel
        left.samples.push_back(s);
        s.y = -0.1;
        right.samples.push_back(s);
    }
    const DeviationTrace dl = deviation_trace(left, ref);
    for (double d : dl.delta) EXPECT_NEAR(d, 0.1, 1e-12);
    EXPECT_NEAR(dl.max_abs, 0.1, 1e-12);
    const DeviationTrace dr = deviation_trace(right, ref);
    for (double d : dr.delta) EXPECT_NEAR(d, -0.1, 1e-12);
}

// ---------- lyapunov_trace ----------

TEST(LyapunovTrace, VanishesAtTheTargetRestState) {
    const RampFixture fx;
    Trajectory traj;
    TrajectorySample s;
    s.x = fx.field.target_position.x;
    s.y = fx.field.target_position.y;
    s.theta = 0.0;  // aligned with the ramp guidance
    s.v = 0.0;
    s.omega = 0.0;
    traj.samples.push_back(s);
    RobotParams p;
    const auto kin = lyapunov_trace(traj, fx.field, RobotKind::DdrKinematic, p, GainSet{});
    // V at the target cell center is the ramp value there (near 0), dtheta = 0
    EXPECT_NEAR(kin[0], value_at(fx.field, fx.field.target_position), 1e-12);
    const auto dyn = lyapunov_trace(traj, fx.field, RobotKind::DdrDynamic, p, GainSet{});
    EXPECT_NEAR(dyn[0], GainSet{}.k1 * p.mass * value_at(fx.field, fx.field.target_position),
                1e-12);
}

// ---------- run ----------

TEST(Run, UniformGuidanceKinematicRunConvergesAndIsAdmissible) {
    const RampFixture fx;
    Scenario sc = ramp_scenario(fx, RobotKind::DdrKinematic);
    sc.gains = GainSet{4.0, 4.0, 0.0, 0.0};
    sc.initial.theta = 0.35;  // modest misalignment
    // a uniform field never corrects lateral drift, so the convergence disc
    // must absorb the alignment transient's offset
    sc.sim.pos_tol = 0.3;
    const RunResult result = run(sc, fx.field);
    EXPECT_TRUE(result.metrics.converged);
    EXPECT_FALSE(result.metrics.diverged);
    for (const auto& s : result.trajectory.samples)
        ASSERT_TRUE(is_admissible(fx.ws, {s.x, s.y}));
    // kinematic Lyapunov trace is non-increasing within tolerance
    EXPECT_TRUE(result.metrics.lyapunov_monotone);
    EXPECT_LE(result.metrics.lyapunov_max_jump, kLyapunovJumpTol);
}

TEST(Run, HeadingErrorDecaysExponentiallyAtRateK2) {
    const RampFixture fx;
    Scenario sc = ramp_scenario(fx, RobotKind::DdrKinematic);
    sc.gains = GainSet{1.0, 4.0, 0.0, 0.0};
    sc.initial.theta = 1.2;  // dtheta(0) = -1.2
    sc.sim.t_max = 3.0;
    sc.sim.stop_on_converge = false;
    const RunResult result = run(sc, fx.field);

    // regress ln|dtheta| on t over the clean decay window
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (const auto& s : result.trajectory.samples) {
        const double mag = std::abs(s.dtheta);
        if (mag < 1e-9 || mag > 1.0) continue;
        const double y = std::log(mag);
        sx += s.t;
        sy += y;
        sxx += s.t * s.t;
        sxy += s.t * y;
        ++n;
    }
    ASSERT_GT(n, 100);
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    EXPECT_NEAR(slope, -sc.gains.k2, 0.02 * sc.gains.k2);

    // fit quality: R^2 against the fitted line
    const double mean_y = sy / n;
    double ss_res = 0, ss_tot = 0;
    const double intercept = mean_y - slope * (sx / n);
    for (const auto& s : result.trajectory.samples) {
        const double mag = std::abs(s.dtheta);
        if (mag < 1e-9 || mag > 1.0) continue;
        const double y = std::log(mag);
        ss_res += (y - (slope * s.t + intercept)) * (y - (slope * s.t + intercept));
        ss_tot += (y - mean_y) * (y - mean_y);
    }
    EXPECT_GT(1.0 - ss_res / ss_tot, 0.999);
}

TEST(Run, VelocityAlignsWithGuidanceAfterTransient) {
    const RampFixture fx;
    Scenario sc = ramp_scenario(fx, RobotKind::DdrKinematic);
    sc.gains = GainSet{1.0, 4.0, 0.0, 0.0};  // K1 = 1: guidance is the speed reference
    sc.initial.theta = -0.9;
    sc.sim.t_max = 14.0;  // stops before the corridor's far wall
    sc.sim.stop_on_converge = false;
    const RunResult result = run(sc, fx.field);
    ASSERT_FALSE(result.metrics.collided);
    int checked = 0;
    for (const auto& s : result.trajectory.samples) {
        if (s.t < 3.0) continue;  // transient
        const Vec2 robot_vel{s.v * std::cos(s.theta), s.v * std::sin(s.theta)};
        const Vec2 g = gradient_at(fx.field, {s.x, s.y});
        EXPECT_LT(norm(robot_vel - g), 1e-3);
        ++checked;
    }
    EXPECT_GT(checked, 1000);
}

TEST(Run, AlignedStartTracksReferenceWithinIntegrationError) {
    const RampFixture fx;
    Scenario sc = ramp_scenario(fx, RobotKind::DdrKinematic);
    sc.gains = GainSet{1.0, 4.0, 0.0, 0.0};
    sc.initial.theta = 0.0;  // dtheta(0) = 0
    const RunResult result = run(sc, fx.field);
    ASSERT_TRUE(result.metrics.converged);
    double path_len = 0.0;
    const auto& ss = result.trajectory.samples;
    for (size_t i = 1; i < ss.size(); ++i)
        path_len += std::hypot(ss[i].x - ss[i - 1].x, ss[i].y - ss[i - 1].y);
    EXPECT_LT(result.metrics.max_deviation, 1e-4 * path_len);
}

TEST(Run, DeterministicBitIdenticalTrajectoriesUnderNoise) {
    const RampFixture fx;
    Scenario sc = ramp_scenario(fx, RobotKind::DdrKinematic);
    sc.gains = GainSet{1.0, 4.0, 0.0, 0.0};
    sc.disturbance.noise_amplitude = 0.2;
    sc.sim.seed = 7;
    sc.sim.t_max = 5.0;
    sc.sim.stop_on_converge = false;
    const RunResult a = run(sc, fx.field);
    const RunResult b = run(sc, fx.field);
    EXPECT_EQ(trajectory_to_csv(a.trajectory), trajectory_to_csv(b.trajectory));

    sc.sim.seed = 8;  // different seed, different noise
    const RunResult c = run(sc, fx.field);
    EXPECT_NE(trajectory_to_csv(a.trajectory), trajectory_to_csv(c.trajectory));
}

TEST(Run, DynamicEnergyAccountingBalances) {
    const RampFixture fx;
    Scenario sc = ramp_scenario(fx, RobotKind::DdrDynamic);
    sc.gains = GainSet{1.0, 4.0, 2.0, 2.0};
    sc.damping = DampingMode::Omni;
    sc.robot.mass = 1.3;
    sc.robot.inertia = 0.7;
    sc.robot.width = 0.9;
    sc.robot.wheel_radius = 0.4;
    sc.initial.theta = 0.7;
    sc.sim.t_max = 8.0;
    sc.sim.stop_on_converge = false;
    const RunResult result = run(sc, fx.field);

    // actuator work vs kinetic-energy change, trapezoid over each held-torque
    // interval; under zero-order hold v and omega are linear in time so the
    // trapezoid is exact up to rounding
    const auto& ss = result.trajectory.samples;
    const RobotParams& p = sc.robot;
    auto wheel_rates = [&](const TrajectorySample& s) {
        return std::pair{s.v / p.wheel_radius + p.width * s.omega / (2 * p.wheel_radius),
                         s.v / p.wheel_radius - p.width * s.omega / (2 * p.wheel_radius)};
    };
    auto kinetic = [&](const TrajectorySample& s) {
        return 0.5 * p.mass * s.v * s.v + 0.5 * p.inertia * s.omega * s.omega;
    };
    double work = 0.0;
    for (size_t i = 1; i < ss.size(); ++i) {
        const auto [wr0, wl0] = wheel_rates(ss[i - 1]);
        const auto [wr1, wl1] = wheel_rates(ss[i]);
        const double dt = ss[i].t - ss[i - 1].t;
        work += 0.5 * dt *
                (ss[i - 1].u1_applied * (wr0 + wr1) + ss[i - 1].u2_applied * (wl0 + wl1));
    }
    const double energy_change = kinetic(ss.back()) - kinetic(ss.front());
    EXPECT_NEAR(work, energy_change, 1e-9 * (1.0 + std::abs(work)));
}

TEST(Run, CollisionIsFlaggedNotThrown) {
    // narrow dead-end: drive the robot straight into the top wall
    const RampFixture fx(60, 12, 0.1);
    Scenario sc = ramp_scenario(fx, RobotKind::DdrKinematic);
    sc.gains = GainSet{40.0, 0.001, 0.0, 0.0};  // fast, no steering authority
    sc.initial.theta = kPi / 2.0;               // straight at the wall
    const RunResult result = run(sc, fx.field);
    EXPECT_TRUE(result.metrics.collided);
    EXPECT_TRUE(result.metrics.diverged);
    EXPECT_FALSE(result.metrics.converged);
}
