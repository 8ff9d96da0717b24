#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hpfnav/controller.hpp"
#include "hpfnav/errors.hpp"
#include "hpfnav/io_util.hpp"
#include "hpfnav/rng.hpp"
#include "hpfnav/scenario.hpp"
#include "hpfnav/solver.hpp"

namespace hpfnav {

constexpr double kBlowupLimit = 1e9;
// Single-step Lyapunov increase tolerated before a trace counts as
// non-monotone (integrator noise allowance).
constexpr double kLyapunovJumpTol = 1e-6;

struct TrajectorySample {
    double t = 0.0;
    double x = 0.0, y = 0.0, theta = 0.0;
    double v = 0.0, omega = 0.0;
    double u1 = 0.0, u2 = 0.0;                  // commanded control channels
    double u1_applied = 0.0, u2_applied = 0.0;  // after disturbance
    double grad_mag = 0.0;
    double dtheta = 0.0;
    double delta = 0.0;     // signed cross-track deviation vs the reference path
    double lyapunov = 0.0;  // Xi
};

struct Trajectory {
    std::vector<TrajectorySample> samples;
};

struct Metrics {
    bool converged = false;
    std::optional<double> convergence_time;  // T_eps [s]
    double max_deviation = 0.0;              // delta_m [m]
    double final_x = 0.0, final_y = 0.0, final_theta = 0.0;
    bool lyapunov_monotone = true;
    double lyapunov_max_jump = 0.0;
    double min_clearance = std::numeric_limits<double>::infinity();
    bool diverged = false;
    bool collided = false;
    bool blowup = false;
    double end_time = 0.0;
};

struct RunResult {
    Trajectory trajectory;
    Metrics metrics;
};

// ---------- disturbance ----------

/// Adds per-channel uniform noise in [-a, a], then clamps to the active
/// saturation bound. Fractional saturation clamps at fraction * reference_max
/// where reference_max is the peak channel magnitude of an undisturbed run.
/// Channel draw order is fixed (channel 0 then 1); no draw when a = 0.
inline ControlVector apply_disturbance(const ControlVector& u, const Disturbance& d, Rng& rng,
                                       std::optional<double> reference_max = std::nullopt) {
    double c0 = control_channel(u, 0);
    double c1 = control_channel(u, 1);
    if (d.noise_amplitude > 0.0) {
        c0 += rng.uniform_symmetric(d.noise_amplitude);
        c1 += rng.uniform_symmetric(d.noise_amplitude);
    }
    std::optional<double> bound;
    if (d.saturation_limit) bound = *d.saturation_limit;
    if (d.saturation_fraction) {
        if (!reference_max) throw MissingReferenceMax();
        bound = *d.saturation_fraction * *reference_max;
    }
    if (bound) {
        c0 = std::clamp(c0, -*bound, *bound);
        c1 = std::clamp(c1, -*bound, *bound);
    }
    ControlVector out = u;
    std::visit(
        [&](auto& c) {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, DdrKinematicControl>) {
                c.omega_right = c0;
                c.omega_left = c1;
            } else if constexpr (std::is_same_v<T, FsrKinematicControl>) {
                c.omega_hub = c0;
                c.phi = c1;
            } else {
                c.torque_right = c0;
                c.torque_left = c1;
            }
        },
        out);
    return out;
}

namespace detail {

struct ControlDecision {
    ControlVector commanded;
    ControlVector applied;
    double grad_mag = 0.0;
    double dtheta = 0.0;
};

inline ControlDecision decide_control(const RobotState& s, const PotentialField& field,
                                      const Scenario& sc, Rng& rng,
                                      std::optional<double> reference_max,
                                      bool with_disturbance) {
    ControlDecision dec;
    const Vec2 g = gradient_at(field, s.position);
    dec.grad_mag = norm(g);
    const auto dth = heading_error(g, s.theta);
    dec.dtheta = dth.value_or(0.0);
    const RobotParams& cp = sc.controller_params();
    if (is_dynamic(sc.robot_kind)) {
        const SyncSignal sync = sync_dynamic(g, s.v, s.theta, sc.gains);
        const SyncSignal damp = damping_force(g, s, sc.gains, sc.damping);
        dec.commanded = control_dynamic(sync, damp, cp);
    } else {
        dec.commanded = control_kinematic(sync_kinematic(g, s.theta, sc.gains),
                                          sc.robot_kind, cp);
    }
    dec.applied = with_disturbance
                      ? apply_disturbance(dec.commanded, sc.disturbance, rng, reference_max)
                      : dec.commanded;
    return dec;
}

/// Advances the plant one step with the applied control held constant
/// (zero-order hold across RK4 sub-stages). Plant parameters, not the
/// controller's, govern the motion.
inline RobotState integrate_step(const RobotState& s, const ControlVector& applied,
                                 const Scenario& sc, double dt) {
    const RobotParams& plant = sc.robot;
    RobotState out = s;
    if (is_dynamic(sc.robot_kind)) {
        const auto& u = std::get<DdrDynamicControl>(applied);
        const double a = (u.torque_right + u.torque_left) / (plant.mass * plant.wheel_radius);
        const double alpha = plant.width * (u.torque_right - u.torque_left) /
                             (2.0 * plant.inertia * plant.wheel_radius);
        auto deriv = [&](const RobotState& q) {
            return std::array<double, 5>{q.v * std::cos(q.theta), q.v * std::sin(q.theta),
                                         q.omega, a, alpha};
        };
        auto add = [](const RobotState& q, const std::array<double, 5>& d, double h) {
            RobotState r = q;
            r.position.x += h * d[0];
            r.position.y += h * d[1];
            r.theta += h * d[2];
            r.v += h * d[3];
            r.omega += h * d[4];
            return r;
        };
        if (sc.sim.integrator == Integrator::Euler) {
            out = add(s, deriv(s), dt);
        } else {
            const auto k1 = deriv(s);
            const auto k2 = deriv(add(s, k1, dt / 2));
            const auto k3 = deriv(add(s, k2, dt / 2));
            const auto k4 = deriv(add(s, k3, dt));
            for (int i = 0; i < 5; ++i) {
                const double step = dt / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
                if (i == 0) out.position.x += step;
                if (i == 1) out.position.y += step;
                if (i == 2) out.theta += step;
                if (i == 3) out.v += step;
                if (i == 4) out.omega += step;
            }
        }
        return out;
    }

    // Kinematic models: the applied control fixes the local velocity.
    double v = 0.0, omega = 0.0;
    if (sc.robot_kind == RobotKind::DdrKinematic) {
        const auto& u = std::get<DdrKinematicControl>(applied);
        v = plant.wheel_radius * (u.omega_right + u.omega_left) / 2.0;
        omega = plant.wheel_radius * (u.omega_right - u.omega_left) / plant.width;
    } else {
        const auto& u = std::get<FsrKinematicControl>(applied);
        // steering stop: the plant cannot realize more than phi_max
        const double phi = std::clamp(u.phi, -plant.phi_max, plant.phi_max);
        v = plant.wheel_radius * u.omega_hub;
        omega = v * std::tan(phi) / plant.wheelbase;
    }
    auto deriv = [&](double theta) {
        return std::array<double, 3>{v * std::cos(theta), v * std::sin(theta), omega};
    };
    if (sc.sim.integrator == Integrator::Euler) {
        const auto d = deriv(s.theta);
        out.position.x += dt * d[0];
        out.position.y += dt * d[1];
        out.theta += dt * d[2];
    } else {
        const auto k1 = deriv(s.theta);
        const auto k2 = deriv(s.theta + dt / 2 * k1[2]);
        const auto k3 = deriv(s.theta + dt / 2 * k2[2]);
        const auto k4 = deriv(s.theta + dt * k3[2]);
        out.position.x += dt / 6.0 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]);
        out.position.y += dt / 6.0 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1]);
        out.theta += dt / 6.0 * (k1[2] + 2 * k2[2] + 2 * k3[2] + k4[2]);
    }
    out.v = v;
    out.omega = omega;
    return out;
}

inline bool blown_up(const RobotState& s) {
    return !(std::abs(s.position.x) < kBlowupLimit && std::abs(s.position.y) < kBlowupLimit &&
             std::abs(s.v) < kBlowupLimit && std::abs(s.omega) < kBlowupLimit);
}

}  // namespace detail

/// One closed-loop step: guidance -> control -> disturbance -> plant.
/// Throws LeftAdmissibleSpace / NumericalBlowup on the corresponding events.
inline RobotState step(const RobotState& s, const PotentialField& field, const Scenario& sc,
                       Rng& rng, std::optional<double> reference_max = std::nullopt) {
    const auto dec = detail::decide_control(s, field, sc, rng, reference_max, true);
    RobotState next = detail::integrate_step(s, dec.applied, sc, sc.sim.dt);
    if (detail::blown_up(next)) throw NumericalBlowup();
    if (!is_admissible(sc.workspace, next.position)) throw LeftAdmissibleSpace();
    return next;
}

/// Traces the pure gradient system X_dot = -grad V from start with the
/// configured integrator until within pos_tol of the pinned target or t_max.
/// Throws StalledPath when the guidance vanishes away from the target.
/// Interpolated guidance right beside a wall can carry a spurious into-wall
/// component; a step that would leave the admissible space slides along the
/// wall (tangential component only) and the trace stops if even that is
/// blocked.
inline std::vector<Vec2> reference_path(const PotentialField& field, Vec2 start,
                                        const SimConfig& cfg) {
    if (!is_admissible(field.ws, start)) throw PointNotAdmissible();
    std::vector<Vec2> path{start};
    const long long max_steps = static_cast<long long>(cfg.t_max / cfg.dt + 1e-9);
    Vec2 x = start;
    auto guidance = [&](Vec2 p, bool& ok) -> Vec2 {
        if (!is_admissible(field.ws, p)) {
            ok = false;
            return {};
        }
        return gradient_at(field, p);
    };
    for (long long n = 0; n < max_steps; ++n) {
        if (distance(x, field.target_position) <= cfg.pos_tol) break;
        bool ok = true;
        const Vec2 k1 = guidance(x, ok);
        if (!ok) break;
        if (norm(k1) < kZeroGuidance) throw StalledPath();
        Vec2 next = x + cfg.dt * k1;  // fallback when RK4 sub-stages poke a wall
        if (cfg.integrator == Integrator::Rk4) {
            bool sub_ok = true;
            const Vec2 k2 = guidance(x + (cfg.dt / 2) * k1, sub_ok);
            const Vec2 k3 = sub_ok ? guidance(x + (cfg.dt / 2) * k2, sub_ok) : Vec2{};
            const Vec2 k4 = sub_ok ? guidance(x + cfg.dt * k3, sub_ok) : Vec2{};
            if (sub_ok) next = x + (cfg.dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        if (!is_admissible(field.ws, next)) {
            const Vec2 along_x{next.x, x.y};
            const Vec2 along_y{x.x, next.y};
            const bool ok_x = is_admissible(field.ws, along_x);
            const bool ok_y = is_admissible(field.ws, along_y);
            if (ok_x && (!ok_y || std::abs(next.x - x.x) >= std::abs(next.y - x.y)))
                next = along_x;
            else if (ok_y)
                next = along_y;
            else
                break;
        }
        x = next;
        path.push_back(x);
    }
    return path;
}

// ---------- deviation ----------

namespace detail {

/// Exact nearest-segment queries against a polyline via a uniform bucket
/// grid with expanding-ring search.
class SegmentIndex {
public:
    explicit SegmentIndex(const std::vector<Vec2>& poly) : poly_(poly) {
        if (poly_.size() < 2) return;
        double len = 0.0;
        lo_ = hi_ = poly_[0];
        for (size_t i = 0; i < poly_.size(); ++i) {
            lo_.x = std::min(lo_.x, poly_[i].x);
            lo_.y = std::min(lo_.y, poly_[i].y);
            hi_.x = std::max(hi_.x, poly_[i].x);
            hi_.y = std::max(hi_.y, poly_[i].y);
            if (i) len += distance(poly_[i - 1], poly_[i]);
        }
        cell_ = std::max({len / 256.0, (hi_.x - lo_.x) / 512.0, (hi_.y - lo_.y) / 512.0, 1e-9});
        nx_ = static_cast<int>((hi_.x - lo_.x) / cell_) + 1;
        ny_ = static_cast<int>((hi_.y - lo_.y) / cell_) + 1;
        buckets_.assign(static_cast<size_t>(nx_) * ny_, {});
        for (size_t i = 0; i + 1 < poly_.size(); ++i) {
            const int x0 = bucket_x(std::min(poly_[i].x, poly_[i + 1].x));
            const int x1 = bucket_x(std::max(poly_[i].x, poly_[i + 1].x));
            const int y0 = bucket_y(std::min(poly_[i].y, poly_[i + 1].y));
            const int y1 = bucket_y(std::max(poly_[i].y, poly_[i + 1].y));
            for (int by = y0; by <= y1; ++by)
                for (int bx = x0; bx <= x1; ++bx)
                    buckets_[static_cast<size_t>(by) * nx_ + bx].push_back(static_cast<int>(i));
        }
    }

    /// Signed distance to the nearest segment; positive to the left of the
    /// reference direction of travel.
    double signed_distance(Vec2 p) const {
        if (poly_.empty()) return 0.0;
        if (poly_.size() < 2) return distance(p, poly_[0]);
        double best = std::numeric_limits<double>::infinity();
        int best_seg = -1;
        double best_t = 0.0;
        const int cx = bucket_x(p.x), cy = bucket_y(p.y);
        // distance from p to the indexed bounding box: a ring at radius r can
        // hold nothing closer than this plus (r-1) bucket widths
        const double outside = std::hypot(std::max({lo_.x - p.x, 0.0, p.x - hi_.x}),
                                          std::max({lo_.y - p.y, 0.0, p.y - hi_.y}));
        auto scan_bucket = [&](int bx, int by) {
            if (bx < 0 || by < 0 || bx >= nx_ || by >= ny_) return;
            for (int seg : buckets_[static_cast<size_t>(by) * nx_ + bx]) {
                const Vec2 a = poly_[seg], b = poly_[seg + 1];
                const Vec2 ab = b - a;
                const double den = dot(ab, ab);
                const double t = den > 0.0 ? std::clamp(dot(p - a, ab) / den, 0.0, 1.0) : 0.0;
                const double d = distance(p, a + t * ab);
                if (d < best) {
                    best = d;
                    best_seg = seg;
                    best_t = t;
                }
            }
        };
        const int max_ring = nx_ + ny_ + 2;
        for (int ring = 0; ring <= max_ring; ++ring) {
            const double ring_floor = outside + std::max(0, ring - 1) * cell_;
            if (best_seg >= 0 && ring_floor > best) break;
            if (ring == 0) {
                scan_bucket(cx, cy);
                continue;
            }
            for (int bx = cx - ring; bx <= cx + ring; ++bx) {
                scan_bucket(bx, cy - ring);
                scan_bucket(bx, cy + ring);
            }
            for (int by = cy - ring + 1; by <= cy + ring - 1; ++by) {
                scan_bucket(cx - ring, by);
                scan_bucket(cx + ring, by);
            }
        }
        if (best_seg < 0) return distance(p, poly_[0]);
        const Vec2 a = poly_[best_seg], b = poly_[best_seg + 1];
        const Vec2 closest = a + best_t * (b - a);
        const double side = cross(b - a, p - closest);
        return side >= 0.0 ? best : -best;
    }

private:
    int bucket_x(double x) const { return std::clamp(static_cast<int>((x - lo_.x) / cell_), 0, nx_ - 1); }
    int bucket_y(double y) const { return std::clamp(static_cast<int>((y - lo_.y) / cell_), 0, ny_ - 1); }

    const std::vector<Vec2>& poly_;
    Vec2 lo_, hi_;
    double cell_ = 1.0;
    int nx_ = 1, ny_ = 1;
    std::vector<std::vector<int>> buckets_;
};

}  // namespace detail

/// Signed cross-track deviation of each trajectory sample from the nearest
/// reference-path segment (positive left of the travel direction), plus the
/// maximum magnitude.
struct DeviationTrace {
    std::vector<double> delta;
    double max_abs = 0.0;
};

inline DeviationTrace deviation_trace(const Trajectory& traj, const std::vector<Vec2>& ref) {
    DeviationTrace out;
    out.delta.reserve(traj.samples.size());
    // Re-sample the reference at ~1/4096 of its arc length: integrator-step
    // vertices are micrometers apart and the sagitta error of the coarser
    // polyline is orders of magnitude below any deviation of interest.
    std::vector<Vec2> coarse;
    if (ref.size() > 4096) {
        double len = 0.0;
        for (size_t i = 1; i < ref.size(); ++i) len += distance(ref[i - 1], ref[i]);
        const double spacing = std::max(len / 4096.0, 1e-9);
        coarse.push_back(ref.front());
        for (const Vec2& p : ref)
            if (distance(p, coarse.back()) >= spacing) coarse.push_back(p);
        if (!(coarse.back() == ref.back())) coarse.push_back(ref.back());
    }
    const detail::SegmentIndex index(coarse.empty() ? ref : coarse);
    for (const auto& s : traj.samples) {
        const double d = index.signed_distance({s.x, s.y});
        out.delta.push_back(d);
        out.max_abs = std::max(out.max_abs, std::abs(d));
    }
    return out;
}

/// Lyapunov candidate along a trajectory. Kinematic models use
/// Xi = V + dtheta^2 / 2; the dynamic DDR uses
/// Xi = K1 M V + K2 I dtheta^2 / 2 + I omega^2 / 2 + M v^2 / 2.
inline std::vector<double> lyapunov_trace(const Trajectory& traj, const PotentialField& field,
                                          RobotKind kind, const RobotParams& p,
                                          const GainSet& g) {
    std::vector<double> xi;
    xi.reserve(traj.samples.size());
    for (const auto& s : traj.samples) {
        const Vec2 pos{s.x, s.y};
        if (!is_admissible(field.ws, pos)) {  // terminal collision sample
            xi.push_back(xi.empty() ? 0.0 : xi.back());
            continue;
        }
        const double v_pot = value_at(field, pos);
        const auto dth = heading_error(gradient_at(field, pos), s.theta);
        const double d = dth.value_or(0.0);
        if (is_dynamic(kind)) {
            xi.push_back(g.k1 * p.mass * v_pot + 0.5 * g.k2 * p.inertia * d * d +
                         0.5 * p.inertia * s.omega * s.omega + 0.5 * p.mass * s.v * s.v);
        } else {
            xi.push_back(v_pot + 0.5 * d * d);
        }
    }
    return xi;
}

/// Closed-loop run. Ends on convergence (position within pos_tol of the
/// pinned target), t_max, collision, or blowup; collisions and blowups are
/// reported in Metrics rather than thrown. When fractional saturation is
/// requested and no reference maximum is supplied, an undisturbed pre-run of
/// the same scenario provides it.
inline RunResult run(const Scenario& sc, const PotentialField& field,
                     std::optional<double> reference_max = std::nullopt) {
    if (sc.disturbance.saturation_fraction && !reference_max) {
        Scenario undisturbed = sc;
        undisturbed.disturbance = Disturbance{};
        const RunResult pre = run(undisturbed, field);
        double peak = 0.0;
        for (const auto& s : pre.trajectory.samples)
            peak = std::max({peak, std::abs(s.u1_applied), std::abs(s.u2_applied)});
        reference_max = peak;
    }

    RunResult out;
    Trajectory& traj = out.trajectory;
    Metrics& m = out.metrics;
    Rng rng(sc.sim.seed);
    RobotState state = sc.initial;
    const long long max_steps = static_cast<long long>(sc.sim.t_max / sc.sim.dt + 1e-9);

    auto record = [&](const RobotState& s, double t, const detail::ControlDecision* dec) {
        TrajectorySample r;
        r.t = t;
        r.x = s.position.x;
        r.y = s.position.y;
        r.theta = s.theta;
        r.v = s.v;
        r.omega = s.omega;
        if (dec) {
            r.u1 = control_channel(dec->commanded, 0);
            r.u2 = control_channel(dec->commanded, 1);
            r.u1_applied = control_channel(dec->applied, 0);
            r.u2_applied = control_channel(dec->applied, 1);
            r.grad_mag = dec->grad_mag;
            r.dtheta = dec->dtheta;
        }
        traj.samples.push_back(r);
    };

    auto check_convergence = [&](double t) {
        if (!m.converged && distance(state.position, field.target_position) <= sc.sim.pos_tol) {
            m.converged = true;
            m.convergence_time = t;
        }
    };

    detail::ControlDecision dec =
        detail::decide_control(state, field, sc, rng, reference_max, true);
    record(state, 0.0, &dec);
    check_convergence(0.0);

    long long n = 0;
    while (n < max_steps && !(m.converged && sc.sim.stop_on_converge)) {
        RobotState next = detail::integrate_step(state, dec.applied, sc, sc.sim.dt);
        ++n;
        const double t = static_cast<double>(n) * sc.sim.dt;
        if (detail::blown_up(next)) {
            m.blowup = true;
            record(next, t, nullptr);
            break;
        }
        if (!is_admissible(sc.workspace, next.position)) {
            m.collided = true;
            record(next, t, nullptr);
            break;
        }
        state = next;
        dec = detail::decide_control(state, field, sc, rng, reference_max, true);
        record(state, t, &dec);
        check_convergence(t);
    }

    // deviation vs the reference path from the same start
    std::vector<Vec2> ref;
    try {
        ref = reference_path(field, sc.initial.position, sc.sim);
    } catch (const StalledPath&) {
        ref = {sc.initial.position};
    }
    const DeviationTrace dev = deviation_trace(traj, ref);
    const std::vector<double> xi =
        lyapunov_trace(traj, field, sc.robot_kind, sc.robot, sc.gains);
    for (size_t i = 0; i < traj.samples.size(); ++i) {
        traj.samples[i].delta = dev.delta[i];
        traj.samples[i].lyapunov = xi[i];
    }
    m.max_deviation = dev.max_abs;
    for (size_t i = 1; i < xi.size(); ++i)
        m.lyapunov_max_jump = std::max(m.lyapunov_max_jump, xi[i] - xi[i - 1]);
    m.lyapunov_monotone = m.lyapunov_max_jump <= kLyapunovJumpTol;

    const std::vector<double> clearance = obstacle_clearance_map(sc.workspace);
    for (const auto& s : traj.samples) {
        const Vec2 p{s.x, s.y};
        const CellIndex c = cell_index_of(sc.workspace, p);
        if (!sc.workspace.in_bounds(c.ix, c.iy)) {
            m.min_clearance = std::min(m.min_clearance, 0.0);
            continue;
        }
        const detail::NodeFrame nf = detail::node_frame(sc.workspace, p);
        auto at = [&](int ix, int iy) { return clearance[sc.workspace.index(ix, iy)]; };
        const double lo = at(nf.i0, nf.j0) + nf.fu * (at(nf.i1, nf.j0) - at(nf.i0, nf.j0));
        const double hi = at(nf.i0, nf.j1) + nf.fu * (at(nf.i1, nf.j1) - at(nf.i0, nf.j1));
        m.min_clearance = std::min(m.min_clearance, lo + nf.fv * (hi - lo));
    }

    const TrajectorySample& last = traj.samples.back();
    m.final_x = last.x;
    m.final_y = last.y;
    m.final_theta = last.theta;
    m.end_time = last.t;
    // Divergence: catastrophic end, or no convergence while the Lyapunov
    // trace rose well above its initial value (closed-loop instability).
    double xi_max = 0.0;
    for (double v : xi) xi_max = std::max(xi_max, v);
    m.diverged = m.blowup || m.collided ||
                 (!m.converged && !xi.empty() && xi_max > 1.5 * xi.front() + 0.1);
    return out;
}

// ---------- exports ----------

inline std::string trajectory_to_csv(const Trajectory& traj) {
    std::string out =
        "t,x,y,theta,v,omega,u1,u2,u1_applied,u2_applied,grad_mag,dtheta,delta,lyapunov\n";
    for (const auto& s : traj.samples) {
        out += format_g17(s.t) + ',' + format_g17(s.x) + ',' + format_g17(s.y) + ',' +
               format_g17(s.theta) + ',' + format_g17(s.v) + ',' + format_g17(s.omega) + ',' +
               format_g17(s.u1) + ',' + format_g17(s.u2) + ',' + format_g17(s.u1_applied) + ',' +
               format_g17(s.u2_applied) + ',' + format_g17(s.grad_mag) + ',' +
               format_g17(s.dtheta) + ',' + format_g17(s.delta) + ',' + format_g17(s.lyapunov) +
               '\n';
    }
    return out;
}

inline nlohmann::json metrics_to_json(const Metrics& m) {
    nlohmann::json j;
    j["converged"] = m.converged;
    if (m.convergence_time)
        j["convergence_time"] = *m.convergence_time;
    else
        j["convergence_time"] = nullptr;
    j["max_deviation"] = m.max_deviation;
    j["final_pose"] = {{"x", m.final_x}, {"y", m.final_y}, {"theta", m.final_theta}};
    j["lyapunov_monotone"] = m.lyapunov_monotone;
    j["lyapunov_max_jump"] = m.lyapunov_max_jump;
    j["min_clearance"] = std::isfinite(m.min_clearance) ? m.min_clearance : -1.0;
    j["diverged"] = m.diverged;
    j["collided"] = m.collided;
    j["blowup"] = m.blowup;
    j["end_time"] = m.end_time;
    return j;
}

}  // namespace hpfnav
