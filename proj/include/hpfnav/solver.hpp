#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "hpfnav/errors.hpp"
#include "hpfnav/geometry.hpp"
#include "hpfnav/io_util.hpp"
#include "hpfnav/workspace.hpp"

namespace hpfnav {

/// Settings of the successive over-relaxation solver. The stopping residual
/// is the normalized one reported by residual(): the largest per-cell update
/// a plain Gauss-Seidel step would still make.
struct SolverConfig {
    double relaxation_factor = 1.8;  // in (0, 2)
    double tolerance = 1e-8;
    int max_iterations = 200000;  // full sweeps
    int picard_max = 50;          // outer iterations of the directional solve
    double picard_relax = 0.5;    // in (0, 1]; blend factor for sigma updates
};

/// A solved potential over a workspace. Values live on cell centers and are
/// meaningful on Free cells only; immutable after the solve, safe to query
/// from any number of threads.
///
/// sigma holds the per-cell conductance multiplier (1 for plain Laplace,
/// gamma for the weighted kind, the forward/backward sigma assignment for the
/// directional kind). Face conductance between Free cells is the harmonic
/// mean of the two sigmas; faces toward obstacles or the grid border carry
/// the cell's own sigma toward border_value when dirichlet_border is set and
/// zero flux otherwise.
struct PotentialField {
    Workspace ws;
    BvpKind kind = BvpKind::Neumann;
    std::vector<double> values;
    std::vector<char> pinned;
    std::vector<std::pair<int, double>> pin_list;
    std::vector<double> sigma;
    bool dirichlet_border = false;
    double border_value = 1.0;
    double residual = 0.0;
    int iterations_used = 0;
    double max_gradient_magnitude = 0.0;  // C_m over Free cells
    bool picard_converged = true;
    int picard_iterations = 0;
    CellIndex start_cell{-1, -1};
    CellIndex target_cell{-1, -1};
    Vec2 target_position;                  // snapped target cell center
    std::vector<double> guidance_x;        // nodal -dV/dx
    std::vector<double> guidance_y;        // nodal -dV/dy
};

namespace detail {

/// Per-face conductances of the discrete operator, precomputed per sigma
/// assignment. g_east[c] is the face (ix,iy)-(ix+1,iy); g_north likewise;
/// g_border collects faces toward obstacles/outside (nonzero only for the
/// Dirichlet-border kind); den is the row sum.
struct Stencil {
    std::vector<double> g_east, g_north, g_border, den;
};

inline double harmonic_mean(double a, double b) {
    if (a <= 0.0 || b <= 0.0) return 0.0;
    return 2.0 * a * b / (a + b);
}

inline Stencil build_stencil(const Workspace& ws, const std::vector<double>& sigma,
                             bool dirichlet_border) {
    const int w = ws.width_cells, h = ws.height_cells, n = ws.cell_count();
    Stencil st;
    st.g_east.assign(n, 0.0);
    st.g_north.assign(n, 0.0);
    st.g_border.assign(n, 0.0);
    st.den.assign(n, 0.0);
    for (int iy = 0; iy < h; ++iy) {
        for (int ix = 0; ix < w; ++ix) {
            const int c = ws.index(ix, iy);
            if (ws.cells[c] != CellClass::Free) continue;
            const int dxs[4] = {1, -1, 0, 0};
            const int dys[4] = {0, 0, 1, -1};
            for (int k = 0; k < 4; ++k) {
                const int nx = ix + dxs[k], ny = iy + dys[k];
                double g = 0.0;
                if (ws.is_free(nx, ny)) {
                    g = harmonic_mean(sigma[c], sigma[ws.index(nx, ny)]);
                } else if (dirichlet_border) {
                    g = sigma[c];
                    st.g_border[c] += g;
                }
                st.den[c] += g;
                if (k == 0 && ws.is_free(nx, ny)) st.g_east[c] = g;
                if (k == 2 && ws.is_free(nx, ny)) st.g_north[c] = g;
            }
        }
    }
    return st;
}

/// One lexicographic SOR sweep in place. Deterministic: fixed order, single
/// thread.
inline void sor_sweep(const Workspace& ws, const Stencil& st, const std::vector<char>& pinned,
                      double omega, double border_value, std::vector<double>& v) {
    const int w = ws.width_cells, h = ws.height_cells;
    for (int iy = 0; iy < h; ++iy) {
        for (int ix = 0; ix < w; ++ix) {
            const int c = ws.index(ix, iy);
            if (ws.cells[c] != CellClass::Free || pinned[c] || st.den[c] <= 0.0) continue;
            double num = st.g_border[c] * border_value;
            if (ix + 1 < w) num += st.g_east[c] * v[c + 1];
            if (ix > 0) num += st.g_east[c - 1] * v[c - 1];
            if (iy + 1 < h) num += st.g_north[c] * v[c + w];
            if (iy > 0) num += st.g_north[c - w] * v[c - w];
            v[c] += omega * (num / st.den[c] - v[c]);
        }
    }
}

inline double max_residual(const Workspace& ws, const Stencil& st, const std::vector<char>& pinned,
                           double border_value, const std::vector<double>& v) {
    const int w = ws.width_cells, h = ws.height_cells;
    double worst = 0.0;
    for (int iy = 0; iy < h; ++iy) {
        for (int ix = 0; ix < w; ++ix) {
            const int c = ws.index(ix, iy);
            if (ws.cells[c] != CellClass::Free || pinned[c] || st.den[c] <= 0.0) continue;
            double num = st.g_border[c] * border_value;
            if (ix + 1 < w) num += st.g_east[c] * v[c + 1];
            if (ix > 0) num += st.g_east[c - 1] * v[c - 1];
            if (iy + 1 < h) num += st.g_north[c] * v[c + w];
            if (iy > 0) num += st.g_north[c - w] * v[c - w];
            worst = std::max(worst, std::abs(num / st.den[c] - v[c]));
        }
    }
    return worst;
}

/// Nodal guidance (-grad V) by central differences, one-sided next to
/// obstacles and the border, zero where no Free neighbor exists along an
/// axis. Also records C_m.
inline void compute_guidance(PotentialField& f) {
    const Workspace& ws = f.ws;
    const int w = ws.width_cells, h = ws.height_cells;
    const double cs = ws.cell_size;
    f.guidance_x.assign(ws.cell_count(), 0.0);
    f.guidance_y.assign(ws.cell_count(), 0.0);
    f.max_gradient_magnitude = 0.0;
    for (int iy = 0; iy < h; ++iy) {
        for (int ix = 0; ix < w; ++ix) {
            const int c = ws.index(ix, iy);
            if (ws.cells[c] != CellClass::Free) continue;
            auto axis = [&](bool lo_free, bool hi_free, double lo, double hi, double mid) {
                if (lo_free && hi_free) return (hi - lo) / (2.0 * cs);
                if (hi_free) return (hi - mid) / cs;
                if (lo_free) return (mid - lo) / cs;
                return 0.0;
            };
            const double dvdx =
                axis(ws.is_free(ix - 1, iy), ws.is_free(ix + 1, iy),
                     ws.is_free(ix - 1, iy) ? f.values[c - 1] : 0.0,
                     ws.is_free(ix + 1, iy) ? f.values[c + 1] : 0.0, f.values[c]);
            const double dvdy =
                axis(ws.is_free(ix, iy - 1), ws.is_free(ix, iy + 1),
                     ws.is_free(ix, iy - 1) ? f.values[c - w] : 0.0,
                     ws.is_free(ix, iy + 1) ? f.values[c + w] : 0.0, f.values[c]);
            f.guidance_x[c] = -dvdx;
            f.guidance_y[c] = -dvdy;
            f.max_gradient_magnitude =
                std::max(f.max_gradient_magnitude, std::hypot(dvdx, dvdy));
        }
    }
}

/// Runs SOR until the normalized residual drops below tolerance.
inline void relax_to_tolerance(PotentialField& f, const Stencil& st, const SolverConfig& cfg) {
    double r = max_residual(f.ws, st, f.pinned, f.border_value, f.values);
    int it = 0;
    while (r > cfg.tolerance) {
        if (it >= cfg.max_iterations) {
            f.residual = r;
            throw NonConvergence(r, f.iterations_used + it);
        }
        sor_sweep(f.ws, st, f.pinned, cfg.relaxation_factor, f.border_value, f.values);
        ++it;
        r = max_residual(f.ws, st, f.pinned, f.border_value, f.values);
    }
    f.iterations_used += it;
    f.residual = r;
}

inline void add_pin(PotentialField& f, CellIndex c, double value) {
    const int idx = f.ws.index(c.ix, c.iy);
    f.pinned[idx] = 1;
    f.values[idx] = value;
    f.pin_list.emplace_back(idx, value);
}

inline PotentialField make_field(const Workspace& ws, BvpKind kind) {
    PotentialField f;
    f.ws = ws;
    f.kind = kind;
    f.values.assign(ws.cell_count(), 0.0);
    f.pinned.assign(ws.cell_count(), 0);
    f.sigma.assign(ws.cell_count(), 1.0);
    return f;
}

inline void finalize(PotentialField& f) {
    compute_guidance(f);
}

}  // namespace detail

/// Generic relaxation entry: Laplace with zero-flux boundaries and arbitrary
/// pinned cells. The named solves below build on the same machinery.
inline PotentialField solve_laplace_pinned(const Workspace& ws,
                                           const std::vector<std::pair<CellIndex, double>>& pins,
                                           const SolverConfig& cfg) {
    PotentialField f = detail::make_field(ws, BvpKind::Neumann);
    for (const auto& [c, val] : pins) detail::add_pin(f, c, val);
    const detail::Stencil st = detail::build_stencil(ws, f.sigma, false);
    detail::relax_to_tolerance(f, st, cfg);
    detail::finalize(f);
    return f;
}

/// Laplace with homogeneous Neumann boundaries, V(start) = 1, V(target) = 0.
inline PotentialField solve_neumann(const Workspace& ws, const BvpSpec& spec,
                                    const SolverConfig& cfg) {
    if (spec.kind != BvpKind::Neumann) throw ValidationError("solve_neumann: kind mismatch");
    PotentialField f = detail::make_field(ws, BvpKind::Neumann);
    f.start_cell = snap_to_free(ws, spec.start, "start");
    f.target_cell = snap_to_free(ws, spec.target, "target");
    f.target_position = ws.cell_center(f.target_cell.ix, f.target_cell.iy);
    const auto reach = reachable_from(ws, f.start_cell);
    if (!reach[ws.index(f.target_cell.ix, f.target_cell.iy)]) throw DisconnectedDomain();
    detail::add_pin(f, f.start_cell, 1.0);
    detail::add_pin(f, f.target_cell, 0.0);
    const detail::Stencil st = detail::build_stencil(ws, f.sigma, false);
    detail::relax_to_tolerance(f, st, cfg);
    detail::finalize(f);
    return f;
}

/// As solve_neumann plus a third pin V = 1 at the node nearest
/// target + epsilon*h, which makes the guidance approach the target along h.
inline PotentialField solve_orientation(const Workspace& ws, const BvpSpec& spec,
                                        const SolverConfig& cfg) {
    if (spec.kind != BvpKind::Orientation)
        throw ValidationError("solve_orientation: kind mismatch");
    if (!std::isfinite(spec.heading)) throw ValidationError("orientation heading must be finite");
    PotentialField f = detail::make_field(ws, BvpKind::Orientation);
    f.start_cell = snap_to_free(ws, spec.start, "start");
    f.target_cell = snap_to_free(ws, spec.target, "target");
    f.target_position = ws.cell_center(f.target_cell.ix, f.target_cell.iy);
    const Vec2 h{std::cos(spec.heading), std::sin(spec.heading)};
    const Vec2 offset_point =
        f.target_position + spec.epsilon_cells * ws.cell_size * h;
    const CellIndex off = cell_index_of(ws, offset_point);
    if (!ws.is_free(off.ix, off.iy))
        throw OffsetCellInvalid("orientation offset cell is not Free");
    if (off.ix == f.target_cell.ix && off.iy == f.target_cell.iy)
        throw OffsetCellInvalid("orientation offset cell coincides with the target cell");
    const auto reach = reachable_from(ws, f.start_cell);
    if (!reach[ws.index(f.target_cell.ix, f.target_cell.iy)]) throw DisconnectedDomain();
    detail::add_pin(f, f.start_cell, 1.0);
    detail::add_pin(f, f.target_cell, 0.0);
    detail::add_pin(f, off, 1.0);
    const detail::Stencil st = detail::build_stencil(ws, f.sigma, false);
    detail::relax_to_tolerance(f, st, cfg);
    detail::finalize(f);
    return f;
}

/// Weighted-conductance solve of div(gamma grad V) = 0 with the same pins as
/// solve_neumann. Face conductance is the harmonic mean of adjacent cell
/// gammas, zero if either side is zero.
inline PotentialField solve_gamma(const Workspace& ws, const BvpSpec& spec,
                                  const SolverConfig& cfg) {
    if (spec.kind != BvpKind::Gamma) throw ValidationError("solve_gamma: kind mismatch");
    if (ws.gamma.empty()) throw ValidationError("gamma solve requires a gamma map");
    PotentialField f = detail::make_field(ws, BvpKind::Gamma);
    f.sigma = ws.gamma;
    f.start_cell = snap_to_free(ws, spec.start, "start");
    f.target_cell = snap_to_free(ws, spec.target, "target");
    f.target_position = ws.cell_center(f.target_cell.ix, f.target_cell.iy);
    const auto reach = reachable_from(ws, f.start_cell, /*positive_gamma_only=*/true);
    if (!reach[ws.index(f.target_cell.ix, f.target_cell.iy)]) throw AllZeroGamma();
    detail::add_pin(f, f.start_cell, 1.0);
    detail::add_pin(f, f.target_cell, 0.0);
    const detail::Stencil st = detail::build_stencil(ws, f.sigma, false);
    detail::relax_to_tolerance(f, st, cfg);
    detail::finalize(f);
    return f;
}

/// Anisotropic directional solve: V = 1 on the domain boundary (and obstacle
/// faces), V(target) = 0, with a Picard outer loop switching each region
/// cell's sigma to sigma_forward where the guidance has positive component
/// along the constraint field and sigma_backward otherwise. Sigma updates are
/// relaxed by picard_relax (1 = pure switching, which can two-cycle on
/// band-boundary cells); the loop stops when the induced assignment stops
/// changing. Hitting picard_max flags the field instead of discarding it.
inline PotentialField solve_directional(const Workspace& ws, const BvpSpec& spec,
                                        const SolverConfig& cfg) {
    if (spec.kind != BvpKind::Directional)
        throw ValidationError("solve_directional: kind mismatch");
    if (spec.directional_region.size() != static_cast<size_t>(ws.cell_count()))
        throw ValidationError("directional_region must cover the grid");
    if (spec.directional_field.size() != static_cast<size_t>(ws.cell_count()))
        throw ValidationError("directional_field must cover the grid");
    if (spec.sigma_forward <= 0.0 || spec.sigma_backward <= 0.0)
        throw ValidationError("sigma_forward and sigma_backward must be positive");

    PotentialField f = detail::make_field(ws, BvpKind::Directional);
    f.dirichlet_border = true;
    f.border_value = 1.0;
    f.start_cell = snap_to_free(ws, spec.start, "start");
    f.target_cell = snap_to_free(ws, spec.target, "target");
    f.target_position = ws.cell_center(f.target_cell.ix, f.target_cell.iy);
    detail::add_pin(f, f.target_cell, 0.0);

    std::vector<char> assignment(ws.cell_count(), 1);  // 1 = forward sigma
    for (int c = 0; c < ws.cell_count(); ++c)
        if (spec.directional_region[c]) f.sigma[c] = spec.sigma_forward;

    f.picard_converged = false;
    for (int pass = 0; pass < cfg.picard_max; ++pass) {
        const detail::Stencil st = detail::build_stencil(ws, f.sigma, true);
        detail::relax_to_tolerance(f, st, cfg);
        detail::compute_guidance(f);
        ++f.picard_iterations;

        std::vector<char> want = assignment;
        double stale = 0.0;  // how far sigma sits from the wanted assignment
        for (int c = 0; c < ws.cell_count(); ++c) {
            if (!spec.directional_region[c] || f.ws.cells[c] != CellClass::Free) continue;
            const Vec2 g{f.guidance_x[c], f.guidance_y[c]};
            want[c] = dot(g, spec.directional_field[c]) > 0.0 ? 1 : 0;
            stale = std::max(stale, std::abs((want[c] ? spec.sigma_forward : spec.sigma_backward) -
                                             f.sigma[c]));
        }
        // fixed point: the assignment induced by the solved field is stable
        // and sigma has finished blending toward it
        if (stale <= 1e-9 * std::max(spec.sigma_forward, spec.sigma_backward)) {
            f.picard_converged = true;
            break;
        }
        assignment = want;
        for (int c = 0; c < ws.cell_count(); ++c) {
            if (!spec.directional_region[c]) continue;
            const double target_sigma = assignment[c] ? spec.sigma_forward : spec.sigma_backward;
            f.sigma[c] += cfg.picard_relax * (target_sigma - f.sigma[c]);
        }
    }
    detail::finalize(f);
    return f;
}

inline PotentialField solve_bvp(const Workspace& ws, const BvpSpec& spec,
                                const SolverConfig& cfg) {
    switch (spec.kind) {
        case BvpKind::Neumann: return solve_neumann(ws, spec, cfg);
        case BvpKind::Orientation: return solve_orientation(ws, spec, cfg);
        case BvpKind::Directional: return solve_directional(ws, spec, cfg);
        case BvpKind::Gamma: return solve_gamma(ws, spec, cfg);
    }
    throw ValidationError("unknown BVP kind");
}

/// Recomputes the max normalized residual over non-pinned Free cells.
inline double residual(const PotentialField& f) {
    const detail::Stencil st = detail::build_stencil(f.ws, f.sigma, f.dirichlet_border);
    return detail::max_residual(f.ws, st, f.pinned, f.border_value, f.values);
}

/// One extra relaxation sweep in place (diagnostic/test hook). Derived
/// arrays are refreshed.
inline void relax_sweep(PotentialField& f, double omega = 1.8) {
    const detail::Stencil st = detail::build_stencil(f.ws, f.sigma, f.dirichlet_border);
    detail::sor_sweep(f.ws, st, f.pinned, omega, f.border_value, f.values);
    detail::compute_guidance(f);
}

/// Indices of non-pinned Free cells that are a strict extremum among their
/// connected neighbors (positive-conductance faces; Dirichlet faces count as
/// a neighbor at border_value). Empty on a well-converged field. Comparisons
/// carry a slack of a few residuals so converged flat regions do not flag.
inline std::vector<int> check_max_principle(const PotentialField& f) {
    const Workspace& ws = f.ws;
    const detail::Stencil st = detail::build_stencil(ws, f.sigma, f.dirichlet_border);
    const double slack = std::max(1e-12, 4.0 * f.residual);
    std::vector<int> bad;
    for (int iy = 0; iy < ws.height_cells; ++iy) {
        for (int ix = 0; ix < ws.width_cells; ++ix) {
            const int c = ws.index(ix, iy);
            if (ws.cells[c] != CellClass::Free || f.pinned[c] || st.den[c] <= 0.0) continue;
            double lo = std::numeric_limits<double>::infinity(), hi = -lo;
            auto consider = [&](double g, double value) {
                if (g <= 0.0) return;
                lo = std::min(lo, value);
                hi = std::max(hi, value);
            };
            if (ix + 1 < ws.width_cells) consider(st.g_east[c], f.values[c + 1]);
            if (ix > 0) consider(st.g_east[c - 1], f.values[c - 1]);
            if (iy + 1 < ws.height_cells) consider(st.g_north[c], f.values[c + ws.width_cells]);
            if (iy > 0) consider(st.g_north[c - ws.width_cells], f.values[c - ws.width_cells]);
            consider(st.g_border[c], f.border_value);
            if (f.values[c] > hi + slack || f.values[c] < lo - slack) bad.push_back(c);
        }
    }
    return bad;
}

namespace detail {

struct NodeFrame {
    int i0, i1, j0, j1;
    double fu, fv;
    int home;  // index of the query's containing (Free) cell
};

inline NodeFrame node_frame(const Workspace& ws, Vec2 p) {
    NodeFrame nf{};
    const double u = (p.x - ws.origin.x) / ws.cell_size - 0.5;
    const double v = (p.y - ws.origin.y) / ws.cell_size - 0.5;
    nf.i0 = std::clamp(static_cast<int>(std::floor(u)), 0, std::max(ws.width_cells - 2, 0));
    nf.j0 = std::clamp(static_cast<int>(std::floor(v)), 0, std::max(ws.height_cells - 2, 0));
    nf.i1 = std::min(nf.i0 + 1, ws.width_cells - 1);
    nf.j1 = std::min(nf.j0 + 1, ws.height_cells - 1);
    nf.fu = nf.i1 > nf.i0 ? std::clamp(u - nf.i0, 0.0, 1.0) : 0.0;
    nf.fv = nf.j1 > nf.j0 ? std::clamp(v - nf.j0, 0.0, 1.0) : 0.0;
    const CellIndex home = cell_index_of(ws, p);
    nf.home = ws.index(home.ix, home.iy);
    return nf;
}

/// Bilinear interpolation of a nodal array between the four surrounding cell
/// centers; non-Free nodes take the value at the query's containing cell.
inline double bilerp(const Workspace& ws, const std::vector<double>& a, const NodeFrame& nf) {
    auto at = [&](int ix, int iy) {
        return ws.is_free(ix, iy) ? a[ws.index(ix, iy)] : a[nf.home];
    };
    const double v00 = at(nf.i0, nf.j0), v10 = at(nf.i1, nf.j0);
    const double v01 = at(nf.i0, nf.j1), v11 = at(nf.i1, nf.j1);
    const double lo = v00 + nf.fu * (v10 - v00);
    const double hi = v01 + nf.fu * (v11 - v01);
    return lo + nf.fv * (hi - lo);
}

}  // namespace detail

/// Guidance (-grad V) at an admissible point: bilinear interpolation of the
/// nodal central-difference gradients.
inline Vec2 gradient_at(const PotentialField& f, Vec2 p) {
    if (!is_admissible(f.ws, p)) throw PointNotAdmissible();
    const detail::NodeFrame nf = detail::node_frame(f.ws, p);
    return {detail::bilerp(f.ws, f.guidance_x, nf), detail::bilerp(f.ws, f.guidance_y, nf)};
}

/// Potential value at an admissible point, same interpolation scheme.
inline double value_at(const PotentialField& f, Vec2 p) {
    if (!is_admissible(f.ws, p)) throw PointNotAdmissible();
    return detail::bilerp(f.ws, f.values, detail::node_frame(f.ws, p));
}

// ---------- field CSV ----------
// First line `width,height,cell_size`, then height rows of width values, row
// 0 (bottom of the workspace) first. Obstacle cells export as nan.

inline std::string field_to_csv(const PotentialField& f) {
    std::string out = std::to_string(f.ws.width_cells) + "," +
                      std::to_string(f.ws.height_cells) + "," + format_g17(f.ws.cell_size) + "\n";
    for (int iy = 0; iy < f.ws.height_cells; ++iy) {
        for (int ix = 0; ix < f.ws.width_cells; ++ix) {
            const int c = f.ws.index(ix, iy);
            if (ix) out += ",";
            out += f.ws.cells[c] == CellClass::Free ? format_g17(f.values[c]) : "nan";
        }
        out += "\n";
    }
    return out;
}

/// Parses a field CSV back into per-cell values. Returns false on any shape
/// or syntax mismatch (caller re-solves).
inline bool values_from_csv(const std::string& csv, const Workspace& ws,
                            std::vector<double>& out) {
    std::istringstream in(csv);
    std::string line;
    if (!std::getline(in, line)) return false;
    int w = 0, h = 0;
    double cs = 0.0;
    if (std::sscanf(line.c_str(), "%d,%d,%lf", &w, &h, &cs) != 3) return false;
    if (w != ws.width_cells || h != ws.height_cells || cs != ws.cell_size) return false;
    out.assign(ws.cell_count(), 0.0);
    for (int iy = 0; iy < h; ++iy) {
        if (!std::getline(in, line)) return false;
        std::istringstream row(line);
        std::string tok;
        for (int ix = 0; ix < w; ++ix) {
            if (!std::getline(row, tok, ',')) return false;
            const int c = ws.index(ix, iy);
            if (tok == "nan" || tok == "-nan") {
                if (ws.cells[c] == CellClass::Free) return false;
                out[c] = 0.0;
            } else {
                char* end = nullptr;
                out[c] = std::strtod(tok.c_str(), &end);
                if (end == tok.c_str()) return false;
            }
        }
    }
    return true;
}

/// Reassembles a queryable field from cached values plus the solve metadata.
inline PotentialField rebuild_field(const Workspace& ws, BvpKind kind,
                                    std::vector<double> values,
                                    const std::vector<std::pair<int, double>>& pins,
                                    std::vector<double> sigma, bool dirichlet_border,
                                    double stored_residual, int iterations, bool picard_ok,
                                    CellIndex start_cell, CellIndex target_cell) {
    PotentialField f = detail::make_field(ws, kind);
    f.values = std::move(values);
    if (!sigma.empty()) f.sigma = std::move(sigma);
    f.dirichlet_border = dirichlet_border;
    for (const auto& [idx, val] : pins) {
        f.pinned[idx] = 1;
        f.pin_list.emplace_back(idx, val);
    }
    f.residual = stored_residual;
    f.iterations_used = iterations;
    f.picard_converged = picard_ok;
    f.start_cell = start_cell;
    f.target_cell = target_cell;
    if (ws.in_bounds(target_cell.ix, target_cell.iy))
        f.target_position = ws.cell_center(target_cell.ix, target_cell.iy);
    detail::finalize(f);
    return f;
}

}  // namespace hpfnav
