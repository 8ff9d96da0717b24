#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hpfnav/errors.hpp"
#include "hpfnav/geometry.hpp"

namespace hpfnav {

enum class CellClass : std::uint8_t { Free, Obstacle };

/// Rasterized planar workspace. Cells are squares of side cell_size; cell
/// (ix, iy) covers [origin + (ix, iy)*cs, origin + (ix+1, iy+1)*cs) and is
/// stored row-major with row 0 at the bottom of the workspace. The outer
/// border of the grid is the domain boundary. Immutable after construction.
struct Workspace {
    int width_cells = 0;
    int height_cells = 0;
    double cell_size = 0.0;
    Vec2 origin;  // world coordinates of the lower-left corner
    std::vector<CellClass> cells;
    std::vector<double> gamma;  // empty unless the BVP is gamma-weighted

    int cell_count() const { return width_cells * height_cells; }
    int index(int ix, int iy) const { return iy * width_cells + ix; }
    bool in_bounds(int ix, int iy) const {
        return ix >= 0 && ix < width_cells && iy >= 0 && iy < height_cells;
    }
    Vec2 cell_center(int ix, int iy) const {
        return {origin.x + (ix + 0.5) * cell_size, origin.y + (iy + 0.5) * cell_size};
    }
    bool is_free(int ix, int iy) const {
        return in_bounds(ix, iy) && cells[index(ix, iy)] == CellClass::Free;
    }
};

/// Grid indices of the cell containing p. Points exactly on an edge resolve
/// by floor of (coordinate - origin) / cell_size so that implementations
/// agree bit-for-bit on indices. May be out of bounds.
struct CellIndex {
    int ix = 0;
    int iy = 0;
};

inline CellIndex cell_index_of(const Workspace& ws, Vec2 p) {
    return {static_cast<int>(std::floor((p.x - ws.origin.x) / ws.cell_size)),
            static_cast<int>(std::floor((p.y - ws.origin.y) / ws.cell_size))};
}

/// Class of the cell containing p; anything outside the grid reports Obstacle.
inline CellClass cell_at(const Workspace& ws, Vec2 p) {
    const CellIndex c = cell_index_of(ws, p);
    if (!ws.in_bounds(c.ix, c.iy)) return CellClass::Obstacle;
    return ws.cells[ws.index(c.ix, c.iy)];
}

inline bool is_admissible(const Workspace& ws, Vec2 p) {
    return cell_at(ws, p) == CellClass::Free;
}

/// Nearest Free cell to p. Snapping farther than one cell_size is refused so
/// that goals are never silently relocated.
inline CellIndex snap_to_free(const Workspace& ws, Vec2 p, const char* what) {
    const CellIndex c = cell_index_of(ws, p);
    CellIndex best{-1, -1};
    double best_dist = std::numeric_limits<double>::infinity();
    for (int dy = -2; dy <= 2; ++dy) {
        for (int dx = -2; dx <= 2; ++dx) {
            const int ix = c.ix + dx, iy = c.iy + dy;
            if (!ws.is_free(ix, iy)) continue;
            const double d = distance(p, ws.cell_center(ix, iy));
            if (d < best_dist) {
                best_dist = d;
                best = {ix, iy};
            }
        }
    }
    if (best.ix < 0 || best_dist > ws.cell_size) {
        throw ValidationError(std::string(what) + " (" + std::to_string(p.x) + ", " +
                              std::to_string(p.y) + ") does not snap to a Free cell within one cell");
    }
    return best;
}

/// 4-connected flood fill over Free cells (optionally requiring positive
/// gamma on both sides of each crossed face). Returns per-cell reachability.
inline std::vector<char> reachable_from(const Workspace& ws, CellIndex seed,
                                        bool positive_gamma_only = false) {
    std::vector<char> seen(ws.cell_count(), 0);
    if (!ws.is_free(seed.ix, seed.iy)) return seen;
    auto passable = [&](int ix, int iy) {
        if (!ws.is_free(ix, iy)) return false;
        if (positive_gamma_only && !ws.gamma.empty() && ws.gamma[ws.index(ix, iy)] <= 0.0)
            return false;
        return true;
    };
    if (!passable(seed.ix, seed.iy)) return seen;
    std::vector<CellIndex> stack{seed};
    seen[ws.index(seed.ix, seed.iy)] = 1;
    const int dx[4] = {1, -1, 0, 0};
    const int dy[4] = {0, 0, 1, -1};
    while (!stack.empty()) {
        const CellIndex cur = stack.back();
        stack.pop_back();
        for (int k = 0; k < 4; ++k) {
            const int ix = cur.ix + dx[k], iy = cur.iy + dy[k];
            if (!passable(ix, iy) || seen[ws.index(ix, iy)]) continue;
            seen[ws.index(ix, iy)] = 1;
            stack.push_back({ix, iy});
        }
    }
    return seen;
}

/// Euclidean distance from each cell center to the nearest Obstacle cell
/// footprint (grid border counts as obstacle). Used for clearance metrics.
inline std::vector<double> obstacle_clearance_map(const Workspace& ws) {
    std::vector<CellIndex> obstacles;
    for (int iy = 0; iy < ws.height_cells; ++iy)
        for (int ix = 0; ix < ws.width_cells; ++ix)
            if (ws.cells[ws.index(ix, iy)] == CellClass::Obstacle) obstacles.push_back({ix, iy});

    std::vector<double> dist(ws.cell_count(), std::numeric_limits<double>::infinity());
    const double cs = ws.cell_size;
    for (int iy = 0; iy < ws.height_cells; ++iy) {
        for (int ix = 0; ix < ws.width_cells; ++ix) {
            const Vec2 p = ws.cell_center(ix, iy);
            // border of the grid
            double d = std::min({p.x - ws.origin.x, p.y - ws.origin.y,
                                 ws.origin.x + ws.width_cells * cs - p.x,
                                 ws.origin.y + ws.height_cells * cs - p.y});
            for (const CellIndex& o : obstacles) {
                const double x0 = ws.origin.x + o.ix * cs, y0 = ws.origin.y + o.iy * cs;
                const double ddx = std::max({x0 - p.x, 0.0, p.x - (x0 + cs)});
                const double ddy = std::max({y0 - p.y, 0.0, p.y - (y0 + cs)});
                d = std::min(d, std::hypot(ddx, ddy));
            }
            dist[ws.index(ix, iy)] = d;
        }
    }
    return dist;
}

enum class BvpKind { Neumann, Orientation, Directional, Gamma };

/// Boundary-value-problem selection: which field variant to solve, where the
/// potential is pinned, and (per kind) orientation or directional data.
struct BvpSpec {
    BvpKind kind = BvpKind::Neumann;
    Vec2 start;
    Vec2 target;
    double heading = 0.0;        // Orientation kind: desired approach direction
    double epsilon_cells = 1.0;  // Orientation kind: offset of the heading pin, in cells
    std::vector<char> directional_region;        // per cell, nonzero = inside Omega'
    std::vector<Vec2> directional_field;         // per cell, unit vector on the region
    double sigma_forward = 1.0;
    double sigma_backward = 0.05;
};

inline const char* to_string(BvpKind k) {
    switch (k) {
        case BvpKind::Neumann: return "neumann";
        case BvpKind::Orientation: return "orientation";
        case BvpKind::Directional: return "directional";
        case BvpKind::Gamma: return "gamma";
    }
    return "?";
}

}  // namespace hpfnav
