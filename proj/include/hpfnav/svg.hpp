#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "hpfnav/geometry.hpp"
#include "hpfnav/simulator.hpp"
#include "hpfnav/solver.hpp"

namespace hpfnav {

// Self-contained SVG renderings of fields and runs. Styling is fixed so that
// regression-diffing outputs stays meaningful: obstacles filled gray, the
// guidance quiver in slate, the reference path dashed blue, the robot path
// solid red, start marked green and target red.

namespace detail {

class SvgCanvas {
public:
    SvgCanvas(const Workspace& ws, double px_width = 800.0) : ws_(ws) {
        const double wm = ws.width_cells * ws.cell_size;
        const double hm = ws.height_cells * ws.cell_size;
        scale_ = px_width / wm;
        width_ = px_width;
        height_ = scale_ * hm;
        body_ += "<rect x=\"0\" y=\"0\" width=\"" + num(width_) + "\" height=\"" + num(height_) +
                 "\" fill=\"white\" stroke=\"#404040\" stroke-width=\"1\"/>\n";
    }

    double px(double x) const { return (x - ws_.origin.x) * scale_; }
    double py(double y) const { return height_ - (y - ws_.origin.y) * scale_; }
    double scale() const { return scale_; }

    void fill_obstacles() {
        // merge runs of obstacle cells per row to keep files small
        for (int iy = 0; iy < ws_.height_cells; ++iy) {
            int ix = 0;
            while (ix < ws_.width_cells) {
                if (ws_.cells[ws_.index(ix, iy)] != CellClass::Obstacle) {
                    ++ix;
                    continue;
                }
                int end = ix;
                while (end < ws_.width_cells &&
                       ws_.cells[ws_.index(end, iy)] == CellClass::Obstacle)
                    ++end;
                const double x0 = ws_.origin.x + ix * ws_.cell_size;
                const double y1 = ws_.origin.y + (iy + 1) * ws_.cell_size;
                body_ += "<rect x=\"" + num(px(x0)) + "\" y=\"" + num(py(y1)) + "\" width=\"" +
                         num((end - ix) * ws_.cell_size * scale_) + "\" height=\"" +
                         num(ws_.cell_size * scale_) + "\" fill=\"#555555\"/>\n";
                ix = end;
            }
        }
    }

    void shade_gamma() {
        if (ws_.gamma.empty()) return;
        for (int iy = 0; iy < ws_.height_cells; ++iy) {
            for (int ix = 0; ix < ws_.width_cells; ++ix) {
                const double g = ws_.gamma[ws_.index(ix, iy)];
                if (g >= 0.999) continue;  // bright cells stay white
                const int level = static_cast<int>(255.0 * g);
                const double x0 = ws_.origin.x + ix * ws_.cell_size;
                const double y1 = ws_.origin.y + (iy + 1) * ws_.cell_size;
                body_ += "<rect x=\"" + num(px(x0)) + "\" y=\"" + num(py(y1)) + "\" width=\"" +
                         num(ws_.cell_size * scale_) + "\" height=\"" +
                         num(ws_.cell_size * scale_) + "\" fill=\"rgb(" + std::to_string(level) +
                         "," + std::to_string(level) + "," + std::to_string(level) + ")\"/>\n";
            }
        }
    }

    void arrow(Vec2 base, Vec2 dir, double length_m, const std::string& color) {
        const double n = norm(dir);
        if (n < 1e-12) return;
        const Vec2 u = (1.0 / n) * dir;
        const Vec2 tip = base + length_m * u;
        const Vec2 left = tip + 0.3 * length_m * Vec2{-u.x + u.y * 0.6, -u.y - u.x * 0.6};
        const Vec2 right = tip + 0.3 * length_m * Vec2{-u.x - u.y * 0.6, -u.y + u.x * 0.6};
        body_ += "<path d=\"M " + num(px(base.x)) + " " + num(py(base.y)) + " L " +
                 num(px(tip.x)) + " " + num(py(tip.y)) + " M " + num(px(left.x)) + " " +
                 num(py(left.y)) + " L " + num(px(tip.x)) + " " + num(py(tip.y)) + " L " +
                 num(px(right.x)) + " " + num(py(right.y)) + "\" stroke=\"" + color +
                 "\" stroke-width=\"1\" fill=\"none\"/>\n";
    }

    void polyline(const std::vector<Vec2>& pts, const std::string& color, double width_px,
                  bool dashed) {
        if (pts.size() < 2) return;
        // decimate long paths; plots do not need every integrator step
        const size_t stride = std::max<size_t>(1, pts.size() / 4000);
        std::string d = "M " + num(px(pts[0].x)) + " " + num(py(pts[0].y));
        for (size_t i = stride; i < pts.size(); i += stride)
            d += " L " + num(px(pts[i].x)) + " " + num(py(pts[i].y));
        if (stride > 1) d += " L " + num(px(pts.back().x)) + " " + num(py(pts.back().y));
        body_ += "<path d=\"" + d + "\" stroke=\"" + color + "\" stroke-width=\"" +
                 num(width_px) + "\" fill=\"none\"" +
                 (dashed ? " stroke-dasharray=\"6 4\"" : "") + "/>\n";
    }

    void marker(Vec2 p, const std::string& color) {
        body_ += "<circle cx=\"" + num(px(p.x)) + "\" cy=\"" + num(py(p.y)) +
                 "\" r=\"4\" fill=\"" + color + "\"/>\n";
    }

    std::string finish() const {
        return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width_) +
               "\" height=\"" + num(height_) + "\" viewBox=\"0 0 " + num(width_) + " " +
               num(height_) + "\">\n" + body_ + "</svg>\n";
    }

private:
    static std::string num(double v) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.2f", v);
        return buf;
    }

    const Workspace& ws_;
    double scale_ = 1.0, width_ = 0.0, height_ = 0.0;
    std::string body_;
};

}  // namespace detail

/// Direction quiver of the guidance field over Free cells, obstacles shaded.
inline std::string field_quiver_svg(const PotentialField& f) {
    const Workspace& ws = f.ws;
    detail::SvgCanvas canvas(ws);
    canvas.shade_gamma();
    canvas.fill_obstacles();
    const int stride = std::max(1, std::max(ws.width_cells, ws.height_cells) / 40);
    const double arrow_len = 0.55 * stride * ws.cell_size;
    for (int iy = stride / 2; iy < ws.height_cells; iy += stride) {
        for (int ix = stride / 2; ix < ws.width_cells; ix += stride) {
            const int c = ws.index(ix, iy);
            if (ws.cells[c] != CellClass::Free) continue;
            canvas.arrow(ws.cell_center(ix, iy), {f.guidance_x[c], f.guidance_y[c]}, arrow_len,
                         "#3a5a80");
        }
    }
    if (ws.in_bounds(f.start_cell.ix, f.start_cell.iy))
        canvas.marker(ws.cell_center(f.start_cell.ix, f.start_cell.iy), "#2a9d2a");
    if (ws.in_bounds(f.target_cell.ix, f.target_cell.iy))
        canvas.marker(f.target_position, "#c03030");
    return canvas.finish();
}

/// Run overlay: reference path dashed blue over the quiver, robot path solid
/// red.
inline std::string run_overlay_svg(const PotentialField& f, const std::vector<Vec2>& ref,
                                   const Trajectory& traj) {
    const Workspace& ws = f.ws;
    detail::SvgCanvas canvas(ws);
    canvas.shade_gamma();
    canvas.fill_obstacles();
    const int stride = std::max(1, std::max(ws.width_cells, ws.height_cells) / 25);
    const double arrow_len = 0.5 * stride * ws.cell_size;
    for (int iy = stride / 2; iy < ws.height_cells; iy += stride) {
        for (int ix = stride / 2; ix < ws.width_cells; ix += stride) {
            const int c = ws.index(ix, iy);
            if (ws.cells[c] != CellClass::Free) continue;
            canvas.arrow(ws.cell_center(ix, iy), {f.guidance_x[c], f.guidance_y[c]}, arrow_len,
                         "#b9c6d6");
        }
    }
    canvas.polyline(ref, "#3050c0", 1.5, /*dashed=*/true);
    std::vector<Vec2> robot;
    robot.reserve(traj.samples.size());
    for (const auto& s : traj.samples) robot.push_back({s.x, s.y});
    canvas.polyline(robot, "#c03030", 1.5, /*dashed=*/false);
    if (!robot.empty()) canvas.marker(robot.front(), "#2a9d2a");
    if (ws.in_bounds(f.target_cell.ix, f.target_cell.iy))
        canvas.marker(f.target_position, "#c03030");
    return canvas.finish();
}

}  // namespace hpfnav
