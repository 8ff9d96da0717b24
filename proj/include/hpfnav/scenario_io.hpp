#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "hpfnav/scenario.hpp"

namespace hpfnav {

// Scenario documents are JSON. Grid rows (and the gamma array) are listed
// top-to-bottom as they are drawn; storage is bottom-up. Unknown keys are an
// error so that typos in experiment configs cannot pass silently.

namespace detail {

using json = nlohmann::json;

inline void check_keys(const json& obj, const std::string& where,
                       const std::set<std::string>& allowed) {
    for (const auto& [key, _] : obj.items()) {
        if (!allowed.count(key))
            throw ParseError("unknown key \"" + key + "\" in " + where);
    }
}

inline double get_num(const json& obj, const std::string& where, const std::string& key,
                      double fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number()) throw ParseError(where + "." + key + " must be a number");
    return obj[key].get<double>();
}

inline double require_num(const json& obj, const std::string& where, const std::string& key) {
    if (!obj.contains(key)) throw ParseError("missing required key " + where + "." + key);
    if (!obj[key].is_number()) throw ParseError(where + "." + key + " must be a number");
    return obj[key].get<double>();
}

inline Vec2 get_vec2(const json& obj, const std::string& where, const std::string& key) {
    const json& a = obj.at(key);
    if (!a.is_array() || a.size() != 2 || !a[0].is_number() || !a[1].is_number())
        throw ParseError(where + "." + key + " must be a [x, y] number pair");
    return {a[0].get<double>(), a[1].get<double>()};
}

inline std::vector<std::string> get_row_strings(const json& a, const std::string& where, int width,
                                                int height) {
    if (!a.is_array() || static_cast<int>(a.size()) != height)
        throw ParseError(where + " must be an array of " + std::to_string(height) + " strings");
    std::vector<std::string> rows;
    for (const auto& r : a) {
        if (!r.is_string()) throw ParseError(where + " entries must be strings");
        rows.push_back(r.get<std::string>());
        if (static_cast<int>(rows.back().size()) != width)
            throw ParseError(where + " rows must have exactly " + std::to_string(width) +
                             " characters");
    }
    return rows;
}

}  // namespace detail

inline Scenario scenario_from_json(const nlohmann::json& doc) {
    using detail::check_keys;
    using detail::get_num;
    using detail::require_num;
    using json = nlohmann::json;

    if (!doc.is_object()) throw ParseError("scenario document must be a JSON object");
    check_keys(doc, "document",
               {"grid", "gamma", "bvp", "robot", "controller", "initial", "disturbance", "sim",
                "solver"});

    Scenario sc;

    // ----- grid -----
    if (!doc.contains("grid")) throw ParseError("missing required object \"grid\"");
    const json& grid = doc["grid"];
    check_keys(grid, "grid", {"width", "height", "cell_size", "origin", "rows"});
    sc.workspace.width_cells = static_cast<int>(require_num(grid, "grid", "width"));
    sc.workspace.height_cells = static_cast<int>(require_num(grid, "grid", "height"));
    sc.workspace.cell_size = require_num(grid, "grid", "cell_size");
    if (grid.contains("origin")) sc.workspace.origin = detail::get_vec2(grid, "grid", "origin");
    if (sc.workspace.width_cells <= 0 || sc.workspace.height_cells <= 0)
        throw ParseError("grid.width and grid.height must be positive");
    const int w = sc.workspace.width_cells, h = sc.workspace.height_cells;
    sc.workspace.cells.assign(static_cast<size_t>(w) * h, CellClass::Free);
    if (grid.contains("rows")) {
        const auto rows = detail::get_row_strings(grid["rows"], "grid.rows", w, h);
        for (int iy = 0; iy < h; ++iy) {
            const std::string& row = rows[h - 1 - iy];  // rows are listed top first
            for (int ix = 0; ix < w; ++ix) {
                if (row[ix] == '.')
                    sc.workspace.cells[sc.workspace.index(ix, iy)] = CellClass::Free;
                else if (row[ix] == '#')
                    sc.workspace.cells[sc.workspace.index(ix, iy)] = CellClass::Obstacle;
                else
                    throw ParseError(std::string("grid.rows contains character '") + row[ix] +
                                     "'; only '.' and '#' are allowed");
            }
        }
    }

    // ----- gamma -----
    if (doc.contains("gamma")) {
        const json& g = doc["gamma"];
        if (!g.is_array() || static_cast<int>(g.size()) != w * h)
            throw ParseError("gamma must be a row-major array of width*height numbers");
        sc.workspace.gamma.assign(static_cast<size_t>(w) * h, 0.0);
        for (int iy = 0; iy < h; ++iy) {
            for (int ix = 0; ix < w; ++ix) {
                const json& v = g[static_cast<size_t>(h - 1 - iy) * w + ix];  // top row first
                if (!v.is_number()) throw ParseError("gamma entries must be numbers");
                sc.workspace.gamma[sc.workspace.index(ix, iy)] = v.get<double>();
            }
        }
    }

    // ----- bvp -----
    if (!doc.contains("bvp")) throw ParseError("missing required object \"bvp\"");
    const json& bvp = doc["bvp"];
    check_keys(bvp, "bvp",
               {"kind", "start", "target", "heading", "epsilon_cells", "directional_region",
                "directional_field", "sigma_forward", "sigma_backward"});
    const std::string kind = bvp.value("kind", std::string("neumann"));
    if (kind == "neumann")
        sc.bvp.kind = BvpKind::Neumann;
    else if (kind == "orientation")
        sc.bvp.kind = BvpKind::Orientation;
    else if (kind == "directional")
        sc.bvp.kind = BvpKind::Directional;
    else if (kind == "gamma")
        sc.bvp.kind = BvpKind::Gamma;
    else
        throw ParseError("bvp.kind must be one of neumann|orientation|directional|gamma");
    if (!bvp.contains("start") || !bvp.contains("target"))
        throw ParseError("bvp.start and bvp.target are required");
    sc.bvp.start = detail::get_vec2(bvp, "bvp", "start");
    sc.bvp.target = detail::get_vec2(bvp, "bvp", "target");
    sc.bvp.heading = get_num(bvp, "bvp", "heading", 0.0);
    sc.bvp.epsilon_cells = get_num(bvp, "bvp", "epsilon_cells", 1.0);
    sc.bvp.sigma_forward = get_num(bvp, "bvp", "sigma_forward", 1.0);
    sc.bvp.sigma_backward = get_num(bvp, "bvp", "sigma_backward", 0.05);
    if (bvp.contains("directional_region") != bvp.contains("directional_field"))
        throw ParseError("directional_region and directional_field must be given together");
    if (bvp.contains("directional_region")) {
        const auto rows =
            detail::get_row_strings(bvp["directional_region"], "bvp.directional_region", w, h);
        const json& fields = bvp["directional_field"];
        if (!fields.is_object())
            throw ParseError("bvp.directional_field must map region labels to [ux, uy]");
        sc.bvp.directional_region.assign(static_cast<size_t>(w) * h, 0);
        sc.bvp.directional_field.assign(static_cast<size_t>(w) * h, Vec2{});
        for (int iy = 0; iy < h; ++iy) {
            const std::string& row = rows[h - 1 - iy];
            for (int ix = 0; ix < w; ++ix) {
                const char label = row[ix];
                if (label == '.') continue;
                const std::string key(1, label);
                if (!fields.contains(key))
                    throw ParseError("bvp.directional_field has no entry for region label '" +
                                     key + "'");
                const int c = sc.workspace.index(ix, iy);
                sc.bvp.directional_region[c] = 1;
                sc.bvp.directional_field[c] = detail::get_vec2(fields, "bvp.directional_field", key);
            }
        }
    }

    // ----- robot -----
    auto read_params = [&](const json& r, const std::string& where, RobotParams base) {
        RobotParams p = base;
        p.wheel_radius = get_num(r, where, "r", p.wheel_radius);
        p.width = get_num(r, where, "W", p.width);
        p.wheelbase = get_num(r, where, "L", p.wheelbase);
        p.mass = get_num(r, where, "M", p.mass);
        p.inertia = get_num(r, where, "I", p.inertia);
        p.phi_max = get_num(r, where, "phi_max", p.phi_max);
        return p;
    };
    if (doc.contains("robot")) {
        const json& robot = doc["robot"];
        check_keys(robot, "robot", {"kind", "r", "W", "L", "M", "I", "phi_max", "model_error"});
        const std::string rk = robot.value("kind", std::string("ddr_kinematic"));
        if (rk == "ddr_kinematic")
            sc.robot_kind = RobotKind::DdrKinematic;
        else if (rk == "fsr_kinematic")
            sc.robot_kind = RobotKind::FsrKinematic;
        else if (rk == "ddr_dynamic")
            sc.robot_kind = RobotKind::DdrDynamic;
        else
            throw ParseError("robot.kind must be one of ddr_kinematic|fsr_kinematic|ddr_dynamic");
        sc.robot = read_params(robot, "robot", RobotParams{});
        if (robot.contains("model_error")) {
            check_keys(robot["model_error"], "robot.model_error",
                       {"r", "W", "L", "M", "I", "phi_max"});
            sc.model_error = read_params(robot["model_error"], "robot.model_error", sc.robot);
        }
    }

    // ----- controller -----
    if (doc.contains("controller")) {
        const json& ctl = doc["controller"];
        check_keys(ctl, "controller", {"K1", "K2", "KD1", "KD2", "damping"});
        sc.gains.k1 = get_num(ctl, "controller", "K1", sc.gains.k1);
        sc.gains.k2 = get_num(ctl, "controller", "K2", sc.gains.k2);
        sc.gains.kd1 = get_num(ctl, "controller", "KD1", sc.gains.kd1);
        sc.gains.kd2 = get_num(ctl, "controller", "KD2", sc.gains.kd2);
        const std::string damping = ctl.value("damping", std::string("selective"));
        if (damping == "omni")
            sc.damping = DampingMode::Omni;
        else if (damping == "selective")
            sc.damping = DampingMode::Selective;
        else
            throw ParseError("controller.damping must be \"omni\" or \"selective\"");
    }

    // ----- initial -----
    sc.initial.position = sc.bvp.start;
    if (doc.contains("initial")) {
        const json& init = doc["initial"];
        check_keys(init, "initial", {"x", "y", "theta", "v", "omega"});
        sc.initial.position.x = get_num(init, "initial", "x", sc.initial.position.x);
        sc.initial.position.y = get_num(init, "initial", "y", sc.initial.position.y);
        sc.initial.theta = get_num(init, "initial", "theta", 0.0);
        sc.initial.v = get_num(init, "initial", "v", 0.0);
        sc.initial.omega = get_num(init, "initial", "omega", 0.0);
    }

    // ----- disturbance -----
    if (doc.contains("disturbance")) {
        const json& d = doc["disturbance"];
        check_keys(d, "disturbance",
                   {"noise_amplitude", "saturation_limit", "saturation_fraction"});
        sc.disturbance.noise_amplitude = get_num(d, "disturbance", "noise_amplitude", 0.0);
        if (d.contains("saturation_limit"))
            sc.disturbance.saturation_limit = require_num(d, "disturbance", "saturation_limit");
        if (d.contains("saturation_fraction"))
            sc.disturbance.saturation_fraction =
                require_num(d, "disturbance", "saturation_fraction");
    }

    // ----- sim -----
    if (doc.contains("sim")) {
        const json& sim = doc["sim"];
        check_keys(sim, "sim", {"dt", "t_max", "integrator", "seed", "pos_tol",
                                "stop_on_converge"});
        sc.sim.dt = get_num(sim, "sim", "dt", sc.sim.dt);
        sc.sim.t_max = get_num(sim, "sim", "t_max", sc.sim.t_max);
        const std::string integ = sim.value("integrator", std::string("rk4"));
        if (integ == "euler")
            sc.sim.integrator = Integrator::Euler;
        else if (integ == "rk4")
            sc.sim.integrator = Integrator::Rk4;
        else
            throw ParseError("sim.integrator must be \"euler\" or \"rk4\"");
        if (sim.contains("seed")) {
            if (!sim["seed"].is_number_unsigned() && !sim["seed"].is_number_integer())
                throw ParseError("sim.seed must be an unsigned integer");
            sc.sim.seed = sim["seed"].get<std::uint64_t>();
        }
        sc.sim.pos_tol = get_num(sim, "sim", "pos_tol", sc.sim.pos_tol);
        if (sim.contains("stop_on_converge")) {
            if (!sim["stop_on_converge"].is_boolean())
                throw ParseError("sim.stop_on_converge must be a boolean");
            sc.sim.stop_on_converge = sim["stop_on_converge"].get<bool>();
        }
    }

    // ----- solver -----
    if (doc.contains("solver")) {
        const json& sol = doc["solver"];
        check_keys(sol, "solver", {"relaxation_factor", "tolerance", "max_iterations",
                                   "picard_max", "picard_relax"});
        sc.solver.relaxation_factor =
            get_num(sol, "solver", "relaxation_factor", sc.solver.relaxation_factor);
        sc.solver.tolerance = get_num(sol, "solver", "tolerance", sc.solver.tolerance);
        sc.solver.max_iterations =
            static_cast<int>(get_num(sol, "solver", "max_iterations", sc.solver.max_iterations));
        sc.solver.picard_max =
            static_cast<int>(get_num(sol, "solver", "picard_max", sc.solver.picard_max));
        sc.solver.picard_relax = get_num(sol, "solver", "picard_relax", sc.solver.picard_relax);
    }

    validate(sc);
    return sc;
}

/// Parses and validates a scenario document.
inline Scenario load_scenario(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("scenario is not valid JSON: ") + e.what());
    }
    return scenario_from_json(doc);
}

/// Serializes a Scenario back to its fully-resolved document. Feeding the
/// result to load_scenario reproduces the scenario field for field.
inline nlohmann::json scenario_to_json(const Scenario& sc) {
    using json = nlohmann::json;
    json doc;
    const Workspace& ws = sc.workspace;
    doc["grid"]["width"] = ws.width_cells;
    doc["grid"]["height"] = ws.height_cells;
    doc["grid"]["cell_size"] = ws.cell_size;
    doc["grid"]["origin"] = {ws.origin.x, ws.origin.y};
    {
        std::vector<std::string> rows;
        for (int iy = ws.height_cells - 1; iy >= 0; --iy) {
            std::string row(ws.width_cells, '.');
            for (int ix = 0; ix < ws.width_cells; ++ix)
                if (ws.cells[ws.index(ix, iy)] == CellClass::Obstacle) row[ix] = '#';
            rows.push_back(row);
        }
        doc["grid"]["rows"] = rows;
    }
    if (!ws.gamma.empty()) {
        std::vector<double> g;
        g.reserve(ws.gamma.size());
        for (int iy = ws.height_cells - 1; iy >= 0; --iy)
            for (int ix = 0; ix < ws.width_cells; ++ix) g.push_back(ws.gamma[ws.index(ix, iy)]);
        doc["gamma"] = g;
    }

    json& bvp = doc["bvp"];
    bvp["kind"] = to_string(sc.bvp.kind);
    bvp["start"] = {sc.bvp.start.x, sc.bvp.start.y};
    bvp["target"] = {sc.bvp.target.x, sc.bvp.target.y};
    if (sc.bvp.kind == BvpKind::Orientation) {
        bvp["heading"] = sc.bvp.heading;
        bvp["epsilon_cells"] = sc.bvp.epsilon_cells;
    }
    bvp["sigma_forward"] = sc.bvp.sigma_forward;
    bvp["sigma_backward"] = sc.bvp.sigma_backward;
    if (!sc.bvp.directional_region.empty()) {
        // Labels regenerate as 'a', 'b', ... per distinct constraint vector.
        std::vector<std::string> rows;
        std::map<std::pair<double, double>, char> labels;
        json fields = json::object();
        for (int iy = ws.height_cells - 1; iy >= 0; --iy) {
            std::string row(ws.width_cells, '.');
            for (int ix = 0; ix < ws.width_cells; ++ix) {
                const int c = ws.index(ix, iy);
                if (!sc.bvp.directional_region[c]) continue;
                const Vec2 v = sc.bvp.directional_field[c];
                auto [it, fresh] = labels.try_emplace({v.x, v.y},
                                                      static_cast<char>('a' + labels.size()));
                if (fresh) fields[std::string(1, it->second)] = {v.x, v.y};
                row[ix] = it->second;
            }
            rows.push_back(row);
        }
        bvp["directional_region"] = rows;
        bvp["directional_field"] = fields;
    }

    json& robot = doc["robot"];
    robot["kind"] = sc.robot_kind == RobotKind::DdrKinematic    ? "ddr_kinematic"
                    : sc.robot_kind == RobotKind::FsrKinematic ? "fsr_kinematic"
                                                               : "ddr_dynamic";
    auto write_params = [](json& r, const RobotParams& p) {
        r["r"] = p.wheel_radius;
        r["W"] = p.width;
        r["L"] = p.wheelbase;
        r["M"] = p.mass;
        r["I"] = p.inertia;
        r["phi_max"] = p.phi_max;
    };
    write_params(robot, sc.robot);
    if (sc.model_error) write_params(robot["model_error"], *sc.model_error);

    json& ctl = doc["controller"];
    ctl["K1"] = sc.gains.k1;
    ctl["K2"] = sc.gains.k2;
    ctl["KD1"] = sc.gains.kd1;
    ctl["KD2"] = sc.gains.kd2;
    ctl["damping"] = sc.damping == DampingMode::Omni ? "omni" : "selective";

    json& init = doc["initial"];
    init["x"] = sc.initial.position.x;
    init["y"] = sc.initial.position.y;
    init["theta"] = sc.initial.theta;
    init["v"] = sc.initial.v;
    init["omega"] = sc.initial.omega;

    json& dist = doc["disturbance"];
    dist["noise_amplitude"] = sc.disturbance.noise_amplitude;
    if (sc.disturbance.saturation_limit) dist["saturation_limit"] = *sc.disturbance.saturation_limit;
    if (sc.disturbance.saturation_fraction)
        dist["saturation_fraction"] = *sc.disturbance.saturation_fraction;

    json& sim = doc["sim"];
    sim["dt"] = sc.sim.dt;
    sim["t_max"] = sc.sim.t_max;
    sim["integrator"] = sc.sim.integrator == Integrator::Euler ? "euler" : "rk4";
    sim["seed"] = sc.sim.seed;
    sim["pos_tol"] = sc.sim.pos_tol;
    sim["stop_on_converge"] = sc.sim.stop_on_converge;

    json& sol = doc["solver"];
    sol["relaxation_factor"] = sc.solver.relaxation_factor;
    sol["tolerance"] = sc.solver.tolerance;
    sol["max_iterations"] = sc.solver.max_iterations;
    sol["picard_max"] = sc.solver.picard_max;
    sol["picard_relax"] = sc.solver.picard_relax;

    return doc;
}

inline std::string serialize_scenario(const Scenario& sc) { return scenario_to_json(sc).dump(2); }

/// Sets a dotted-path key in a raw scenario document, e.g.
/// apply_override(doc, "controller.KD1", "0") or ("bvp.start", "0,-1").
/// Values parse as bool, number, comma-separated number array, or string.
inline void apply_override(nlohmann::json& doc, const std::string& dotted_key,
                           const std::string& value) {
    nlohmann::json* node = &doc;
    std::string rest = dotted_key;
    for (size_t pos = rest.find('.'); pos != std::string::npos; pos = rest.find('.')) {
        node = &(*node)[rest.substr(0, pos)];
        rest = rest.substr(pos + 1);
    }
    auto parse_scalar = [](const std::string& s) -> nlohmann::json {
        if (s == "true") return true;
        if (s == "false") return false;
        char* end = nullptr;
        const double d = std::strtod(s.c_str(), &end);
        if (end && *end == '\0' && end != s.c_str()) {
            if (d == static_cast<long long>(d) && s.find_first_of(".eE") == std::string::npos)
                return static_cast<long long>(d);
            return d;
        }
        return s;
    };
    if (value.find(',') != std::string::npos) {
        nlohmann::json arr = nlohmann::json::array();
        std::istringstream ss(value);
        std::string tok;
        while (std::getline(ss, tok, ',')) arr.push_back(parse_scalar(tok));
        (*node)[rest] = arr;
    } else {
        (*node)[rest] = parse_scalar(value);
    }
}

}  // namespace hpfnav
