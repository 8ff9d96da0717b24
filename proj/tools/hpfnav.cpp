// hpfnav - harmonic-potential-field navigation toolkit CLI.
//
// Subcommands: solve, refpath, simulate, sweep, check. Exit codes are a
// stable scripting contract: 0 success (a flagged divergence in metrics is
// still success), 1 input error, 2 solver failure, 3 check failure.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "hpfnav/cache.hpp"
#include "hpfnav/io_util.hpp"
#include "hpfnav/scenario_io.hpp"
#include "hpfnav/simulator.hpp"
#include "hpfnav/svg.hpp"
#include "hpfnav/sweep.hpp"

namespace {

namespace fs = std::filesystem;
using namespace hpfnav;

struct CommonArgs {
    std::string scenario_path;
    std::string out_dir = "out";
    std::vector<std::string> overrides;
    std::vector<std::string> axis1, axis2;
    int jobs = static_cast<int>(std::thread::hardware_concurrency());
};

nlohmann::json load_document(const CommonArgs& args) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(read_text_file(args.scenario_path));
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("scenario is not valid JSON: ") + e.what());
    }
    for (const auto& ov : args.overrides) {
        const size_t eq = ov.find('=');
        if (eq == std::string::npos || eq == 0)
            throw ParseError("--set expects key=value, got: " + ov);
        apply_override(doc, ov.substr(0, eq), ov.substr(eq + 1));
    }
    return doc;
}

int cmd_solve(const CommonArgs& args) {
    const Scenario sc = scenario_from_json(load_document(args));
    fs::create_directories(args.out_dir);
    const PotentialField field = solve_cached(sc, field_cache_dir(args.out_dir));
    write_text_file((fs::path(args.out_dir) / "field.csv").string(), field_to_csv(field));
    write_text_file((fs::path(args.out_dir) / "field.svg").string(), field_quiver_svg(field));
    std::printf("solved: residual %.3e after %d sweeps, C_m %.6g\n", field.residual,
                field.iterations_used, field.max_gradient_magnitude);
    return 0;
}

int cmd_refpath(const CommonArgs& args) {
    const Scenario sc = scenario_from_json(load_document(args));
    fs::create_directories(args.out_dir);
    const PotentialField field = solve_cached(sc, field_cache_dir(args.out_dir));
    const std::vector<Vec2> ref = reference_path(field, sc.initial.position, sc.sim);
    std::string csv = "t,x,y\n";
    for (size_t i = 0; i < ref.size(); ++i)
        csv += format_g17(static_cast<double>(i) * sc.sim.dt) + "," + format_g17(ref[i].x) + "," +
               format_g17(ref[i].y) + "\n";
    write_text_file((fs::path(args.out_dir) / "refpath.csv").string(), csv);
    write_text_file((fs::path(args.out_dir) / "refpath.svg").string(),
                    run_overlay_svg(field, ref, Trajectory{}));
    std::printf("reference path: %zu vertices, end (%.4f, %.4f)\n", ref.size(), ref.back().x,
                ref.back().y);
    return 0;
}

int cmd_simulate(const CommonArgs& args) {
    const Scenario sc = scenario_from_json(load_document(args));
    fs::create_directories(args.out_dir);
    const PotentialField field = solve_cached(sc, field_cache_dir(args.out_dir));
    const RunResult result = run(sc, field);
    std::vector<Vec2> ref;
    try {
        ref = reference_path(field, sc.initial.position, sc.sim);
    } catch (const StalledPath&) {
        ref = {sc.initial.position};
    }
    write_text_file((fs::path(args.out_dir) / "trajectory.csv").string(),
                    trajectory_to_csv(result.trajectory));
    write_text_file((fs::path(args.out_dir) / "metrics.json").string(),
                    metrics_to_json(result.metrics).dump(2) + "\n");
    write_text_file((fs::path(args.out_dir) / "run.svg").string(),
                    run_overlay_svg(field, ref, result.trajectory));
    const Metrics& m = result.metrics;
    std::printf("run: converged=%s t=%.3f delta_m=%.6g diverged=%s\n",
                m.converged ? "true" : "false", m.end_time, m.max_deviation,
                m.diverged ? "true" : "false");
    return 0;
}

int cmd_sweep(const CommonArgs& args) {
    if (args.axis1.empty()) {
        std::fprintf(stderr, "error: sweep requires at least one --axis\n");
        return 1;
    }
    std::vector<AxisSpec> axes;
    for (const auto& a : args.axis1) axes.push_back(parse_axis(a));
    for (const auto& a : args.axis2) axes.push_back(parse_axis(a));
    if (axes.size() > 2) {
        std::fprintf(stderr, "error: sweep supports at most two axes\n");
        return 1;
    }
    const nlohmann::json doc = load_document(args);
    {
        // axis keys must address real scenario fields
        nlohmann::json probe = doc;
        for (const auto& axis : axes) apply_override(probe, axis.key, format_g17(axis.values[0]));
        scenario_from_json(probe);
    }
    fs::create_directories(args.out_dir);
    const auto rows = run_sweep(doc, axes, field_cache_dir(args.out_dir), std::max(1, args.jobs));
    write_text_file((fs::path(args.out_dir) / "sweep.csv").string(), sweep_to_csv(axes, rows));
    for (const auto& row : rows) {
        std::string axis_text;
        for (double v : row.axis_values) axis_text += format_g17(v) + " ";
        std::printf("%sconverged=%s t=%s\n", axis_text.c_str(),
                    row.metrics.converged ? "true" : "false",
                    row.metrics.convergence_time ? format_g17(*row.metrics.convergence_time).c_str()
                                                 : "-");
    }
    return 0;
}

int cmd_check(const CommonArgs& args) {
    const Scenario sc = scenario_from_json(load_document(args));
    fs::create_directories(args.out_dir);
    const PotentialField field = solve_cached(sc, field_cache_dir(args.out_dir));
    bool ok = true;
    auto report = [&](const std::string& name, bool pass, const std::string& detail) {
        std::printf("%-28s %s  %s\n", name.c_str(), pass ? "PASS" : "FAIL", detail.c_str());
        ok = ok && pass;
    };
    const double res = residual(field);
    report("residual", res <= sc.solver.tolerance,
           "max residual " + format_g17(res) + " (tolerance " + format_g17(sc.solver.tolerance) +
               ")");
    const auto violations = check_max_principle(field);
    report("max-principle", violations.empty(),
           std::to_string(violations.size()) + " violating cells");
    report("C_m finite", std::isfinite(field.max_gradient_magnitude),
           "C_m = " + format_g17(field.max_gradient_magnitude));
    if (field.kind == BvpKind::Directional)
        report("picard fixed point", field.picard_converged,
               std::to_string(field.picard_iterations) + " outer iterations");
    if (is_dynamic(sc.robot_kind)) {
        report("prop-5 gains (KD1 > K1, KD2 > 0)",
               sc.gains.kd1 > sc.gains.k1 && sc.gains.kd2 > 0.0,
               "KD1 = " + format_g17(sc.gains.kd1) + ", K1 = " + format_g17(sc.gains.k1) +
                   ", KD2 = " + format_g17(sc.gains.kd2));
    }
    for (const auto& w : sc.warnings) std::printf("warning: %s\n", w.c_str());
    return ok ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"harmonic-potential-field navigation toolkit"};
    app.require_subcommand(1);

    CommonArgs args;
    std::string command;
    for (const char* name : {"solve", "refpath", "simulate", "sweep", "check"}) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("scenario", args.scenario_path, "scenario JSON file")->required();
        sub->add_option("--out", args.out_dir, "output directory");
        sub->add_option("--set", args.overrides, "override scenario fields, dotted key=value");
        if (std::string(name) == "sweep") {
            sub->add_option("--axis", args.axis1, "sweep axis, key=v1,v2,...");
            sub->add_option("--axis2", args.axis2, "second sweep axis");
            sub->add_option("--jobs", args.jobs, "concurrent runs");
        }
        sub->callback([&command, name]() { command = name; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (command == "solve") return cmd_solve(args);
        if (command == "refpath") return cmd_refpath(args);
        if (command == "simulate") return cmd_simulate(args);
        if (command == "sweep") return cmd_sweep(args);
        if (command == "check") return cmd_check(args);
    } catch (const NonConvergence& e) {
        std::fprintf(stderr, "solver error: %s\n", e.what());
        return 2;
    } catch (const DisconnectedDomain& e) {
        std::fprintf(stderr, "solver error: %s\n", e.what());
        return 2;
    } catch (const AllZeroGamma& e) {
        std::fprintf(stderr, "solver error: %s\n", e.what());
        return 2;
    } catch (const OffsetCellInvalid& e) {
        std::fprintf(stderr, "solver error: %s\n", e.what());
        return 2;
    } catch (const StalledPath& e) {
        std::fprintf(stderr, "solver error: %s\n", e.what());
        return 2;
    } catch (const ParseError& e) {
        std::fprintf(stderr, "input error: %s\n", e.what());
        return 1;
    } catch (const ValidationError& e) {
        std::fprintf(stderr, "input error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 1;
}
