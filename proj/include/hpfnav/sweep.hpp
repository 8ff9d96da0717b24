#pragma once

#include <atomic>
#include <filesystem>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "hpfnav/cache.hpp"
#include "hpfnav/io_util.hpp"
#include "hpfnav/scenario_io.hpp"
#include "hpfnav/simulator.hpp"

namespace hpfnav {

/// One sweep axis: a dotted numeric scenario key and its value list.
struct AxisSpec {
    std::string key;
    std::vector<double> values;
};

/// Parses "key=v1,v2,..." into an axis.
inline AxisSpec parse_axis(const std::string& text) {
    const size_t eq = text.find('=');
    if (eq == std::string::npos || eq == 0)
        throw ParseError("axis must look like key=v1,v2,...: " + text);
    AxisSpec axis;
    axis.key = text.substr(0, eq);
    std::istringstream ss(text.substr(eq + 1));
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        char* end = nullptr;
        const double v = std::strtod(tok.c_str(), &end);
        if (!end || *end != '\0' || end == tok.c_str())
            throw ParseError("axis value is not a number: " + tok);
        axis.values.push_back(v);
    }
    if (axis.values.empty()) throw ParseError("axis has an empty value list: " + text);
    return axis;
}

struct SweepRow {
    std::vector<double> axis_values;
    Metrics metrics;
};

/// Runs the Cartesian product of axis values over the base document, first
/// axis outermost. Runs execute concurrently; the row order is the
/// deterministic product order regardless of scheduling.
inline std::vector<SweepRow> run_sweep(const nlohmann::json& base_doc,
                                       const std::vector<AxisSpec>& axes,
                                       const std::filesystem::path& cache_dir, int jobs) {
    if (axes.empty() || axes.size() > 2) throw ParseError("sweep needs one or two axes");

    std::vector<std::vector<double>> combos;
    if (axes.size() == 1) {
        for (double v : axes[0].values) combos.push_back({v});
    } else {
        for (double a : axes[0].values)
            for (double b : axes[1].values) combos.push_back({a, b});
    }

    std::vector<SweepRow> rows(combos.size());
    std::vector<std::string> errors(combos.size());
    std::atomic<size_t> cursor{0};
    std::mutex cache_mutex;  // first solve populates the cache; rest reuse it

    auto worker = [&]() {
        for (size_t i = cursor.fetch_add(1); i < combos.size(); i = cursor.fetch_add(1)) {
            try {
                nlohmann::json doc = base_doc;
                for (size_t a = 0; a < axes.size(); ++a)
                    apply_override(doc, axes[a].key, format_g17(combos[i][a]));
                const Scenario sc = scenario_from_json(doc);
                PotentialField field;
                {
                    std::lock_guard<std::mutex> lock(cache_mutex);
                    field = solve_cached(sc, cache_dir);
                }
                rows[i].axis_values = combos[i];
                rows[i].metrics = run(sc, field).metrics;
            } catch (const std::exception& e) {
                errors[i] = e.what();
            }
        }
    };

    const int n_workers =
        std::max(1, std::min<int>(jobs, static_cast<int>(combos.size())));
    std::vector<std::thread> pool;
    for (int t = 0; t < n_workers - 1; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    for (size_t i = 0; i < errors.size(); ++i)
        if (!errors[i].empty())
            throw Error("sweep run " + std::to_string(i) + " failed: " + errors[i]);
    return rows;
}

/// Summary CSV: axis columns, then converged, T_eps, delta_m, min_clearance.
inline std::string sweep_to_csv(const std::vector<AxisSpec>& axes,
                                const std::vector<SweepRow>& rows) {
    std::string out;
    for (const auto& a : axes) out += a.key + ",";
    out += "converged,convergence_time,max_deviation,min_clearance\n";
    for (const auto& row : rows) {
        for (double v : row.axis_values) out += format_g17(v) + ",";
        out += std::string(row.metrics.converged ? "true" : "false") + "," +
               (row.metrics.convergence_time ? format_g17(*row.metrics.convergence_time)
                                             : std::string("")) +
               "," + format_g17(row.metrics.max_deviation) + "," +
               format_g17(row.metrics.min_clearance) + "\n";
    }
    return out;
}

}  // namespace hpfnav
