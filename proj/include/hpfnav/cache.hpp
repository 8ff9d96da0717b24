#pragma once

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "hpfnav/io_util.hpp"
#include "hpfnav/scenario.hpp"
#include "hpfnav/solver.hpp"

namespace hpfnav {

// Field cache keyed by a content hash of (workspace, bvp, solver config) so
// sweeps re-use one solve across hundreds of runs. A cache entry is the field
// CSV plus a metadata sidecar; any mismatch or corruption falls back to a
// fresh solve that overwrites the entry.

namespace detail {

struct Fnv1a {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    void bytes(const void* data, size_t n) {
        const auto* p = static_cast<const unsigned char*>(data);
        for (size_t i = 0; i < n; ++i) {
            h ^= p[i];
            h *= 0x100000001b3ULL;
        }
    }
    void num(double v) { bytes(&v, sizeof(v)); }
    void num(int v) { bytes(&v, sizeof(v)); }
};

inline std::uint64_t field_cache_key(const Workspace& ws, const BvpSpec& bvp,
                                     const SolverConfig& cfg) {
    Fnv1a f;
    f.num(ws.width_cells);
    f.num(ws.height_cells);
    f.num(ws.cell_size);
    f.num(ws.origin.x);
    f.num(ws.origin.y);
    for (CellClass c : ws.cells) {
        const int v = c == CellClass::Free ? 0 : 1;
        f.num(v);
    }
    for (double g : ws.gamma) f.num(g);
    f.num(static_cast<int>(bvp.kind));
    f.num(bvp.start.x);
    f.num(bvp.start.y);
    f.num(bvp.target.x);
    f.num(bvp.target.y);
    f.num(bvp.heading);
    f.num(bvp.epsilon_cells);
    f.num(bvp.sigma_forward);
    f.num(bvp.sigma_backward);
    for (char r : bvp.directional_region) f.num(static_cast<int>(r));
    for (Vec2 v : bvp.directional_field) {
        f.num(v.x);
        f.num(v.y);
    }
    f.num(cfg.relaxation_factor);
    f.num(cfg.tolerance);
    f.num(cfg.max_iterations);
    f.num(cfg.picard_max);
    f.num(cfg.picard_relax);
    return f.h;
}

inline std::string hex64(std::uint64_t v) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

}  // namespace detail

/// Cache directory: the HPFNAV_CACHE environment variable when set, otherwise
/// <out_dir>/cache.
inline std::filesystem::path field_cache_dir(const std::filesystem::path& out_dir) {
    if (const char* env = std::getenv("HPFNAV_CACHE"); env && *env) return env;
    return out_dir / "cache";
}

/// Solves the scenario's BVP, loading a cached field when an intact entry for
/// the same content exists. Pass an empty path to bypass the cache.
inline PotentialField solve_cached(const Scenario& sc, const std::filesystem::path& cache_dir) {
    if (cache_dir.empty()) return solve_bvp(sc.workspace, sc.bvp, sc.solver);

    const std::uint64_t key = detail::field_cache_key(sc.workspace, sc.bvp, sc.solver);
    const std::filesystem::path csv_path =
        cache_dir / (detail::hex64(key) + ".field.csv");
    const std::filesystem::path meta_path = cache_dir / (detail::hex64(key) + ".meta.json");

    if (std::filesystem::exists(csv_path) && std::filesystem::exists(meta_path)) {
        try {
            std::vector<double> values;
            if (values_from_csv(read_text_file(csv_path.string()), sc.workspace, values)) {
                const auto meta = nlohmann::json::parse(read_text_file(meta_path.string()));
                std::vector<std::pair<int, double>> pins;
                for (const auto& p : meta.at("pins"))
                    pins.emplace_back(p.at(0).get<int>(), p.at(1).get<double>());
                std::vector<double> sigma;
                if (meta.contains("sigma")) sigma = meta["sigma"].get<std::vector<double>>();
                return rebuild_field(
                    sc.workspace, sc.bvp.kind, std::move(values), pins, std::move(sigma),
                    meta.at("dirichlet_border").get<bool>(), meta.at("residual").get<double>(),
                    meta.at("iterations").get<int>(), meta.at("picard_converged").get<bool>(),
                    {meta.at("start_cell").at(0).get<int>(), meta.at("start_cell").at(1).get<int>()},
                    {meta.at("target_cell").at(0).get<int>(),
                     meta.at("target_cell").at(1).get<int>()});
            }
        } catch (...) {
            // fall through to a fresh solve
        }
    }

    PotentialField f = solve_bvp(sc.workspace, sc.bvp, sc.solver);
    std::error_code ec;
    std::filesystem::create_directories(cache_dir, ec);
    if (!ec) {
        try {
            write_text_file(csv_path.string(), field_to_csv(f));
            nlohmann::json meta;
            meta["pins"] = nlohmann::json::array();
            for (const auto& [idx, val] : f.pin_list) meta["pins"].push_back({idx, val});
            if (f.kind == BvpKind::Directional || f.kind == BvpKind::Gamma)
                meta["sigma"] = f.sigma;
            meta["dirichlet_border"] = f.dirichlet_border;
            meta["residual"] = f.residual;
            meta["iterations"] = f.iterations_used;
            meta["picard_converged"] = f.picard_converged;
            meta["start_cell"] = {f.start_cell.ix, f.start_cell.iy};
            meta["target_cell"] = {f.target_cell.ix, f.target_cell.iy};
            write_text_file(meta_path.string(), meta.dump());
        } catch (...) {
            // cache write failures never fail the solve
        }
    }
    return f;
}

}  // namespace hpfnav
