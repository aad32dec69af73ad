#include "holopt/bench.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <tuple>

#include "holopt/grad.hpp"
#include "holopt/io.hpp"
#include "holopt/metrics.hpp"

namespace holopt {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

ArrayLayout make_named_layout(const std::string& key) {
    auto parse_n = [&key](const std::string& prefix) -> int {
        const std::string digits = key.substr(prefix.size());
        if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos)
            throw std::invalid_argument("unknown array key: " + key);
        return std::stoi(digits);
    };
    ArrayLayout layout;
    if (key.rfind("single-sided-", 0) == 0) {
        const int n = parse_n("single-sided-");
        layout = build_single_sided(n, n, kDefaultPitch, 0.0);
    } else if (key.rfind("single-axis-", 0) == 0) {
        const int n = parse_n("single-axis-");
        layout = build_single_axis(n, n, kDefaultPitch, kDefaultSeparation);
    } else {
        throw std::invalid_argument("unknown array key: " + key +
                                    " (expected single-sided-<n> or single-axis-<n>)");
    }
    layout.label = key;
    return layout;
}

Roi default_roi(const ArrayLayout& layout) {
    bool has_down = false;
    double zmax = 0.0;
    for (const auto& t : layout.transducers) {
        if (t.normal.z < 0.0) has_down = true;
        zmax = std::max(zmax, t.position.z);
    }
    Roi roi;
    roi.half_extent = {0.05, 0.05, 0.05};
    roi.center = {0.0, 0.0, has_down ? 0.5 * zmax : 0.1};
    return roi;
}

namespace {

std::vector<BenchCell> standard_cells(int g2, int g8, int g32) {
    std::vector<BenchCell> cells;
    for (const char* key : {"single-sided-14", "single-axis-16", "single-sided-32"}) {
        cells.push_back({key, 2, g2});
        cells.push_back({key, 8, g8});
        cells.push_back({key, 32, g32});
    }
    return cells;
}

uint64_t geometry_seed(const BenchConfig& cfg, const BenchCell& cell, long id) {
    return derive_seed(cfg.master_seed, cell.array_key + "/geom", cell.n_points, id);
}

uint64_t phase_seed(const BenchConfig& cfg, const BenchCell& cell, long id) {
    return derive_seed(cfg.master_seed, cell.array_key + "/phase-init", cell.n_points, id);
}

struct LoadedDataset {
    double total_amplitude = 0.0;
    std::vector<std::pair<long, ControlPointSet>> geometries;  // (id, points)
};

LoadedDataset load_dataset(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open dataset: " + path);
    LoadedDataset ds;
    std::string line;
    bool header_seen = false;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            throw std::invalid_argument("malformed dataset line in " + path + ": " + e.what());
        }
        if (!header_seen) {
            if (j.value("kind", "") != "dataset-header")
                throw std::invalid_argument("dataset " + path + " is missing its header line");
            ds.total_amplitude = j.at("total_amplitude_pa").get<double>();
            header_seen = true;
            continue;
        }
        ControlPointSet set;
        for (const auto& jp : j.at("points")) {
            ControlPoint p;
            const auto& pos = jp.at("pos");
            p.position = {pos[0].get<double>(), pos[1].get<double>(), pos[2].get<double>()};
            p.amplitude = jp.at("amp").get<double>();
            set.points.push_back(p);
        }
        ds.geometries.emplace_back(j.at("id").get<long>(), std::move(set));
    }
    if (!header_seen) throw std::invalid_argument("dataset " + path + " is empty");
    return ds;
}

struct ResultRow {
    std::string array;
    int m = 0, n = 0;
    long geometry_id = 0;
    std::string solver;
    int iterations = 0;
    int point_index = 0;
    double target_pa = 0.0, achieved_pa = 0.0, rp = 0.0;
    uint64_t seed = 0;
};

struct TimingRow {
    std::string array;
    int m = 0, n = 0;
    std::string solver;
    double mean_ms = 0.0, std_ms = 0.0;
    long n_geometries = 0;
};

std::ofstream open_csv(const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    return f;
}

}  // namespace

std::vector<BenchCell> desk_scale_cells() { return standard_cells(100, 50, 20); }

std::vector<BenchCell> full_scale_cells() { return standard_cells(1000, 1000, 1000); }

std::string dataset_path(const BenchConfig& cfg, const BenchCell& cell) {
    return cfg.out_dir + "/dataset_" + cell.array_key + "_N" + std::to_string(cell.n_points) +
           ".jsonl";
}

void generate_dataset(const BenchConfig& cfg) {
    if (cfg.cells.empty()) throw std::invalid_argument("benchmark config has no cells");
    fs::create_directories(cfg.out_dir);
    for (const auto& cell : cfg.cells) {
        if (cell.geometries < 1)
            throw std::invalid_argument("cell must have at least one geometry");
        const auto layout = make_named_layout(cell.array_key);
        const auto roi = default_roi(layout);
        const double total = calibrate_total_amplitude(layout, roi, cfg.medium);

        std::ofstream f(dataset_path(cfg, cell));
        if (!f) throw std::runtime_error("cannot open for writing: " + dataset_path(cfg, cell));
        json header;
        header["kind"] = "dataset-header";
        header["algorithm"] = kRngAlgorithm;
        header["master_seed"] = cfg.master_seed;
        header["array"] = cell.array_key;
        header["M"] = static_cast<int>(layout.transducers.size());
        header["N"] = cell.n_points;
        header["geometries"] = cell.geometries;
        header["total_amplitude_pa"] = total;
        header["min_amplitude_pa"] = cfg.min_amplitude;
        header["roi"] = {{"center", {roi.center.x, roi.center.y, roi.center.z}},
                         {"half_extent", {roi.half_extent.x, roi.half_extent.y, roi.half_extent.z}}};
        f << header.dump() << "\n";

        for (int i = 0; i < cell.geometries; ++i) {
            const uint64_t seed = geometry_seed(cfg, cell, i);
            Rng rng(seed);
            const auto set =
                generate_random_geometry(rng, roi, cell.n_points, total, cfg.min_amplitude);
            json line;
            line["id"] = i;
            line["seed"] = seed;
            line["points"] = json::array();
            for (const auto& p : set.points) {
                json jp;
                jp["pos"] = {p.position.x, p.position.y, p.position.z};
                jp["amp"] = p.amplitude;
                line["points"].push_back(std::move(jp));
            }
            f << line.dump() << "\n";
        }
        if (!f) throw std::runtime_error("write failed: " + dataset_path(cfg, cell));
    }
}

void run_benchmark(const BenchConfig& cfg) {
    if (cfg.cells.empty()) throw std::invalid_argument("benchmark config has no cells");
    fs::create_directories(cfg.out_dir);
    std::vector<ResultRow> rows;
    std::vector<TimingRow> timing;
    std::vector<std::string> failures;

    for (const auto& cell : cfg.cells) {
        const auto layout = make_named_layout(cell.array_key);
        const int m = static_cast<int>(layout.transducers.size());
        const auto ds = load_dataset(dataset_path(cfg, cell));

        for (const auto& solver : cfg.solvers) {
            if (solver != "diffpat" && solver != "focal-single")
                throw std::invalid_argument("unknown solver: " + solver);
            std::vector<double> wall;
            for (const auto& [id, set] : ds.geometries) {
                try {
                    std::vector<Vec3> points;
                    std::vector<double> targets;
                    for (const auto& p : set.points) {
                        points.push_back(p.position);
                        targets.push_back(p.amplitude);
                    }
                    PatLossReport report;
                    uint64_t seed = 0;
                    int iters = 0;
                    double ms = 0.0;
                    if (solver == "diffpat") {
                        seed = phase_seed(cfg, cell, id);
                        iters = cfg.iterations;
                        auto rec = optimize_pat(layout, set, cfg.medium, iters, seed, nullptr,
                                                cfg.adam);
                        const auto g = propagation_matrix(layout, points, cfg.medium);
                        report = pat_loss(rec.final_phases, g, targets);
                        ms = rec.wall_ms;
                    } else {
                        const auto t0 = std::chrono::steady_clock::now();
                        const auto g = propagation_matrix(layout, points, cfg.medium);
                        const auto phases = focal_phases(layout, points[0], cfg.medium);
                        report = pat_loss(phases, g, targets);
                        ms = std::chrono::duration<double, std::milli>(
                                 std::chrono::steady_clock::now() - t0)
                                 .count();
                    }
                    wall.push_back(ms);
                    for (size_t c = 0; c < report.per_point.size(); ++c) {
                        const auto& pp = report.per_point[c];
                        rows.push_back({cell.array_key, m, cell.n_points, id, solver, iters,
                                        static_cast<int>(c), pp.target, pp.amplitude, pp.rp,
                                        seed});
                    }
                } catch (const std::exception& e) {
                    failures.push_back(cell.array_key + "," + std::to_string(cell.n_points) +
                                       "," + std::to_string(id) + "," + solver + ",\"" +
                                       e.what() + "\"");
                }
            }
            if (!wall.empty()) {
                double mean = 0.0;
                for (double w : wall) mean += w;
                mean /= static_cast<double>(wall.size());
                double var = 0.0;
                for (double w : wall) var += (w - mean) * (w - mean);
                var /= static_cast<double>(wall.size());
                timing.push_back({cell.array_key, m, cell.n_points, solver, mean,
                                  std::sqrt(var), static_cast<long>(wall.size())});
            }
        }
    }

    std::sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
        return std::tie(a.array, a.n, a.geometry_id, a.solver, a.point_index) <
               std::tie(b.array, b.n, b.geometry_id, b.solver, b.point_index);
    });

    auto f = open_csv(cfg.out_dir + "/results.csv");
    f << "array_label,M,N,geometry_id,solver,iterations,point_index,target_pa,achieved_pa,rp,seed\n";
    for (const auto& r : rows)
        f << r.array << "," << r.m << "," << r.n << "," << r.geometry_id << "," << r.solver
          << "," << r.iterations << "," << r.point_index << "," << format_double(r.target_pa)
          << "," << format_double(r.achieved_pa) << "," << format_double(r.rp) << "," << r.seed
          << "\n";
    if (!f) throw std::runtime_error("write failed: results.csv");

    auto ft = open_csv(cfg.out_dir + "/timing.csv");
    ft << "array_label,M,N,solver,mean_ms,std_ms,n_geometries\n";
    for (const auto& t : timing)
        ft << t.array << "," << t.m << "," << t.n << "," << t.solver << ","
           << format_double(t.mean_ms) << "," << format_double(t.std_ms) << ","
           << t.n_geometries << "\n";

    // Per-cell box statistics over the R_p values of all points.
    auto fsm = open_csv(cfg.out_dir + "/summary.csv");
    fsm << "array_label,M,N,solver,n_values,q1,median,q3,iqr,whisker_low,whisker_high,"
           "n_outliers\n";
    for (const auto& cell : cfg.cells) {
        for (const auto& solver : cfg.solvers) {
            std::vector<double> rps;
            int m = 0;
            for (const auto& r : rows)
                if (r.array == cell.array_key && r.n == cell.n_points && r.solver == solver) {
                    rps.push_back(r.rp);
                    m = r.m;
                }
            if (rps.empty()) continue;
            const auto s = box_stats(rps);
            fsm << cell.array_key << "," << m << "," << cell.n_points << "," << solver << ","
                << rps.size() << "," << format_double(s.q1) << "," << format_double(s.median)
                << "," << format_double(s.q3) << "," << format_double(s.iqr) << ","
                << format_double(s.whisker_low) << "," << format_double(s.whisker_high) << ","
                << s.outliers.size() << "\n";
        }
    }

    if (!failures.empty()) {
        auto ff = open_csv(cfg.out_dir + "/failures.csv");
        ff << "array_label,N,geometry_id,solver,error\n";
        for (const auto& line : failures) ff << line << "\n";
    }
}

void convergence_sweep(const BenchConfig& cfg) {
    if (cfg.checkpoints.empty())
        throw std::invalid_argument("convergence sweep needs at least one checkpoint");
    for (size_t i = 1; i < cfg.checkpoints.size(); ++i)
        if (cfg.checkpoints[i] <= cfg.checkpoints[i - 1])
            throw std::invalid_argument("checkpoints must be strictly ascending");
    if (cfg.checkpoints.front() < 0 || cfg.checkpoints.back() > cfg.iterations)
        throw std::invalid_argument("checkpoints must lie in [0, iterations]");
    fs::create_directories(cfg.out_dir);

    auto f = open_csv(cfg.out_dir + "/convergence.csv");
    f << "array_label,M,N,checkpoint,mean_rp,std_rp,n_points\n";
    for (const auto& cell : cfg.cells) {
        const auto layout = make_named_layout(cell.array_key);
        const auto ds = load_dataset(dataset_path(cfg, cell));
        // Pool exactly from per-run mean/std: every geometry contributes the
        // same number of points, so the pooled second moment is the average
        // of per-run (std^2 + mean^2).
        std::vector<double> sum_mean(cfg.checkpoints.size(), 0.0);
        std::vector<double> sum_sq(cfg.checkpoints.size(), 0.0);
        long runs = 0;
        for (const auto& [id, set] : ds.geometries) {
            const auto rec = optimize_pat(layout, set, cfg.medium, cfg.iterations,
                                          phase_seed(cfg, cell, id), nullptr, cfg.adam);
            for (size_t ci = 0; ci < cfg.checkpoints.size(); ++ci) {
                const double mu = rec.rp_mean_history[cfg.checkpoints[ci]];
                const double sd = rec.rp_std_history[cfg.checkpoints[ci]];
                sum_mean[ci] += mu;
                sum_sq[ci] += sd * sd + mu * mu;
            }
            ++runs;
        }
        for (size_t ci = 0; ci < cfg.checkpoints.size(); ++ci) {
            const double mean = sum_mean[ci] / static_cast<double>(runs);
            const double second = sum_sq[ci] / static_cast<double>(runs);
            const double var = std::max(0.0, second - mean * mean);
            f << cell.array_key << "," << layout.transducers.size() << "," << cell.n_points
              << "," << cfg.checkpoints[ci] << "," << format_double(mean) << ","
              << format_double(std::sqrt(var)) << ","
              << runs * static_cast<long>(cell.n_points) << "\n";
        }
    }
    if (!f) throw std::runtime_error("write failed: convergence.csv");
}

}  // namespace holopt
