#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "holopt/bench.hpp"
#include "holopt/chart.hpp"
#include "holopt/field_model.hpp"
#include "holopt/geometry.hpp"
#include "holopt/grad.hpp"
#include "holopt/io.hpp"
#include "holopt/metrics.hpp"
#include "holopt/optim.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace holopt;

namespace {

// ---- JSON config file support -------------------------------------------
// Each subcommand accepts --config <file.json>.  Keys mirror long flag
// names; values seed the bound variables before command-line parsing, so
// explicit flags always win.

using Binder = std::map<std::string, std::function<void(const json&)>>;
std::map<std::string, Binder> g_binders;

template <typename T>
void bind_key(Binder& b, const std::string& key, T& var) {
    b[key] = [&var, key](const json& j) {
        try {
            var = j.get<T>();
        } catch (const json::exception&) {
            throw std::invalid_argument("config key '" + key + "' has the wrong type");
        }
    };
}

void apply_config_file(int argc, char** argv) {
    if (argc < 2) return;
    const std::string sub = argv[1];
    std::string path;
    for (int i = 2; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "--config" && i + 1 < argc) path = argv[i + 1];
        else if (a.rfind("--config=", 0) == 0) path = a.substr(9);
    }
    if (path.empty()) return;
    auto it = g_binders.find(sub);
    if (it == g_binders.end()) return;
    std::ifstream f(path);
    if (!f) throw std::invalid_argument("cannot open config file: " + path);
    json j;
    try {
        f >> j;
    } catch (const json::parse_error& e) {
        throw std::invalid_argument("malformed config file " + path + ": " + e.what());
    }
    if (!j.is_object()) throw std::invalid_argument("config file must hold a JSON object");
    for (const auto& [key, value] : j.items()) {
        auto kit = it->second.find(key);
        if (kit == it->second.end())
            throw std::invalid_argument("config key '" + key + "' is not a flag of " + sub);
        kit->second(value);
    }
}

void write_snapshot(const std::string& path, const json& j) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f << j.dump(2) << "\n";
}

std::vector<std::string> split_csv(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

EvanescentMode parse_evanescent(const std::string& s) {
    if (s == "decay") return EvanescentMode::decay;
    if (s == "zero") return EvanescentMode::zero;
    throw std::invalid_argument("evanescent mode must be 'decay' or 'zero'");
}

std::string strip_grid_suffix(std::string path) {
    for (const char* suffix : {".bin", ".json"}) {
        const size_t len = std::string(suffix).size();
        if (path.size() > len && path.compare(path.size() - len, len, suffix) == 0)
            return path.substr(0, path.size() - len);
    }
    return path;
}

// ---- optimize-pat ---------------------------------------------------------

struct PatArgs {
    std::string array_key, array_file, points_file, out_dir, config;
    int iters = 150;
    uint64_t seed = 0;
    double frequency = kAirFrequencyHz;
    double speed = kAirSpeedOfSound;
    int slice_pixels = 128;
};

void run_optimize_pat(const PatArgs& a) {
    if (a.array_key.empty() == a.array_file.empty())
        throw std::invalid_argument("give exactly one of --array or --array-file");
    if (a.points_file.empty()) throw std::invalid_argument("--points is required");
    if (a.out_dir.empty()) throw std::invalid_argument("--out is required");
    if (a.iters < 0) throw std::invalid_argument("--iters must be >= 0");

    // Load and validate all inputs before creating any output.
    const ArrayLayout layout =
        a.array_key.empty() ? read_layout(a.array_file) : make_named_layout(a.array_key);
    const ControlPointSet points = read_control_points(a.points_file);
    const MediumConfig medium{a.frequency, a.speed};
    medium.wavenumber();

    fs::create_directories(a.out_dir);
    json snap;
    snap["subcommand"] = "optimize-pat";
    snap["array"] = a.array_key.empty() ? json(nullptr) : json(a.array_key);
    snap["array-file"] = a.array_file.empty() ? json(nullptr) : json(a.array_file);
    snap["points"] = a.points_file;
    snap["iters"] = a.iters;
    snap["seed"] = a.seed;
    snap["frequency"] = a.frequency;
    snap["speed"] = a.speed;
    snap["slice-pixels"] = a.slice_pixels;
    snap["out"] = a.out_dir;
    write_snapshot(a.out_dir + "/resolved_config.json", snap);

    const RunRecord rec = optimize_pat(layout, points, medium, a.iters, a.seed);
    write_phases(a.out_dir + "/phases.json", rec.final_phases);
    write_run_record(a.out_dir + "/record.json", rec);

    // Amplitude slice through the evaluation region for plotting.
    const Roi roi = default_roi(layout);
    const int np = a.slice_pixels;
    ComplexPlane slice;
    slice.nx = slice.ny = np;
    slice.dx = 2.0 * roi.half_extent.x / np;
    slice.values.resize(static_cast<size_t>(np) * np);
    std::vector<Vec3> grid_points;
    grid_points.reserve(slice.values.size());
    for (int iy = 0; iy < np; ++iy)
        for (int ix = 0; ix < np; ++ix)
            grid_points.push_back({roi.center.x - roi.half_extent.x + (ix + 0.5) * slice.dx,
                                   roi.center.y - roi.half_extent.y + (iy + 0.5) * slice.dx,
                                   roi.center.z});
    const auto field = total_pressure(layout, rec.final_phases, grid_points, medium);
    for (size_t i = 0; i < field.size(); ++i) slice.values[i] = field[i];
    write_complex_grid(a.out_dir + "/field_z" + format_double(roi.center.z), slice);

    std::cout << "final loss " << format_double(rec.loss_history.back()) << " Pa^2, mean R_p "
              << format_double(rec.rp_mean_history.back()) << "\n";
}

// ---- optimize-plate -------------------------------------------------------

struct PlateArgs {
    std::string target_file, solver = "diffpat", out_dir, config;
    std::string target_scale = "1.0";  // number or "rms"
    int iters = 200;
    int pad = 2;
    std::string evanescent = "decay";
    double frequency = 2.0e6;
    double speed = 1480.0;
    double dx = 150e-6;
    double distance = 0.02;
    double source_amp = 1.0;
};

void run_optimize_plate(const PlateArgs& a) {
    if (a.target_file.empty()) throw std::invalid_argument("--target is required");
    if (a.out_dir.empty()) throw std::invalid_argument("--out is required");
    if (a.solver != "diffpat" && a.solver != "iasa")
        throw std::invalid_argument("--solver must be 'diffpat' or 'iasa'");
    if (a.iters < 0) throw std::invalid_argument("--iters must be >= 0");

    const PgmImage img = read_pgm(a.target_file);
    if (img.nx != img.ny)
        throw std::invalid_argument("target image must be square, got " +
                                    std::to_string(img.nx) + "x" + std::to_string(img.ny));

    PlateConfig cfg;
    cfg.frequency = a.frequency;
    cfg.speed_of_sound = a.speed;
    cfg.dx = a.dx;
    cfg.distance = a.distance;
    cfg.source_amp = a.source_amp;
    cfg.asm_opts.pad_factor = a.pad;
    cfg.asm_opts.evanescent_mode = parse_evanescent(a.evanescent);
    cfg.wavenumber();

    // Pixels map to [0, 1]; --target-scale (a number, or "rms" to match the
    // root-mean-square of the freely propagated plane wave) converts them
    // to Pa.
    RealPlane target;
    target.nx = img.nx;
    target.ny = img.ny;
    target.dx = cfg.dx;
    target.values.resize(img.pixels.size());
    double sum_sq = 0.0;
    for (size_t i = 0; i < img.pixels.size(); ++i) {
        target.values[i] = img.pixels[i] / 255.0;
        sum_sq += target.values[i] * target.values[i];
    }
    if (sum_sq == 0.0) throw std::invalid_argument("target image has zero peak (all black)");
    double scale;
    if (a.target_scale == "rms") {
        scale = cfg.source_amp * std::sqrt(static_cast<double>(target.values.size()) / sum_sq);
    } else {
        try {
            size_t used = 0;
            scale = std::stod(a.target_scale, &used);
            if (used != a.target_scale.size()) throw std::invalid_argument("");
        } catch (const std::exception&) {
            throw std::invalid_argument("--target-scale must be a number or 'rms'");
        }
        if (!(scale > 0.0)) throw std::invalid_argument("--target-scale must be > 0");
    }
    for (auto& v : target.values) v *= scale;

    fs::create_directories(a.out_dir);
    json snap;
    snap["subcommand"] = "optimize-plate";
    snap["target"] = a.target_file;
    snap["solver"] = a.solver;
    snap["iters"] = a.iters;
    snap["target-scale"] = a.target_scale;
    snap["resolved_target_scale"] = scale;
    snap["pad"] = a.pad;
    snap["evanescent"] = a.evanescent;
    snap["frequency"] = a.frequency;
    snap["speed"] = a.speed;
    snap["dx"] = a.dx;
    snap["distance"] = a.distance;
    snap["source-amp"] = a.source_amp;
    snap["out"] = a.out_dir;
    write_snapshot(a.out_dir + "/resolved_config.json", snap);

    PhasePlane phase;
    RealPlane recon;
    std::vector<double> history;
    if (a.solver == "diffpat") {
        auto result = optimize_plate(target, cfg, a.iters);
        phase = std::move(result.phase);
        recon = std::move(result.reconstructed_amplitude);
        history = std::move(result.record.loss_history);
    } else {
        auto result = iasa(target, cfg, a.iters);
        phase = std::move(result.phase);
        recon = std::move(result.reconstructed_amplitude);
        history = std::move(result.l1_history);
    }

    const double score = psnr(recon, target);
    write_real_grid(a.out_dir + "/phase_plane", phase);
    write_real_grid(a.out_dir + "/recon_amplitude", recon);
    write_real_grid(a.out_dir + "/target_amplitude", target);
    json report;
    report["solver"] = a.solver;
    report["iterations"] = a.iters;
    report["psnr_db"] = score;
    report["initial_l1"] = history.front();
    report["final_l1"] = history.back();
    report["l1_history"] = history;
    write_snapshot(a.out_dir + "/report.json", report);
    std::cout << a.solver << " PSNR " << format_double(score) << " dB\n";
}

// ---- bench ----------------------------------------------------------------

struct BenchArgs {
    std::vector<std::string> cells;
    std::string out_dir, config;
    std::string solvers = "diffpat,focal-single";
    std::string checkpoints;
    int geometries = 0;  // 0 = per-N desk defaults
    int iters = 150;
    uint64_t seed = 1;
    bool full = false;
};

int desk_geometries_for(int n) {
    if (n <= 2) return 100;
    if (n <= 8) return 50;
    return 20;
}

std::string array_key_for_m(int m) {
    switch (m) {
        case 196: return "single-sided-14";
        case 512: return "single-axis-16";
        case 1024: return "single-sided-32";
        default:
            throw std::invalid_argument("no named array with M=" + std::to_string(m) +
                                        " (known: 196, 512, 1024)");
    }
}

BenchCell parse_cell(const std::string& spec, int geometries, bool full) {
    int n = -1, m = -1;
    std::string cur;
    std::vector<std::string> parts;
    for (char c : spec) {
        if (c == ':') {
            parts.push_back(cur);
            cur.clear();
        } else
            cur.push_back(c);
    }
    parts.push_back(cur);
    for (const auto& part : parts) {
        const auto eq = part.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("bad cell spec '" + spec + "' (want N=<n>:M=<m>)");
        const std::string key = part.substr(0, eq), value = part.substr(eq + 1);
        try {
            if (key == "N") n = std::stoi(value);
            else if (key == "M") m = std::stoi(value);
            else throw std::invalid_argument("");
        } catch (const std::exception&) {
            throw std::invalid_argument("bad cell spec '" + spec + "' (want N=<n>:M=<m>)");
        }
    }
    if (n < 1 || m < 1)
        throw std::invalid_argument("bad cell spec '" + spec + "' (want N=<n>:M=<m>)");
    BenchCell cell;
    cell.array_key = array_key_for_m(m);
    cell.n_points = n;
    cell.geometries = full ? 1000 : (geometries > 0 ? geometries : desk_geometries_for(n));
    return cell;
}

void run_bench(const BenchArgs& a) {
    if (a.out_dir.empty()) throw std::invalid_argument("--out is required");
    if (a.iters < 0) throw std::invalid_argument("--iters must be >= 0");

    BenchConfig cfg;
    cfg.iterations = a.iters;
    cfg.master_seed = a.seed;
    cfg.out_dir = a.out_dir;
    cfg.solvers = split_csv(a.solvers);
    if (a.cells.empty()) {
        cfg.cells = a.full ? full_scale_cells() : desk_scale_cells();
        if (!a.full && a.geometries > 0)
            for (auto& cell : cfg.cells) cell.geometries = a.geometries;
    } else {
        for (const auto& spec : a.cells) cfg.cells.push_back(parse_cell(spec, a.geometries, a.full));
    }
    for (const auto& tok : split_csv(a.checkpoints)) {
        try {
            cfg.checkpoints.push_back(std::stoi(tok));
        } catch (const std::exception&) {
            throw std::invalid_argument("bad checkpoint '" + tok + "'");
        }
    }

    fs::create_directories(a.out_dir);
    json snap;
    snap["subcommand"] = "bench";
    snap["cells"] = json::array();
    for (const auto& c : cfg.cells)
        snap["cells"].push_back(
            {{"array", c.array_key}, {"N", c.n_points}, {"geometries", c.geometries}});
    snap["iters"] = cfg.iterations;
    snap["seed"] = cfg.master_seed;
    snap["solvers"] = cfg.solvers;
    snap["checkpoints"] = cfg.checkpoints;
    snap["full"] = a.full;
    snap["out"] = a.out_dir;
    write_snapshot(a.out_dir + "/resolved_config.json", snap);

    generate_dataset(cfg);
    run_benchmark(cfg);
    if (!cfg.checkpoints.empty()) convergence_sweep(cfg);
    std::cout << "benchmark outputs written to " << a.out_dir << "\n";
}

// ---- propagate --------------------------------------------------------------

struct PropagateArgs {
    std::string in_stem, out_stem, config;
    double distance = 0.0;
    double frequency = 2.0e6;
    double speed = 1480.0;
    int pad = 2;
    std::string evanescent = "decay";
    bool adjoint = false;
};

void run_propagate(const PropagateArgs& a) {
    if (a.in_stem.empty() || a.out_stem.empty())
        throw std::invalid_argument("--in and --out are required");
    const std::string in_stem = strip_grid_suffix(a.in_stem);
    const std::string out_stem = strip_grid_suffix(a.out_stem);
    const ComplexPlane in = read_complex_grid(in_stem);
    const MediumConfig medium{a.frequency, a.speed};
    AsmOptions opts;
    opts.pad_factor = a.pad;
    opts.evanescent_mode = parse_evanescent(a.evanescent);

    const ComplexPlane out = a.adjoint
                                 ? adjoint_propagate_cw(in, a.distance, medium.wavenumber(), opts)
                                 : propagate_cw(in, a.distance, medium.wavenumber(), opts);
    if (const auto parent = fs::path(out_stem).parent_path(); !parent.empty())
        fs::create_directories(parent);
    write_complex_grid(out_stem, out);
    json snap;
    snap["subcommand"] = "propagate";
    snap["in"] = in_stem;
    snap["out"] = out_stem;
    snap["distance"] = a.distance;
    snap["frequency"] = a.frequency;
    snap["speed"] = a.speed;
    snap["pad"] = a.pad;
    snap["evanescent"] = a.evanescent;
    snap["adjoint"] = a.adjoint;
    write_snapshot(out_stem + ".config.json", snap);
    std::cout << "wrote " << out_stem << ".bin\n";
}

// ---- make-chart -------------------------------------------------------------

struct ChartArgs {
    std::string out_file, config;
    int size = 256;
};

void run_make_chart(const ChartArgs& a) {
    if (a.out_file.empty()) throw std::invalid_argument("--out is required");
    PgmImage img;
    img.nx = img.ny = a.size;
    img.pixels = make_resolution_chart(a.size);
    if (const auto parent = fs::path(a.out_file).parent_path(); !parent.empty())
        fs::create_directories(parent);
    write_pgm(a.out_file, img);
    json snap;
    snap["subcommand"] = "make-chart";
    snap["size"] = a.size;
    snap["out"] = a.out_file;
    write_snapshot(a.out_file + ".config.json", snap);
    std::cout << "wrote " << a.out_file << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Phase-only acoustic hologram optimization (arrays and plates)"};
    app.require_subcommand(1);

    PatArgs pat;
    auto* sub_pat = app.add_subcommand("optimize-pat",
                                       "Optimize array phases for multi-point amplitude targets");
    sub_pat->add_option("--array", pat.array_key,
                        "named layout (single-sided-<n> | single-axis-<n>)");
    sub_pat->add_option("--array-file", pat.array_file, "layout JSON file");
    sub_pat->add_option("--points", pat.points_file, "control-point JSON file");
    sub_pat->add_option("--iters", pat.iters, "optimizer iterations");
    sub_pat->add_option("--seed", pat.seed, "initial-phase seed");
    sub_pat->add_option("--frequency", pat.frequency, "drive frequency, Hz");
    sub_pat->add_option("--speed", pat.speed, "speed of sound, m/s");
    sub_pat->add_option("--slice-pixels", pat.slice_pixels, "field slice resolution");
    sub_pat->add_option("--out", pat.out_dir, "output directory");
    sub_pat->add_option("--config", pat.config, "JSON config file (flags override)");
    {
        Binder& b = g_binders["optimize-pat"];
        bind_key(b, "array", pat.array_key);
        bind_key(b, "array-file", pat.array_file);
        bind_key(b, "points", pat.points_file);
        bind_key(b, "iters", pat.iters);
        bind_key(b, "seed", pat.seed);
        bind_key(b, "frequency", pat.frequency);
        bind_key(b, "speed", pat.speed);
        bind_key(b, "slice-pixels", pat.slice_pixels);
        bind_key(b, "out", pat.out_dir);
    }
    sub_pat->callback([&pat]() { run_optimize_pat(pat); });

    PlateArgs plate;
    auto* sub_plate = app.add_subcommand("optimize-plate",
                                         "Optimize a phase plate for an image target");
    sub_plate->add_option("--target", plate.target_file, "binary PGM (P5) target image");
    sub_plate->add_option("--solver", plate.solver, "diffpat | iasa");
    sub_plate->add_option("--iters", plate.iters, "iterations");
    sub_plate->add_option("--target-scale", plate.target_scale,
                          "Pa for a white pixel, or 'rms'");
    sub_plate->add_option("--pad", plate.pad, "propagation pad factor (1, 2, 4)");
    sub_plate->add_option("--evanescent", plate.evanescent, "decay | zero");
    sub_plate->add_option("--frequency", plate.frequency, "Hz");
    sub_plate->add_option("--speed", plate.speed, "m/s");
    sub_plate->add_option("--dx", plate.dx, "plate pixel size, m");
    sub_plate->add_option("--distance", plate.distance, "propagation distance, m");
    sub_plate->add_option("--source-amp", plate.source_amp, "source amplitude, Pa");
    sub_plate->add_option("--out", plate.out_dir, "output directory");
    sub_plate->add_option("--config", plate.config, "JSON config file (flags override)");
    {
        Binder& b = g_binders["optimize-plate"];
        bind_key(b, "target", plate.target_file);
        bind_key(b, "solver", plate.solver);
        bind_key(b, "iters", plate.iters);
        bind_key(b, "target-scale", plate.target_scale);
        bind_key(b, "pad", plate.pad);
        bind_key(b, "evanescent", plate.evanescent);
        bind_key(b, "frequency", plate.frequency);
        bind_key(b, "speed", plate.speed);
        bind_key(b, "dx", plate.dx);
        bind_key(b, "distance", plate.distance);
        bind_key(b, "source-amp", plate.source_amp);
        bind_key(b, "out", plate.out_dir);
    }
    sub_plate->callback([&plate]() { run_optimize_plate(plate); });

    BenchArgs bench;
    auto* sub_bench = app.add_subcommand("bench", "Seeded randomized benchmark protocol");
    sub_bench->add_option("--cells", bench.cells, "cell specs like N=2:M=196 (repeatable)");
    sub_bench->add_option("--geometries", bench.geometries, "geometries per cell (0 = defaults)");
    sub_bench->add_option("--iters", bench.iters, "optimizer iterations");
    sub_bench->add_option("--seed", bench.seed, "master seed");
    sub_bench->add_option("--solvers", bench.solvers, "comma-separated: diffpat,focal-single");
    sub_bench->add_option("--checkpoints", bench.checkpoints,
                          "comma-separated iteration checkpoints for convergence.csv");
    sub_bench->add_flag("--full", bench.full, "full 1000-geometry protocol");
    sub_bench->add_option("--out", bench.out_dir, "output directory");
    sub_bench->add_option("--config", bench.config, "JSON config file (flags override)");
    {
        Binder& b = g_binders["bench"];
        bind_key(b, "cells", bench.cells);
        bind_key(b, "geometries", bench.geometries);
        bind_key(b, "iters", bench.iters);
        bind_key(b, "seed", bench.seed);
        bind_key(b, "solvers", bench.solvers);
        bind_key(b, "checkpoints", bench.checkpoints);
        bind_key(b, "full", bench.full);
        bind_key(b, "out", bench.out_dir);
    }
    sub_bench->callback([&bench]() { run_bench(bench); });

    PropagateArgs prop;
    auto* sub_prop = app.add_subcommand("propagate", "Propagate a stored complex field grid");
    sub_prop->add_option("--in", prop.in_stem, "input grid stem (or .bin/.json path)");
    sub_prop->add_option("--out", prop.out_stem, "output grid stem");
    sub_prop->add_option("--distance", prop.distance, "propagation distance, m");
    sub_prop->add_option("--frequency", prop.frequency, "Hz");
    sub_prop->add_option("--speed", prop.speed, "m/s");
    sub_prop->add_option("--pad", prop.pad, "pad factor (1, 2, 4)");
    sub_prop->add_option("--evanescent", prop.evanescent, "decay | zero");
    sub_prop->add_flag("--adjoint", prop.adjoint, "apply the adjoint propagator");
    sub_prop->add_option("--config", prop.config, "JSON config file (flags override)");
    {
        Binder& b = g_binders["propagate"];
        bind_key(b, "in", prop.in_stem);
        bind_key(b, "out", prop.out_stem);
        bind_key(b, "distance", prop.distance);
        bind_key(b, "frequency", prop.frequency);
        bind_key(b, "speed", prop.speed);
        bind_key(b, "pad", prop.pad);
        bind_key(b, "evanescent", prop.evanescent);
        bind_key(b, "adjoint", prop.adjoint);
    }
    sub_prop->callback([&prop]() { run_propagate(prop); });

    ChartArgs chart;
    auto* sub_chart = app.add_subcommand("make-chart", "Render the tri-bar resolution chart");
    sub_chart->add_option("--size", chart.size, "image size in pixels");
    sub_chart->add_option("--out", chart.out_file, "output PGM path");
    sub_chart->add_option("--config", chart.config, "JSON config file (flags override)");
    {
        Binder& b = g_binders["make-chart"];
        bind_key(b, "size", chart.size);
        bind_key(b, "out", chart.out_file);
    }
    sub_chart->callback([&chart]() { run_make_chart(chart); });

    try {
        apply_config_file(argc, argv);
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
