#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "holopt/field_model.hpp"
#include "holopt/geometry.hpp"
#include "holopt/optim.hpp"

namespace holopt {

// Facing-panel separation for the named single-axis array.
inline constexpr double kDefaultSeparation = 0.2355;

// One benchmark cell: a named array, a control-point count, and how many
// random geometries to draw.
struct BenchCell {
    std::string array_key;  // see make_named_layout
    int n_points = 2;
    int geometries = 100;
};

struct BenchConfig {
    std::vector<BenchCell> cells;
    int iterations = 150;
    uint64_t master_seed = 1;
    double min_amplitude = 10.0;  // Pa, per-point floor for random targets
    std::vector<std::string> solvers{"diffpat", "focal-single"};
    std::vector<int> checkpoints;  // iteration indices for the convergence sweep
    std::string out_dir;
    MediumConfig medium{};
    AdamConfig adam{};
};

// Known keys: "single-sided-<n>" (n-by-n panel at z = 0) and
// "single-axis-<n>" (two facing n-by-n panels, kDefaultSeparation apart),
// both at the default 10 mm pitch.  The layout label is the key itself.
ArrayLayout make_named_layout(const std::string& key);

// Evaluation region: a 0.05 m half-extent cube centered on the axis, at
// z = 0.1 m for one-panel layouts and halfway between facing panels.
Roi default_roi(const ArrayLayout& layout);

// Desk-scale cell matrix (CI-sized): N=2 with 100 geometries, N=8 with 50,
// N=32 with 20, on each of the three standard arrays.
std::vector<BenchCell> desk_scale_cells();

// The full protocol: same cells with 1000 geometries each.
std::vector<BenchCell> full_scale_cells();

std::string dataset_path(const BenchConfig& cfg, const BenchCell& cell);

// Writes one JSON-lines dataset per cell.  The first line is a header
// recording the RNG algorithm, master seed, array, amplitude budget (from
// calibrate_total_amplitude) and ROI; each following line is one geometry
// {id, seed, points}.  Byte-identical across reruns of the same config.
void generate_dataset(const BenchConfig& cfg);

// Runs the configured solvers over every dataset geometry and writes
// results.csv (one row per control point), timing.csv (per-cell wall-clock
// stats; the only non-deterministic output) and summary.csv (per-cell box
// stats of R_p).  Per-geometry failures go to failures.csv and the run
// continues.
void run_benchmark(const BenchConfig& cfg);

// Re-runs the diffpat solver recording R_p statistics at the requested
// iteration checkpoints, pooled across all geometries of each cell; writes
// convergence.csv.
void convergence_sweep(const BenchConfig& cfg);

}  // namespace holopt
