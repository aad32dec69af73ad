#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "holopt/angular_spectrum.hpp"
#include "holopt/field_model.hpp"
#include "holopt/geometry.hpp"
#include "holopt/optim.hpp"

namespace holopt {

// Shortest decimal representation that parses back to the same double;
// used everywhere numbers go into CSV so reruns are byte-comparable.
std::string format_double(double v);

// 8-bit binary PGM (P5), maxval 255, row-major.
struct PgmImage {
    int nx = 0, ny = 0;
    std::vector<uint8_t> pixels;
};

void write_pgm(const std::string& path, const PgmImage& img);
PgmImage read_pgm(const std::string& path);

// Field grids are stored as <stem>.bin (raw little-endian 64-bit doubles,
// row-major; complex grids interleave real/imag pairs) plus a <stem>.json
// sidecar {nx, ny, dx_m, kind} with kind "complex128" or "float64".
void write_complex_grid(const std::string& stem, const ComplexPlane& plane);
ComplexPlane read_complex_grid(const std::string& stem);
void write_real_grid(const std::string& stem, const RealPlane& plane);
RealPlane read_real_grid(const std::string& stem);

// Array layouts as JSON: {label, transducers: [{pos, normal, radius,
// p_ref}], seed_info}; seed_info is null for constructed layouts.
void write_layout(const std::string& path, const ArrayLayout& layout);
ArrayLayout read_layout(const std::string& path);

// Control points as JSON: {points: [{pos: [x, y, z], amp}]}.
void write_control_points(const std::string& path, const ControlPointSet& set);
ControlPointSet read_control_points(const std::string& path);

// Phase vectors as a JSON array of radians (wrapped on write).
void write_phases(const std::string& path, const PhaseVector& phases);
PhaseVector read_phases(const std::string& path);

// Full optimizer trajectory as JSON (includes wall-clock; replay
// comparisons should ignore the wall_ms field).
void write_run_record(const std::string& path, const RunRecord& rec);

}  // namespace holopt
