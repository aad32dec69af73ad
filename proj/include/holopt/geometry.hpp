#pragma once

#include <array>
#include <string>
#include <vector>

#include "holopt/rng.hpp"
#include "holopt/vec3.hpp"

namespace holopt {

// Default element parameters for the airborne 40 kHz arrays: 10 mm pitch
// (diameter packing for a 5 mm element radius), 1.98 Pa·m on-axis pressure
// at 1 m drive reference.
inline constexpr double kDefaultPitch = 0.010;
inline constexpr double kElementRadius = 0.005;
inline constexpr double kElementPRef = 1.98;

struct Transducer {
    Vec3 position;        // m
    Vec3 normal;          // unit vector
    double radius = kElementRadius;  // m
    double p_ref = kElementPRef;     // Pa·m (pressure at 1 m per unit drive)
};

struct ArrayLayout {
    std::vector<Transducer> transducers;
    std::string label;
};

struct Roi {
    Vec3 center;       // m
    Vec3 half_extent;  // m, componentwise > 0
};

struct ControlPoint {
    Vec3 position;           // m
    double amplitude = 0.0;  // Pa
};

struct ControlPointSet {
    std::vector<ControlPoint> points;
};

// Throws std::invalid_argument when an invariant is broken.
void validate(const Transducer& t);
void validate(const ArrayLayout& layout);
void validate(const Roi& roi);

// nx-by-ny grid centered on the origin of the plane at height z, normals +z,
// row-major order (y varies slowest).  Mean position is (0, 0, z).
ArrayLayout build_single_sided(int nx, int ny, double pitch, double z);

// Two facing panels: one at z = 0 with normals +z (listed first), one at
// z = separation with normals -z.  Each panel is an nx-by-ny centered grid.
ArrayLayout build_single_axis(int nx, int ny, double pitch, double separation);

// The 8 corners center +/- half_extent in binary order: index bit 2 selects
// the x sign, bit 1 the y sign, bit 0 the z sign (0 = minus, 1 = plus).
std::array<Vec3, 8> roi_vertices(const Roi& roi);

// n control points i.i.d. uniform in the ROI box, amplitudes on the simplex
// {A_c >= min_amplitude, sum A_c = total_amplitude} via normalized
// exponential draws.  Draw order (fixed): per point x, y, z coordinates, all
// points first, then n exponential amplitude weights.
ControlPointSet generate_random_geometry(Rng& rng, const Roi& roi, int n,
                                         double total_amplitude, double min_amplitude);

}  // namespace holopt
