#pragma once

#include <complex>
#include <vector>

#include "holopt/geometry.hpp"

namespace holopt {

// Airborne ultrasound defaults used by the phased-array setups.
inline constexpr double kAirFrequencyHz = 40e3;
inline constexpr double kAirSpeedOfSound = 346.0;

struct MediumConfig {
    double frequency = kAirFrequencyHz;        // Hz
    double speed_of_sound = kAirSpeedOfSound;  // m/s

    double wavenumber() const;  // 2*pi*f/c, validated > 0
};

// Per-transducer phases in radians.  Optimizers may hold unwrapped values;
// exported/reported phases are wrapped to (-pi, pi].
using PhaseVector = std::vector<double>;

// Wrap an angle to (-pi, pi].
double wrap_phase(double phi);

// C-by-M complex matrix G with G(c, m) = element_pressure(transducer m,
// point c, phase 0), so that total pressures = G * exp(j*phases).
struct PropagationMatrix {
    int n_points = 0;
    int n_transducers = 0;
    std::vector<std::complex<double>> entries;  // row-major, index c*M + m

    std::complex<double>& at(int c, int m) { return entries[static_cast<size_t>(c) * n_transducers + m]; }
    const std::complex<double>& at(int c, int m) const {
        return entries[static_cast<size_t>(c) * n_transducers + m];
    }
};

// Bessel function of the first kind, order 1; abs error <= 1e-10 on |x| <= 50.
double bessel_j1(double x);

// Piston directivity 2*J1(u)/u with u = k*r*sin(theta); exactly 1 at u = 0.
// Signed: follows J1 past its first zero (phase flip, not clamped).
double directivity(double k, double r, double theta);

// Far-field element pressure (p_ref/d) * D(theta) * exp(j*(k*d + phase)).
std::complex<double> element_pressure(const Transducer& t, const Vec3& x, double phase,
                                      const MediumConfig& medium);

PropagationMatrix propagation_matrix(const ArrayLayout& layout, const std::vector<Vec3>& points,
                                     const MediumConfig& medium);

// p = G * exp(j*phases) for the matrix of this layout/point set, evaluated by
// direct summation (no precomputed matrix).
std::vector<std::complex<double>> total_pressure(const ArrayLayout& layout, const PhaseVector& phases,
                                                 const std::vector<Vec3>& points,
                                                 const MediumConfig& medium);

// Phases that align every element's argument at the focus: phi_m =
// -k*(d(focus, x_m) - |focus|), wrapped.  All element contributions then
// share the argument k*|focus| (mod 2*pi) and add coherently.
PhaseVector focal_phases(const ArrayLayout& layout, const Vec3& focus, const MediumConfig& medium);

// Mean over the 8 ROI vertices of the focal pressure magnitude |p(v)| with
// focal_phases(v); the achievable-amplitude budget used by the benchmark.
double calibrate_total_amplitude(const ArrayLayout& layout, const Roi& roi,
                                 const MediumConfig& medium);

}  // namespace holopt
