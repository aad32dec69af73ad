#pragma once

#include <vector>

#include "holopt/angular_spectrum.hpp"
#include "holopt/field_model.hpp"

namespace holopt {

// Pressure magnitudes below this are treated as exactly zero for gradient
// purposes (the amplitude function is not differentiable at 0); the same
// threshold flags L1 kink pixels for the plate loss.
inline constexpr double kSubgradientEps = 1e-12;

struct PatPointReport {
    double amplitude = 0.0;  // |p_c|, Pa
    double target = 0.0;     // A_c, Pa
    double rp = 0.0;         // amplitude / target
};

struct PatLossReport {
    double loss = 0.0;  // sum of squared amplitude errors, Pa^2
    std::vector<PatPointReport> per_point;
};

// L = sum_c (A_c - |p_c|)^2 with p = G * exp(j*phases).
PatLossReport pat_loss(const PhaseVector& phases, const PropagationMatrix& g,
                       const std::vector<double>& targets);

// Exact gradient dL/dphi_m = sum_c -2 (A_c - |p_c|) Re((conj(p_c)/|p_c|) * j
// * G_cm * exp(j*phi_m)).  Points with |p_c| < kSubgradientEps contribute 0
// (subgradient choice); their indices are appended to *degenerate_points
// when given.
std::vector<double> pat_loss_gradient(const PhaseVector& phases, const PropagationMatrix& g,
                                      const std::vector<double>& targets,
                                      std::vector<int>* degenerate_points = nullptr);

// L = sum_xy | A(x, y) - |p(x, y)| | with p = propagate_cw(source_amp *
// exp(j*phase)).  phase and target must share shape and spacing.
double plate_loss(const PhasePlane& phase, const RealPlane& target, double source_amp,
                  double distance, double k, const AsmOptions& opts);

// Exact gradient image of the L1 objective: with s = sign(|p| - A) and back
// field b = adjoint_propagate_cw(s * p/|p|), pixel gradient = source_amp *
// Im(exp(-j*phase) * b).  Pixels with |p| < kSubgradientEps or with
// ||p| - A| < kSubgradientEps contribute s = 0; *n_subgradient_pixels (when
// given) receives their count.
PhasePlane plate_loss_gradient(const PhasePlane& phase, const RealPlane& target, double source_amp,
                               double distance, double k, const AsmOptions& opts,
                               long* n_subgradient_pixels = nullptr);

// Loss and gradient from one forward + one adjoint propagation (the
// per-iteration evaluation the plate optimizer runs).
struct PlateEval {
    double loss = 0.0;
    PhasePlane gradient;
    long n_subgradient_pixels = 0;
};

PlateEval plate_loss_and_gradient(const PhasePlane& phase, const RealPlane& target,
                                  double source_amp, double distance, double k,
                                  const AsmOptions& opts);

}  // namespace holopt
