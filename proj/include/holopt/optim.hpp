#pragma once

#include <cstdint>
#include <vector>

#include "holopt/angular_spectrum.hpp"
#include "holopt/field_model.hpp"
#include "holopt/geometry.hpp"
#include "holopt/grad.hpp"

namespace holopt {

struct AdamConfig {
    double alpha = 0.1;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

struct AdamState {
    long step = 0;
    std::vector<double> m, v;  // first/second moment estimates
};

// One bias-corrected Adam update, in place.  Throws on non-finite gradient
// components (the message names the first offending index).
void adam_step(AdamState& state, const std::vector<double>& grad, std::vector<double>& params,
               const AdamConfig& cfg);

// Trajectory of one optimization run.  loss_history[i] is the loss after i
// update steps (index 0 = initial state), so its length is iters + 1; the
// rp histories (arrays only) follow the same indexing.
struct RunRecord {
    std::vector<double> loss_history;
    std::vector<double> rp_mean_history;  // mean of |p_c|/A_c over points
    std::vector<double> rp_std_history;   // population std over points
    std::vector<double> final_phases;     // wrapped to (-pi, pi]; arrays only
    uint64_t seed = 0;
    double wall_ms = 0.0;
};

// Adam on the multi-point amplitude loss.  Initial phases are i.i.d.
// uniform on [0, 2*pi) drawn from `seed`, unless `initial_phases` is given
// (then the seed is recorded but unused).  Deterministic per seed.
RunRecord optimize_pat(const ArrayLayout& layout, const ControlPointSet& geometry,
                       const MediumConfig& medium, int iters = 150, uint64_t seed = 0,
                       const PhaseVector* initial_phases = nullptr, const AdamConfig& adam = {});

// Underwater phase-plate setup: 2 MHz in water, 150 um plate pixels, image
// plane 20 mm away, unit source amplitude.  `dx` is the default spacing
// used when building planes from images; propagation itself always uses the
// target plane's own spacing.
struct PlateConfig {
    double frequency = 2.0e6;       // Hz
    double speed_of_sound = 1480.0; // m/s
    double dx = 150e-6;             // m
    double distance = 0.02;         // m
    double source_amp = 1.0;        // Pa
    AsmOptions asm_opts{};
    AdamConfig adam{};

    double wavenumber() const;
};

struct PlateResult {
    RunRecord record;                  // L1 loss history; rp histories empty
    PhasePlane phase;                  // final phase map, wrapped
    RealPlane reconstructed_amplitude; // |propagate(source * e^{j phase})|
};

// Adam on the plate L1 loss from zero-initialized phases (no randomness).
PlateResult optimize_plate(const RealPlane& target, const PlateConfig& cfg, int iters = 200);

struct IasaResult {
    PhasePlane phase;                  // final phase map, wrapped
    std::vector<double> l1_history;    // forward amplitude L1 error, iters + 1 entries
    RealPlane reconstructed_amplitude;
};

// Alternating-projection baseline: propagate the unit-amplitude source
// field, impose the target amplitude (zero stays zero) keeping the phase,
// back-propagate with the adjoint, keep only the phase.  Deterministic;
// starts from zero phases unless `initial_phase` is given.
IasaResult iasa(const RealPlane& target, const PlateConfig& cfg, int iters = 200,
                const PhasePlane* initial_phase = nullptr);

}  // namespace holopt
