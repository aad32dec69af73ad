#include "holopt/optim.hpp"

#include <chrono>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace holopt {

namespace {

constexpr double kPi = std::numbers::pi;

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

void validate_plate_target(const RealPlane& target) {
    if (target.nx < 2 || target.ny < 2)
        throw std::invalid_argument("plate target must be at least 2x2");
    if (target.nx != target.ny) throw std::invalid_argument("plate target must be square");
    if (!(target.dx > 0.0)) throw std::invalid_argument("plate target spacing must be > 0");
    if (target.values.size() != static_cast<size_t>(target.nx) * target.ny)
        throw std::invalid_argument("plate target value count does not match nx*ny");
    for (double v : target.values)
        if (!std::isfinite(v) || v < 0.0)
            throw std::invalid_argument("plate target amplitudes must be finite and >= 0");
}

RealPlane amplitude_of(const ComplexPlane& p) {
    RealPlane out;
    out.nx = p.nx;
    out.ny = p.ny;
    out.dx = p.dx;
    out.values.resize(p.values.size());
    for (size_t i = 0; i < p.values.size(); ++i) out.values[i] = std::abs(p.values[i]);
    return out;
}

ComplexPlane source_field(const PhasePlane& phase, double source_amp) {
    ComplexPlane u;
    u.nx = phase.nx;
    u.ny = phase.ny;
    u.dx = phase.dx;
    u.values.resize(phase.values.size());
    for (size_t i = 0; i < phase.values.size(); ++i)
        u.values[i] = std::polar(source_amp, phase.values[i]);
    return u;
}

}  // namespace

double PlateConfig::wavenumber() const {
    if (!(frequency > 0.0) || !(speed_of_sound > 0.0))
        throw std::invalid_argument("plate frequency and speed of sound must be > 0");
    return 2.0 * kPi * frequency / speed_of_sound;
}

void adam_step(AdamState& state, const std::vector<double>& grad, std::vector<double>& params,
               const AdamConfig& cfg) {
    if (grad.size() != params.size())
        throw std::invalid_argument("gradient and parameter sizes differ");
    if (state.m.empty()) state.m.assign(params.size(), 0.0);
    if (state.v.empty()) state.v.assign(params.size(), 0.0);
    if (state.m.size() != params.size() || state.v.size() != params.size())
        throw std::invalid_argument("Adam state size does not match parameters");
    if (!(cfg.alpha > 0.0) || !(cfg.epsilon > 0.0) || cfg.beta1 < 0.0 || cfg.beta1 >= 1.0 ||
        cfg.beta2 < 0.0 || cfg.beta2 >= 1.0)
        throw std::invalid_argument("Adam hyperparameters out of range");
    for (size_t i = 0; i < grad.size(); ++i)
        if (!std::isfinite(grad[i]))
            throw std::runtime_error("non-finite gradient at component " + std::to_string(i));

    state.step += 1;
    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
    for (size_t i = 0; i < params.size(); ++i) {
        state.m[i] = cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * grad[i];
        state.v[i] = cfg.beta2 * state.v[i] + (1.0 - cfg.beta2) * grad[i] * grad[i];
        const double mhat = state.m[i] / bc1;
        const double vhat = state.v[i] / bc2;
        params[i] -= cfg.alpha * mhat / (std::sqrt(vhat) + cfg.epsilon);
    }
}

RunRecord optimize_pat(const ArrayLayout& layout, const ControlPointSet& geometry,
                       const MediumConfig& medium, int iters, uint64_t seed,
                       const PhaseVector* initial_phases, const AdamConfig& adam) {
    if (iters < 0) throw std::invalid_argument("iteration count must be >= 0");
    if (geometry.points.empty()) throw std::invalid_argument("no control points given");
    const size_t m_count = layout.transducers.size();
    if (m_count == 0) throw std::invalid_argument("layout has no transducers");

    std::vector<Vec3> points;
    std::vector<double> targets;
    points.reserve(geometry.points.size());
    targets.reserve(geometry.points.size());
    for (const auto& cp : geometry.points) {
        points.push_back(cp.position);
        targets.push_back(cp.amplitude);
    }

    const auto t0 = Clock::now();
    const auto g = propagation_matrix(layout, points, medium);

    PhaseVector phases;
    if (initial_phases) {
        if (initial_phases->size() != m_count)
            throw std::invalid_argument("initial phase count does not match layout");
        phases = *initial_phases;
    } else {
        Rng rng(seed);
        phases.resize(m_count);
        for (auto& p : phases) p = uniform_range(rng, 0.0, 2.0 * kPi);
    }

    RunRecord rec;
    rec.seed = seed;
    rec.loss_history.reserve(iters + 1);
    rec.rp_mean_history.reserve(iters + 1);
    rec.rp_std_history.reserve(iters + 1);
    auto record = [&rec](const PatLossReport& report) {
        rec.loss_history.push_back(report.loss);
        double mean = 0.0;
        for (const auto& pp : report.per_point) mean += pp.rp;
        mean /= static_cast<double>(report.per_point.size());
        double var = 0.0;
        for (const auto& pp : report.per_point) var += (pp.rp - mean) * (pp.rp - mean);
        var /= static_cast<double>(report.per_point.size());
        rec.rp_mean_history.push_back(mean);
        rec.rp_std_history.push_back(std::sqrt(var));
    };

    record(pat_loss(phases, g, targets));
    AdamState state;
    for (int it = 0; it < iters; ++it) {
        const auto grad = pat_loss_gradient(phases, g, targets);
        adam_step(state, grad, phases, adam);
        record(pat_loss(phases, g, targets));
    }

    rec.final_phases.resize(m_count);
    for (size_t i = 0; i < m_count; ++i) rec.final_phases[i] = wrap_phase(phases[i]);
    rec.wall_ms = elapsed_ms(t0);
    return rec;
}

PlateResult optimize_plate(const RealPlane& target, const PlateConfig& cfg, int iters) {
    if (iters < 0) throw std::invalid_argument("iteration count must be >= 0");
    validate_plate_target(target);
    const double k = cfg.wavenumber();

    PhasePlane phase;
    phase.nx = target.nx;
    phase.ny = target.ny;
    phase.dx = target.dx;
    phase.values.assign(target.values.size(), 0.0);

    const auto t0 = Clock::now();
    PlateResult result;
    result.record.loss_history.reserve(iters + 1);
    AdamState state;
    for (int it = 0; it < iters; ++it) {
        auto eval = plate_loss_and_gradient(phase, target, cfg.source_amp, cfg.distance, k,
                                            cfg.asm_opts);
        result.record.loss_history.push_back(eval.loss);
        adam_step(state, eval.gradient.values, phase.values, cfg.adam);
    }
    result.record.loss_history.push_back(
        plate_loss(phase, target, cfg.source_amp, cfg.distance, k, cfg.asm_opts));

    result.reconstructed_amplitude =
        amplitude_of(propagate_cw(source_field(phase, cfg.source_amp), cfg.distance, k,
                                  cfg.asm_opts));
    for (auto& v : phase.values) v = wrap_phase(v);
    result.phase = std::move(phase);
    result.record.wall_ms = elapsed_ms(t0);
    return result;
}

IasaResult iasa(const RealPlane& target, const PlateConfig& cfg, int iters,
                const PhasePlane* initial_phase) {
    if (iters < 0) throw std::invalid_argument("iteration count must be >= 0");
    validate_plate_target(target);
    const double k = cfg.wavenumber();

    PhasePlane phase;
    phase.nx = target.nx;
    phase.ny = target.ny;
    phase.dx = target.dx;
    if (initial_phase) {
        if (initial_phase->nx != target.nx || initial_phase->ny != target.ny)
            throw std::invalid_argument("initial phase shape does not match target");
        phase.values = initial_phase->values;
    } else {
        phase.values.assign(target.values.size(), 0.0);
    }

    IasaResult result;
    result.l1_history.reserve(iters + 1);
    ComplexPlane fwd;
    for (int it = 0; it <= iters; ++it) {
        fwd = propagate_cw(source_field(phase, cfg.source_amp), cfg.distance, k, cfg.asm_opts);
        double l1 = 0.0;
        for (size_t i = 0; i < fwd.values.size(); ++i)
            l1 += std::fabs(target.values[i] - std::abs(fwd.values[i]));
        result.l1_history.push_back(l1);
        if (it == iters) break;

        // Impose the target amplitude, keep the phase (zero target stays
        // zero); back-propagate; keep only the phase of the back field.
        ComplexPlane constrained = fwd;
        for (size_t i = 0; i < constrained.values.size(); ++i) {
            const double amp = std::abs(fwd.values[i]);
            constrained.values[i] =
                amp < 1e-300 ? std::complex<double>(target.values[i], 0.0)
                             : target.values[i] * (fwd.values[i] / amp);
        }
        const auto back = adjoint_propagate_cw(constrained, cfg.distance, k, cfg.asm_opts);
        for (size_t i = 0; i < phase.values.size(); ++i)
            phase.values[i] = std::arg(back.values[i]);
    }

    result.reconstructed_amplitude = amplitude_of(fwd);
    for (auto& v : phase.values) v = wrap_phase(v);
    result.phase = std::move(phase);
    return result;
}

}  // namespace holopt
