#include "holopt/grad.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace holopt {

namespace {

void check_pat_dims(const PhaseVector& phases, const PropagationMatrix& g,
                    const std::vector<double>& targets) {
    if (static_cast<int>(phases.size()) != g.n_transducers)
        throw std::invalid_argument("phase count " + std::to_string(phases.size()) +
                                    " != matrix column count " + std::to_string(g.n_transducers));
    if (static_cast<int>(targets.size()) != g.n_points)
        throw std::invalid_argument("target count " + std::to_string(targets.size()) +
                                    " != matrix row count " + std::to_string(g.n_points));
}

std::vector<std::complex<double>> drive_vector(const PhaseVector& phases) {
    std::vector<std::complex<double>> e(phases.size());
    for (size_t m = 0; m < phases.size(); ++m) e[m] = std::polar(1.0, phases[m]);
    return e;
}

std::vector<std::complex<double>> matrix_apply(const PropagationMatrix& g,
                                               const std::vector<std::complex<double>>& x) {
    std::vector<std::complex<double>> p(g.n_points);
    for (int c = 0; c < g.n_points; ++c) {
        std::complex<double> sum = 0.0;
        const auto* row = &g.entries[static_cast<size_t>(c) * g.n_transducers];
        for (int m = 0; m < g.n_transducers; ++m) sum += row[m] * x[m];
        p[c] = sum;
    }
    return p;
}

void check_plate_dims(const PhasePlane& phase, const RealPlane& target, double source_amp) {
    if (!(source_amp > 0.0)) throw std::invalid_argument("source amplitude must be > 0");
    if (phase.nx != target.nx || phase.ny != target.ny)
        throw std::invalid_argument("phase and target grids have different shapes");
    if (phase.dx != target.dx)
        throw std::invalid_argument("phase and target grids have different spacing");
    if (phase.values.size() != static_cast<size_t>(phase.nx) * phase.ny ||
        target.values.size() != static_cast<size_t>(target.nx) * target.ny)
        throw std::invalid_argument("plane value count does not match nx*ny");
}

ComplexPlane plate_source_field(const PhasePlane& phase, double source_amp) {
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

PatLossReport pat_loss(const PhaseVector& phases, const PropagationMatrix& g,
                       const std::vector<double>& targets) {
    check_pat_dims(phases, g, targets);
    for (size_t c = 0; c < targets.size(); ++c)
        if (!(targets[c] > 0.0))
            throw std::invalid_argument("target amplitude " + std::to_string(c) +
                                        " must be > 0");
    const auto p = matrix_apply(g, drive_vector(phases));
    PatLossReport report;
    report.per_point.resize(targets.size());
    for (size_t c = 0; c < targets.size(); ++c) {
        const double amp = std::abs(p[c]);
        const double err = targets[c] - amp;
        report.loss += err * err;
        report.per_point[c] = {amp, targets[c], amp / targets[c]};
    }
    return report;
}

std::vector<double> pat_loss_gradient(const PhaseVector& phases, const PropagationMatrix& g,
                                      const std::vector<double>& targets,
                                      std::vector<int>* degenerate_points) {
    check_pat_dims(phases, g, targets);
    for (size_t c = 0; c < targets.size(); ++c)
        if (!(targets[c] > 0.0))
            throw std::invalid_argument("target amplitude " + std::to_string(c) +
                                        " must be > 0");
    const auto drive = drive_vector(phases);
    const auto p = matrix_apply(g, drive);

    // w_c = -2 (A_c - |p_c|) conj(p_c)/|p_c|; gradient_m = -Im(e^{j phi_m} (G^T w)_m).
    std::vector<std::complex<double>> w(targets.size());
    for (size_t c = 0; c < targets.size(); ++c) {
        const double amp = std::abs(p[c]);
        if (amp < kSubgradientEps) {
            w[c] = 0.0;
            if (degenerate_points) degenerate_points->push_back(static_cast<int>(c));
            continue;
        }
        w[c] = -2.0 * (targets[c] - amp) * std::conj(p[c]) / amp;
    }
    std::vector<double> grad(phases.size());
    for (int m = 0; m < g.n_transducers; ++m) {
        std::complex<double> t = 0.0;
        for (int c = 0; c < g.n_points; ++c)
            t += g.entries[static_cast<size_t>(c) * g.n_transducers + m] * w[c];
        grad[m] = -std::imag(drive[m] * t);
    }
    return grad;
}

double plate_loss(const PhasePlane& phase, const RealPlane& target, double source_amp,
                  double distance, double k, const AsmOptions& opts) {
    check_plate_dims(phase, target, source_amp);
    const auto p = propagate_cw(plate_source_field(phase, source_amp), distance, k, opts);
    double loss = 0.0;
    for (size_t i = 0; i < p.values.size(); ++i)
        loss += std::fabs(target.values[i] - std::abs(p.values[i]));
    return loss;
}

PlateEval plate_loss_and_gradient(const PhasePlane& phase, const RealPlane& target,
                                  double source_amp, double distance, double k,
                                  const AsmOptions& opts) {
    check_plate_dims(phase, target, source_amp);
    const auto p = propagate_cw(plate_source_field(phase, source_amp), distance, k, opts);

    // Residual s * p/|p| with s = sign(|p| - A); kink and zero-amplitude
    // pixels drop out (subgradient 0).
    PlateEval eval;
    ComplexPlane resid;
    resid.nx = p.nx;
    resid.ny = p.ny;
    resid.dx = p.dx;
    resid.values.resize(p.values.size());
    for (size_t i = 0; i < p.values.size(); ++i) {
        const double amp = std::abs(p.values[i]);
        const double diff = amp - target.values[i];
        eval.loss += std::fabs(diff);
        if (amp < kSubgradientEps || std::fabs(diff) < kSubgradientEps) {
            resid.values[i] = 0.0;
            ++eval.n_subgradient_pixels;
            continue;
        }
        const double s = diff > 0.0 ? 1.0 : -1.0;
        resid.values[i] = s * p.values[i] / amp;
    }

    const auto back = adjoint_propagate_cw(resid, distance, k, opts);
    eval.gradient.nx = phase.nx;
    eval.gradient.ny = phase.ny;
    eval.gradient.dx = phase.dx;
    eval.gradient.values.resize(phase.values.size());
    for (size_t i = 0; i < phase.values.size(); ++i)
        eval.gradient.values[i] =
            source_amp * std::imag(std::polar(1.0, -phase.values[i]) * back.values[i]);
    return eval;
}

PhasePlane plate_loss_gradient(const PhasePlane& phase, const RealPlane& target, double source_amp,
                               double distance, double k, const AsmOptions& opts,
                               long* n_subgradient_pixels) {
    auto eval = plate_loss_and_gradient(phase, target, source_amp, distance, k, opts);
    if (n_subgradient_pixels) *n_subgradient_pixels = eval.n_subgradient_pixels;
    return std::move(eval.gradient);
}

}  // namespace holopt
