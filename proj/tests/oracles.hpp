#pragma once

// Independent reference implementations used only by tests.  The propagation
// oracle below applies the transfer function through explicit O(N^4) DFT
// sums — no FFT library, no shared code with the production path — so a
// match is meaningful evidence, not a tautology.

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "holopt/angular_spectrum.hpp"
#include "holopt/rng.hpp"

namespace oracle {

inline int signed_index(int m, int n) { return m <= (n - 1) / 2 ? m : m - n; }

inline holopt::ComplexPlane propagate_dft(const holopt::ComplexPlane& in, double distance,
                                          double k, const holopt::AsmOptions& opts,
                                          bool adjoint) {
    using std::numbers::pi;
    const int nx = in.nx, ny = in.ny;
    const int pnx = nx * opts.pad_factor, pny = ny * opts.pad_factor;

    // Embed at the low corner of the padded frame.
    std::vector<std::complex<double>> f(static_cast<size_t>(pnx) * pny, {0.0, 0.0});
    for (int y = 0; y < ny; ++y)
        for (int x = 0; x < nx; ++x) f[static_cast<size_t>(y) * pnx + x] = in.values[static_cast<size_t>(y) * nx + x];

    // Forward DFT with the exp(-j...) kernel.
    std::vector<std::complex<double>> big(f.size());
    for (int q = 0; q < pny; ++q)
        for (int r = 0; r < pnx; ++r) {
            std::complex<double> acc{0.0, 0.0};
            for (int y = 0; y < pny; ++y)
                for (int x = 0; x < pnx; ++x) {
                    const double ang =
                        -2.0 * pi * (static_cast<double>(q) * y / pny + static_cast<double>(r) * x / pnx);
                    acc += f[static_cast<size_t>(y) * pnx + x] * std::polar(1.0, ang);
                }
            big[static_cast<size_t>(q) * pnx + r] = acc;
        }

    // Transfer function on the signed frequency grid.
    for (int q = 0; q < pny; ++q)
        for (int r = 0; r < pnx; ++r) {
            const double kx = 2.0 * pi * signed_index(r, pnx) / (pnx * in.dx);
            const double ky = 2.0 * pi * signed_index(q, pny) / (pny * in.dx);
            const double kz2 = k * k - kx * kx - ky * ky;
            std::complex<double> h;
            if (kz2 >= 0.0) {
                h = std::polar(1.0, std::sqrt(kz2) * distance);
            } else if (opts.evanescent_mode == holopt::EvanescentMode::decay) {
                h = {std::exp(-std::sqrt(-kz2) * distance), 0.0};
            } else {
                h = {0.0, 0.0};
            }
            if (adjoint) h = std::conj(h);
            big[static_cast<size_t>(q) * pnx + r] *= h;
        }

    // Normalized inverse DFT, then crop.
    holopt::ComplexPlane out;
    out.nx = nx;
    out.ny = ny;
    out.dx = in.dx;
    out.values.resize(static_cast<size_t>(nx) * ny);
    for (int y = 0; y < ny; ++y)
        for (int x = 0; x < nx; ++x) {
            std::complex<double> acc{0.0, 0.0};
            for (int q = 0; q < pny; ++q)
                for (int r = 0; r < pnx; ++r) {
                    const double ang =
                        2.0 * pi * (static_cast<double>(q) * y / pny + static_cast<double>(r) * x / pnx);
                    acc += big[static_cast<size_t>(q) * pnx + r] * std::polar(1.0, ang);
                }
            out.values[static_cast<size_t>(y) * nx + x] = acc / static_cast<double>(pnx * pny);
        }
    return out;
}

inline holopt::ComplexPlane random_plane(holopt::Rng& rng, int nx, int ny, double dx) {
    holopt::ComplexPlane p;
    p.nx = nx;
    p.ny = ny;
    p.dx = dx;
    p.values.reserve(static_cast<size_t>(nx) * ny);
    for (int i = 0; i < nx * ny; ++i)
        p.values.push_back({holopt::uniform_range(rng, -1.0, 1.0),
                            holopt::uniform_range(rng, -1.0, 1.0)});
    return p;
}

inline double max_abs_diff(const holopt::ComplexPlane& a, const holopt::ComplexPlane& b) {
    double worst = 0.0;
    for (size_t i = 0; i < a.values.size(); ++i)
        worst = std::max(worst, std::abs(a.values[i] - b.values[i]));
    return worst;
}

}  // namespace oracle
