#pragma once

#include <complex>
#include <vector>

namespace holopt {

// Complex pressure samples on a uniform grid with equal spacing on both
// axes.  Row-major storage: values[iy * nx + ix]; ix runs along x.
struct ComplexPlane {
    int nx = 0, ny = 0;
    double dx = 0.0;  // m, both axes
    std::vector<std::complex<double>> values;
};

// Real samples on the same grid convention (phase maps, target images,
// amplitude maps).
struct RealPlane {
    int nx = 0, ny = 0;
    double dx = 0.0;
    std::vector<double> values;
};

using PhasePlane = RealPlane;

enum class EvanescentMode {
    decay,  // exp(-sqrt(kt^2 - k^2) * d): physical attenuation
    zero,   // hard cutoff outside the propagating disk
};

struct AsmOptions {
    int pad_factor = 2;  // 1, 2, or 4; zero padding before the transforms
    EvanescentMode evanescent_mode = EvanescentMode::decay;
};

// Throws std::invalid_argument when shape/spacing invariants are broken or
// values are not finite.
void validate(const ComplexPlane& plane);

// Plane-to-parallel-plane propagation: embed in a pad_factor-times larger
// zero field (source at the low corner), multiply the DFT by the transfer
// function H(kx, ky) = exp(j*kz*d), kz = sqrt(k^2 - kx^2 - ky^2), inverse
// transform, crop back.  Spatial frequencies follow the signed DFT ordering
// kx = 2*pi*m/(N*dx) with m in [-N/2, N/2); the forward DFT uses the
// exp(-j...) kernel (FFTW sign convention) and the inverse is normalized.
ComplexPlane propagate_cw(const ComplexPlane& plane, double distance, double k,
                          const AsmOptions& opts);

// Same pipeline with conj(H): the exact adjoint of propagate_cw under the
// discrete inner product <u, v> = sum conj(u_i) v_i.
ComplexPlane adjoint_propagate_cw(const ComplexPlane& plane, double distance, double k,
                                  const AsmOptions& opts);

}  // namespace holopt
