#include "holopt/angular_spectrum.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <tuple>

namespace holopt {

void validate(const ComplexPlane& plane) {
    if (plane.nx < 2 || plane.ny < 2)
        throw std::invalid_argument("plane must be at least 2x2 samples");
    if (!(plane.dx > 0.0)) throw std::invalid_argument("plane sample spacing must be > 0");
    if (plane.values.size() != static_cast<size_t>(plane.nx) * plane.ny)
        throw std::invalid_argument("plane value count does not match nx*ny");
    for (const auto& v : plane.values)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw std::invalid_argument("plane contains non-finite values");
}

namespace {

constexpr double kPi = std::numbers::pi;

// FFTW planning is not thread-safe; executing a plan on fresh arrays is.
// Plans are cached per (ny, nx, sign), each created once on a keeper buffer
// that stays alive (new-array execution requires matching alignment, which
// fftw_malloc guarantees for equal-size buffers).
struct PlanCache {
    std::mutex mutex;
    std::map<std::tuple<int, int, int>, std::pair<fftw_plan, fftw_complex*>> plans;

    fftw_plan get(int ny, int nx, int sign) {
        std::lock_guard<std::mutex> lock(mutex);
        auto key = std::make_tuple(ny, nx, sign);
        auto it = plans.find(key);
        if (it != plans.end()) return it->second.first;
        fftw_complex* keeper =
            fftw_alloc_complex(static_cast<size_t>(ny) * static_cast<size_t>(nx));
        if (!keeper) throw std::bad_alloc();
        fftw_plan plan = fftw_plan_dft_2d(ny, nx, keeper, keeper, sign, FFTW_ESTIMATE);
        if (!plan) {
            fftw_free(keeper);
            throw std::runtime_error("FFTW plan creation failed");
        }
        plans.emplace(key, std::make_pair(plan, keeper));
        return plan;
    }
};

PlanCache& plan_cache() {
    static PlanCache cache;
    return cache;
}

struct FftwBuffer {
    fftw_complex* data = nullptr;
    explicit FftwBuffer(size_t n) {
        data = fftw_alloc_complex(n);
        if (!data) throw std::bad_alloc();
    }
    ~FftwBuffer() { fftw_free(data); }
    FftwBuffer(const FftwBuffer&) = delete;
    FftwBuffer& operator=(const FftwBuffer&) = delete;
};

// Signed DFT frequency index: 0..N/2-1 stay, the rest wrap to negatives
// (even N maps index N/2 to -N/2).
inline int signed_freq(int m, int n) { return (m <= (n - 1) / 2) ? m : m - n; }

ComplexPlane run_asm(const ComplexPlane& plane, double distance, double k, const AsmOptions& opts,
                     bool adjoint) {
    validate(plane);
    if (!(distance >= 0.0)) throw std::invalid_argument("propagation distance must be >= 0");
    if (!(k > 0.0)) throw std::invalid_argument("wavenumber must be > 0");
    if (opts.pad_factor != 1 && opts.pad_factor != 2 && opts.pad_factor != 4)
        throw std::invalid_argument("pad_factor must be 1, 2, or 4");

    const int nx = plane.nx, ny = plane.ny;
    const int pnx = nx * opts.pad_factor, pny = ny * opts.pad_factor;
    const size_t ptotal = static_cast<size_t>(pnx) * pny;

    FftwBuffer buf(ptotal);
    for (size_t i = 0; i < ptotal; ++i) buf.data[i][0] = buf.data[i][1] = 0.0;
    for (int iy = 0; iy < ny; ++iy)
        for (int ix = 0; ix < nx; ++ix) {
            const auto& v = plane.values[static_cast<size_t>(iy) * nx + ix];
            buf.data[static_cast<size_t>(iy) * pnx + ix][0] = v.real();
            buf.data[static_cast<size_t>(iy) * pnx + ix][1] = v.imag();
        }

    fftw_execute_dft(plan_cache().get(pny, pnx, FFTW_FORWARD), buf.data, buf.data);

    const double k2 = k * k;
    for (int my = 0; my < pny; ++my) {
        const double ky = 2.0 * kPi * signed_freq(my, pny) / (pny * plane.dx);
        for (int mx = 0; mx < pnx; ++mx) {
            const double kx = 2.0 * kPi * signed_freq(mx, pnx) / (pnx * plane.dx);
            const double kz2 = k2 - kx * kx - ky * ky;
            double hr, hi;
            if (kz2 >= 0.0) {
                const double arg = std::sqrt(kz2) * distance;
                hr = std::cos(arg);
                hi = adjoint ? -std::sin(arg) : std::sin(arg);
            } else if (opts.evanescent_mode == EvanescentMode::decay) {
                hr = std::exp(-std::sqrt(-kz2) * distance);  // real: self-adjoint factor
                hi = 0.0;
            } else {
                hr = hi = 0.0;
            }
            auto& v = buf.data[static_cast<size_t>(my) * pnx + mx];
            const double re = v[0] * hr - v[1] * hi;
            const double im = v[0] * hi + v[1] * hr;
            v[0] = re;
            v[1] = im;
        }
    }

    fftw_execute_dft(plan_cache().get(pny, pnx, FFTW_BACKWARD), buf.data, buf.data);

    ComplexPlane out;
    out.nx = nx;
    out.ny = ny;
    out.dx = plane.dx;
    out.values.resize(static_cast<size_t>(nx) * ny);
    const double scale = 1.0 / static_cast<double>(ptotal);
    for (int iy = 0; iy < ny; ++iy)
        for (int ix = 0; ix < nx; ++ix) {
            const auto& v = buf.data[static_cast<size_t>(iy) * pnx + ix];
            out.values[static_cast<size_t>(iy) * nx + ix] = {v[0] * scale, v[1] * scale};
        }
    return out;
}

}  // namespace

ComplexPlane propagate_cw(const ComplexPlane& plane, double distance, double k,
                          const AsmOptions& opts) {
    return run_asm(plane, distance, k, opts, false);
}

ComplexPlane adjoint_propagate_cw(const ComplexPlane& plane, double distance, double k,
                                  const AsmOptions& opts) {
    return run_asm(plane, distance, k, opts, true);
}

}  // namespace holopt
