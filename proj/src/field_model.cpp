#include "holopt/field_model.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace holopt {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kMinDistance = 1e-12;  // m; closer counts as coincident
}  // namespace

double MediumConfig::wavenumber() const {
    if (!(frequency > 0.0) || !(speed_of_sound > 0.0))
        throw std::invalid_argument("medium frequency and speed of sound must be > 0");
    return 2.0 * kPi * frequency / speed_of_sound;
}

double wrap_phase(double phi) {
    double w = std::remainder(phi, 2.0 * kPi);
    if (w <= -kPi) w += 2.0 * kPi;
    return w;
}

double bessel_j1(double x) {
    const double ax = std::fabs(x);
    if (ax < 14.0) {
        // Ascending series (x/2) * sum_k (-x^2/4)^k / (k! (k+1)!).
        const double q = -0.25 * x * x;
        double term = 0.5 * x;
        double sum = term;
        for (int k = 1; k < 80; ++k) {
            term *= q / (static_cast<double>(k) * (k + 1.0));
            sum += term;
            if (std::fabs(term) < 1e-18 * (std::fabs(sum) + 1e-300)) break;
        }
        return sum;
    }
    // Hankel asymptotic expansion: J1(x) ~ sqrt(2/(pi x)) (P cos(chi) - Q sin(chi))
    // with chi = x - 3*pi/4.  14 terms keep the error below ~4e-12 for x >= 14.
    const double mu = 4.0;
    double t = 1.0, p = 1.0, q = 0.0;
    for (int j = 1; j < 14; ++j) {
        const double odd = 2.0 * j - 1.0;
        t *= (mu - odd * odd) / (j * 8.0 * ax);
        if (j % 2 == 1)
            q += ((j / 2) % 2 == 0) ? t : -t;
        else
            p += ((j / 2) % 2 == 1) ? -t : t;
    }
    const double chi = ax - 0.75 * kPi;
    const double v = std::sqrt(2.0 / (kPi * ax)) * (std::cos(chi) * p - std::sin(chi) * q);
    return x < 0.0 ? -v : v;
}

namespace {
// 2*J1(u)/u with a series branch across the removable singularity at u = 0.
double directivity_of_u(double u) {
    if (std::fabs(u) < 1e-4) {
        const double u2 = u * u;
        return 1.0 - u2 / 8.0 + u2 * u2 / 192.0;
    }
    return 2.0 * bessel_j1(u) / u;
}
}  // namespace

double directivity(double k, double r, double theta) {
    if (!(k > 0.0) || !(r > 0.0)) throw std::invalid_argument("directivity needs k, r > 0");
    return directivity_of_u(k * r * std::sin(theta));
}

std::complex<double> element_pressure(const Transducer& t, const Vec3& x, double phase,
                                      const MediumConfig& medium) {
    const Vec3 rel = x - t.position;
    const double d = norm(rel);
    if (d < kMinDistance)
        throw std::invalid_argument("field point coincides with a transducer position");
    const double k = medium.wavenumber();
    double cos_theta = dot(t.normal, rel) / d;
    cos_theta = std::fmax(-1.0, std::fmin(1.0, cos_theta));
    const double sin_theta = std::sqrt(1.0 - cos_theta * cos_theta);  // theta in [0, pi]
    const double amp = t.p_ref / d * directivity_of_u(k * t.radius * sin_theta);
    return std::polar(1.0, k * d + phase) * amp;
}

PropagationMatrix propagation_matrix(const ArrayLayout& layout, const std::vector<Vec3>& points,
                                     const MediumConfig& medium) {
    PropagationMatrix g;
    g.n_points = static_cast<int>(points.size());
    g.n_transducers = static_cast<int>(layout.transducers.size());
    g.entries.resize(points.size() * layout.transducers.size());
    for (size_t c = 0; c < points.size(); ++c) {
        for (size_t m = 0; m < layout.transducers.size(); ++m) {
            const double d = norm(points[c] - layout.transducers[m].position);
            if (d < kMinDistance)
                throw std::invalid_argument("point " + std::to_string(c) +
                                            " coincides with transducer " + std::to_string(m));
            g.entries[c * layout.transducers.size() + m] =
                element_pressure(layout.transducers[m], points[c], 0.0, medium);
        }
    }
    return g;
}

std::vector<std::complex<double>> total_pressure(const ArrayLayout& layout, const PhaseVector& phases,
                                                 const std::vector<Vec3>& points,
                                                 const MediumConfig& medium) {
    if (phases.size() != layout.transducers.size())
        throw std::invalid_argument("phase count " + std::to_string(phases.size()) +
                                    " != transducer count " +
                                    std::to_string(layout.transducers.size()));
    std::vector<std::complex<double>> out(points.size());
    for (size_t c = 0; c < points.size(); ++c) {
        std::complex<double> sum = 0.0;
        for (size_t m = 0; m < layout.transducers.size(); ++m)
            sum += element_pressure(layout.transducers[m], points[c], phases[m], medium);
        out[c] = sum;
    }
    return out;
}

PhaseVector focal_phases(const ArrayLayout& layout, const Vec3& focus, const MediumConfig& medium) {
    const double k = medium.wavenumber();
    const double d0 = norm(focus);
    PhaseVector phases(layout.transducers.size());
    for (size_t m = 0; m < layout.transducers.size(); ++m) {
        const double d = norm(focus - layout.transducers[m].position);
        if (d < kMinDistance)
            throw std::invalid_argument("focus coincides with transducer " + std::to_string(m));
        phases[m] = wrap_phase(-k * (d - d0));
    }
    return phases;
}

double calibrate_total_amplitude(const ArrayLayout& layout, const Roi& roi,
                                 const MediumConfig& medium) {
    const auto vertices = roi_vertices(roi);
    double sum = 0.0;
    for (const auto& v : vertices) {
        const auto phases = focal_phases(layout, v, medium);
        const auto p = total_pressure(layout, phases, {v}, medium);
        sum += std::abs(p[0]);
    }
    return sum / static_cast<double>(vertices.size());
}

}  // namespace holopt
