#include "holopt/geometry.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace holopt {

void validate(const Transducer& t) {
    if (std::fabs(norm(t.normal) - 1.0) > 1e-12)
        throw std::invalid_argument("transducer normal must be a unit vector");
    if (!(t.radius > 0.0)) throw std::invalid_argument("transducer radius must be > 0");
    if (!(t.p_ref > 0.0)) throw std::invalid_argument("transducer p_ref must be > 0");
}

void validate(const ArrayLayout& layout) {
    if (layout.transducers.empty())
        throw std::invalid_argument("array layout has no transducers");
    for (const auto& t : layout.transducers) validate(t);
    const auto& ts = layout.transducers;
    for (size_t i = 0; i < ts.size(); ++i)
        for (size_t j = i + 1; j < ts.size(); ++j)
            if (ts[i].position == ts[j].position)
                throw std::invalid_argument("transducers " + std::to_string(i) + " and " +
                                            std::to_string(j) + " share a position");
}

void validate(const Roi& roi) {
    if (!(roi.half_extent.x > 0.0 && roi.half_extent.y > 0.0 && roi.half_extent.z > 0.0))
        throw std::invalid_argument("ROI half_extent must be componentwise > 0");
}

namespace {

void append_panel(ArrayLayout& layout, int nx, int ny, double pitch, double z, const Vec3& normal) {
    for (int iy = 0; iy < ny; ++iy) {
        for (int ix = 0; ix < nx; ++ix) {
            Transducer t;
            t.position = {(ix - 0.5 * (nx - 1)) * pitch, (iy - 0.5 * (ny - 1)) * pitch, z};
            t.normal = normal;
            layout.transducers.push_back(t);
        }
    }
}

}  // namespace

ArrayLayout build_single_sided(int nx, int ny, double pitch, double z) {
    if (nx < 1 || ny < 1) throw std::invalid_argument("grid counts must be >= 1");
    if (!(pitch > 0.0)) throw std::invalid_argument("pitch must be > 0");
    ArrayLayout layout;
    layout.label = "single-sided-" + std::to_string(nx) + "x" + std::to_string(ny);
    layout.transducers.reserve(static_cast<size_t>(nx) * ny);
    append_panel(layout, nx, ny, pitch, z, {0.0, 0.0, 1.0});
    return layout;
}

ArrayLayout build_single_axis(int nx, int ny, double pitch, double separation) {
    if (nx < 1 || ny < 1) throw std::invalid_argument("grid counts must be >= 1");
    if (!(pitch > 0.0)) throw std::invalid_argument("pitch must be > 0");
    if (!(separation > 0.0)) throw std::invalid_argument("separation must be > 0");
    ArrayLayout layout;
    layout.label = "single-axis-" + std::to_string(nx) + "x" + std::to_string(ny);
    layout.transducers.reserve(2 * static_cast<size_t>(nx) * ny);
    append_panel(layout, nx, ny, pitch, 0.0, {0.0, 0.0, 1.0});
    append_panel(layout, nx, ny, pitch, separation, {0.0, 0.0, -1.0});
    return layout;
}

std::array<Vec3, 8> roi_vertices(const Roi& roi) {
    validate(roi);
    std::array<Vec3, 8> v;
    for (int i = 0; i < 8; ++i) {
        const double sx = (i & 4) ? 1.0 : -1.0;
        const double sy = (i & 2) ? 1.0 : -1.0;
        const double sz = (i & 1) ? 1.0 : -1.0;
        v[i] = {roi.center.x + sx * roi.half_extent.x, roi.center.y + sy * roi.half_extent.y,
                roi.center.z + sz * roi.half_extent.z};
    }
    return v;
}

ControlPointSet generate_random_geometry(Rng& rng, const Roi& roi, int n,
                                         double total_amplitude, double min_amplitude) {
    validate(roi);
    if (n < 1) throw std::invalid_argument("need at least one control point");
    if (total_amplitude < n * min_amplitude)
        throw std::invalid_argument("amplitude budget infeasible: total " +
                                    std::to_string(total_amplitude) + " < " + std::to_string(n) +
                                    " * " + std::to_string(min_amplitude));
    ControlPointSet set;
    set.points.resize(n);
    for (int i = 0; i < n; ++i) {
        auto& p = set.points[i].position;
        p.x = uniform_range(rng, roi.center.x - roi.half_extent.x, roi.center.x + roi.half_extent.x);
        p.y = uniform_range(rng, roi.center.y - roi.half_extent.y, roi.center.y + roi.half_extent.y);
        p.z = uniform_range(rng, roi.center.z - roi.half_extent.z, roi.center.z + roi.half_extent.z);
    }
    // Uniform simplex weights from normalized exponential draws; the excess
    // budget above the per-point floor is split by the weights.
    std::vector<double> w(n);
    double wsum = 0.0;
    for (int i = 0; i < n; ++i) {
        w[i] = exponential(rng);
        wsum += w[i];
    }
    const double excess = total_amplitude - n * min_amplitude;
    for (int i = 0; i < n; ++i) set.points[i].amplitude = min_amplitude + excess * (w[i] / wsum);
    return set;
}

}  // namespace holopt
