#include "holopt/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace holopt {

std::vector<double> rp(const std::vector<std::complex<double>>& pressures,
                       const std::vector<double>& targets) {
    if (pressures.size() != targets.size())
        throw std::invalid_argument("pressure and target counts differ");
    std::vector<double> out(pressures.size());
    for (size_t i = 0; i < pressures.size(); ++i) {
        if (!(targets[i] > 0.0))
            throw std::invalid_argument("target amplitude " + std::to_string(i) +
                                        " must be > 0");
        out[i] = std::abs(pressures[i]) / targets[i];
    }
    return out;
}

namespace {

double quantile_sorted(const std::vector<double>& sorted, double q) {
    const size_t n = sorted.size();
    if (n == 1) return sorted[0];
    const double pos = q * static_cast<double>(n - 1);
    const size_t lo = static_cast<size_t>(pos);
    const double frac = pos - static_cast<double>(lo);
    if (lo + 1 >= n) return sorted[n - 1];
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

}  // namespace

BoxStats box_stats(std::vector<double> values) {
    if (values.empty()) throw std::invalid_argument("box_stats needs at least one value");
    std::sort(values.begin(), values.end());
    BoxStats s;
    s.q1 = quantile_sorted(values, 0.25);
    s.median = quantile_sorted(values, 0.5);
    s.q3 = quantile_sorted(values, 0.75);
    s.iqr = s.q3 - s.q1;
    const double fence_low = s.q1 - 1.5 * s.iqr;
    const double fence_high = s.q3 + 1.5 * s.iqr;
    s.whisker_low = values.back();
    s.whisker_high = values.front();
    for (double v : values) {
        if (v >= fence_low && v <= fence_high) {
            s.whisker_low = std::min(s.whisker_low, v);
            s.whisker_high = std::max(s.whisker_high, v);
        } else {
            s.outliers.push_back(v);
        }
    }
    return s;
}

double psnr(const std::vector<double>& candidate, const std::vector<double>& reference) {
    if (candidate.size() != reference.size() || reference.empty())
        throw std::invalid_argument("psnr images must share a non-empty shape");
    double peak = 0.0;
    for (double v : reference) peak = std::max(peak, v);
    if (!(peak > 0.0)) throw std::invalid_argument("psnr reference image has no positive peak");
    double mse = 0.0;
    for (size_t i = 0; i < reference.size(); ++i) {
        const double d = candidate[i] - reference[i];
        mse += d * d;
    }
    mse /= static_cast<double>(reference.size());
    if (mse == 0.0) return kPsnrCap;
    return std::min(kPsnrCap, 10.0 * std::log10(peak * peak / mse));
}

double psnr(const RealPlane& candidate, const RealPlane& reference) {
    if (candidate.nx != reference.nx || candidate.ny != reference.ny)
        throw std::invalid_argument("psnr images must share a non-empty shape");
    return psnr(candidate.values, reference.values);
}

}  // namespace holopt
