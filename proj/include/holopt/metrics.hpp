#pragma once

#include <complex>
#include <vector>

#include "holopt/angular_spectrum.hpp"

namespace holopt {

// Sentinel returned by psnr when the images match exactly (MSE = 0).
inline constexpr double kPsnrCap = 1000.0;

// Componentwise |p_c| / A_c.  Throws on size mismatch or non-positive target.
std::vector<double> rp(const std::vector<std::complex<double>>& pressures,
                       const std::vector<double>& targets);

// Box-plot summary.  Quartiles use linear interpolation between closest
// ranks: for quantile q over n ascending values, position = (n - 1) * q,
// value = v[floor] + frac * (v[floor + 1] - v[floor]).  Whiskers extend to
// the most extreme data points within 1.5 * IQR of the quartiles; values
// beyond them are outliers.
struct BoxStats {
    double q1 = 0.0, median = 0.0, q3 = 0.0;
    double iqr = 0.0;
    double whisker_low = 0.0, whisker_high = 0.0;
    std::vector<double> outliers;
};

BoxStats box_stats(std::vector<double> values);

// 10*log10(peak^2 / MSE) with peak = max(reference); kPsnrCap when MSE = 0.
// Throws on shape mismatch or when the reference has no positive peak.
double psnr(const std::vector<double>& candidate, const std::vector<double>& reference);
double psnr(const RealPlane& candidate, const RealPlane& reference);

}  // namespace holopt
