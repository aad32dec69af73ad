#include "holopt/chart.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace holopt {

namespace {

// Paint a filled rectangle, clipped to the image bounds.
void fill_rect(std::vector<uint8_t>& img, int n, int x0, int y0, int w, int h) {
    const int xa = std::max(0, x0), xb = std::min(n, x0 + w);
    const int ya = std::max(0, y0), yb = std::min(n, y0 + h);
    for (int y = ya; y < yb; ++y)
        for (int x = xa; x < xb; ++x) img[static_cast<size_t>(y) * n + x] = 255;
}

// One tri-bar group at (x, y) with bar width w: three horizontal bars of
// length 5w stacked with w gaps, and the matching vertical triple below.
void tri_bar_group(std::vector<uint8_t>& img, int n, int x, int y, int w) {
    if (w < 1) return;
    const int len = 5 * w;
    for (int i = 0; i < 3; ++i) {
        fill_rect(img, n, x, y + i * 2 * w, len, w);
        fill_rect(img, n, x + i * 2 * w, y + 7 * w, w, len);
    }
}

}  // namespace

std::vector<uint8_t> make_resolution_chart(int n) {
    if (n < 8) throw std::invalid_argument("chart size must be at least 8 pixels");
    std::vector<uint8_t> img(static_cast<size_t>(n) * n, 0);
    // Group anchors and bar widths on a 256-pixel reference layout.
    constexpr int groups[][3] = {{18, 18, 12}, {18, 150, 8}, {104, 18, 6},
                                 {104, 110, 5}, {104, 180, 4}, {170, 18, 3},
                                 {170, 70, 2},  {200, 110, 2}, {170, 200, 6}};
    const double u = n / 256.0;
    for (const auto& g : groups) {
        const int x = static_cast<int>(g[0] * u);
        const int y = static_cast<int>(g[1] * u);
        const int w = std::max(1L, std::lround(g[2] * u));
        tri_bar_group(img, n, x, y, w);
    }
    return img;
}

}  // namespace holopt
