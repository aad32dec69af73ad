#pragma once

#include <cstdint>
#include <vector>

namespace holopt {

// Binary tri-bar resolution chart (USAF-1951 style): groups of three
// horizontal and three vertical bars at shrinking scales, white (255) on
// black (0).  n-by-n pixels, row-major.  The layout is parametric in n; the
// repository ships the 256 and 64 pixel renderings it produces.
std::vector<uint8_t> make_resolution_chart(int n);

}  // namespace holopt
