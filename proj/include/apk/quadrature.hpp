#pragma once

#include "apk/core.hpp"

#include <vector>

namespace apk {

/// Midpoints of a regular grid on [-R, R]^dim with `per_axis` cells per
/// axis, keeping those inside the closed ball B_R. Order is row-major with
/// the first axis fastest.
std::vector<Point> midpoint_nodes(std::size_t dim, double R, std::size_t per_axis);

inline double midpoint_pitch(double R, std::size_t per_axis) { return 2.0 * R / static_cast<double>(per_axis); }

} // namespace apk
