#pragma once

#include "mawhf/linalg.hpp"

#include <vector>

namespace mawhf::detail {

/// Given samples g_k = G(y_k), y_k = (k - n/2) dy, returns
/// (1/2pi) int e^{-i y x_j} G(y) dy at x_j = (j - n/2) h, h dy = 2pi/n,
/// j = 0..n-1; the result is n-periodic in j.
std::vector<Complex> centered_inverse(std::vector<Complex> g, double dy);

}  // namespace mawhf::detail
