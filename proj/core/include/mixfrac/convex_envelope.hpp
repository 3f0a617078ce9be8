#pragma once

#include <span>
#include <vector>

#include "mixfrac/qvector.hpp"

namespace mixfrac {

/// Values of the lower convex envelope of the point cloud {(q_i, v_i)} at the
/// points q_i themselves. k = 1 uses a monotone-chain hull; k >= 2 solves, per
/// point, min Σ λ_i v_i subject to Σ λ_i q_i = q, Σ λ_i = 1, λ >= 0 with a
/// dense two-phase simplex (Bland's rule).
std::vector<double> lower_convex_envelope(std::span<const QVector> points,
                                          std::span<const double> values);

}  // namespace mixfrac
