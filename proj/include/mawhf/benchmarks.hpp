#pragma once

#include "mawhf/model.hpp"

namespace mawhf::benchmarks {

/// One-state model: drift a, exponential jumps Exp(c) at rate lambda with
/// probability pos_weight (the remainder is Exp(neg_rate) downward).
ModelSpec scalar(double a, double lambda, double c, double pos_weight = 1.0, double neg_rate = 1.0);

/// Two states, nu = (1,1), alternating chain, a = (-1,-0.5), lambda = (1,2),
/// c = (2,3), all state jumps upward. Mean drift is negative.
ModelSpec two_state();

/// Two-state model with positive mean drift (m1 = 1), used for ruin curves.
ModelSpec two_state_ruin();

/// Monotone zero-drift model: a = 0, lambda = 3, c = 2.
ModelSpec zero_drift_scalar();

}  // namespace mawhf::benchmarks
