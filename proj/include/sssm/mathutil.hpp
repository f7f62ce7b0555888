#pragma once

#include <cmath>

namespace sssm {

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

inline double logit(double p) { return std::log(p / (1.0 - p)); }

// Derivative of the fast-sigmoid ramp z/(1+k|z|); even in z, maximum 1 at 0.
inline double fast_sigmoid_grad(double z, double k) {
  const double d = 1.0 + k * std::abs(z);
  return 1.0 / (d * d);
}

// Antiderivative of fast_sigmoid_grad, shifted to 1/2 at z = 0. Used as the
// smoothed stand-in for a hard threshold when exact differentiability of the
// forward pass is required (finite-difference verification); its derivative
// is fast_sigmoid_grad by construction.
inline double fast_sigmoid_ramp(double z, double k) {
  return 0.5 + z / (1.0 + k * std::abs(z));
}

}  // namespace sssm
