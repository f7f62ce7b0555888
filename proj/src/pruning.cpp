#include "sssm/pruning.hpp"

#include <cmath>
#include <stdexcept>

#include "sssm/mathutil.hpp"

namespace sssm {

void PruningConfig::validate() const {
  if (beta <= 0) throw std::invalid_argument("PruningConfig: beta must be positive");
  if (gamma <= 0) throw std::invalid_argument("PruningConfig: gamma must be positive");
  if (rho <= 0 || rho >= 1)
    throw std::invalid_argument("PruningConfig: rho must lie in (0,1)");
  if (interval <= 0) throw std::invalid_argument("PruningConfig: interval must be positive");
  if (dt_ctrl <= 0) throw std::invalid_argument("PruningConfig: dt_ctrl must be positive");
}

PruningState fresh_mask(int rows, int cols) {
  if (rows <= 0 || cols <= 0)
    throw std::invalid_argument("fresh_mask: sizes must be positive");
  PruningState st;
  st.mask = MatrixXd::Ones(rows, cols);
  st.theta = 0.0;
  return st;
}

double prune_probability(double w, double theta, double beta) {
  if (beta <= 0) throw std::invalid_argument("prune_probability: beta must be positive");
  return sigmoid(beta * (std::abs(w) - theta));
}

void apply_pruning(MatrixXd& weights, PruningState& state, const PruningConfig& cfg,
                   PhiloxRng& rng) {
  if (weights.rows() != state.mask.rows() || weights.cols() != state.mask.cols())
    throw std::invalid_argument("apply_pruning: weight/mask shape mismatch");
  for (int i = 0; i < weights.rows(); ++i) {
    for (int j = 0; j < weights.cols(); ++j) {
      if (state.mask(i, j) == 0.0) continue;
      const double arg = cfg.literal_orientation ? std::abs(weights(i, j)) - state.theta
                                                 : state.theta - std::abs(weights(i, j));
      if (rng.bernoulli(sigmoid(cfg.beta * arg))) {
        state.mask(i, j) = 0.0;
        weights(i, j) = 0.0;
      }
    }
  }
}

double measure_sparsity(const PruningState& state) {
  const auto total = state.mask.size();
  if (total == 0) throw std::invalid_argument("measure_sparsity: empty mask");
  return double(total - long(state.mask.sum())) / double(total);
}

double threshold_step(double theta, double sparsity, double rho, double gamma,
                      double dt_ctrl) {
  if (gamma <= 0) throw std::invalid_argument("threshold_step: gamma must be positive");
  if (!std::isfinite(theta) || !std::isfinite(sparsity))
    throw std::invalid_argument("threshold_step: non-finite input");
  return std::max(0.0, theta + dt_ctrl * gamma * (rho - sparsity));
}

}  // namespace sssm
