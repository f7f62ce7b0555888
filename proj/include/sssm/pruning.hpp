#pragma once

#include <Eigen/Dense>

#include "sssm/rng.hpp"

namespace sssm {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct PruningConfig {
  double beta = 50.0;   // sigmoid temperature, 1 / weight-magnitude units
  double gamma = 0.01;  // threshold controller rate
  double rho = 0.8;     // target sparsity
  int interval = 100;   // training steps between evaluations
  double dt_ctrl = 1.0; // controller ticks per evaluation
  // As printed, the pruning probability sigmoid(beta (|w| - theta)) removes
  // LARGE weights; the default flips the argument so small weights go and the
  // threshold feedback behaves. The literal orientation stays available here.
  bool literal_orientation = false;
  void validate() const;
};

struct PruningState {
  MatrixXd mask;  // 1 = alive, 0 = pruned; congruent with the weight matrix
  double theta = 0.0;
};

PruningState fresh_mask(int rows, int cols);

// sigmoid(beta (|w| - theta)), the literal magnitude-vs-threshold form.
double prune_probability(double w, double theta, double beta);

// One stochastic evaluation: every still-alive synapse is removed with the
// orientation-resolved probability; removed synapses get weight exactly 0 and
// never come back. Draws consume rng row-major over alive entries only.
void apply_pruning(MatrixXd& weights, PruningState& state, const PruningConfig& cfg,
                   PhiloxRng& rng);

double measure_sparsity(const PruningState& state);  // pruned fraction

// theta' = max(0, theta + dt_ctrl gamma (rho - sparsity)); fixed point at
// sparsity == rho.
double threshold_step(double theta, double sparsity, double rho, double gamma,
                      double dt_ctrl);

}  // namespace sssm
