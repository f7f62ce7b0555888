#pragma once

#include <vector>

#include "sssm/learning.hpp"
#include "sssm/network.hpp"

namespace sssm {

// Reference gradient engines, used only to cross-check the online path.
// They may be slow; they must be independent.

// Per-step forward records plus the loss wiring, enough to replay the run
// bit-exactly and to sweep it in reverse.
struct UnrolledTape {
  NetState x0;
  std::vector<StepRecord> steps;
  std::vector<VectorXd> targets;
  LossKind loss = LossKind::Mse;
  double total_loss = 0.0;
};

// Forward pass over a finite sequence (bounded; this is the memory-hungry
// path the online engine exists to avoid).
UnrolledTape tape_forward(const Network& net, const std::vector<VectorXd>& inputs,
                          const std::vector<VectorXd>& targets, LossKind loss);

// Replays a tape's inputs from its initial state and confirms every recorded
// value reproduces bit-exactly; throws NumericError otherwise.
void check_tape_replay(const Network& net, const UnrolledTape& tape);

// Full reverse sweep of d(sum_t loss_t)/d theta. Spike nonlinearities use
// the same surrogate factors the forward pass recorded, so this and the
// online sensitivity path differentiate the identical graph.
VectorXd bptt_gradient(const Network& net, const UnrolledTape& tape);

struct FdResult {
  VectorXd grad;                  // central difference per parameter
  std::vector<bool> excluded;     // true where +-eps flipped a threshold decision
};

// Central differences (loss(theta + eps e_p) - loss(theta - eps e_p)) / 2 eps.
// Meaningful only when the forward pass is continuous in theta, so the
// network's mode should be Smoothed (or Bypass); a coordinate is excluded
// when the sign pattern of any threshold argument differs between the
// +eps, -eps, and nominal runs.
FdResult finite_difference_gradient(const Network& net, const std::vector<VectorXd>& inputs,
                                    const std::vector<VectorXd>& targets, LossKind loss,
                                    double epsilon = 1e-5);

}  // namespace sssm
