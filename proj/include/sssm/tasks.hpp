#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "sssm/learning.hpp"

namespace sssm {

enum class TaskKind { DelayedCopy, SpikePattern, OscillatoryAnomaly };

struct TaskSpec {
  TaskKind kind = TaskKind::DelayedCopy;
  int length = 64;  // steps per episode
  int dim = 8;      // input channels
  int delay = 10;   // delayed-copy: steps between token and required echo
  int classes = 3;  // spike-pattern: number of template classes
  double anomaly_rate = 0.02;  // oscillatory: per-step burst start probability
  std::uint64_t seed = 0;
  void validate() const;
  int target_dim() const;
  LossKind loss() const;
};

// One generated sequence. loss_mask marks steps that contribute to the
// training loss; acc_mask marks steps where argmax(z) == argmax(target) is
// counted as task accuracy.
struct Episode {
  std::vector<VectorXd> inputs;
  std::vector<VectorXd> targets;
  std::vector<char> loss_mask;
  std::vector<char> acc_mask;
};

// Deterministic in (spec, spec.seed, episode): regenerating any episode at
// any time yields identical bytes.
//
//   delayed-copy:       one-hot token at step 0, zeros after; target echoes
//                       the token `delay` steps later; squared-error loss on
//                       every step, accuracy graded at the echo step.
//   spike-pattern:      one of `classes` fixed Bernoulli rasters, each spike
//                       jittered by one step; class read out (cross-entropy)
//                       at the final step only.
//   oscillatory-anomaly: per-channel sinusoid mixtures with injected
//                       high-amplitude transient bursts; per-step two-class
//                       target (anomaly present / absent).
Episode gen_episode(const TaskSpec& spec, std::uint64_t episode);

}  // namespace sssm
