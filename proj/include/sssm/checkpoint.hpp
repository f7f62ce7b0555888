#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <string>

#include "sssm/rng.hpp"

namespace sssm {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Complete run state at a step boundary. Together with the RunConfig it was
// produced under, resuming from this reproduces the uninterrupted run's
// records exactly.
struct Checkpoint {
  std::string config_text;  // plain-text echo for auditability

  std::uint64_t step = 0;
  std::uint64_t episode = 0;
  std::uint64_t ep_step = 0;
  std::uint64_t spikes = 0;
  std::uint64_t synops = 0;
  double window_loss_sum = 0.0;
  double window_acc_sum = 0.0;
  std::uint64_t window_loss_count = 0;
  std::uint64_t window_acc_count = 0;
  double wall_ms = 0.0;

  VectorXd ssm_theta;
  MatrixXd w_readout, w_dec;
  VectorXd b_dec;

  MatrixXd mask;
  double prune_theta = 0.0;
  PhiloxRng::State prune_rng{};

  VectorXd state_x, state_p, state_v, state_r;
  MatrixXd sens_ex, sens_ep, sens_ev, sens_er;
  VectorXd stdp_pre, stdp_post;
  MatrixXd stdp_omega;
};

// Binary container: magic, format version, then length-prefixed named
// sections. Truncated or mismatched files raise FormatError with what was
// found versus expected.
void write_checkpoint(std::ostream& os, const Checkpoint& c);
Checkpoint read_checkpoint(std::istream& is);
void save_checkpoint(const std::string& path, const Checkpoint& c);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace sssm
