#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "sssm/checkpoint.hpp"
#include "sssm/config.hpp"
#include "sssm/learning.hpp"
#include "sssm/metrics.hpp"
#include "sssm/network.hpp"
#include "sssm/pruning.hpp"
#include "sssm/tasks.hpp"

namespace sssm {

// One live online-training run. Owns the model, the sensitivity blocks, the
// spike-pairing state, the pruning state, and the counters; its footprint is
// fixed at construction and independent of how many steps it advances.
class TrainLoop {
 public:
  explicit TrainLoop(const RunConfig& cfg);
  TrainLoop(const RunConfig& cfg, const Checkpoint& ckpt);

  // Advance up to n steps (bounded by cfg.steps); returns steps taken.
  // Throws NumericError if the loss stops being finite.
  std::uint64_t run(std::uint64_t n);
  bool finished() const { return step_ >= cfg_.steps; }
  std::uint64_t step() const { return step_; }

  // When a sink is set, records stream to it instead of accumulating.
  void set_metrics_sink(std::ostream* sink) { sink_ = sink; }
  const std::vector<MetricsRecord>& records() const { return records_; }

  Checkpoint checkpoint() const;

  const Network& net() const { return net_; }
  const StdpState& stdp() const { return stdp_; }
  const PruningState& pruning() const { return prune_state_; }

  // Bytes of heap-backed state that persist across steps, for the
  // constant-memory check. Counts every growable member.
  std::size_t persistent_state_bytes() const;

 private:
  void one_step();
  void load_episode();
  void refresh_alive_counts();

  RunConfig cfg_;
  LossKind loss_kind_;
  Network net_;
  NetState state_;
  Sensitivity sens_;
  StdpState stdp_;
  PruningState prune_state_;
  PhiloxRng prune_rng_;
  Episode episode_cache_;

  std::uint64_t step_ = 0, episode_ = 0, ep_step_ = 0;
  std::uint64_t spikes_ = 0, synops_ = 0;
  double window_loss_sum_ = 0.0, window_acc_sum_ = 0.0;
  std::uint64_t window_loss_count_ = 0, window_acc_count_ = 0;
  double wall_ms_ = 0.0;
  Eigen::VectorXd col_alive_;  // alive synapses per presynaptic neuron

  std::vector<MetricsRecord> records_;
  std::ostream* sink_ = nullptr;
};

// Experiment front door used by the CLI: creates out_dir, writes config.txt,
// streams metrics.csv, saves periodic and final checkpoints. On numeric
// divergence a diagnostic checkpoint is written before the error propagates.
void train_online(const RunConfig& cfg, const std::string& out_dir,
                  const std::string& resume_from = "");

// Two-neuron probe of the pairing pathway: for each requested lag (ms,
// positive = pre leads), force exactly one pre and one post spike that far
// apart, apply the mixed rule with a zero gradient term, and report the
// weight change. Lags are realized on the dt_ms grid (nearest step).
std::vector<std::pair<double, double>> probe_stdp_window(const StdpConfig& stdp,
                                                         const HybridRuleConfig& rule,
                                                         const std::vector<double>& grid_ms,
                                                         double dt_ms = 1.0);
std::string probe_to_csv(const std::vector<std::pair<double, double>>& table);

// Least-squares fit of |value| = A exp(-lag/tau) over the given points;
// returns (A, tau). Points with value 0 are rejected.
std::pair<double, double> fit_exp_decay(const std::vector<std::pair<double, double>>& pts);

}  // namespace sssm
