#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "sssm/learning.hpp"
#include "sssm/network.hpp"
#include "sssm/pruning.hpp"
#include "sssm/tasks.hpp"

namespace sssm {

// Everything a run depends on. A run is a pure function of this struct.
struct RunConfig {
  TaskSpec task;

  int n_state = 32;
  int n_y = 12;  // state-space outputs / presynaptic neurons
  int n_r = 12;  // readout neurons
  double encode_threshold = 0.0;
  SpikeMode mode = SpikeMode::Hard;
  LifConfig lif;

  StdpConfig stdp;
  HybridRuleConfig rule;
  bool stdp_enabled = true;  // false skips pairing-term bookkeeping entirely

  bool prune_enabled = false;
  PruningConfig prune;

  std::uint64_t steps = 10000;
  int metric_interval = 100;
  std::uint64_t checkpoint_interval = 0;  // 0 = final checkpoint only
  std::uint64_t seed = 0;
  bool measure_wall_time = false;  // keeps metrics byte-reproducible when off

  void validate() const;
  NetConfig net_config() const;  // n_in/n_out follow from the task
  std::string to_text() const;   // canonical key = value echo, parse-stable
};

// Flat `key = value` text; '#' starts a comment; unknown or repeated keys are
// errors. Every key has a default, so an empty stream is a valid config.
RunConfig parse_config(std::istream& in);
RunConfig parse_config_text(const std::string& text);
RunConfig load_config_file(const std::string& path);

}  // namespace sssm
