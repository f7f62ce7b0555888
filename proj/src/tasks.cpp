#include "sssm/tasks.hpp"

#include <cmath>

#include "sssm/errors.hpp"
#include "sssm/rng.hpp"

namespace sssm {

namespace {
// stream ids: top 16 bits select the purpose, low bits the episode/channel
constexpr std::uint64_t stream_id(std::uint64_t purpose, std::uint64_t index) {
  return (purpose << 48) | (index & 0xFFFFFFFFFFFFULL);
}
constexpr std::uint64_t kCopyToken = 1, kPatternEpisode = 2, kAnomalyEpisode = 3,
                        kPatternTemplate = 4, kAnomalyChannel = 5;
constexpr double kTemplateRate = 0.08;  // spikes per bin in a class template
constexpr int kBurstLen = 8;
}  // namespace

void TaskSpec::validate() const {
  if (length <= 0) throw ConfigError("task: length must be positive");
  if (dim <= 0) throw ConfigError("task: dim must be positive");
  switch (kind) {
    case TaskKind::DelayedCopy:
      if (delay < 0) throw ConfigError("task: delay must be non-negative");
      if (delay >= length) throw ConfigError("task: delay must be less than length");
      break;
    case TaskKind::SpikePattern:
      if (classes < 2) throw ConfigError("task: classes must be at least 2");
      if (length < 2) throw ConfigError("task: pattern episodes need length >= 2");
      break;
    case TaskKind::OscillatoryAnomaly:
      if (anomaly_rate < 0 || anomaly_rate > 1)
        throw ConfigError("task: anomaly_rate must lie in [0,1]");
      break;
  }
}

int TaskSpec::target_dim() const {
  switch (kind) {
    case TaskKind::DelayedCopy: return dim;
    case TaskKind::SpikePattern: return classes;
    case TaskKind::OscillatoryAnomaly: return 2;
  }
  return 0;
}

LossKind TaskSpec::loss() const {
  return kind == TaskKind::DelayedCopy ? LossKind::Mse : LossKind::CrossEntropy;
}

namespace {

Episode blank(const TaskSpec& spec) {
  Episode ep;
  ep.inputs.assign(spec.length, VectorXd::Zero(spec.dim));
  ep.targets.assign(spec.length, VectorXd::Zero(spec.target_dim()));
  ep.loss_mask.assign(spec.length, 0);
  ep.acc_mask.assign(spec.length, 0);
  return ep;
}

Episode gen_delayed_copy(const TaskSpec& spec, std::uint64_t episode) {
  Episode ep = blank(spec);
  PhiloxRng rng = stream_rng(spec.seed, stream_id(kCopyToken, episode));
  const int token = int(rng.uniform_int(std::uint64_t(spec.dim)));
  ep.inputs[0](token) = 1.0;
  ep.targets[spec.delay](token) = 1.0;
  for (int t = 0; t < spec.length; ++t) ep.loss_mask[t] = 1;
  ep.acc_mask[spec.delay] = 1;
  return ep;
}

Episode gen_spike_pattern(const TaskSpec& spec, std::uint64_t episode) {
  Episode ep = blank(spec);
  PhiloxRng erng = stream_rng(spec.seed, stream_id(kPatternEpisode, episode));
  const int cls = int(erng.uniform_int(std::uint64_t(spec.classes)));
  PhiloxRng trng = stream_rng(spec.seed, stream_id(kPatternTemplate, std::uint64_t(cls)));
  for (int t = 0; t < spec.length; ++t) {
    for (int ch = 0; ch < spec.dim; ++ch) {
      if (!trng.bernoulli(kTemplateRate)) continue;
      int jt = t + int(erng.uniform_int(3)) - 1;  // jitter one step either way
      if (jt < 0) jt = 0;
      if (jt >= spec.length) jt = spec.length - 1;
      ep.inputs[jt](ch) = 1.0;
    }
  }
  ep.targets[spec.length - 1](cls) = 1.0;
  ep.loss_mask[spec.length - 1] = 1;
  ep.acc_mask[spec.length - 1] = 1;
  return ep;
}

Episode gen_oscillatory(const TaskSpec& spec, std::uint64_t episode) {
  Episode ep = blank(spec);
  PhiloxRng erng = stream_rng(spec.seed, stream_id(kAnomalyEpisode, episode));
  constexpr int kHarmonics = 3;
  for (int ch = 0; ch < spec.dim; ++ch) {
    PhiloxRng crng = stream_rng(spec.seed, stream_id(kAnomalyChannel, std::uint64_t(ch)));
    double amp[kHarmonics], freq[kHarmonics], phase[kHarmonics];
    for (int h = 0; h < kHarmonics; ++h) {
      amp[h] = crng.uniform(0.3, 1.0);
      freq[h] = crng.uniform(0.01, 0.1);  // cycles per step
      phase[h] = crng.uniform(0.0, 2.0 * M_PI);
    }
    for (int t = 0; t < spec.length; ++t) {
      double v = 0.0;
      for (int h = 0; h < kHarmonics; ++h)
        v += amp[h] * std::sin(2.0 * M_PI * freq[h] * t + phase[h]);
      ep.inputs[t](ch) = v;
    }
  }
  int burst_left = 0;
  for (int t = 0; t < spec.length; ++t) {
    if (burst_left == 0 && erng.bernoulli(spec.anomaly_rate)) burst_left = kBurstLen;
    const bool anomalous = burst_left > 0;
    if (anomalous) {
      const double kick = 2.5 * std::sin(2.0 * M_PI * 0.25 * (kBurstLen - burst_left));
      for (int ch = 0; ch < spec.dim; ++ch) ep.inputs[t](ch) += kick;
      --burst_left;
    }
    ep.targets[t](anomalous ? 1 : 0) = 1.0;
    ep.loss_mask[t] = 1;
    ep.acc_mask[t] = 1;
  }
  return ep;
}

}  // namespace

Episode gen_episode(const TaskSpec& spec, std::uint64_t episode) {
  spec.validate();
  switch (spec.kind) {
    case TaskKind::DelayedCopy: return gen_delayed_copy(spec, episode);
    case TaskKind::SpikePattern: return gen_spike_pattern(spec, episode);
    case TaskKind::OscillatoryAnomaly: return gen_oscillatory(spec, episode);
  }
  throw ConfigError("task: unknown kind");
}

}  // namespace sssm
