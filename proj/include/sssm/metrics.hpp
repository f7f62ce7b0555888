#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace sssm {

struct MetricsRecord {
  std::uint64_t step = 0;
  double loss = 0.0;      // mean over graded steps since the previous record
  double accuracy = 0.0;  // fraction correct over graded steps in the window
  std::uint64_t spikes = 0;          // cumulative threshold crossings
  std::uint64_t synops = 0;          // cumulative ops: alive synapse x presynaptic spike
  std::uint64_t alive_synapses = 0;  // current
  double sparsity = 0.0;             // current pruned fraction
  double theta = 0.0;                // current pruning threshold
  double wall_ms = 0.0;  // cumulative wall clock; stays 0 unless timing is enabled
};

// CSV with the fixed header
//   step,loss,accuracy,spikes,synops,alive_synapses,sparsity,theta,wall_ms
// and numbers rendered with up to 9 significant digits.
void write_metrics_header(std::ostream& os);
void write_metrics_record(std::ostream& os, const MetricsRecord& r);
std::string metrics_to_csv(const std::vector<MetricsRecord>& records);
std::vector<MetricsRecord> read_metrics_csv(std::istream& is);
std::vector<MetricsRecord> load_metrics_file(const std::string& path);

struct EnergySummary {
  std::uint64_t total_spikes = 0;
  std::uint64_t total_synops = 0;
  double spikes_per_step = 0.0;
  double final_sparsity = 0.0;
  // event-driven synaptic ops / dense equivalent (alive synapses x steps,
  // integrated window by window)
  double event_dense_ratio = 0.0;
};

EnergySummary energy_report(const std::vector<MetricsRecord>& records);
std::string format_energy_report(const EnergySummary& s);

}  // namespace sssm
