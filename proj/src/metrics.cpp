#include "sssm/metrics.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "sssm/errors.hpp"

namespace sssm {

namespace {
constexpr const char* kHeader = "step,loss,accuracy,spikes,synops,alive_synapses,sparsity,theta,wall_ms";

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}
}  // namespace

void write_metrics_header(std::ostream& os) { os << kHeader << '\n'; }

void write_metrics_record(std::ostream& os, const MetricsRecord& r) {
  os << r.step << ',' << num(r.loss) << ',' << num(r.accuracy) << ',' << r.spikes << ','
     << r.synops << ',' << r.alive_synapses << ',' << num(r.sparsity) << ',' << num(r.theta)
     << ',' << num(r.wall_ms) << '\n';
}

std::string metrics_to_csv(const std::vector<MetricsRecord>& records) {
  std::ostringstream os;
  write_metrics_header(os);
  for (const auto& r : records) write_metrics_record(os, r);
  return os.str();
}

std::vector<MetricsRecord> read_metrics_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != kHeader)
    throw FormatError("metrics: missing or wrong CSV header");
  std::vector<MetricsRecord> out;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string f[9];
    for (int i = 0; i < 9; ++i)
      if (!std::getline(ls, f[i], i == 8 ? '\n' : ','))
        throw FormatError("metrics: short CSV row: " + line);
    try {
      MetricsRecord r;
      r.step = std::stoull(f[0]);
      r.loss = std::stod(f[1]);
      r.accuracy = std::stod(f[2]);
      r.spikes = std::stoull(f[3]);
      r.synops = std::stoull(f[4]);
      r.alive_synapses = std::stoull(f[5]);
      r.sparsity = std::stod(f[6]);
      r.theta = std::stod(f[7]);
      r.wall_ms = std::stod(f[8]);
      out.push_back(r);
    } catch (const std::exception&) {
      throw FormatError("metrics: unparseable CSV row: " + line);
    }
  }
  return out;
}

std::vector<MetricsRecord> load_metrics_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw FormatError("metrics: cannot open '" + path + "'");
  return read_metrics_csv(f);
}

EnergySummary energy_report(const std::vector<MetricsRecord>& records) {
  if (records.empty()) throw std::invalid_argument("energy_report: empty metrics log");
  EnergySummary s;
  const MetricsRecord& last = records.back();
  s.total_spikes = last.spikes;
  s.total_synops = last.synops;
  s.final_sparsity = last.sparsity;
  s.spikes_per_step = last.step ? double(last.spikes) / double(last.step) : 0.0;
  double dense = 0.0;
  std::uint64_t prev_step = 0;
  for (const auto& r : records) {
    dense += double(r.alive_synapses) * double(r.step - prev_step);
    prev_step = r.step;
  }
  s.event_dense_ratio = dense > 0.0 ? double(s.total_synops) / dense : 0.0;
  return s;
}

std::string format_energy_report(const EnergySummary& s) {
  std::ostringstream os;
  os << "total_spikes " << s.total_spikes << '\n'
     << "total_synops " << s.total_synops << '\n'
     << "spikes_per_step " << s.spikes_per_step << '\n'
     << "final_sparsity " << s.final_sparsity << '\n'
     << "event_dense_ratio " << s.event_dense_ratio << '\n';
  return os.str();
}

}  // namespace sssm
