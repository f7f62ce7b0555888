#include "sssm/spiking.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "sssm/errors.hpp"
#include "sssm/mathutil.hpp"

namespace sssm {

void LifConfig::validate() const {
  if (dt <= 0 || tau_m <= 0 || tau_s <= 0)
    throw std::invalid_argument("LifConfig: dt, tau_m, tau_s must be positive");
  if (dt > tau_m / 2)
    throw std::invalid_argument("LifConfig: explicit Euler needs dt <= tau_m/2");
  if (v_th <= v_reset)
    throw std::invalid_argument("LifConfig: v_th must exceed v_reset");
  if (r_m <= 0) throw std::invalid_argument("LifConfig: r_m must be positive");
  if (surrogate_k <= 0) throw std::invalid_argument("LifConfig: surrogate_k must be positive");
}

double psp_kernel(double s, double tau_s) {
  if (tau_s <= 0) throw std::invalid_argument("psp_kernel: tau_s must be positive");
  return s >= 0.0 ? std::exp(-s / tau_s) : 0.0;
}

VectorXd trace_step(const VectorXd& trace, const VectorXd& spikes, double dt, double tau_s) {
  if (trace.size() != spikes.size())
    throw std::invalid_argument("trace_step: size mismatch");
  if (dt <= 0 || tau_s <= 0)
    throw std::invalid_argument("trace_step: dt and tau_s must be positive");
  return trace * std::exp(-dt / tau_s) + spikes;
}

VectorXd synaptic_current(const MatrixXd& w, const VectorXd& traces) {
  if (w.cols() != traces.size())
    throw std::invalid_argument("synaptic_current: size mismatch");
  return w * traces;
}

LifResult lif_step(const VectorXd& v, const VectorXd& i_syn, const VectorXd& i_ext,
                   const LifConfig& cfg) {
  if (v.size() != i_syn.size() || v.size() != i_ext.size())
    throw std::invalid_argument("lif_step: size mismatch");
  if (!i_syn.allFinite() || !i_ext.allFinite())
    throw NumericError("lif_step: non-finite currents");
  const double a = cfg.dt / cfg.tau_m;
  LifResult r;
  r.v_mid = v + a * (-v + cfg.r_m * (i_syn + i_ext));
  r.spikes.resize(v.size());
  r.v_next.resize(v.size());
  for (int i = 0; i < v.size(); ++i) {
    const bool fire = r.v_mid(i) >= cfg.v_th;
    r.spikes(i) = fire ? 1.0 : 0.0;
    r.v_next(i) = fire ? cfg.v_reset : r.v_mid(i);
  }
  return r;
}

VectorXd surrogate_grad(const VectorXd& v_mid, const LifConfig& cfg) {
  return v_mid.unaryExpr(
      [&](double v) { return fast_sigmoid_grad(v - cfg.v_th, cfg.surrogate_k); });
}

VectorXd encode_threshold(const VectorXd& y, double threshold) {
  VectorXd s(y.size());
  for (int i = 0; i < y.size(); ++i) s(i) = y(i) >= threshold ? 1.0 : 0.0;
  return s;
}

void SpikeTrain::add(int neuron, double time_ms) {
  if (neuron < 0) throw std::invalid_argument("SpikeTrain::add: negative neuron index");
  if (!events.empty() && time_ms < events.back().second)
    throw std::invalid_argument("SpikeTrain::add: times must be non-decreasing");
  events.emplace_back(neuron, time_ms);
}

std::vector<double> SpikeTrain::times_of(int neuron) const {
  std::vector<double> t;
  for (const auto& [n, ms] : events)
    if (n == neuron) t.push_back(ms);
  return t;
}

void SpikeTrain::write(std::ostream& os) const {
  os << "neuron_index\ttime_ms\n";
  for (const auto& [n, ms] : events) os << n << '\t' << ms << '\n';
}

SpikeTrain SpikeTrain::read(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != "neuron_index\ttime_ms")
    throw FormatError("SpikeTrain::read: missing header");
  SpikeTrain tr;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    int n;
    double ms;
    if (!(ls >> n >> ms)) throw FormatError("SpikeTrain::read: bad event line: " + line);
    tr.add(n, ms);
  }
  return tr;
}

}  // namespace sssm
