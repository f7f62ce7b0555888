#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <utility>
#include <vector>

namespace sssm {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct LifConfig {
  double dt = 1.0;       // ms
  double tau_m = 20.0;   // membrane time constant, ms
  double tau_s = 5.0;    // synaptic (trace) time constant, ms
  double v_th = 1.0;
  double v_reset = 0.0;
  double r_m = 1.0;
  double surrogate_k = 10.0;
  void validate() const;
};

// Exponential post-synaptic kernel: exp(-s/tau_s) for s >= 0, else 0.
// A spike's same-step contribution to its trace is the kernel peak, 1.
double psp_kernel(double s, double tau_s);

// trace' = trace exp(-dt/tau_s) + spikes (decay then add; peak 1 per spike).
// trace[j] tracks sum_f psp_kernel(t - t_j^f, tau_s) incrementally.
VectorXd trace_step(const VectorXd& trace, const VectorXd& spikes, double dt, double tau_s);

// i = w * traces, one row per postsynaptic neuron.
VectorXd synaptic_current(const MatrixXd& w, const VectorXd& traces);

struct LifResult {
  VectorXd v_next;
  VectorXd spikes;  // entries in {0,1}
  VectorXd v_mid;   // pre-reset potential, the argument of the surrogate
};

// One leaky integrate-and-fire update for a population.
//   v_mid = v + (dt/tau_m) (-v + r_m (i_syn + i_ext))
//   spike = [v_mid >= v_th];  v' = spike ? v_reset : v_mid
LifResult lif_step(const VectorXd& v, const VectorXd& i_syn, const VectorXd& i_ext,
                   const LifConfig& cfg);

// d(spike)/d(v_mid) surrogate: 1 / (1 + k |v_mid - v_th|)^2.
VectorXd surrogate_grad(const VectorXd& v_mid, const LifConfig& cfg);

// y_i >= threshold -> spike. Converts analogue drive into a 0/1 vector.
VectorXd encode_threshold(const VectorXd& y, double threshold);

// Ordered spike events with a line-based text form:
//   neuron_index<TAB>time_ms
struct SpikeTrain {
  std::vector<std::pair<int, double>> events;  // (neuron, time_ms), time-sorted
  void add(int neuron, double time_ms);
  std::vector<double> times_of(int neuron) const;
  void write(std::ostream& os) const;
  static SpikeTrain read(std::istream& is);
};

}  // namespace sssm
