#pragma once

#include <Eigen/Dense>
#include <vector>

#include "sssm/network.hpp"

namespace sssm {

// ---------------------------------------------------------------- loss ----

enum class LossKind { Mse, CrossEntropy };

struct LossResult {
  double value;
  VectorXd dl_dz;
};

// Mse: 0.5 |z - target|^2. CrossEntropy: -sum target_c log softmax(z)_c with
// target a one-hot (or any distribution) over classes; dl_dz = softmax - target.
LossResult eval_loss(const VectorXd& z, const VectorXd& target, LossKind kind);

// ---------------------------------------------------------------- stdp ----

struct StdpConfig {
  double a_plus = 0.01;
  double a_minus = 0.01;
  double tau_plus = 20.0;   // ms
  double tau_minus = 20.0;  // ms
  void validate() const;
};

// Pair weighting by post-minus-pre lag:
//   delta_t >= 0 ->  a_plus  exp(-delta_t / tau_plus)   (potentiation, 0 included)
//   delta_t <  0 -> -a_minus exp( delta_t / tau_minus)  (depression)
double stdp_window(double delta_t, const StdpConfig& cfg);

// Brute-force double sum over all post x pre spike-time pairs (times in ms).
double stdp_pairwise(const std::vector<double>& pre_times,
                     const std::vector<double>& post_times, const StdpConfig& cfg);

struct StdpState {
  VectorXd pre_trace;   // n_pre
  VectorXd post_trace;  // n_post
  MatrixXd omega;       // n_post x n_pre, accumulated pairing term
};

StdpState zero_stdp(int n_post, int n_pre);

// Online accumulation equivalent to the pairwise double sum over full spike
// history. Order inside one step: decay traces -> potentiate on post spikes
// against old pre traces -> depress on pre spikes against old post traces ->
// count same-step pre/post pairs as lag-zero potentiation -> bump traces.
void stdp_trace_step(StdpState& st, const VectorXd& pre_spikes, const VectorXd& post_spikes,
                     const StdpConfig& cfg, double dt);

// --------------------------------------------------------------- hybrid ----

struct HybridRuleConfig {
  double eta = 1e-3;
  double lambda = 1.0;      // 1 = pure gradient, 0 = pure pairing term
  double omega_scale = 1.0; // pairing-term normalization before mixing
  void validate() const;
};

// Mixed per-weight update, descent sign on the gradient term:
//   dw = eta (lambda (-grad) + (1 - lambda) omega_scale omega)
// Masked-out (dead) synapses get exactly zero.
double hybrid_update(double grad, double omega, bool alive, const HybridRuleConfig& cfg);

// ----------------------------------------------------------- sensitivity ----

// Generic forward-sensitivity recursion: e(t) = jac_state e(t-1) + jac_param.
MatrixXd eligibility_step(const MatrixXd& e_prev, const MatrixXd& jac_state,
                          const MatrixXd& jac_param);

// g_p = dl_dy^T (dy_dx e[:, p] + direct[:, p]).
VectorXd instantaneous_gradient(const MatrixXd& e, const VectorXd& dl_dy,
                                const MatrixXd& dy_dx, const MatrixXd& direct);

// Block-structured sensitivity of the full network state [x; p; v; r] with
// respect to every trainable parameter. Never materializes the N x N step
// Jacobian; cost per step is O(N P) with small constants.
struct Sensitivity {
  MatrixXd ex;  // n_state x P
  MatrixXd ep;  // n_y     x P
  MatrixXd ev;  // n_r     x P
  MatrixXd er;  // n_r     x P
};

Sensitivity zero_sensitivity(const Network& net);

// Advance the sensitivity through one recorded step and return this step's
// loss gradient, d loss_t / d theta, length P. Summing over a sequence gives
// the same total as reverse-mode over the unrolled graph.
VectorXd sensitivity_step(const Network& net, const StepRecord& rec, const VectorXd& dl_dz,
                          Sensitivity& e);

// Dense one-step Jacobians of the packed state [x; p; v; r] (N = n_state +
// n_y + 2 n_r): d(state_t)/d(state_{t-1}) and d(state_t)/d(theta) at fixed
// previous state. Verification only; O(N^2 + N P) storage.
struct DenseJacobians {
  MatrixXd jac_state;  // N x N
  MatrixXd jac_param;  // N x P
};
DenseJacobians step_jacobians(const Network& net, const StepRecord& rec);

// z_t as a function of the packed state and the decoder parameters:
// dz_dstate (n_out x N) plus direct parameter terms (n_out x P).
struct OutputJacobians {
  MatrixXd dz_dstate;
  MatrixXd direct;
};
OutputJacobians output_jacobians(const Network& net, const StepRecord& rec);

}  // namespace sssm
