#pragma once

#include <Eigen/Dense>

#include "sssm/rng.hpp"
#include "sssm/spiking.hpp"
#include "sssm/ssm.hpp"

namespace sssm {

// How spike nonlinearities behave on the forward pass.
//   Hard:     0/1 thresholds; gradient paths use the surrogate derivative.
//   Smoothed: thresholds replaced by the surrogate's antiderivative ramp,
//             0.5 + z/(1+k|z|), making the forward pass differentiable so
//             finite differences are meaningful. The surrogate is its exact
//             derivative, so gradient code is shared with Hard.
//   Bypass:   encoder/traces/membranes collapse to identities (s_pre = y,
//             p = s_pre, v_mid = i_syn, r = s_post); the whole network is a
//             memoryless linear readout of the state-space layer. Test-only.
enum class SpikeMode { Hard, Smoothed, Bypass };

struct NetConfig {
  int n_in = 1;
  int n_state = 4;
  int n_y = 2;    // state-space outputs == presynaptic neurons
  int n_r = 2;    // readout neurons
  int n_out = 1;  // decoder rows
  LifConfig lif;
  double encode_threshold = 0.0;
  SpikeMode mode = SpikeMode::Hard;
  void validate() const;
};

// Trainable stack: selective state-space layer -> spiking readout -> decoder.
// Flat parameter layout: [ssm | w_readout (row-major) | w_dec (row-major) | b_dec].
struct Network {
  NetConfig cfg;
  SsmParams ssm;
  MatrixXd w_readout;  // n_r x n_y, the only block the pairing term touches
  MatrixXd w_dec;      // n_out x n_r
  VectorXd b_dec;      // n_out

  explicit Network(const NetConfig& cfg);
  static Network random_init(const NetConfig& cfg, PhiloxRng& rng);

  int param_count() const;
  VectorXd theta() const;
  void set_theta(const VectorXd& theta);

  int idx_wr(int i, int j) const { return ssm.param_count() + i * cfg.n_y + j; }
  int idx_wdec(int o, int i) const {
    return ssm.param_count() + cfg.n_r * cfg.n_y + o * cfg.n_r + i;
  }
  int idx_bdec(int o) const {
    return ssm.param_count() + cfg.n_r * cfg.n_y + cfg.n_out * cfg.n_r + o;
  }
};

struct NetState {
  SsmState ssm;         // x, t
  VectorXd pre_trace;   // filtered presynaptic spikes, n_y
  VectorXd v;           // readout membranes, n_r
  VectorXd post_trace;  // filtered readout spikes, n_r
};

NetState initial_state(const NetConfig& cfg);

// Everything one step produces, plus the local derivative factors the
// gradient engines need. Scalars fold the mode in, so downstream code is
// mode-agnostic:
//   p      = pre_keep  p_prev + s_pre,         s_pre  = f_enc(y)
//   v_mid  = v_keep    v_prev + v_drive i_syn
//   s_post = f_post(v_mid)
//   v_next = dvm_partial-path: v_mid + s_post (v_reset - v_mid)  (Hard/Smoothed)
//   r      = post_keep r_prev + s_post
struct StepRecord {
  VectorXd u;
  SsmMats mats;
  VectorXd x_prev, x, y;
  VectorXd s_pre, p_prev, p;
  VectorXd i_syn, v_prev, v_mid, v_next, s_post;
  VectorXd r_prev, r;
  VectorXd z;  // decoder output

  VectorXd enc_grad;     // d s_pre / d y
  VectorXd post_grad;    // d s_post / d v_mid
  VectorXd dvm_partial;  // d v_next / d v_mid at fixed s_post
  VectorXd dvm_spost;    // d v_next / d s_post
  double pre_keep, post_keep, v_keep, v_drive;
};

// Advance state by one step; the record is sufficient to differentiate it.
StepRecord net_step(const Network& net, NetState& state, const VectorXd& u);

}  // namespace sssm
