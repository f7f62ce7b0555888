#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "sssm/rng.hpp"

namespace sssm {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// System matrices realized for one step. selective_params generates a_diag
// entries strictly inside (0, 1); tests may construct arbitrary values.
struct SsmMats {
  VectorXd a_diag;  // n_state
  MatrixXd b;       // n_state x n_in
  MatrixXd c;       // n_out x n_state
  MatrixXd d;       // n_out x n_in
};

struct SsmState {
  VectorXd x;
  long t = 0;
};

// Trainable parameters of the selective state-space layer.
//
//   a_diag(u) = sigmoid(base_a + gate_a u)            (diagonal, in (0,1))
//   B(u)      = b0 + unflatten(gb u)                  (rows affine in u)
//   C(u)      = c0 + unflatten(gc u)
//   D         = d0                                    (input independent)
//
// Every trainable scalar has exactly one flat index; the layout is
// [base_a | gate_a | b0 | gb | c0 | gc | d0] with row-major blocks
// (gb rows indexed by (state, in), gc rows by (out, state)).
class SsmParams {
 public:
  SsmParams(int n_state, int n_in, int n_out);

  // base_a spreads the initial a_diag log-uniformly over [0.7, 0.99]
  // (a multi-timescale ladder); other blocks are uniform +-1/sqrt(fan_in).
  static SsmParams random_init(int n_state, int n_in, int n_out, PhiloxRng& rng);

  int n_state() const { return ns_; }
  int n_in() const { return ni_; }
  int n_out() const { return no_; }
  int param_count() const;

  VectorXd theta() const;
  void set_theta(const VectorXd& theta);

  VectorXd& base_a() { return base_a_; }
  MatrixXd& gate_a() { return gate_a_; }
  MatrixXd& b0() { return b0_; }
  MatrixXd& gb() { return gb_; }
  MatrixXd& c0() { return c0_; }
  MatrixXd& gc() { return gc_; }
  MatrixXd& d0() { return d0_; }
  const VectorXd& base_a() const { return base_a_; }
  const MatrixXd& gate_a() const { return gate_a_; }
  const MatrixXd& b0() const { return b0_; }
  const MatrixXd& gb() const { return gb_; }
  const MatrixXd& c0() const { return c0_; }
  const MatrixXd& gc() const { return gc_; }
  const MatrixXd& d0() const { return d0_; }

  // flat-index map (used by the learning engine's direct-term scatter)
  int idx_base_a(int i) const { return i; }
  int idx_gate_a(int i, int k) const { return off_gate_a_ + i * ni_ + k; }
  int idx_b0(int i, int j) const { return off_b0_ + i * ni_ + j; }
  int idx_gb(int i, int j, int k) const { return off_gb_ + (i * ni_ + j) * ni_ + k; }
  int idx_c0(int o, int i) const { return off_c0_ + o * ns_ + i; }
  int idx_gc(int o, int i, int k) const { return off_gc_ + (o * ns_ + i) * ni_ + k; }
  int idx_d0(int o, int j) const { return off_d0_ + o * ni_ + j; }

 private:
  int ns_, ni_, no_;
  int off_gate_a_, off_b0_, off_gb_, off_c0_, off_gc_, off_d0_, total_;
  VectorXd base_a_;
  MatrixXd gate_a_;  // n_state x n_in
  MatrixXd b0_;      // n_state x n_in
  MatrixXd gb_;      // (n_state*n_in) x n_in
  MatrixXd c0_;      // n_out x n_state
  MatrixXd gc_;      // (n_out*n_state) x n_in
  MatrixXd d0_;      // n_out x n_in
};

// Input-conditioned realization of (A, B, C, D). Deterministic in (params, u).
SsmMats selective_params(const SsmParams& params, const VectorXd& u);

// x_t = diag(a) x_{t-1} + B u ; y = C x_t + D u ; t advances by one.
std::pair<SsmState, VectorXd> ssm_step(const SsmState& state, const VectorXd& u,
                                       const SsmMats& mats);

// Pure fold of selective_params + ssm_step over a non-empty input sequence.
std::vector<std::pair<SsmState, VectorXd>> ssm_scan(const SsmParams& params,
                                                    const std::vector<VectorXd>& inputs,
                                                    const SsmState& x0);

}  // namespace sssm
