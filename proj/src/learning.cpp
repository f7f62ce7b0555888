#include "sssm/learning.hpp"

#include <cmath>
#include <stdexcept>

#include "sssm/errors.hpp"

namespace sssm {

LossResult eval_loss(const VectorXd& z, const VectorXd& target, LossKind kind) {
  if (z.size() != target.size())
    throw std::invalid_argument("eval_loss: size mismatch");
  LossResult r;
  if (kind == LossKind::Mse) {
    VectorXd d = z - target;
    r.value = 0.5 * d.squaredNorm();
    r.dl_dz = std::move(d);
    return r;
  }
  const double m = z.maxCoeff();
  VectorXd ez = (z.array() - m).exp();
  const double sum = ez.sum();
  const double lse = m + std::log(sum);
  VectorXd p = ez / sum;
  const double mass = target.sum();
  r.value = mass * lse - target.dot(z);
  r.dl_dz = mass * p - target;
  return r;
}

void StdpConfig::validate() const {
  if (a_plus <= 0 || a_minus <= 0 || tau_plus <= 0 || tau_minus <= 0)
    throw std::invalid_argument("StdpConfig: all four constants must be positive");
}

double stdp_window(double delta_t, const StdpConfig& cfg) {
  if (!std::isfinite(delta_t))
    throw std::invalid_argument("stdp_window: delta_t must be finite");
  return delta_t >= 0.0 ? cfg.a_plus * std::exp(-delta_t / cfg.tau_plus)
                        : -cfg.a_minus * std::exp(delta_t / cfg.tau_minus);
}

double stdp_pairwise(const std::vector<double>& pre_times,
                     const std::vector<double>& post_times, const StdpConfig& cfg) {
  double s = 0.0;
  for (double tp : post_times)
    for (double tq : pre_times) s += stdp_window(tp - tq, cfg);
  return s;
}

StdpState zero_stdp(int n_post, int n_pre) {
  if (n_post <= 0 || n_pre <= 0)
    throw std::invalid_argument("zero_stdp: sizes must be positive");
  StdpState st;
  st.pre_trace = VectorXd::Zero(n_pre);
  st.post_trace = VectorXd::Zero(n_post);
  st.omega = MatrixXd::Zero(n_post, n_pre);
  return st;
}

void stdp_trace_step(StdpState& st, const VectorXd& pre_spikes, const VectorXd& post_spikes,
                     const StdpConfig& cfg, double dt) {
  if (pre_spikes.size() != st.pre_trace.size() || post_spikes.size() != st.post_trace.size())
    throw std::invalid_argument("stdp_trace_step: size mismatch");
  if (dt <= 0) throw std::invalid_argument("stdp_trace_step: dt must be positive");
  st.pre_trace *= std::exp(-dt / cfg.tau_plus);
  st.post_trace *= std::exp(-dt / cfg.tau_minus);
  // earlier-pre x now-post pairs, then now-pre x earlier-post pairs
  st.omega.noalias() += cfg.a_plus * post_spikes * st.pre_trace.transpose();
  st.omega.noalias() -= cfg.a_minus * st.post_trace * pre_spikes.transpose();
  // same-step pairs sit on the lag-zero potentiation branch
  st.omega.noalias() += cfg.a_plus * post_spikes * pre_spikes.transpose();
  st.pre_trace += pre_spikes;
  st.post_trace += post_spikes;
}

void HybridRuleConfig::validate() const {
  if (eta < 0) throw std::invalid_argument("HybridRuleConfig: eta must be non-negative");
  if (lambda < 0 || lambda > 1)
    throw std::invalid_argument("HybridRuleConfig: lambda must lie in [0,1]");
  if (!std::isfinite(omega_scale))
    throw std::invalid_argument("HybridRuleConfig: omega_scale must be finite");
}

double hybrid_update(double grad, double omega, bool alive, const HybridRuleConfig& cfg) {
  if (!alive) return 0.0;
  return cfg.eta * (cfg.lambda * (-grad) + (1.0 - cfg.lambda) * cfg.omega_scale * omega);
}

MatrixXd eligibility_step(const MatrixXd& e_prev, const MatrixXd& jac_state,
                          const MatrixXd& jac_param) {
  if (jac_state.rows() != jac_state.cols() || jac_state.cols() != e_prev.rows() ||
      jac_param.rows() != e_prev.rows() || jac_param.cols() != e_prev.cols())
    throw std::invalid_argument("eligibility_step: shape mismatch");
  if (!jac_state.allFinite() || !jac_param.allFinite())
    throw NumericError("eligibility_step: non-finite Jacobian");
  return jac_state * e_prev + jac_param;
}

VectorXd instantaneous_gradient(const MatrixXd& e, const VectorXd& dl_dy,
                                const MatrixXd& dy_dx, const MatrixXd& direct) {
  if (dy_dx.rows() != dl_dy.size() || dy_dx.cols() != e.rows() ||
      direct.rows() != dl_dy.size() || direct.cols() != e.cols())
    throw std::invalid_argument("instantaneous_gradient: shape mismatch");
  VectorXd g = e.transpose() * (dy_dx.transpose() * dl_dy);
  g.noalias() += direct.transpose() * dl_dy;
  return g;
}

Sensitivity zero_sensitivity(const Network& net) {
  const int p = net.param_count();
  Sensitivity e;
  e.ex = MatrixXd::Zero(net.cfg.n_state, p);
  e.ep = MatrixXd::Zero(net.cfg.n_y, p);
  e.ev = MatrixXd::Zero(net.cfg.n_r, p);
  e.er = MatrixXd::Zero(net.cfg.n_r, p);
  return e;
}

namespace {

// d x_t / d theta at fixed x_{t-1}, scattered into a dense n_state x P block
void scatter_state_direct(const Network& net, const StepRecord& rec, MatrixXd& dx) {
  const SsmParams& s = net.ssm;
  const int ns = s.n_state(), ni = s.n_in();
  for (int i = 0; i < ns; ++i) {
    const double a = rec.mats.a_diag(i);
    const double da = rec.x_prev(i) * a * (1.0 - a);
    dx(i, s.idx_base_a(i)) += da;
    for (int k = 0; k < ni; ++k) dx(i, s.idx_gate_a(i, k)) += da * rec.u(k);
    for (int j = 0; j < ni; ++j) {
      dx(i, s.idx_b0(i, j)) += rec.u(j);
      for (int k = 0; k < ni; ++k) dx(i, s.idx_gb(i, j, k)) += rec.u(j) * rec.u(k);
    }
  }
}

// d y_t / d theta at fixed x_t (output-path terms through C and D)
void scatter_output_direct(const Network& net, const StepRecord& rec, MatrixXd& dy) {
  const SsmParams& s = net.ssm;
  const int ny = s.n_out(), ns = s.n_state(), ni = s.n_in();
  for (int o = 0; o < ny; ++o) {
    for (int i = 0; i < ns; ++i) {
      dy(o, s.idx_c0(o, i)) += rec.x(i);
      for (int k = 0; k < ni; ++k) dy(o, s.idx_gc(o, i, k)) += rec.x(i) * rec.u(k);
    }
    for (int j = 0; j < ni; ++j) dy(o, s.idx_d0(o, j)) += rec.u(j);
  }
}

}  // namespace

VectorXd sensitivity_step(const Network& net, const StepRecord& rec, const VectorXd& dl_dz,
                          Sensitivity& e) {
  const NetConfig& cfg = net.cfg;
  const int p = net.param_count();
  if (dl_dz.size() != cfg.n_out)
    throw std::invalid_argument("sensitivity_step: dl_dz size mismatch");
  if (e.ex.cols() != p) throw std::invalid_argument("sensitivity_step: sensitivity size mismatch");

  // state block: ex' = diag(a) ex + scatter
  e.ex.array().colwise() *= rec.mats.a_diag.array();
  scatter_state_direct(net, rec, e.ex);

  // readout drive: ey = C ex' + output-path scatter
  MatrixXd ey = rec.mats.c * e.ex;
  scatter_output_direct(net, rec, ey);

  // presynaptic trace block: ep' = pre_keep ep + diag(enc_grad) ey
  e.ep *= rec.pre_keep;
  e.ep.array() += ey.array().colwise() * rec.enc_grad.array();

  // synaptic current: ei = Wr ep' + direct readout-weight terms
  MatrixXd ei = net.w_readout * e.ep;
  for (int i = 0; i < cfg.n_r; ++i)
    for (int j = 0; j < cfg.n_y; ++j) ei(i, net.idx_wr(i, j)) += rec.p(j);

  // membrane block through the pre-reset potential
  MatrixXd evmid = rec.v_keep * e.ev + rec.v_drive * ei;
  VectorXd dv_total = rec.dvm_partial + rec.dvm_spost.cwiseProduct(rec.post_grad);
  e.er *= rec.post_keep;
  e.er.array() += evmid.array().colwise() * rec.post_grad.array();
  e.ev = evmid;
  e.ev.array().colwise() *= dv_total.array();

  // this step's gradient: z = Wdec r + b
  VectorXd g = e.er.transpose() * (net.w_dec.transpose() * dl_dz);
  for (int o = 0; o < cfg.n_out; ++o) {
    for (int i = 0; i < cfg.n_r; ++i) g(net.idx_wdec(o, i)) += dl_dz(o) * rec.r(i);
    g(net.idx_bdec(o)) += dl_dz(o);
  }
  return g;
}

DenseJacobians step_jacobians(const Network& net, const StepRecord& rec) {
  const NetConfig& cfg = net.cfg;
  const int ns = cfg.n_state, ny = cfg.n_y, nr = cfg.n_r;
  const int n = ns + ny + 2 * nr;
  const int p = net.param_count();
  const int ox = 0, op = ns, ov = ns + ny, orr = ns + ny + nr;

  VectorXd dv_total = rec.dvm_partial + rec.dvm_spost.cwiseProduct(rec.post_grad);
  MatrixXd enc_c = rec.enc_grad.asDiagonal() * rec.mats.c;  // ny x ns, d s_pre / d x_t
  MatrixXd wr_enc_c = net.w_readout * enc_c;                // nr x ny ... x ns

  DenseJacobians j;
  j.jac_state = MatrixXd::Zero(n, n);
  // x_t = a .* x_prev + B u
  j.jac_state.block(ox, ox, ns, ns) = MatrixXd(rec.mats.a_diag.asDiagonal());
  // p_t = pre_keep p_prev + f_enc(C x_t + D u)
  j.jac_state.block(op, ox, ny, ns) = enc_c * rec.mats.a_diag.asDiagonal();
  j.jac_state.block(op, op, ny, ny) = rec.pre_keep * MatrixXd::Identity(ny, ny);
  // v_mid = v_keep v_prev + v_drive Wr p_t
  MatrixXd dvmid_dx = rec.v_drive * wr_enc_c * rec.mats.a_diag.asDiagonal();  // nr x ns
  MatrixXd dvmid_dp = rec.v_drive * rec.pre_keep * net.w_readout;             // nr x ny
  j.jac_state.block(ov, ox, nr, ns) = dv_total.asDiagonal() * dvmid_dx;
  j.jac_state.block(ov, op, nr, ny) = dv_total.asDiagonal() * dvmid_dp;
  j.jac_state.block(ov, ov, nr, nr) = rec.v_keep * MatrixXd(dv_total.asDiagonal());
  // r_t = post_keep r_prev + f_post(v_mid)
  j.jac_state.block(orr, ox, nr, ns) = rec.post_grad.asDiagonal() * dvmid_dx;
  j.jac_state.block(orr, op, nr, ny) = rec.post_grad.asDiagonal() * dvmid_dp;
  j.jac_state.block(orr, ov, nr, nr) = rec.v_keep * MatrixXd(rec.post_grad.asDiagonal());
  j.jac_state.block(orr, orr, nr, nr) = rec.post_keep * MatrixXd::Identity(nr, nr);

  MatrixXd dx = MatrixXd::Zero(ns, p);
  scatter_state_direct(net, rec, dx);
  MatrixXd dy = rec.mats.c * dx;
  scatter_output_direct(net, rec, dy);
  MatrixXd dp = (dy.array().colwise() * rec.enc_grad.array()).matrix();
  MatrixXd di = net.w_readout * dp;
  for (int i = 0; i < nr; ++i)
    for (int jj = 0; jj < ny; ++jj) di(i, net.idx_wr(i, jj)) += rec.p(jj);
  MatrixXd dvmid = rec.v_drive * di;

  j.jac_param = MatrixXd::Zero(n, p);
  j.jac_param.block(ox, 0, ns, p) = dx;
  j.jac_param.block(op, 0, ny, p) = dp;
  j.jac_param.block(ov, 0, nr, p) = (dvmid.array().colwise() * dv_total.array()).matrix();
  j.jac_param.block(orr, 0, nr, p) =
      (dvmid.array().colwise() * rec.post_grad.array()).matrix();
  return j;
}

OutputJacobians output_jacobians(const Network& net, const StepRecord& rec) {
  const NetConfig& cfg = net.cfg;
  const int n = cfg.n_state + cfg.n_y + 2 * cfg.n_r;
  const int orr = cfg.n_state + cfg.n_y + cfg.n_r;
  OutputJacobians o;
  o.dz_dstate = MatrixXd::Zero(cfg.n_out, n);
  o.dz_dstate.block(0, orr, cfg.n_out, cfg.n_r) = net.w_dec;
  o.direct = MatrixXd::Zero(cfg.n_out, net.param_count());
  for (int oo = 0; oo < cfg.n_out; ++oo) {
    for (int i = 0; i < cfg.n_r; ++i) o.direct(oo, net.idx_wdec(oo, i)) = rec.r(i);
    o.direct(oo, net.idx_bdec(oo)) = 1.0;
  }
  return o;
}

}  // namespace sssm
