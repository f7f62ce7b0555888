#include "sssm/network.hpp"

#include <cmath>
#include <stdexcept>

#include "sssm/mathutil.hpp"

namespace sssm {

void NetConfig::validate() const {
  if (n_in <= 0 || n_state <= 0 || n_y <= 0 || n_r <= 0 || n_out <= 0)
    throw std::invalid_argument("NetConfig: dimensions must be positive");
  lif.validate();
}

Network::Network(const NetConfig& c)
    : cfg(c), ssm(c.n_state, c.n_in, c.n_y) {
  cfg.validate();
  w_readout = MatrixXd::Zero(cfg.n_r, cfg.n_y);
  w_dec = MatrixXd::Zero(cfg.n_out, cfg.n_r);
  b_dec = VectorXd::Zero(cfg.n_out);
}

Network Network::random_init(const NetConfig& cfg, PhiloxRng& rng) {
  Network net(cfg);
  net.ssm = SsmParams::random_init(cfg.n_state, cfg.n_in, cfg.n_y, rng);
  auto fill = [&rng](MatrixXd& m, int fan_in) {
    const double s = 1.0 / std::sqrt(double(fan_in));
    for (int i = 0; i < m.rows(); ++i)
      for (int j = 0; j < m.cols(); ++j) m(i, j) = rng.uniform(-s, s);
  };
  fill(net.w_readout, cfg.n_y);
  fill(net.w_dec, cfg.n_r);
  return net;  // b_dec stays zero
}

int Network::param_count() const {
  return ssm.param_count() + cfg.n_r * cfg.n_y + cfg.n_out * cfg.n_r + cfg.n_out;
}

VectorXd Network::theta() const {
  VectorXd t(param_count());
  t.head(ssm.param_count()) = ssm.theta();
  int k = ssm.param_count();
  for (int i = 0; i < cfg.n_r; ++i)
    for (int j = 0; j < cfg.n_y; ++j) t(k++) = w_readout(i, j);
  for (int o = 0; o < cfg.n_out; ++o)
    for (int i = 0; i < cfg.n_r; ++i) t(k++) = w_dec(o, i);
  for (int o = 0; o < cfg.n_out; ++o) t(k++) = b_dec(o);
  return t;
}

void Network::set_theta(const VectorXd& t) {
  if (t.size() != param_count())
    throw std::invalid_argument("Network::set_theta: size mismatch");
  ssm.set_theta(t.head(ssm.param_count()));
  int k = ssm.param_count();
  for (int i = 0; i < cfg.n_r; ++i)
    for (int j = 0; j < cfg.n_y; ++j) w_readout(i, j) = t(k++);
  for (int o = 0; o < cfg.n_out; ++o)
    for (int i = 0; i < cfg.n_r; ++i) w_dec(o, i) = t(k++);
  for (int o = 0; o < cfg.n_out; ++o) b_dec(o) = t(k++);
}

NetState initial_state(const NetConfig& cfg) {
  NetState s;
  s.ssm.x = VectorXd::Zero(cfg.n_state);
  s.ssm.t = 0;
  s.pre_trace = VectorXd::Zero(cfg.n_y);
  s.v = VectorXd::Zero(cfg.n_r);
  s.post_trace = VectorXd::Zero(cfg.n_r);
  return s;
}

StepRecord net_step(const Network& net, NetState& state, const VectorXd& u) {
  const NetConfig& cfg = net.cfg;
  if (u.size() != cfg.n_in) throw std::invalid_argument("net_step: input size mismatch");
  if (!u.allFinite()) throw std::invalid_argument("net_step: non-finite input");
  const LifConfig& lif = cfg.lif;
  const double k = lif.surrogate_k;

  StepRecord rec;
  rec.u = u;
  rec.mats = selective_params(net.ssm, u);
  rec.x_prev = state.ssm.x;
  rec.p_prev = state.pre_trace;
  rec.v_prev = state.v;
  rec.r_prev = state.post_trace;

  rec.x = rec.mats.a_diag.cwiseProduct(rec.x_prev) + rec.mats.b * u;
  rec.y = rec.mats.c * rec.x + rec.mats.d * u;

  switch (cfg.mode) {
    case SpikeMode::Hard:
      rec.s_pre = encode_threshold(rec.y, cfg.encode_threshold);
      break;
    case SpikeMode::Smoothed:
      rec.s_pre = rec.y.unaryExpr(
          [&](double v) { return fast_sigmoid_ramp(v - cfg.encode_threshold, k); });
      break;
    case SpikeMode::Bypass:
      rec.s_pre = rec.y;
      break;
  }
  rec.enc_grad =
      cfg.mode == SpikeMode::Bypass
          ? VectorXd::Ones(cfg.n_y)
          : VectorXd(rec.y.unaryExpr([&](double v) {
              return fast_sigmoid_grad(v - cfg.encode_threshold, k);
            }));

  rec.pre_keep = cfg.mode == SpikeMode::Bypass ? 0.0 : std::exp(-lif.dt / lif.tau_s);
  rec.post_keep = rec.pre_keep;
  rec.p = rec.pre_keep * rec.p_prev + rec.s_pre;
  rec.i_syn = synaptic_current(net.w_readout, rec.p);

  if (cfg.mode == SpikeMode::Bypass) {
    rec.v_keep = 0.0;
    rec.v_drive = 1.0;
  } else {
    rec.v_keep = 1.0 - lif.dt / lif.tau_m;
    rec.v_drive = (lif.dt / lif.tau_m) * lif.r_m;
  }
  rec.v_mid = rec.v_keep * rec.v_prev + rec.v_drive * rec.i_syn;

  switch (cfg.mode) {
    case SpikeMode::Hard:
      rec.s_post = encode_threshold(rec.v_mid, lif.v_th);
      break;
    case SpikeMode::Smoothed:
      rec.s_post =
          rec.v_mid.unaryExpr([&](double v) { return fast_sigmoid_ramp(v - lif.v_th, k); });
      break;
    case SpikeMode::Bypass:
      rec.s_post = rec.v_mid;
      break;
  }
  if (cfg.mode == SpikeMode::Bypass) {
    rec.post_grad = VectorXd::Ones(cfg.n_r);
    rec.v_next = rec.v_mid;
    rec.dvm_partial = VectorXd::Ones(cfg.n_r);
    rec.dvm_spost = VectorXd::Zero(cfg.n_r);
  } else {
    rec.post_grad =
        rec.v_mid.unaryExpr([&](double v) { return fast_sigmoid_grad(v - lif.v_th, k); });
    // reset written as v_mid + s (v_reset - v_mid): exact for hard 0/1 spikes,
    // smooth interpolation otherwise, one derivative rule for both
    rec.v_next =
        rec.v_mid + rec.s_post.cwiseProduct(VectorXd::Constant(cfg.n_r, lif.v_reset) - rec.v_mid);
    rec.dvm_partial = VectorXd::Ones(cfg.n_r) - rec.s_post;
    rec.dvm_spost = VectorXd::Constant(cfg.n_r, lif.v_reset) - rec.v_mid;
  }
  rec.r = rec.post_keep * rec.r_prev + rec.s_post;
  rec.z = net.w_dec * rec.r + net.b_dec;

  state.ssm.x = rec.x;
  state.ssm.t += 1;
  state.pre_trace = rec.p;
  state.v = rec.v_next;
  state.post_trace = rec.r;
  return rec;
}

}  // namespace sssm
