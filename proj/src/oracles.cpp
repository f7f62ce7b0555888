#include "sssm/oracles.hpp"

#include <cstddef>
#include <stdexcept>

#include "sssm/errors.hpp"

namespace sssm {

namespace {
constexpr std::size_t kMaxTapeSteps = 1000;

bool bits_equal(const VectorXd& a, const VectorXd& b) {
  if (a.size() != b.size()) return false;
  for (int i = 0; i < a.size(); ++i)
    if (a(i) != b(i)) return false;
  return true;
}
}  // namespace

UnrolledTape tape_forward(const Network& net, const std::vector<VectorXd>& inputs,
                          const std::vector<VectorXd>& targets, LossKind loss) {
  if (inputs.size() != targets.size())
    throw std::invalid_argument("tape_forward: inputs/targets length mismatch");
  if (inputs.empty()) throw std::invalid_argument("tape_forward: empty sequence");
  if (inputs.size() > kMaxTapeSteps)
    throw ResourceError("tape_forward: sequence too long for the unrolled oracle");
  UnrolledTape tape;
  tape.loss = loss;
  tape.x0 = initial_state(net.cfg);
  tape.targets = targets;
  tape.steps.reserve(inputs.size());
  NetState st = tape.x0;
  for (std::size_t t = 0; t < inputs.size(); ++t) {
    tape.steps.push_back(net_step(net, st, inputs[t]));
    tape.total_loss += eval_loss(tape.steps.back().z, targets[t], loss).value;
  }
  return tape;
}

void check_tape_replay(const Network& net, const UnrolledTape& tape) {
  NetState st = tape.x0;
  for (const StepRecord& rec : tape.steps) {
    StepRecord again = net_step(net, st, rec.u);
    if (!bits_equal(again.x, rec.x) || !bits_equal(again.y, rec.y) ||
        !bits_equal(again.s_pre, rec.s_pre) || !bits_equal(again.p, rec.p) ||
        !bits_equal(again.i_syn, rec.i_syn) || !bits_equal(again.v_mid, rec.v_mid) ||
        !bits_equal(again.v_next, rec.v_next) || !bits_equal(again.s_post, rec.s_post) ||
        !bits_equal(again.r, rec.r) || !bits_equal(again.z, rec.z))
      throw NumericError("check_tape_replay: replay diverged from recorded values");
  }
}

VectorXd bptt_gradient(const Network& net, const UnrolledTape& tape) {
  const NetConfig& cfg = net.cfg;
  const SsmParams& s = net.ssm;
  const int ns = cfg.n_state, ny = cfg.n_y, nr = cfg.n_r, ni = cfg.n_in;
  VectorXd g = VectorXd::Zero(net.param_count());
  VectorXd lx = VectorXd::Zero(ns), lp = VectorXd::Zero(ny);
  VectorXd lv = VectorXd::Zero(nr), lr = VectorXd::Zero(nr);

  for (std::size_t tt = tape.steps.size(); tt-- > 0;) {
    const StepRecord& rec = tape.steps[tt];
    const VectorXd dl_dz = eval_loss(rec.z, tape.targets[tt], tape.loss).dl_dz;

    // z = Wdec r + b
    for (int o = 0; o < cfg.n_out; ++o) {
      for (int i = 0; i < nr; ++i) g(net.idx_wdec(o, i)) += dl_dz(o) * rec.r(i);
      g(net.idx_bdec(o)) += dl_dz(o);
    }
    lr += net.w_dec.transpose() * dl_dz;

    // r = post_keep r_prev + s_post ; v_next = v_mid, s_post paths
    VectorXd l_spost = lr + lv.cwiseProduct(rec.dvm_spost);
    VectorXd lr_prev = rec.post_keep * lr;
    VectorXd l_vmid = lv.cwiseProduct(rec.dvm_partial) + l_spost.cwiseProduct(rec.post_grad);

    // v_mid = v_keep v_prev + v_drive (Wr p)
    VectorXd lv_prev = rec.v_keep * l_vmid;
    VectorXd l_i = rec.v_drive * l_vmid;
    for (int i = 0; i < nr; ++i)
      for (int j = 0; j < ny; ++j) g(net.idx_wr(i, j)) += l_i(i) * rec.p(j);
    lp += net.w_readout.transpose() * l_i;

    // p = pre_keep p_prev + s_pre ; s_pre = f_enc(y)
    VectorXd lp_prev = rec.pre_keep * lp;
    VectorXd l_y = lp.cwiseProduct(rec.enc_grad);

    // y = C x_t + D u
    for (int o = 0; o < ny; ++o) {
      for (int i = 0; i < ns; ++i) {
        g(s.idx_c0(o, i)) += l_y(o) * rec.x(i);
        for (int k = 0; k < ni; ++k) g(s.idx_gc(o, i, k)) += l_y(o) * rec.x(i) * rec.u(k);
      }
      for (int j = 0; j < ni; ++j) g(s.idx_d0(o, j)) += l_y(o) * rec.u(j);
    }
    lx += rec.mats.c.transpose() * l_y;

    // x_t = sigmoid(base_a + gate_a u) .* x_prev + (b0 + gb u) u
    for (int i = 0; i < ns; ++i) {
      const double a = rec.mats.a_diag(i);
      const double l_pre = lx(i) * rec.x_prev(i) * a * (1.0 - a);
      g(s.idx_base_a(i)) += l_pre;
      for (int k = 0; k < ni; ++k) g(s.idx_gate_a(i, k)) += l_pre * rec.u(k);
      for (int j = 0; j < ni; ++j) {
        g(s.idx_b0(i, j)) += lx(i) * rec.u(j);
        for (int k = 0; k < ni; ++k) g(s.idx_gb(i, j, k)) += lx(i) * rec.u(j) * rec.u(k);
      }
    }
    VectorXd lx_prev = rec.mats.a_diag.cwiseProduct(lx);

    lx = std::move(lx_prev);
    lp = std::move(lp_prev);
    lv = std::move(lv_prev);
    lr = std::move(lr_prev);
  }
  return g;
}

namespace {

struct ForwardEval {
  double loss = 0.0;
  std::vector<char> decisions;  // threshold sign pattern, Hard/Smoothed only
};

ForwardEval run_forward(const Network& net, const std::vector<VectorXd>& inputs,
                        const std::vector<VectorXd>& targets, LossKind loss) {
  ForwardEval out;
  const bool thresholds_act = net.cfg.mode != SpikeMode::Bypass;
  NetState st = initial_state(net.cfg);
  for (std::size_t t = 0; t < inputs.size(); ++t) {
    StepRecord rec = net_step(net, st, inputs[t]);
    out.loss += eval_loss(rec.z, targets[t], loss).value;
    if (thresholds_act) {
      for (int i = 0; i < rec.y.size(); ++i)
        out.decisions.push_back(rec.y(i) >= net.cfg.encode_threshold ? 1 : 0);
      for (int i = 0; i < rec.v_mid.size(); ++i)
        out.decisions.push_back(rec.v_mid(i) >= net.cfg.lif.v_th ? 1 : 0);
    }
  }
  return out;
}

}  // namespace

FdResult finite_difference_gradient(const Network& net, const std::vector<VectorXd>& inputs,
                                    const std::vector<VectorXd>& targets, LossKind loss,
                                    double epsilon) {
  if (epsilon <= 0) throw std::invalid_argument("finite_difference_gradient: epsilon > 0");
  if (inputs.size() != targets.size())
    throw std::invalid_argument("finite_difference_gradient: inputs/targets length mismatch");
  const int p = net.param_count();
  const VectorXd theta0 = net.theta();
  const ForwardEval nominal = run_forward(net, inputs, targets, loss);

  FdResult res;
  res.grad = VectorXd::Zero(p);
  res.excluded.assign(p, false);
  Network probe = net;
  for (int i = 0; i < p; ++i) {
    VectorXd th = theta0;
    th(i) = theta0(i) + epsilon;
    probe.set_theta(th);
    ForwardEval plus = run_forward(probe, inputs, targets, loss);
    th(i) = theta0(i) - epsilon;
    probe.set_theta(th);
    ForwardEval minus = run_forward(probe, inputs, targets, loss);
    res.grad(i) = (plus.loss - minus.loss) / (2.0 * epsilon);
    res.excluded[i] =
        plus.decisions != nominal.decisions || minus.decisions != nominal.decisions;
  }
  return res;
}

}  // namespace sssm
