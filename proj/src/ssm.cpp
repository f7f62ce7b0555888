#include "sssm/ssm.hpp"

#include <cmath>
#include <stdexcept>

#include "sssm/mathutil.hpp"

namespace sssm {

SsmParams::SsmParams(int n_state, int n_in, int n_out)
    : ns_(n_state), ni_(n_in), no_(n_out) {
  if (n_state <= 0 || n_in <= 0 || n_out <= 0)
    throw std::invalid_argument("SsmParams: dimensions must be positive");
  off_gate_a_ = ns_;
  off_b0_ = off_gate_a_ + ns_ * ni_;
  off_gb_ = off_b0_ + ns_ * ni_;
  off_c0_ = off_gb_ + ns_ * ni_ * ni_;
  off_gc_ = off_c0_ + no_ * ns_;
  off_d0_ = off_gc_ + no_ * ns_ * ni_;
  total_ = off_d0_ + no_ * ni_;
  base_a_ = VectorXd::Zero(ns_);
  gate_a_ = MatrixXd::Zero(ns_, ni_);
  b0_ = MatrixXd::Zero(ns_, ni_);
  gb_ = MatrixXd::Zero(ns_ * ni_, ni_);
  c0_ = MatrixXd::Zero(no_, ns_);
  gc_ = MatrixXd::Zero(no_ * ns_, ni_);
  d0_ = MatrixXd::Zero(no_, ni_);
}

int SsmParams::param_count() const { return total_; }

SsmParams SsmParams::random_init(int n_state, int n_in, int n_out, PhiloxRng& rng) {
  SsmParams p(n_state, n_in, n_out);
  // log-spaced retention ladder: a_i in [0.7, 0.99], slowest modes last
  const double lo = std::log(0.7), hi = std::log(0.99);
  for (int i = 0; i < n_state; ++i) {
    double a = std::exp(lo + (hi - lo) * (i + 0.5) / n_state);
    p.base_a_(i) = logit(a);
  }
  auto fill = [&rng](MatrixXd& m, int fan_in) {
    const double s = 1.0 / std::sqrt(double(fan_in));
    for (int i = 0; i < m.rows(); ++i)
      for (int j = 0; j < m.cols(); ++j) m(i, j) = rng.uniform(-s, s);
  };
  fill(p.gate_a_, n_in);
  fill(p.b0_, n_in);
  fill(p.gb_, n_in);
  fill(p.c0_, n_state);
  fill(p.gc_, n_in);
  fill(p.d0_, n_in);
  return p;
}

VectorXd SsmParams::theta() const {
  VectorXd t(total_);
  int k = 0;
  for (int i = 0; i < ns_; ++i) t(k++) = base_a_(i);
  for (int i = 0; i < ns_; ++i)
    for (int j = 0; j < ni_; ++j) t(k++) = gate_a_(i, j);
  for (int i = 0; i < ns_; ++i)
    for (int j = 0; j < ni_; ++j) t(k++) = b0_(i, j);
  for (int i = 0; i < ns_ * ni_; ++i)
    for (int j = 0; j < ni_; ++j) t(k++) = gb_(i, j);
  for (int i = 0; i < no_; ++i)
    for (int j = 0; j < ns_; ++j) t(k++) = c0_(i, j);
  for (int i = 0; i < no_ * ns_; ++i)
    for (int j = 0; j < ni_; ++j) t(k++) = gc_(i, j);
  for (int i = 0; i < no_; ++i)
    for (int j = 0; j < ni_; ++j) t(k++) = d0_(i, j);
  return t;
}

void SsmParams::set_theta(const VectorXd& theta) {
  if (theta.size() != total_)
    throw std::invalid_argument("SsmParams::set_theta: size mismatch");
  int k = 0;
  for (int i = 0; i < ns_; ++i) base_a_(i) = theta(k++);
  for (int i = 0; i < ns_; ++i)
    for (int j = 0; j < ni_; ++j) gate_a_(i, j) = theta(k++);
  for (int i = 0; i < ns_; ++i)
    for (int j = 0; j < ni_; ++j) b0_(i, j) = theta(k++);
  for (int i = 0; i < ns_ * ni_; ++i)
    for (int j = 0; j < ni_; ++j) gb_(i, j) = theta(k++);
  for (int i = 0; i < no_; ++i)
    for (int j = 0; j < ns_; ++j) c0_(i, j) = theta(k++);
  for (int i = 0; i < no_ * ns_; ++i)
    for (int j = 0; j < ni_; ++j) gc_(i, j) = theta(k++);
  for (int i = 0; i < no_; ++i)
    for (int j = 0; j < ni_; ++j) d0_(i, j) = theta(k++);
}

SsmMats selective_params(const SsmParams& params, const VectorXd& u) {
  if (u.size() != params.n_in())
    throw std::invalid_argument("selective_params: input size mismatch");
  const int ns = params.n_state(), ni = params.n_in(), no = params.n_out();
  SsmMats m;
  VectorXd pre = params.base_a() + params.gate_a() * u;
  m.a_diag = pre.unaryExpr([](double z) { return sigmoid(z); });
  VectorXd db = params.gb() * u;   // ns*ni, row-major over (state, in)
  VectorXd dc = params.gc() * u;   // no*ns, row-major over (out, state)
  m.b = params.b0();
  for (int i = 0; i < ns; ++i)
    for (int j = 0; j < ni; ++j) m.b(i, j) += db(i * ni + j);
  m.c = params.c0();
  for (int o = 0; o < no; ++o)
    for (int i = 0; i < ns; ++i) m.c(o, i) += dc(o * ns + i);
  m.d = params.d0();
  return m;
}

std::pair<SsmState, VectorXd> ssm_step(const SsmState& state, const VectorXd& u,
                                       const SsmMats& mats) {
  if (state.x.size() != mats.a_diag.size())
    throw std::invalid_argument("ssm_step: state size mismatch");
  if (u.size() != mats.b.cols())
    throw std::invalid_argument("ssm_step: input size mismatch");
  SsmState next;
  next.x = mats.a_diag.cwiseProduct(state.x) + mats.b * u;
  next.t = state.t + 1;
  VectorXd y = mats.c * next.x + mats.d * u;
  return {std::move(next), std::move(y)};
}

std::vector<std::pair<SsmState, VectorXd>> ssm_scan(const SsmParams& params,
                                                    const std::vector<VectorXd>& inputs,
                                                    const SsmState& x0) {
  if (inputs.empty()) throw std::invalid_argument("ssm_scan: empty input sequence");
  std::vector<std::pair<SsmState, VectorXd>> out;
  out.reserve(inputs.size());
  SsmState st = x0;
  for (const auto& u : inputs) {
    auto [next, y] = ssm_step(st, u, selective_params(params, u));
    st = next;
    out.emplace_back(std::move(next), std::move(y));
  }
  return out;
}

}  // namespace sssm
