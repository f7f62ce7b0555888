#include "sssm/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "sssm/learning.hpp"
#include "sssm/oracles.hpp"
#include "sssm/pruning.hpp"
#include "sssm/rng.hpp"
#include "sssm/train.hpp"

namespace sssm {

namespace {

// pinned tolerances and workloads for the verification gates
constexpr double kRtrlBpttTol = 1e-8;       // relative, infinity norm
constexpr int kRtrlConfigs = 20;
constexpr double kBpttFdTol = 1e-4;         // relative, smooth coordinates only
constexpr int kFdConfigs = 10;
constexpr double kFdEpsilon = 1e-5;
constexpr double kFdMinIncluded = 0.5;      // excluded-coordinate fraction guard
constexpr double kStdpPairTol = 1e-9;       // per synapse, absolute
constexpr int kStdpPairs = 100;
constexpr double kTauFitTol = 0.10;         // fitted decay constant, relative
constexpr int kPruneEvals = 1500;
constexpr int kPruneDeadline = 500;         // evaluations to reach the band
constexpr double kPruneBand = 0.05;

struct TrialNet {
  Network net;
  std::vector<VectorXd> inputs;
  std::vector<VectorXd> targets;
  LossKind loss;
};

TrialNet random_trial(std::uint64_t seed, SpikeMode mode) {
  PhiloxRng rng = stream_rng(seed, 77);
  NetConfig cfg;
  for (;;) {
    cfg.n_in = 1 + int(rng.uniform_int(3));
    cfg.n_state = 1 + int(rng.uniform_int(8));
    cfg.n_y = 1 + int(rng.uniform_int(4));
    cfg.n_r = 1 + int(rng.uniform_int(4));
    cfg.n_out = 1 + int(rng.uniform_int(3));
    cfg.mode = mode;
    Network probe(cfg);
    if (probe.param_count() <= 200) break;
  }
  TrialNet t{Network::random_init(cfg, rng), {}, {}, LossKind::Mse};
  // stronger-than-init readout weights so membranes actually reach threshold
  for (int i = 0; i < cfg.n_r; ++i)
    for (int j = 0; j < cfg.n_y; ++j) t.net.w_readout(i, j) = rng.uniform(-2.0, 2.0);
  t.loss = rng.bernoulli(0.5) ? LossKind::Mse : LossKind::CrossEntropy;
  if (cfg.n_out == 1) t.loss = LossKind::Mse;
  const int steps = 4 + int(rng.uniform_int(29));  // T in [4, 32]
  for (int s = 0; s < steps; ++s) {
    VectorXd u(cfg.n_in);
    for (int i = 0; i < cfg.n_in; ++i) u(i) = rng.uniform(-1.0, 1.0);
    t.inputs.push_back(u);
    VectorXd tgt = VectorXd::Zero(cfg.n_out);
    if (t.loss == LossKind::Mse) {
      for (int i = 0; i < cfg.n_out; ++i) tgt(i) = rng.uniform(-1.0, 1.0);
    } else {
      tgt(int(rng.uniform_int(std::uint64_t(cfg.n_out)))) = 1.0;
    }
    t.targets.push_back(tgt);
  }
  return t;
}

double rel_inf_err(const VectorXd& a, const VectorXd& b) {
  const double scale = b.cwiseAbs().maxCoeff();
  if (scale == 0.0) return (a - b).cwiseAbs().maxCoeff() == 0.0 ? 0.0 : INFINITY;
  return (a - b).cwiseAbs().maxCoeff() / scale;
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

}  // namespace

VerifyResult verify_rtrl_vs_bptt() {
  double worst = 0.0;
  bool pass = true;
  for (int c = 0; c < kRtrlConfigs; ++c) {
    TrialNet t = random_trial(1000 + c, SpikeMode::Hard);
    UnrolledTape tape = tape_forward(t.net, t.inputs, t.targets, t.loss);
    VectorXd ref = bptt_gradient(t.net, tape);

    Sensitivity sens = zero_sensitivity(t.net);
    VectorXd g = VectorXd::Zero(t.net.param_count());
    NetState st = initial_state(t.net.cfg);
    for (std::size_t s = 0; s < t.inputs.size(); ++s) {
      StepRecord rec = net_step(t.net, st, t.inputs[s]);
      VectorXd dl_dz = eval_loss(rec.z, t.targets[s], t.loss).dl_dz;
      g += sensitivity_step(t.net, rec, dl_dz, sens);
    }
    const double err = rel_inf_err(g, ref);
    worst = std::max(worst, err);
    if (!(err <= kRtrlBpttTol) || ref.cwiseAbs().maxCoeff() == 0.0) pass = false;
  }
  return {"rtrl-vs-bptt", pass,
          std::to_string(kRtrlConfigs) + " configs, worst rel err " + fmt("%.3e", worst) +
              " (tol " + fmt("%.0e", kRtrlBpttTol) + ")"};
}

VerifyResult verify_bptt_vs_fd() {
  double worst = 0.0;
  bool pass = true;
  double min_included = 1.0;
  for (int c = 0; c < kFdConfigs; ++c) {
    TrialNet t = random_trial(2000 + c, SpikeMode::Smoothed);
    UnrolledTape tape = tape_forward(t.net, t.inputs, t.targets, t.loss);
    VectorXd ref = bptt_gradient(t.net, tape);
    FdResult fd = finite_difference_gradient(t.net, t.inputs, t.targets, t.loss, kFdEpsilon);

    const double scale = ref.cwiseAbs().maxCoeff();
    int included = 0;
    double err = 0.0;
    for (int i = 0; i < ref.size(); ++i) {
      if (fd.excluded[i]) continue;
      ++included;
      err = std::max(err, std::abs(fd.grad(i) - ref(i)) / scale);
    }
    const double frac = double(included) / double(ref.size());
    min_included = std::min(min_included, frac);
    worst = std::max(worst, err);
    if (!(err <= kBpttFdTol) || frac < kFdMinIncluded) pass = false;
  }
  return {"bptt-vs-fd", pass,
          std::to_string(kFdConfigs) + " configs, worst rel err " + fmt("%.3e", worst) +
              " (tol " + fmt("%.0e", kBpttFdTol) + "), min included fraction " +
              fmt("%.2f", min_included)};
}

std::vector<VerifyResult> verify_rtrl() {
  return {verify_rtrl_vs_bptt(), verify_bptt_vs_fd()};
}

VerifyResult verify_stdp_pairing() {
  StdpConfig cfg;  // defaults: 20 ms / 20 ms windows
  double worst = 0.0;
  bool pass = true;
  for (int pair = 0; pair < kStdpPairs; ++pair) {
    PhiloxRng rng = stream_rng(3000, std::uint64_t(pair));
    const double dt = 1.0;  // ms
    const int steps = 500 + int(rng.uniform_int(1501));  // 0.5 s .. 2 s
    const double rate_pre = rng.uniform(5.0, 50.0);      // Hz
    const double rate_post = rng.uniform(5.0, 50.0);
    StdpState st = zero_stdp(1, 1);
    std::vector<double> pre_times, post_times;
    VectorXd pre(1), post(1);
    for (int t = 0; t < steps; ++t) {
      pre(0) = rng.bernoulli(rate_pre * dt / 1000.0) ? 1.0 : 0.0;
      post(0) = rng.bernoulli(rate_post * dt / 1000.0) ? 1.0 : 0.0;
      if (pre(0) != 0.0) pre_times.push_back(t * dt);
      if (post(0) != 0.0) post_times.push_back(t * dt);
      stdp_trace_step(st, pre, post, cfg, dt);
    }
    const double brute = stdp_pairwise(pre_times, post_times, cfg);
    const double err = std::abs(st.omega(0, 0) - brute);
    worst = std::max(worst, err);
    if (!(err <= kStdpPairTol)) pass = false;
  }
  return {"stdp-trace-vs-pairwise", pass,
          std::to_string(kStdpPairs) + " Poisson pairs, worst abs err " + fmt("%.3e", worst) +
              " (tol " + fmt("%.0e", kStdpPairTol) + ")"};
}

VerifyResult verify_stdp_window() {
  StdpConfig cfg;
  HybridRuleConfig rule;
  rule.eta = 1.0;
  rule.lambda = 0.5;
  const std::vector<double> grid = {-40, -20, -10, -5, -2, -1, 1, 2, 5, 10, 20, 40};
  auto table = probe_stdp_window(cfg, rule, grid);
  bool signs_ok = true;
  std::vector<std::pair<double, double>> pos, neg;
  for (const auto& [lag, dw] : table) {
    if (lag >= 0 && !(dw > 0)) signs_ok = false;
    if (lag < 0 && !(dw < 0)) signs_ok = false;
    (lag >= 0 ? pos : neg).emplace_back(std::abs(lag), dw);
  }
  auto [amp_p, tau_p] = fit_exp_decay(pos);
  auto [amp_n, tau_n] = fit_exp_decay(neg);
  (void)amp_p;
  (void)amp_n;
  const bool tau_ok = std::abs(tau_p - cfg.tau_plus) <= kTauFitTol * cfg.tau_plus &&
                      std::abs(tau_n - cfg.tau_minus) <= kTauFitTol * cfg.tau_minus;
  return {"stdp-window-shape", signs_ok && tau_ok,
          "fitted tau+ " + fmt("%.3f", tau_p) + " ms, tau- " + fmt("%.3f", tau_n) +
              " ms vs configured " + fmt("%.0f", cfg.tau_plus) + "/" +
              fmt("%.0f", cfg.tau_minus) + " (tol 10%), signs " +
              std::string(signs_ok ? "correct" : "wrong")};
}

std::vector<VerifyResult> verify_stdp() {
  return {verify_stdp_pairing(), verify_stdp_window()};
}

std::vector<VerifyResult> verify_pruning() {
  std::vector<VerifyResult> out;
  const double rhos[] = {0.5, 0.8, 0.9};
  for (double rho : rhos) {
    PruningConfig cfg;
    cfg.rho = rho;
    PhiloxRng rng = stream_rng(4000, std::uint64_t(rho * 100));
    MatrixXd w(100, 100);
    for (int i = 0; i < w.rows(); ++i)
      for (int j = 0; j < w.cols(); ++j) w(i, j) = rng.uniform(-1.0, 1.0);
    PruningState st = fresh_mask(int(w.rows()), int(w.cols()));

    int first_hit = -1;
    bool in_band_after = true, monotone = true, no_regrowth = true;
    double prev_sparsity = 0.0;
    MatrixXd prev_mask = st.mask;
    for (int ev = 1; ev <= kPruneEvals; ++ev) {
      apply_pruning(w, st, cfg, rng);
      const double s = measure_sparsity(st);
      st.theta = threshold_step(st.theta, s, cfg.rho, cfg.gamma, cfg.dt_ctrl);
      if (s < prev_sparsity) monotone = false;
      if (((prev_mask.array() == 0.0) && (st.mask.array() != 0.0)).any()) no_regrowth = false;
      prev_sparsity = s;
      prev_mask = st.mask;
      if (first_hit < 0 && std::abs(s - rho) <= kPruneBand) first_hit = ev;
      if (ev >= kPruneDeadline && std::abs(s - rho) > kPruneBand) in_band_after = false;
    }
    const bool pass = first_hit > 0 && first_hit <= kPruneDeadline && in_band_after &&
                      monotone && no_regrowth;
    std::ostringstream os;
    os << "rho " << rho << ": band reached at eval " << first_hit << ", final sparsity "
       << fmt("%.4f", prev_sparsity) << ", stayed in band through " << kPruneEvals
       << " evals: " << (in_band_after ? "yes" : "no");
    out.push_back({"pruning-controller-rho-" + fmt("%.1f", rho), pass, os.str()});
  }
  return out;
}

bool all_pass(const std::vector<VerifyResult>& results) {
  return std::all_of(results.begin(), results.end(),
                     [](const VerifyResult& r) { return r.pass; });
}

std::string format_results(const std::vector<VerifyResult>& results) {
  std::ostringstream os;
  for (const auto& r : results)
    os << (r.pass ? "PASS" : "FAIL") << ' ' << r.name << " | " << r.detail << '\n';
  return os.str();
}

}  // namespace sssm
