// End-to-end acceptance gates, one printed PASS/FAIL line each. Every
// tolerance and workload is pinned here or in verify.cpp; nothing adapts to
// the machine it runs on. Wall-clock budgets are part of the gate.

#include <doctest.h>

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "sssm/checkpoint.hpp"
#include "sssm/config.hpp"
#include "sssm/learning.hpp"
#include "sssm/metrics.hpp"
#include "sssm/network.hpp"
#include "sssm/tasks.hpp"
#include "sssm/train.hpp"
#include "sssm/verify.hpp"

using namespace sssm;

namespace {

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

bool report(int idx, const char* label, bool pass, const std::string& detail) {
  std::printf("%s  %d/9  %s | %s\n", pass ? "PASS" : "FAIL", idx, label, detail.c_str());
  std::fflush(stdout);
  return pass;
}

std::string budget_note(const Timer& t, double budget_s) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.1fs of %.0fs budget", t.seconds(), budget_s);
  return buf;
}

bool bits_equal(const double* a, const double* b, std::size_t n) {
  return std::memcmp(a, b, n * sizeof(double)) == 0;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  if (!f) throw std::runtime_error("acceptance: cannot open " + p.string());
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

std::vector<std::string> split_lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  std::string line;
  while (std::getline(is, line)) out.push_back(line);
  return out;
}

std::filesystem::path fresh_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / name;
  std::filesystem::remove_all(p);
  return p;
}

std::string join_details(const std::vector<VerifyResult>& rs) {
  std::string out;
  for (const auto& r : rs) {
    if (!out.empty()) out += " || ";
    out += r.detail;
  }
  return out;
}

}  // namespace

TEST_CASE("online forward-sensitivity gradient matches the unrolled reverse oracle") {
  Timer t;
  VerifyResult r = verify_rtrl_vs_bptt();
  const bool pass = r.pass && t.seconds() < 60.0;
  report(1, "online gradient == reverse-mode oracle (rel 1e-8)", pass,
         r.detail + "; " + budget_note(t, 60));
  CHECK_MESSAGE(pass, r.detail);
}

TEST_CASE("reverse-mode oracle matches central differences on smoothed nets") {
  Timer t;
  VerifyResult r = verify_bptt_vs_fd();
  const bool pass = r.pass && t.seconds() < 120.0;
  report(2, "reverse-mode oracle == finite differences (rel 1e-4)", pass,
         r.detail + "; " + budget_note(t, 120));
  CHECK_MESSAGE(pass, r.detail);
}

TEST_CASE("online pairing traces reproduce the brute-force pair sum") {
  Timer t;
  VerifyResult r = verify_stdp_pairing();
  const bool pass = r.pass && t.seconds() < 30.0;
  report(3, "trace pairing == brute-force pair sum (abs 1e-9)", pass,
         r.detail + "; " + budget_note(t, 30));
  CHECK_MESSAGE(pass, r.detail);
}

TEST_CASE("two-neuron probe recovers the pairing window shape") {
  Timer t;
  VerifyResult r = verify_stdp_window();
  const bool pass = r.pass && t.seconds() < 10.0;
  report(4, "probe window: signs correct, fitted tau within 10%", pass,
         r.detail + "; " + budget_note(t, 10));
  CHECK_MESSAGE(pass, r.detail);
}

TEST_CASE("pruning controller reaches and holds each target sparsity") {
  Timer t;
  std::vector<VerifyResult> rs = verify_pruning();
  const bool pass = all_pass(rs) && t.seconds() < 30.0;
  report(5, "sparsity within 0.05 of target by eval 500, holds after", pass,
         join_details(rs) + "; " + budget_note(t, 30));
  CHECK_MESSAGE(pass, join_details(rs));
}

TEST_CASE("online training halves the delayed-copy loss") {
  Timer t;
  RunConfig cfg;  // copy task, dim 8, delay 10, n_state 32 are the defaults
  cfg.task.seed = 11;
  // Frozen after a baseline sweep: the default steep surrogate (k = 10) and
  // high threshold starve the readout of gradient once it goes quiet, so the
  // loss plateaus at the all-zero output. A shallower surrogate and lower
  // threshold keep spikes and gradients flowing; seeds 1/2/3/11/21 all reach
  // a final-quarter loss under 0.4x the first quarter with these values.
  cfg.lif.surrogate_k = 2.0;
  cfg.lif.v_th = 0.3;
  cfg.rule.eta = 2e-3;
  cfg.rule.lambda = 1.0;
  cfg.steps = 50000;
  cfg.metric_interval = 250;
  cfg.seed = 11;
  cfg.validate();

  TrainLoop loop(cfg);
  loop.run(cfg.steps);

  double first = 0.0, last = 0.0;
  int n_first = 0, n_last = 0;
  for (const auto& r : loop.records()) {
    if (r.step <= cfg.steps / 4) {
      first += r.loss;
      ++n_first;
    }
    if (r.step > 3 * cfg.steps / 4) {
      last += r.loss;
      ++n_last;
    }
  }
  first /= n_first;
  last /= n_last;

  char buf[160];
  std::snprintf(buf, sizeof buf,
                "first-quarter mean loss %.6g, final-quarter %.6g (need <= 0.5x); %s", first,
                last, budget_note(t, 300).c_str());
  const bool pass = last <= 0.5 * first && t.seconds() < 300.0;
  report(6, "delayed-copy loss halves within 50k steps", pass, buf);
  CHECK_MESSAGE(pass, buf);
}

TEST_CASE("mixing endpoints: pure gradient ignores pairing, pure pairing is exact") {
  // lambda = 1: running with pairing bookkeeping on or off must give the
  // same trajectory, bit for bit.
  RunConfig a;
  a.task.dim = 4;
  a.task.length = 32;
  a.task.delay = 5;
  a.task.seed = 3;
  a.n_state = 8;
  a.n_y = 6;
  a.n_r = 6;
  a.rule.eta = 1e-3;
  a.rule.lambda = 1.0;
  a.prune_enabled = true;
  a.prune.interval = 500;
  a.steps = 2000;
  a.metric_interval = 100;
  a.seed = 5;
  a.stdp_enabled = true;
  a.validate();
  RunConfig b = a;
  b.stdp_enabled = false;

  TrainLoop la(a), lb(b);
  la.run(a.steps);
  lb.run(b.steps);
  const VectorXd tha = la.net().theta(), thb = lb.net().theta();
  const bool grad_identical =
      metrics_to_csv(la.records()) == metrics_to_csv(lb.records()) &&
      tha.size() == thb.size() &&
      bits_equal(tha.data(), thb.data(), std::size_t(tha.size()));

  // lambda = 0: every readout change must equal eta * scale * omega computed
  // from the pre-step snapshot, and no other parameter may move.
  RunConfig c;
  c.task.dim = 4;
  c.task.length = 25;
  c.task.delay = 6;
  c.task.seed = 9;
  c.n_state = 6;
  c.n_y = 5;
  c.n_r = 5;
  c.rule.eta = 0.05;
  c.rule.lambda = 0.0;
  c.rule.omega_scale = 0.7;
  c.stdp_enabled = true;
  c.steps = 300;
  c.metric_interval = 100;
  c.seed = 1;
  c.validate();
  const NetConfig nc = c.net_config();

  TrainLoop loop(c);
  const VectorXd th0 = loop.net().theta();
  const int p_ssm = loop.net().ssm.param_count();
  bool updates_exact = true;
  for (std::uint64_t k = 0; k < c.steps; ++k) {
    Checkpoint ck = loop.checkpoint();
    loop.run(1);

    // replay the step from the snapshot out of the public pieces
    Network net2(nc);
    net2.ssm.set_theta(ck.ssm_theta);
    net2.w_readout = ck.w_readout;
    net2.w_dec = ck.w_dec;
    net2.b_dec = ck.b_dec;
    NetState st = initial_state(nc);
    st.ssm.x = ck.state_x;
    st.pre_trace = ck.state_p;
    st.v = ck.state_v;
    st.post_trace = ck.state_r;
    Episode ep = gen_episode(c.task, ck.episode);
    StepRecord rec = net_step(net2, st, ep.inputs[std::size_t(ck.ep_step)]);
    StdpState sh = zero_stdp(nc.n_r, nc.n_y);
    sh.pre_trace = ck.stdp_pre;
    sh.post_trace = ck.stdp_post;
    sh.omega = ck.stdp_omega;
    stdp_trace_step(sh, rec.s_pre, rec.s_post, c.stdp, c.lif.dt);

    MatrixXd want = ck.w_readout;
    for (int i = 0; i < nc.n_r; ++i)
      for (int j = 0; j < nc.n_y; ++j)
        want(i, j) += hybrid_update(0.0, sh.omega(i, j), ck.mask(i, j) != 0.0, c.rule);
    const MatrixXd& got = loop.net().w_readout;
    if (!bits_equal(got.data(), want.data(), std::size_t(got.size()))) updates_exact = false;
  }
  const VectorXd thn = loop.net().theta();
  const int dec_off = p_ssm + nc.n_r * nc.n_y;
  const int dec_len = nc.n_out * nc.n_r + nc.n_out;
  const bool others_frozen =
      bits_equal(thn.data(), th0.data(), std::size_t(p_ssm)) &&
      bits_equal(thn.data() + dec_off, th0.data() + dec_off, std::size_t(dec_len));

  char buf[200];
  std::snprintf(buf, sizeof buf,
                "lambda=1 runs identical: %s; lambda=0 replayed 300 exact pairing updates: %s; "
                "non-readout parameters frozen: %s",
                grad_identical ? "yes" : "no", updates_exact ? "yes" : "no",
                others_frozen ? "yes" : "no");
  const bool pass = grad_identical && updates_exact && others_frozen;
  report(7, "rule endpoints behave exactly", pass, buf);
  CHECK_MESSAGE(pass, buf);
}

TEST_CASE("persistent state size does not depend on run length") {
  Timer t;
  auto run_bytes = [](std::uint64_t steps) {
    RunConfig cfg;
    cfg.task.dim = 3;
    cfg.task.length = 32;
    cfg.task.delay = 5;
    cfg.task.seed = 2;
    cfg.n_state = 4;
    cfg.n_y = 3;
    cfg.n_r = 3;
    cfg.rule.eta = 5e-4;
    cfg.prune_enabled = true;
    cfg.steps = steps;
    cfg.metric_interval = 100;
    cfg.seed = 8;
    cfg.validate();
    TrainLoop loop(cfg);
    std::ostringstream sink;  // stream records out, the way the CLI does
    loop.set_metrics_sink(&sink);
    loop.run(steps);
    return loop.persistent_state_bytes();
  };
  const double small = double(run_bytes(1000));
  const double big = double(run_bytes(100000));
  const double growth = std::abs(big - small) / std::max(small, big);

  char buf[160];
  std::snprintf(buf, sizeof buf, "%.0f bytes after 1e3 steps, %.0f after 1e5 (%.2f%% apart); %s",
                small, big, 100.0 * growth, budget_note(t, 120).c_str());
  const bool pass = growth <= 0.05 && t.seconds() < 120.0;
  report(8, "state bytes constant from 1e3 to 1e5 steps", pass, buf);
  CHECK_MESSAGE(pass, buf);
}

TEST_CASE("seeded runs are byte-identical and checkpoint resume is exact") {
  RunConfig cfg;
  cfg.task.dim = 4;
  cfg.task.length = 32;
  cfg.task.delay = 7;
  cfg.task.seed = 21;
  cfg.n_state = 8;
  cfg.n_y = 6;
  cfg.n_r = 6;
  cfg.rule.eta = 5e-4;
  cfg.prune_enabled = true;
  cfg.steps = 3000;
  cfg.metric_interval = 100;
  cfg.checkpoint_interval = 1000;
  cfg.seed = 42;
  cfg.validate();

  const auto da = fresh_dir("sssm-acc9-a");
  const auto db = fresh_dir("sssm-acc9-b");
  const auto dc = fresh_dir("sssm-acc9-c");
  train_online(cfg, da.string());
  train_online(cfg, db.string());

  const std::string ma = slurp(da / "metrics.csv");
  const bool twins = ma == slurp(db / "metrics.csv") &&
                     slurp(da / "checkpoint.bin") == slurp(db / "checkpoint.bin");

  train_online(cfg, dc.string(), (da / "checkpoint_step1000.bin").string());
  const auto la = split_lines(ma);
  const auto lc = split_lines(slurp(dc / "metrics.csv"));
  // resumed file: same header, then exactly the uninterrupted run's tail
  bool resume_ok = lc.size() > 1 && lc.size() < la.size() && lc[0] == la[0];
  if (resume_ok)
    for (std::size_t i = 1; i < lc.size(); ++i)
      if (lc[i] != la[la.size() - lc.size() + i]) resume_ok = false;
  const bool final_match = slurp(dc / "checkpoint.bin") == slurp(da / "checkpoint.bin");

  char buf[200];
  std::snprintf(buf, sizeof buf,
                "same-seed runs byte-identical: %s; resumed metrics == uninterrupted tail "
                "(%zu of %zu records): %s; final checkpoints byte-identical: %s",
                twins ? "yes" : "no", lc.size() - 1, la.size() - 1, resume_ok ? "yes" : "no",
                final_match ? "yes" : "no");
  const bool pass = twins && resume_ok && final_match;
  report(9, "reproducibility and resume", pass, buf);
  CHECK_MESSAGE(pass, buf);

  std::filesystem::remove_all(da);
  std::filesystem::remove_all(db);
  std::filesystem::remove_all(dc);
}
