#include "sssm/train.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "sssm/errors.hpp"

namespace sssm {

namespace {
constexpr std::uint64_t kInitStream = 1, kPruneStream = 2;

int argmax(const VectorXd& v) {
  int best = 0;
  for (int i = 1; i < v.size(); ++i)
    if (v(i) > v(best)) best = i;
  return best;
}
}  // namespace

TrainLoop::TrainLoop(const RunConfig& cfg)
    : cfg_(cfg),
      loss_kind_(cfg.task.loss()),
      net_(cfg.net_config()),
      prune_rng_(stream_rng(cfg.seed, kPruneStream)) {
  cfg_.validate();
  PhiloxRng init_rng = stream_rng(cfg_.seed, kInitStream);
  net_ = Network::random_init(cfg_.net_config(), init_rng);
  state_ = initial_state(net_.cfg);
  sens_ = zero_sensitivity(net_);
  stdp_ = zero_stdp(cfg_.n_r, cfg_.n_y);
  prune_state_ = fresh_mask(cfg_.n_r, cfg_.n_y);
  load_episode();
  refresh_alive_counts();
}

TrainLoop::TrainLoop(const RunConfig& cfg, const Checkpoint& ckpt)
    : cfg_(cfg),
      loss_kind_(cfg.task.loss()),
      net_(cfg.net_config()),
      prune_rng_(stream_rng(cfg.seed, kPruneStream)) {
  cfg_.validate();
  if (ckpt.config_text != cfg_.to_text())
    throw ConfigError("resume: checkpoint was produced under a different configuration");
  if (ckpt.ssm_theta.size() != net_.ssm.param_count() ||
      ckpt.w_readout.rows() != cfg_.n_r || ckpt.w_readout.cols() != cfg_.n_y ||
      ckpt.mask.rows() != cfg_.n_r || ckpt.mask.cols() != cfg_.n_y)
    throw FormatError("resume: checkpoint tensor shapes do not match the configuration");
  net_.ssm.set_theta(ckpt.ssm_theta);
  net_.w_readout = ckpt.w_readout;
  net_.w_dec = ckpt.w_dec;
  net_.b_dec = ckpt.b_dec;

  state_ = initial_state(net_.cfg);
  state_.ssm.x = ckpt.state_x;
  state_.pre_trace = ckpt.state_p;
  state_.v = ckpt.state_v;
  state_.post_trace = ckpt.state_r;
  state_.ssm.t = long(ckpt.ep_step);

  sens_ = zero_sensitivity(net_);
  sens_.ex = ckpt.sens_ex;
  sens_.ep = ckpt.sens_ep;
  sens_.ev = ckpt.sens_ev;
  sens_.er = ckpt.sens_er;

  stdp_ = zero_stdp(cfg_.n_r, cfg_.n_y);
  stdp_.pre_trace = ckpt.stdp_pre;
  stdp_.post_trace = ckpt.stdp_post;
  stdp_.omega = ckpt.stdp_omega;

  prune_state_.mask = ckpt.mask;
  prune_state_.theta = ckpt.prune_theta;
  prune_rng_.restore(ckpt.prune_rng);

  step_ = ckpt.step;
  episode_ = ckpt.episode;
  ep_step_ = ckpt.ep_step;
  spikes_ = ckpt.spikes;
  synops_ = ckpt.synops;
  window_loss_sum_ = ckpt.window_loss_sum;
  window_acc_sum_ = ckpt.window_acc_sum;
  window_loss_count_ = ckpt.window_loss_count;
  window_acc_count_ = ckpt.window_acc_count;
  wall_ms_ = ckpt.wall_ms;

  load_episode();
  refresh_alive_counts();
}

void TrainLoop::load_episode() { episode_cache_ = gen_episode(cfg_.task, episode_); }

void TrainLoop::refresh_alive_counts() { col_alive_ = prune_state_.mask.colwise().sum(); }

Checkpoint TrainLoop::checkpoint() const {
  Checkpoint c;
  c.config_text = cfg_.to_text();
  c.step = step_;
  c.episode = episode_;
  c.ep_step = ep_step_;
  c.spikes = spikes_;
  c.synops = synops_;
  c.window_loss_sum = window_loss_sum_;
  c.window_acc_sum = window_acc_sum_;
  c.window_loss_count = window_loss_count_;
  c.window_acc_count = window_acc_count_;
  c.wall_ms = wall_ms_;
  c.ssm_theta = net_.ssm.theta();
  c.w_readout = net_.w_readout;
  c.w_dec = net_.w_dec;
  c.b_dec = net_.b_dec;
  c.mask = prune_state_.mask;
  c.prune_theta = prune_state_.theta;
  c.prune_rng = prune_rng_.save();
  c.state_x = state_.ssm.x;
  c.state_p = state_.pre_trace;
  c.state_v = state_.v;
  c.state_r = state_.post_trace;
  c.sens_ex = sens_.ex;
  c.sens_ep = sens_.ep;
  c.sens_ev = sens_.ev;
  c.sens_er = sens_.er;
  c.stdp_pre = stdp_.pre_trace;
  c.stdp_post = stdp_.post_trace;
  c.stdp_omega = stdp_.omega;
  return c;
}

void TrainLoop::one_step() {
  const VectorXd& u = episode_cache_.inputs[ep_step_];
  const VectorXd& target = episode_cache_.targets[ep_step_];
  const bool graded = episode_cache_.loss_mask[ep_step_] != 0;
  const bool scored = episode_cache_.acc_mask[ep_step_] != 0;

  StepRecord rec = net_step(net_, state_, u);

  // spike accounting uses the hard threshold decisions in every mode
  VectorXd s_pre = cfg_.mode == SpikeMode::Hard
                       ? rec.s_pre
                       : encode_threshold(rec.y, cfg_.encode_threshold);
  VectorXd s_post = cfg_.mode == SpikeMode::Hard
                        ? rec.s_post
                        : encode_threshold(rec.v_mid, cfg_.lif.v_th);
  for (int j = 0; j < cfg_.n_y; ++j)
    if (s_pre(j) != 0.0) {
      ++spikes_;
      synops_ += std::uint64_t(col_alive_(j));
    }
  for (int i = 0; i < cfg_.n_r; ++i)
    if (s_post(i) != 0.0) ++spikes_;

  VectorXd dl_dz = VectorXd::Zero(net_.cfg.n_out);
  if (graded) {
    LossResult lr = eval_loss(rec.z, target, loss_kind_);
    if (!std::isfinite(lr.value))
      throw NumericError("training diverged: non-finite loss at step " +
                         std::to_string(step_ + 1));
    window_loss_sum_ += lr.value;
    ++window_loss_count_;
    dl_dz = std::move(lr.dl_dz);
  }
  if (scored) {
    window_acc_sum_ += argmax(rec.z) == argmax(target) ? 1.0 : 0.0;
    ++window_acc_count_;
  }

  const bool use_grad = cfg_.rule.lambda > 0.0;
  VectorXd g;
  if (use_grad) g = sensitivity_step(net_, rec, dl_dz, sens_);

  if (cfg_.stdp_enabled) stdp_trace_step(stdp_, s_pre, s_post, cfg_.stdp, cfg_.lif.dt);

  if (cfg_.rule.eta > 0.0) {
    VectorXd th = net_.theta();
    const int p_ssm = net_.ssm.param_count();
    if (use_grad) {
      for (int p = 0; p < p_ssm; ++p)
        th(p) += hybrid_update(g(p), 0.0, true, cfg_.rule);
      for (int o = 0; o < net_.cfg.n_out; ++o) {
        for (int i = 0; i < cfg_.n_r; ++i) {
          const int idx = net_.idx_wdec(o, i);
          th(idx) += hybrid_update(g(idx), 0.0, true, cfg_.rule);
        }
        const int idx = net_.idx_bdec(o);
        th(idx) += hybrid_update(g(idx), 0.0, true, cfg_.rule);
      }
    }
    for (int i = 0; i < cfg_.n_r; ++i)
      for (int j = 0; j < cfg_.n_y; ++j) {
        const int idx = net_.idx_wr(i, j);
        const double omega = cfg_.stdp_enabled ? stdp_.omega(i, j) : 0.0;
        th(idx) += hybrid_update(use_grad ? g(idx) : 0.0, omega,
                                 prune_state_.mask(i, j) != 0.0, cfg_.rule);
      }
    net_.set_theta(th);
  }
  if (cfg_.stdp_enabled) stdp_.omega.setZero();  // consumed by this step's update

  ++step_;
  ++ep_step_;

  if (cfg_.prune_enabled && step_ % std::uint64_t(cfg_.prune.interval) == 0) {
    apply_pruning(net_.w_readout, prune_state_, cfg_.prune, prune_rng_);
    prune_state_.theta = threshold_step(prune_state_.theta, measure_sparsity(prune_state_),
                                        cfg_.prune.rho, cfg_.prune.gamma, cfg_.prune.dt_ctrl);
    refresh_alive_counts();
  }

  if (ep_step_ == std::uint64_t(cfg_.task.length)) {
    ++episode_;
    ep_step_ = 0;
    load_episode();
    state_ = initial_state(net_.cfg);  // episodes are independent sequences
    sens_ = zero_sensitivity(net_);
    stdp_.pre_trace.setZero();
    stdp_.post_trace.setZero();
  }

  if (step_ % std::uint64_t(cfg_.metric_interval) == 0 || step_ == cfg_.steps) {
    MetricsRecord r;
    r.step = step_;
    r.loss = window_loss_count_ ? window_loss_sum_ / double(window_loss_count_) : 0.0;
    r.accuracy = window_acc_count_ ? window_acc_sum_ / double(window_acc_count_) : 0.0;
    r.spikes = spikes_;
    r.synops = synops_;
    r.alive_synapses = std::uint64_t(std::llround(prune_state_.mask.sum()));
    r.sparsity = measure_sparsity(prune_state_);
    r.theta = prune_state_.theta;
    r.wall_ms = wall_ms_;
    window_loss_sum_ = window_acc_sum_ = 0.0;
    window_loss_count_ = window_acc_count_ = 0;
    if (sink_) {
      write_metrics_record(*sink_, r);
    } else {
      records_.push_back(r);
    }
  }
}

std::uint64_t TrainLoop::run(std::uint64_t n) {
  std::uint64_t taken = 0;
  while (taken < n && step_ < cfg_.steps) {
    if (cfg_.measure_wall_time) {
      auto t0 = std::chrono::steady_clock::now();
      one_step();
      wall_ms_ += std::chrono::duration<double, std::milli>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
    } else {
      one_step();
    }
    ++taken;
  }
  return taken;
}

std::size_t TrainLoop::persistent_state_bytes() const {
  auto vec = [](const VectorXd& v) { return sizeof(double) * std::size_t(v.size()); };
  auto mat = [](const MatrixXd& m) { return sizeof(double) * std::size_t(m.size()); };
  std::size_t n = sizeof(*this);
  n += vec(net_.ssm.theta());  // parameter blocks, flattened once for counting
  n += mat(net_.w_readout) + mat(net_.w_dec) + vec(net_.b_dec);
  n += vec(state_.ssm.x) + vec(state_.pre_trace) + vec(state_.v) + vec(state_.post_trace);
  n += mat(sens_.ex) + mat(sens_.ep) + mat(sens_.ev) + mat(sens_.er);
  n += vec(stdp_.pre_trace) + vec(stdp_.post_trace) + mat(stdp_.omega);
  n += mat(prune_state_.mask) + vec(col_alive_);
  for (const auto& v : episode_cache_.inputs) n += vec(v);
  for (const auto& v : episode_cache_.targets) n += vec(v);
  n += episode_cache_.loss_mask.capacity() + episode_cache_.acc_mask.capacity();
  n += records_.capacity() * sizeof(MetricsRecord);
  return n;
}

void train_online(const RunConfig& cfg, const std::string& out_dir,
                  const std::string& resume_from) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  {
    std::ofstream cf(out_dir + "/config.txt");
    if (!cf) throw ResourceError("train: cannot write " + out_dir + "/config.txt");
    cf << cfg.to_text();
  }

  TrainLoop loop = resume_from.empty()
                       ? TrainLoop(cfg)
                       : TrainLoop(cfg, load_checkpoint(resume_from));

  std::ofstream mf(out_dir + "/metrics.csv", std::ios::trunc);
  if (!mf) throw ResourceError("train: cannot write " + out_dir + "/metrics.csv");
  write_metrics_header(mf);
  loop.set_metrics_sink(&mf);

  try {
    while (!loop.finished()) {
      std::uint64_t burst = cfg.checkpoint_interval
                                ? cfg.checkpoint_interval
                                : cfg.steps;
      loop.run(burst);
      if (cfg.checkpoint_interval && !loop.finished())
        save_checkpoint(out_dir + "/checkpoint_step" + std::to_string(loop.step()) + ".bin",
                        loop.checkpoint());
    }
  } catch (const NumericError&) {
    save_checkpoint(out_dir + "/checkpoint_diverged.bin", loop.checkpoint());
    throw;
  }
  save_checkpoint(out_dir + "/checkpoint.bin", loop.checkpoint());
  mf.flush();
  if (!mf) throw ResourceError("train: metrics write failed");
}

std::vector<std::pair<double, double>> probe_stdp_window(const StdpConfig& stdp,
                                                         const HybridRuleConfig& rule,
                                                         const std::vector<double>& grid_ms,
                                                         double dt_ms) {
  stdp.validate();
  rule.validate();
  if (rule.lambda >= 1.0)
    throw ConfigError("probe: lambda must be below 1 so the pairing term acts");
  if (dt_ms <= 0) throw ConfigError("probe: dt must be positive");
  std::vector<std::pair<double, double>> out;
  out.reserve(grid_ms.size());
  for (double lag : grid_ms) {
    const int k = int(std::llround(std::abs(lag) / dt_ms));
    const int pre_step = lag >= 0 ? 0 : k;
    const int post_step = lag >= 0 ? k : 0;
    StdpState st = zero_stdp(1, 1);
    VectorXd one = VectorXd::Ones(1), zero = VectorXd::Zero(1);
    for (int t = 0; t <= std::max(pre_step, post_step); ++t)
      stdp_trace_step(st, t == pre_step ? one : zero, t == post_step ? one : zero, stdp,
                      dt_ms);
    out.emplace_back(lag, hybrid_update(0.0, st.omega(0, 0), true, rule));
  }
  return out;
}

std::string probe_to_csv(const std::vector<std::pair<double, double>>& table) {
  std::ostringstream os;
  os << "delta_t_ms,delta_w\n";
  for (const auto& [lag, dw] : table) {
    char buf[80];
    std::snprintf(buf, sizeof buf, "%.9g,%.9g\n", lag, dw);
    os << buf;
  }
  return os.str();
}

std::pair<double, double> fit_exp_decay(const std::vector<std::pair<double, double>>& pts) {
  if (pts.size() < 2) throw std::invalid_argument("fit_exp_decay: need at least two points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [lag, value] : pts) {
    if (value == 0.0) throw std::invalid_argument("fit_exp_decay: zero value");
    const double y = std::log(std::abs(value));
    sx += lag;
    sy += y;
    sxx += lag * lag;
    sxy += lag * y;
  }
  const double n = double(pts.size());
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw std::invalid_argument("fit_exp_decay: degenerate abscissae");
  const double slope = (n * sxy - sx * sy) / denom;
  const double intercept = (sy - slope * sx) / n;
  if (slope >= 0.0) throw std::invalid_argument("fit_exp_decay: values do not decay");
  return {std::exp(intercept), -1.0 / slope};
}

}  // namespace sssm
