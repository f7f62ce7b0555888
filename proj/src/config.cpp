#include "sssm/config.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "sssm/errors.hpp"

namespace sssm {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

class KvReader {
 public:
  explicit KvReader(std::istream& in) {
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      std::string s = trim(line);
      if (s.empty()) continue;
      auto eq = s.find('=');
      if (eq == std::string::npos)
        throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
      std::string key = trim(s.substr(0, eq)), value = trim(s.substr(eq + 1));
      if (key.empty() || value.empty())
        throw ConfigError("config line " + std::to_string(lineno) + ": empty key or value");
      if (!kv_.emplace(key, value).second)
        throw ConfigError("config: repeated key '" + key + "'");
    }
  }

  template <typename T, typename Parse>
  void get(const std::string& key, T& out, Parse parse) {
    auto it = kv_.find(key);
    if (it == kv_.end()) return;
    out = parse(key, it->second);
    consumed_.insert(it->first);
  }

  void fail_on_unknown() const {
    for (const auto& [k, v] : kv_)
      if (!consumed_.count(k)) throw ConfigError("config: unknown key '" + k + "'");
  }

 private:
  std::map<std::string, std::string> kv_;
  std::set<std::string> consumed_;
};

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("config: key '" + key + "' expects a number, got '" + v + "'");
  }
}

std::int64_t parse_int(const std::string& key, const std::string& v) {
  std::int64_t out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size())
    throw ConfigError("config: key '" + key + "' expects an integer, got '" + v + "'");
  return out;
}

std::uint64_t parse_uint(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size())
    throw ConfigError("config: key '" + key + "' expects a non-negative integer, got '" + v +
                      "'");
  return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError("config: key '" + key + "' expects true/false, got '" + v + "'");
}

TaskKind parse_kind(const std::string& key, const std::string& v) {
  if (v == "delayed-copy") return TaskKind::DelayedCopy;
  if (v == "spike-pattern") return TaskKind::SpikePattern;
  if (v == "oscillatory-anomaly") return TaskKind::OscillatoryAnomaly;
  throw ConfigError("config: key '" + key +
                    "' expects delayed-copy | spike-pattern | oscillatory-anomaly");
}

SpikeMode parse_mode(const std::string& key, const std::string& v) {
  if (v == "hard") return SpikeMode::Hard;
  if (v == "smoothed") return SpikeMode::Smoothed;
  if (v == "bypass") return SpikeMode::Bypass;
  throw ConfigError("config: key '" + key + "' expects hard | smoothed | bypass");
}

const char* kind_name(TaskKind k) {
  switch (k) {
    case TaskKind::DelayedCopy: return "delayed-copy";
    case TaskKind::SpikePattern: return "spike-pattern";
    case TaskKind::OscillatoryAnomaly: return "oscillatory-anomaly";
  }
  return "?";
}

const char* mode_name(SpikeMode m) {
  switch (m) {
    case SpikeMode::Hard: return "hard";
    case SpikeMode::Smoothed: return "smoothed";
    case SpikeMode::Bypass: return "bypass";
  }
  return "?";
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

void RunConfig::validate() const {
  task.validate();
  net_config().validate();  // covers lif + dimensions
  stdp.validate();
  rule.validate();
  if (prune_enabled) prune.validate();
  if (steps == 0) throw ConfigError("run: steps must be positive");
  if (metric_interval <= 0) throw ConfigError("run: metric_interval must be positive");
}

NetConfig RunConfig::net_config() const {
  NetConfig nc;
  nc.n_in = task.dim;
  nc.n_state = n_state;
  nc.n_y = n_y;
  nc.n_r = n_r;
  nc.n_out = task.target_dim();
  nc.lif = lif;
  nc.encode_threshold = encode_threshold;
  nc.mode = mode;
  return nc;
}

std::string RunConfig::to_text() const {
  std::ostringstream os;
  os << "task.kind = " << kind_name(task.kind) << '\n'
     << "task.length = " << task.length << '\n'
     << "task.dim = " << task.dim << '\n'
     << "task.delay = " << task.delay << '\n'
     << "task.classes = " << task.classes << '\n'
     << "task.anomaly_rate = " << fmt(task.anomaly_rate) << '\n'
     << "task.seed = " << task.seed << '\n'
     << "net.n_state = " << n_state << '\n'
     << "net.n_y = " << n_y << '\n'
     << "net.n_r = " << n_r << '\n'
     << "net.encode_threshold = " << fmt(encode_threshold) << '\n'
     << "net.mode = " << mode_name(mode) << '\n'
     << "lif.dt = " << fmt(lif.dt) << '\n'
     << "lif.tau_m = " << fmt(lif.tau_m) << '\n'
     << "lif.tau_s = " << fmt(lif.tau_s) << '\n'
     << "lif.v_th = " << fmt(lif.v_th) << '\n'
     << "lif.v_reset = " << fmt(lif.v_reset) << '\n'
     << "lif.r_m = " << fmt(lif.r_m) << '\n'
     << "lif.surrogate_k = " << fmt(lif.surrogate_k) << '\n'
     << "stdp.a_plus = " << fmt(stdp.a_plus) << '\n'
     << "stdp.a_minus = " << fmt(stdp.a_minus) << '\n'
     << "stdp.tau_plus = " << fmt(stdp.tau_plus) << '\n'
     << "stdp.tau_minus = " << fmt(stdp.tau_minus) << '\n'
     << "rule.eta = " << fmt(rule.eta) << '\n'
     << "rule.lambda = " << fmt(rule.lambda) << '\n'
     << "rule.omega_scale = " << fmt(rule.omega_scale) << '\n'
     << "rule.stdp_enabled = " << (stdp_enabled ? "true" : "false") << '\n'
     << "prune.enabled = " << (prune_enabled ? "true" : "false") << '\n'
     << "prune.beta = " << fmt(prune.beta) << '\n'
     << "prune.gamma = " << fmt(prune.gamma) << '\n'
     << "prune.rho = " << fmt(prune.rho) << '\n'
     << "prune.interval = " << prune.interval << '\n'
     << "prune.dt_ctrl = " << fmt(prune.dt_ctrl) << '\n'
     << "prune.literal_orientation = " << (prune.literal_orientation ? "true" : "false")
     << '\n'
     << "run.steps = " << steps << '\n'
     << "run.metric_interval = " << metric_interval << '\n'
     << "run.checkpoint_interval = " << checkpoint_interval << '\n'
     << "run.seed = " << seed << '\n'
     << "run.measure_wall_time = " << (measure_wall_time ? "true" : "false") << '\n';
  return os.str();
}

RunConfig parse_config(std::istream& in) {
  KvReader kv(in);
  RunConfig c;
  kv.get("task.kind", c.task.kind, parse_kind);
  kv.get("task.length", c.task.length,
         [](const std::string& k, const std::string& v) { return int(parse_int(k, v)); });
  kv.get("task.dim", c.task.dim,
         [](const std::string& k, const std::string& v) { return int(parse_int(k, v)); });
  kv.get("task.delay", c.task.delay,
         [](const std::string& k, const std::string& v) { return int(parse_int(k, v)); });
  kv.get("task.classes", c.task.classes,
         [](const std::string& k, const std::string& v) { return int(parse_int(k, v)); });
  kv.get("task.anomaly_rate", c.task.anomaly_rate, parse_double);
  kv.get("task.seed", c.task.seed, parse_uint);
  auto as_int = [](const std::string& k, const std::string& v) { return int(parse_int(k, v)); };
  kv.get("net.n_state", c.n_state, as_int);
  kv.get("net.n_y", c.n_y, as_int);
  kv.get("net.n_r", c.n_r, as_int);
  kv.get("net.encode_threshold", c.encode_threshold, parse_double);
  kv.get("net.mode", c.mode, parse_mode);
  kv.get("lif.dt", c.lif.dt, parse_double);
  kv.get("lif.tau_m", c.lif.tau_m, parse_double);
  kv.get("lif.tau_s", c.lif.tau_s, parse_double);
  kv.get("lif.v_th", c.lif.v_th, parse_double);
  kv.get("lif.v_reset", c.lif.v_reset, parse_double);
  kv.get("lif.r_m", c.lif.r_m, parse_double);
  kv.get("lif.surrogate_k", c.lif.surrogate_k, parse_double);
  kv.get("stdp.a_plus", c.stdp.a_plus, parse_double);
  kv.get("stdp.a_minus", c.stdp.a_minus, parse_double);
  kv.get("stdp.tau_plus", c.stdp.tau_plus, parse_double);
  kv.get("stdp.tau_minus", c.stdp.tau_minus, parse_double);
  kv.get("rule.eta", c.rule.eta, parse_double);
  kv.get("rule.lambda", c.rule.lambda, parse_double);
  kv.get("rule.omega_scale", c.rule.omega_scale, parse_double);
  kv.get("rule.stdp_enabled", c.stdp_enabled, parse_bool);
  kv.get("prune.enabled", c.prune_enabled, parse_bool);
  kv.get("prune.beta", c.prune.beta, parse_double);
  kv.get("prune.gamma", c.prune.gamma, parse_double);
  kv.get("prune.rho", c.prune.rho, parse_double);
  kv.get("prune.interval", c.prune.interval, as_int);
  kv.get("prune.dt_ctrl", c.prune.dt_ctrl, parse_double);
  kv.get("prune.literal_orientation", c.prune.literal_orientation, parse_bool);
  kv.get("run.steps", c.steps, parse_uint);
  kv.get("run.metric_interval", c.metric_interval, as_int);
  kv.get("run.checkpoint_interval", c.checkpoint_interval, parse_uint);
  kv.get("run.seed", c.seed, parse_uint);
  kv.get("run.measure_wall_time", c.measure_wall_time, parse_bool);
  kv.fail_on_unknown();

  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return c;
}

RunConfig parse_config_text(const std::string& text) {
  std::istringstream is(text);
  return parse_config(is);
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("config: cannot open '" + path + "'");
  return parse_config(f);
}

}  // namespace sssm
