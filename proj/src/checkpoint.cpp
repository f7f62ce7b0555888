#include "sssm/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include "sssm/errors.hpp"

namespace sssm {

namespace {

constexpr char kMagic[8] = {'S', 'S', 'S', 'M', 'C', 'K', 'P', 'T'};
constexpr std::uint32_t kVersion = 1;

class Blob {
 public:
  void put_u32(std::uint32_t v) { put_raw(&v, sizeof v); }
  void put_u64(std::uint64_t v) { put_raw(&v, sizeof v); }
  void put_f64(double v) { put_raw(&v, sizeof v); }
  void put_vec(const VectorXd& v) {
    put_u64(std::uint64_t(v.size()));
    put_raw(v.data(), sizeof(double) * std::size_t(v.size()));
  }
  void put_mat(const MatrixXd& m) {  // column-major, matching Eigen storage
    put_u64(std::uint64_t(m.rows()));
    put_u64(std::uint64_t(m.cols()));
    put_raw(m.data(), sizeof(double) * std::size_t(m.size()));
  }
  const std::string& data() const { return buf_; }

 private:
  void put_raw(const void* p, std::size_t n) {
    buf_.append(static_cast<const char*>(p), n);
  }
  std::string buf_;
};

class BlobReader {
 public:
  BlobReader(const std::string& name, const std::string& buf) : name_(name), buf_(buf) {}
  std::uint32_t get_u32() { return get<std::uint32_t>(); }
  std::uint64_t get_u64() { return get<std::uint64_t>(); }
  double get_f64() { return get<double>(); }
  VectorXd get_vec() {
    const auto n = get_u64();
    need(sizeof(double) * n);
    VectorXd v(static_cast<Eigen::Index>(n));
    std::memcpy(v.data(), buf_.data() + pos_, sizeof(double) * n);
    pos_ += sizeof(double) * n;
    return v;
  }
  MatrixXd get_mat() {
    const auto rows = get_u64(), cols = get_u64();
    need(sizeof(double) * rows * cols);
    MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    std::memcpy(m.data(), buf_.data() + pos_, sizeof(double) * rows * cols);
    pos_ += sizeof(double) * rows * cols;
    return m;
  }
  void expect_done() const {
    if (pos_ != buf_.size())
      throw FormatError("checkpoint: trailing bytes in section '" + name_ + "'");
  }

 private:
  template <typename T>
  T get() {
    need(sizeof(T));
    T v;
    std::memcpy(&v, buf_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  void need(std::size_t n) const {
    if (pos_ + n > buf_.size())
      throw FormatError("checkpoint: section '" + name_ + "' truncated");
  }
  std::string name_;
  const std::string& buf_;
  std::size_t pos_ = 0;
};

void write_section(std::ostream& os, const std::string& name, const std::string& payload) {
  std::uint32_t nlen = std::uint32_t(name.size());
  os.write(reinterpret_cast<const char*>(&nlen), sizeof nlen);
  os.write(name.data(), nlen);
  std::uint64_t plen = payload.size();
  os.write(reinterpret_cast<const char*>(&plen), sizeof plen);
  os.write(payload.data(), std::streamsize(plen));
}

}  // namespace

void write_checkpoint(std::ostream& os, const Checkpoint& c) {
  os.write(kMagic, sizeof kMagic);
  std::uint32_t ver = kVersion;
  os.write(reinterpret_cast<const char*>(&ver), sizeof ver);

  write_section(os, "config", c.config_text);

  Blob counters;
  counters.put_u64(c.step);
  counters.put_u64(c.episode);
  counters.put_u64(c.ep_step);
  counters.put_u64(c.spikes);
  counters.put_u64(c.synops);
  counters.put_f64(c.window_loss_sum);
  counters.put_f64(c.window_acc_sum);
  counters.put_u64(c.window_loss_count);
  counters.put_u64(c.window_acc_count);
  counters.put_f64(c.wall_ms);
  write_section(os, "counters", counters.data());

  Blob params;
  params.put_vec(c.ssm_theta);
  params.put_mat(c.w_readout);
  params.put_mat(c.w_dec);
  params.put_vec(c.b_dec);
  write_section(os, "params", params.data());

  Blob prune;
  prune.put_mat(c.mask);
  prune.put_f64(c.prune_theta);
  for (int i = 0; i < 4; ++i) prune.put_u64(c.prune_rng.counter[i]);
  for (int i = 0; i < 2; ++i) prune.put_u64(c.prune_rng.key[i]);
  prune.put_u64(c.prune_rng.pos);
  write_section(os, "pruning", prune.data());

  Blob state;
  state.put_vec(c.state_x);
  state.put_vec(c.state_p);
  state.put_vec(c.state_v);
  state.put_vec(c.state_r);
  write_section(os, "state", state.data());

  Blob sens;
  sens.put_mat(c.sens_ex);
  sens.put_mat(c.sens_ep);
  sens.put_mat(c.sens_ev);
  sens.put_mat(c.sens_er);
  write_section(os, "sensitivity", sens.data());

  Blob stdp;
  stdp.put_vec(c.stdp_pre);
  stdp.put_vec(c.stdp_post);
  stdp.put_mat(c.stdp_omega);
  write_section(os, "stdp", stdp.data());

  if (!os) throw ResourceError("checkpoint: write failed");
}

Checkpoint read_checkpoint(std::istream& is) {
  char magic[8];
  if (!is.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof magic) != 0)
    throw FormatError("checkpoint: bad magic (not a checkpoint file)");
  std::uint32_t ver = 0;
  if (!is.read(reinterpret_cast<char*>(&ver), sizeof ver))
    throw FormatError("checkpoint: truncated before version");
  if (ver != kVersion)
    throw FormatError("checkpoint: format version " + std::to_string(ver) +
                      " unsupported; this build reads version " + std::to_string(kVersion));

  std::map<std::string, std::string> sections;
  for (;;) {
    std::uint32_t nlen = 0;
    if (!is.read(reinterpret_cast<char*>(&nlen), sizeof nlen)) {
      if (is.eof()) break;
      throw FormatError("checkpoint: unreadable section header");
    }
    if (nlen > 4096) throw FormatError("checkpoint: implausible section name length");
    std::string name(nlen, '\0');
    if (!is.read(name.data(), nlen)) throw FormatError("checkpoint: truncated section name");
    std::uint64_t plen = 0;
    if (!is.read(reinterpret_cast<char*>(&plen), sizeof plen))
      throw FormatError("checkpoint: truncated section '" + name + "' length");
    std::string payload(plen, '\0');
    if (!is.read(payload.data(), std::streamsize(plen)))
      throw FormatError("checkpoint: truncated section '" + name + "' payload");
    sections[name] = std::move(payload);
  }

  auto section = [&](const char* name) -> const std::string& {
    auto it = sections.find(name);
    if (it == sections.end())
      throw FormatError(std::string("checkpoint: missing section '") + name + "'");
    return it->second;
  };

  Checkpoint c;
  c.config_text = section("config");

  BlobReader counters("counters", section("counters"));
  c.step = counters.get_u64();
  c.episode = counters.get_u64();
  c.ep_step = counters.get_u64();
  c.spikes = counters.get_u64();
  c.synops = counters.get_u64();
  c.window_loss_sum = counters.get_f64();
  c.window_acc_sum = counters.get_f64();
  c.window_loss_count = counters.get_u64();
  c.window_acc_count = counters.get_u64();
  c.wall_ms = counters.get_f64();
  counters.expect_done();

  BlobReader params("params", section("params"));
  c.ssm_theta = params.get_vec();
  c.w_readout = params.get_mat();
  c.w_dec = params.get_mat();
  c.b_dec = params.get_vec();
  params.expect_done();

  BlobReader prune("pruning", section("pruning"));
  c.mask = prune.get_mat();
  c.prune_theta = prune.get_f64();
  for (int i = 0; i < 4; ++i) c.prune_rng.counter[i] = prune.get_u64();
  for (int i = 0; i < 2; ++i) c.prune_rng.key[i] = prune.get_u64();
  c.prune_rng.pos = prune.get_u64();
  prune.expect_done();

  BlobReader state("state", section("state"));
  c.state_x = state.get_vec();
  c.state_p = state.get_vec();
  c.state_v = state.get_vec();
  c.state_r = state.get_vec();
  state.expect_done();

  BlobReader sens("sensitivity", section("sensitivity"));
  c.sens_ex = sens.get_mat();
  c.sens_ep = sens.get_mat();
  c.sens_ev = sens.get_mat();
  c.sens_er = sens.get_mat();
  sens.expect_done();

  BlobReader stdp("stdp", section("stdp"));
  c.stdp_pre = stdp.get_vec();
  c.stdp_post = stdp.get_vec();
  c.stdp_omega = stdp.get_mat();
  stdp.expect_done();

  return c;
}

void save_checkpoint(const std::string& path, const Checkpoint& c) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw ResourceError("checkpoint: cannot open '" + path + "' for writing");
  write_checkpoint(f, c);
  f.flush();
  if (!f) throw ResourceError("checkpoint: write to '" + path + "' failed");
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw FormatError("checkpoint: cannot open '" + path + "'");
  return read_checkpoint(f);
}

}  // namespace sssm
