// Command-line front end: train / verify / probe-stdp / report.
// Exit codes: 0 ok, 1 bad configuration or input, 2 numeric divergence,
// 3 verification failure.
#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "sssm/config.hpp"
#include "sssm/errors.hpp"
#include "sssm/metrics.hpp"
#include "sssm/train.hpp"
#include "sssm/verify.hpp"

namespace {

std::vector<double> parse_grid(const std::string& csv) {
  std::vector<double> grid;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw sssm::ConfigError("--grid: not a number: '" + item + "'");
    }
    while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
    if (used != item.size())
      throw sssm::ConfigError("--grid: trailing junk in '" + item + "'");
    grid.push_back(v);
  }
  if (grid.empty()) throw sssm::ConfigError("--grid: empty lag list");
  return grid;
}

int run_verify(const std::string& suite) {
  std::vector<sssm::VerifyResult> results;
  auto append = [&](std::vector<sssm::VerifyResult> r) {
    results.insert(results.end(), r.begin(), r.end());
  };
  if (suite == "rtrl" || suite == "all") append(sssm::verify_rtrl());
  if (suite == "stdp" || suite == "all") append(sssm::verify_stdp());
  if (suite == "pruning" || suite == "all") append(sssm::verify_pruning());
  std::cout << sssm::format_results(results);
  return sssm::all_pass(results) ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"selective state-space model with spiking readout: online-learning lab"};
  app.require_subcommand(1);

  std::string config_path, out_dir, resume_path, suite = "all", grid_csv, run_dir;

  auto* train = app.add_subcommand("train", "run online training");
  train->add_option("--config", config_path, "configuration file")->required();
  train->add_option("--out", out_dir, "output directory")->required();
  train->add_option("--resume", resume_path, "checkpoint to resume from");

  auto* verify = app.add_subcommand("verify", "run the verification suites");
  verify->add_option("--suite", suite, "rtrl | stdp | pruning | all")
      ->check(CLI::IsMember({"rtrl", "stdp", "pruning", "all"}));

  auto* probe = app.add_subcommand("probe-stdp", "map the pair-based weight-change window");
  probe->add_option("--config", config_path, "configuration file")->required();
  probe->add_option("--grid", grid_csv, "comma-separated lags in ms")->required();

  auto* report = app.add_subcommand("report", "summarize a finished run");
  report->add_option("--run", run_dir, "run directory (holding metrics.csv)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (train->parsed()) {
      sssm::RunConfig cfg = sssm::load_config_file(config_path);
      sssm::train_online(cfg, out_dir, resume_path);
      return 0;
    }
    if (verify->parsed()) return run_verify(suite);
    if (probe->parsed()) {
      sssm::RunConfig cfg = sssm::load_config_file(config_path);
      auto table = sssm::probe_stdp_window(cfg.stdp, cfg.rule, parse_grid(grid_csv), cfg.lif.dt);
      std::cout << sssm::probe_to_csv(table);
      return 0;
    }
    if (report->parsed()) {
      auto records = sssm::load_metrics_file(run_dir + "/metrics.csv");
      std::cout << sssm::format_energy_report(sssm::energy_report(records));
      return 0;
    }
  } catch (const sssm::NumericError& e) {
    std::cerr << "numeric divergence: " << e.what() << '\n';
    return 2;
  } catch (const sssm::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 1;
  } catch (const sssm::FormatError& e) {
    std::cerr << "input format error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
