// manetsim: run one scenario or compare protocols over a seed sweep.
//
//   manetsim simulate <config> [--seed N] [--out FILE] [--trace FILE]
//   manetsim compare <config> --protocols dsr,nfpqr,nfpqr-clustered --seeds 1..20 --out DIR
//
// Exit status: 0 success, 2 configuration error, 3 invariant violation.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "manet/error.hpp"
#include "manet/experiment/config.hpp"
#include "manet/experiment/runner.hpp"

namespace fs = std::filesystem;
using namespace manet;

namespace {

constexpr int kConfigError = 2;
constexpr int kInvariantViolation = 3;

/// Writes to a sibling temporary, then renames over `path`.
void write_atomically(const fs::path& path, const std::string& content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw Error("cannot write " + tmp.string());
    out << content;
    if (!out.flush()) throw Error("cannot write " + tmp.string());
  }
  fs::rename(tmp, path);
}

void print_warnings(const experiment::ScenarioConfig& config) {
  for (const auto& w : config.warnings) std::cerr << "warning: " << w << '\n';
}

int simulate(const std::string& config_path, std::optional<std::uint64_t> seed,
             const std::string& out_path, const std::string& trace_path) {
  auto config = experiment::load_config(config_path);
  print_warnings(config);
  if (seed) config.seed = *seed;

  std::optional<std::ofstream> trace_file;
  fs::path trace_tmp;
  if (!trace_path.empty()) {
    trace_tmp = trace_path + ".tmp";
    trace_file.emplace(trace_tmp, std::ios::binary);
    if (!*trace_file) throw Error("cannot write " + trace_tmp.string());
  }
  const auto result = experiment::run_scenario(config, trace_file ? &*trace_file : nullptr);
  if (trace_file) {
    trace_file->close();
    fs::rename(trace_tmp, trace_path);
  }
  if (out_path.empty()) {
    std::cout << result.csv;
  } else {
    write_atomically(out_path, result.csv);
  }
  return 0;
}

int compare(const std::string& config_path, const std::string& protocols, const std::string& seeds_text,
            const std::string& out_dir, bool serial) {
  const auto base = experiment::load_config(config_path);
  print_warnings(base);
  std::vector<experiment::ScenarioConfig> configs;
  std::stringstream list(protocols);
  for (std::string name; std::getline(list, name, ',');) {
    const auto protocol = experiment::protocol_from(name);
    if (!protocol) throw InvalidValue("protocols", "unknown protocol '" + name + "'");
    auto c = base;
    c.protocol = *protocol;
    configs.push_back(std::move(c));
  }
  if (configs.empty()) throw InvalidValue("protocols", "no protocols given");
  const auto seeds = experiment::parse_seed_list(seeds_text);

  const auto report =
      experiment::compare(configs, seeds, serial ? topology::Backend::Serial : topology::Backend::OpenMP);

  const fs::path dir(out_dir);
  fs::create_directories(dir / "runs");
  for (std::size_t c = 0; c < report.runs.size(); ++c) {
    for (std::size_t s = 0; s < report.seeds.size(); ++s) {
      const auto name = report.labels[c] + "_seed" + std::to_string(report.seeds[s]) + ".csv";
      write_atomically(dir / "runs" / name, report.runs[c][s].csv);
    }
  }
  std::ostringstream merged;
  experiment::write_comparison_csv(merged, report);
  write_atomically(dir / "results.csv", merged.str());
  std::ostringstream summary;
  experiment::write_win_summary(summary, report);
  write_atomically(dir / "summary.csv", summary.str());
  std::cout << summary.str();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Packet-level MANET simulator: DSR, NFPQR and clustered NFPQR"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_path;
  std::string trace_path;
  auto* sim = app.add_subcommand("simulate", "Run one scenario and print or write its CSV");
  sim->add_option("config", config_path, "Scenario config file")->required();
  sim->add_option("--seed", seed, "Override the config seed");
  sim->add_option("--out", out_path, "CSV output file (default: stdout)");
  sim->add_option("--trace", trace_path, "Write the tab-separated event trace here");

  std::string cmp_config;
  std::string protocols = "dsr,nfpqr,nfpqr-clustered";
  std::string seeds = "1..20";
  std::string out_dir;
  bool serial = false;
  auto* cmp = app.add_subcommand("compare", "Run several protocols over a seed sweep");
  cmp->add_option("config", cmp_config, "Scenario config file")->required();
  cmp->add_option("--protocols", protocols, "Comma-separated protocol list");
  cmp->add_option("--seeds", seeds, "Seeds, e.g. 1..20 or 1,5,9");
  cmp->add_option("--out", out_dir, "Output directory")->required();
  cmp->add_flag("--serial", serial, "Run the sweep on one thread");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*sim) return simulate(config_path, seed, out_path, trace_path);
    return compare(cmp_config, protocols, seeds, out_dir, serial);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const ParseError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const NotConnected& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const InvariantViolation& e) {
    std::cerr << "invariant violation: " << e.what() << '\n';
    return kInvariantViolation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
