// qdiff: precision limits for momentum-diffusion estimation from freely
// expanding Gaussian wavepackets, Monte Carlo validation, and collapse-model
// exclusion curves.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "qdiff/errors.hpp"
#include "qdiff/run.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitDegenerate = 3;

qdiff::cli::Config load_config(const std::string& config_path,
                               const std::vector<std::string>& overrides) {
  qdiff::cli::Config cfg;
  if (!config_path.empty()) cfg = qdiff::cli::parse_config_file(config_path);
  for (const auto& kv : overrides) qdiff::cli::apply_override(cfg, kv);
  return cfg;
}

int write_output(const qdiff::cli::Config& cfg, const std::string& cli_output,
                 const std::function<void(std::ostream&)>& writer) {
  const std::string path = !cli_output.empty() ? cli_output : cfg.output;
  if (path.empty() || path == "-") {
    writer(std::cout);
    return 0;
  }
  std::ostringstream buf;
  writer(buf);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::invalid_argument("config: cannot open output file '" + path + "'");
  f << buf.str();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"precision limits for momentum-diffusion estimation"};
  app.require_subcommand(1);

  std::string config_path, output_path;
  std::vector<std::string> overrides;
  bool as_json = false;
  app.add_option("-c,--config", config_path, "configuration file (key = value lines)");
  app.add_option("-s,--set", overrides, "override a config key, e.g. --set 'lambda = 1e15 /m^2/s'");
  app.add_option("-o,--output", output_path, "output file ('-' for stdout)");

  auto* cmd_bound = app.add_subcommand("bound", "bounds and optimal angles at one point");
  cmd_bound->add_flag("--json", as_json, "machine-readable output");
  auto* cmd_sweep = app.add_subcommand("sweep", "parameter sweep to CSV");
  auto* cmd_csl = app.add_subcommand("csl", "minimum detectable collapse rate curves to CSV");
  auto* cmd_mc = app.add_subcommand("montecarlo", "maximum-likelihood saturation study");

  CLI11_PARSE(app, argc, argv);

  try {
    const auto cfg = load_config(config_path, overrides);
    if (cmd_bound->parsed())
      return write_output(cfg, output_path,
                          [&](std::ostream& os) { qdiff::cli::run_bound(cfg, os, as_json); });
    if (cmd_sweep->parsed())
      return write_output(cfg, output_path,
                          [&](std::ostream& os) { qdiff::cli::run_sweep(cfg, os); });
    if (cmd_csl->parsed())
      return write_output(cfg, output_path,
                          [&](std::ostream& os) { qdiff::cli::run_csl(cfg, os); });
    if (cmd_mc->parsed())
      return write_output(cfg, output_path,
                          [&](std::ostream& os) { qdiff::cli::run_montecarlo(cfg, os); });
  } catch (const qdiff::degenerate_error& e) {
    std::cerr << "degenerate regime: " << e.what() << "\n";
    return kExitDegenerate;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
