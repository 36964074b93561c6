#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "airfed/config.hpp"
#include "airfed/trainer.hpp"

namespace {

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::logic_error&) {
      used = 0;
    }
    if (used == 0 || item.find_first_not_of(" \t", used) != std::string::npos) {
      throw airfed::ConfigError("bias_factors", "cannot parse '" + item + "'");
    }
    out.push_back(v);
  }
  if (out.empty()) throw airfed::ConfigError("bias_factors", "empty list");
  return out;
}

std::string sweep_output_path(const std::string& base, double c) {
  const std::filesystem::path p(base);
  auto name = fmt::format("{}_C{}{}", p.stem().string(), c, p.extension().string());
  return (p.parent_path() / name).string();
}

void summarize(const airfed::SimConfig& cfg, const std::vector<airfed::RoundRecord>& history) {
  if (history.empty()) {
    std::cout << cfg.output_path << ": no rounds\n";
    return;
  }
  const auto& last = history.back();
  std::cout << fmt::format("{}: policy={} C={} rounds={} avg_acc={:.4f} worst_acc={:.4f} std={:.4f} energy={:.6g} J\n",
                           cfg.output_path, airfed::to_string(cfg.policy), cfg.bias_factor, history.size(),
                           last.avg_accuracy, last.worst_accuracy, last.accuracy_std, last.cumulative_energy_j);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Channel-aware distributionally robust federated learning over an AirComp uplink"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::string> policy;
  std::optional<double> bias_factor;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_path;
  std::string bias_factors;

  auto* run_cmd = app.add_subcommand("run", "Run one simulation and write the per-round table");
  run_cmd->add_option("--config", config_path, "JSON configuration file")->required();
  run_cmd->add_option("--policy", policy, "fedavg | afl | ca_afl | greedy_topk");
  run_cmd->add_option("--bias-factor", bias_factor, "Energy-conservation factor C");
  run_cmd->add_option("--seed", seed, "Random seed");
  run_cmd->add_option("--out", out_path, "Output CSV path");

  auto* sweep_cmd = app.add_subcommand("sweep", "Run once per bias factor, one output file each");
  sweep_cmd->add_option("--config", config_path, "JSON configuration file")->required();
  sweep_cmd->add_option("--bias-factors", bias_factors, "Comma-separated list of C values")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    airfed::SimConfig cfg = airfed::load_config(config_path);

    if (run_cmd->parsed()) {
      if (policy) cfg.policy = airfed::parse_policy(*policy);
      if (bias_factor) cfg.bias_factor = *bias_factor;
      if (seed) cfg.seed = *seed;
      if (out_path) cfg.output_path = *out_path;
      airfed::validate(cfg);
      summarize(cfg, airfed::run(cfg));
      return 0;
    }

    const std::string base = cfg.output_path;
    for (double c : parse_list(bias_factors)) {
      airfed::SimConfig one = cfg;
      one.bias_factor = c;
      one.output_path = sweep_output_path(base, c);
      airfed::validate(one);
      summarize(one, airfed::run(one));
    }
  } catch (const std::exception& e) {
    std::cerr << "airfed: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
