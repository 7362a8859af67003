#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fedrec/pipeline.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitChain = 3;

fedrec::Ledger::Clock clock_mode() {
  const char* v = std::getenv("FEDREC_LOGICAL_CLOCK");
  return (v && std::string(v) == "1") ? fedrec::Ledger::Clock::Logical
                                      : fedrec::Ledger::Clock::Wall;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fedrec: auction-driven federated recommendation simulator"};
  app.require_subcommand(1);

  std::string config_path, scenario_path, out_dir, chain_path, store_dir;
  std::string mechanism = "d3qn";
  std::uint64_t seed = 42;
  bool have_seed = false, have_mechanism = false, have_out = false;
  std::vector<std::string> report_paths;

  auto* sim = app.add_subcommand("simulate", "run the full three-phase pipeline");
  sim->add_option("--config", config_path, "experiment config file")->required();
  sim->add_option("--seed", seed)->trigger_on_parse()->each([&](const std::string&) {
    have_seed = true;
  });
  sim->add_option("--mechanism", mechanism)
      ->check(CLI::IsMember({"d3qn", "simple", "greedy-all"}))
      ->each([&](const std::string&) { have_mechanism = true; });
  sim->add_option("--out", out_dir)->each([&](const std::string&) { have_out = true; });

  auto* auc = app.add_subcommand("auction", "run one auction mechanism on a scenario file");
  auc->add_option("--scenario", scenario_path, "scenario file")->required();
  auc->add_option("--mechanism", mechanism)
      ->check(CLI::IsMember({"d3qn", "simple", "greedy-all"}));
  auc->add_option("--seed", seed);

  auto* ver = app.add_subcommand("verify", "verify a chain file (and optional payload store)");
  ver->add_option("chain", chain_path, "chain file")->required();
  ver->add_option("--store", store_dir, "content-addressed payload directory");

  auto* plot = app.add_subcommand("plot", "merge reports into plot-ready tables");
  plot->add_option("reports", report_paths, "report.txt paths")->required();
  plot->add_option("--out", out_dir)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) ? kExitUsage : kExitOk;
  }

  try {
    if (sim->parsed()) {
      fedrec::ExperimentConfig cfg = fedrec::load_config(config_path);
      if (have_seed) cfg.seed = seed;
      if (have_mechanism) cfg.mechanism = fedrec::parse_mechanism(mechanism);
      if (have_out) cfg.out_dir = out_dir;
      fedrec::ExperimentReport report = fedrec::cmd_simulate(cfg, clock_mode());
      std::cout << "mechanism=" << report.mechanism << " selected=" << report.selected.size()
                << " surplus=" << report.surplus << " hr10=" << report.hr10
                << " ndcg10=" << report.ndcg10 << " mse=" << report.mse << "\n"
                << "report written to " << cfg.out_dir << "\n";
      return kExitOk;
    }
    if (auc->parsed()) {
      fedrec::Scenario sc = fedrec::load_scenario(scenario_path);
      fedrec::D3QNConfig d3qn;
      fedrec::AuctionReport report =
          fedrec::cmd_auction(sc, fedrec::parse_mechanism(mechanism), d3qn, seed);
      std::cout << fedrec::format_auction_report(report, sc.profiles);
      return kExitOk;
    }
    if (ver->parsed()) {
      fedrec::VerifyResult result = fedrec::cmd_verify(chain_path, store_dir);
      if (result.ok) {
        std::cout << result.message << "\n";
        return kExitOk;
      }
      std::cerr << result.message << "\n";
      return kExitChain;
    }
    if (plot->parsed()) {
      fedrec::cmd_plot(report_paths, out_dir);
      std::cout << "tables written to " << out_dir << "\n";
      return kExitOk;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}
