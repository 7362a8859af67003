#pragma once

#include <string>
#include <vector>

#include "fedrec/auction.hpp"
#include "fedrec/config.hpp"
#include "fedrec/federation.hpp"
#include "fedrec/ledger.hpp"

namespace fedrec {

struct ExperimentReport {
  std::string mechanism;
  std::uint64_t seed = 0;
  int n_clients = 0;
  std::vector<int> selected;
  double surplus = 0;
  double total_payments = 0;
  double per_unit_surplus = 0;  // surplus / total payments, when payments > 0
  std::vector<double> round_loss;
  double hr10 = 0;
  double ndcg10 = 0;
  double mse = 0;
  std::string chain_head;
  std::string eval_scope = "all-clients";
};

// A client roster plus the auction-facing profiles derived from it.
struct SimulationSetup {
  std::vector<ClientState> clients;
  std::vector<ClientProfile> profiles;
  RatingHistogram global_hist;
  int n_users = 0;
  int n_items = 0;
};

// Loads (or synthesizes) interactions, partitions them, splits
// leave-one-out, samples negatives, and derives (s_i, sigma_i, b_i).
SimulationSetup build_setup(const ExperimentConfig& cfg);

AuctionOutcome run_mechanism(Mechanism mechanism, const std::vector<ClientProfile>& profiles,
                             const SurplusModel& model, const D3QNConfig& d3qn,
                             std::uint64_t seed);

// The three-phase pipeline: auction, federated training with on-chain
// evidence, settlement, then evaluation. Artifacts (report, tables, chain,
// payload store) land in cfg.out_dir.
ExperimentReport cmd_simulate(const ExperimentConfig& cfg, Ledger::Clock clock = Ledger::Clock::Wall);

struct AuctionReport {
  AuctionOutcome outcome;
  double per_unit_surplus = 0;
  bool has_optimum = false;
  double optimum = 0;
};

AuctionReport cmd_auction(const Scenario& scenario, Mechanism mechanism, const D3QNConfig& d3qn,
                          std::uint64_t seed);

// Exit-status semantics of the verify subcommand: ok == true means exit 0.
struct VerifyResult {
  bool ok = true;
  std::string message;
};

VerifyResult cmd_verify(const std::string& chain_path, const std::string& store_dir = "");

void write_report(const std::string& dir, const ExperimentReport& report);
ExperimentReport read_report(const std::string& path);

// Merges reports into plot-ready tables: a loss-vs-round table with one
// column per mechanism and a surplus bar table.
void cmd_plot(const std::vector<std::string>& report_paths, const std::string& out_dir);

std::string format_auction_report(const AuctionReport& report,
                                  const std::vector<ClientProfile>& profiles);

}  // namespace fedrec
