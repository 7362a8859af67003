#include "fedrec/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "fedrec/metrics.hpp"
#include "fedrec/synth.hpp"

namespace fedrec {

namespace fs = std::filesystem;

SimulationSetup build_setup(const ExperimentConfig& cfg) {
  SimulationSetup setup;

  std::vector<Interaction> interactions;
  if (cfg.dataset == "synthetic") {
    interactions = generate_ratings(cfg.synth, derive_seed(cfg.seed, 0xda7a));
    setup.n_users = cfg.synth.n_users;
    setup.n_items = cfg.synth.n_items;
  } else {
    LoadResult loaded = load_movielens(cfg.dataset);
    interactions = std::move(loaded.interactions);
    setup.n_users = loaded.remap.n_users;
    setup.n_items = loaded.remap.n_items;
  }
  setup.global_hist = rating_histogram(interactions);

  auto partitions = partition_clients(interactions, cfg.n_clients, cfg.skew, cfg.seed);

  std::mt19937_64 bid_rng(derive_seed(cfg.seed, 0xb1d));
  std::uniform_real_distribution<double> unoise(-1.0, 1.0);

  for (const auto& part : partitions) {
    ClientState client;
    client.client_id = part.client_id;
    auto split = leave_one_out_split(part);
    client.train_raw = split.train;
    client.test = split.test;
    client.train = sample_negatives(split.train, cfg.hyper.neg_ratio, setup.n_items,
                                    derive_seed(cfg.seed, 0x4e9 + part.client_id));

    ClientProfile profile;
    profile.client_id = part.client_id;
    profile.dataset_size = static_cast<long long>(split.train.size());
    profile.emd = emd(rating_histogram(split.train), setup.global_hist);
    profile.bid = cfg.bids.base_cost *
                  std::pow(static_cast<double>(profile.dataset_size), cfg.bids.rho) *
                  (1.0 + cfg.bids.noise * unoise(bid_rng));
    setup.profiles.push_back(profile);
    setup.clients.push_back(std::move(client));
  }

  // scenario files may override the declared profiles
  if (!cfg.scenario.empty()) {
    Scenario sc = load_scenario(cfg.scenario);
    if (sc.profiles.size() != setup.profiles.size())
      throw std::runtime_error("scenario client count does not match the partition");
    setup.profiles = sc.profiles;
  }

  // server initializes the shared parameters once; every client keeps its
  // own user embeddings
  NeuMFParams server = init_params(setup.n_users, setup.n_items, cfg.hyper, cfg.seed);
  SharedParams shared0 = extract_shared(server);
  for (auto& client : setup.clients) {
    client.params = init_params(setup.n_users, setup.n_items, cfg.hyper,
                                derive_seed(cfg.seed, 0xc11e47 + client.client_id));
    apply_global(client.params, shared0);
  }
  return setup;
}

AuctionOutcome run_mechanism(Mechanism mechanism, const std::vector<ClientProfile>& profiles,
                             const SurplusModel& model, const D3QNConfig& d3qn,
                             std::uint64_t seed) {
  switch (mechanism) {
    case Mechanism::Simple: return simple_auction(profiles, model);
    case Mechanism::GreedyAll: return greedy_all(profiles, model);
    case Mechanism::D3qn: {
      QNetwork net = train_agent(profiles, model, d3qn, seed);
      return greedy_rollout(net, profiles, model);
    }
  }
  throw std::logic_error("unreachable mechanism");
}

namespace {

std::vector<std::uint8_t> text_payload(const std::string& text) {
  return std::vector<std::uint8_t>(text.begin(), text.end());
}

std::string selection_csv(const std::vector<int>& ids) {
  std::string s;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(ids[i]);
  }
  return s;
}

std::string auction_payload_text(const AuctionOutcome& outcome) {
  std::ostringstream os;
  os.precision(17);
  os << "selection ";
  for (auto b : outcome.selection) os << static_cast<int>(b);
  os << "\nsurplus " << outcome.surplus << "\n";
  for (const auto& [id, amount] : outcome.payments)
    os << "payment " << id << " " << amount << "\n";
  for (const auto& step : outcome.trace)
    os << "step " << step.action << " " << step.reward << "\n";
  return os.str();
}

}  // namespace

ExperimentReport cmd_simulate(const ExperimentConfig& cfg, Ledger::Clock clock) {
  SimulationSetup setup = build_setup(cfg);

  fs::create_directories(cfg.out_dir);
  Ledger ledger(clock);
  ledger.set_store_dir(fs::path(cfg.out_dir) / "payloads");

  // phase 1: auction
  AuctionOutcome outcome =
      run_mechanism(cfg.mechanism, setup.profiles, cfg.surplus_model, cfg.d3qn, cfg.seed);
  ledger.append(PayloadType::AuctionResult, kServerActor, -1,
                text_payload(auction_payload_text(outcome)));

  std::vector<int> selected_ids;
  for (std::size_t i = 0; i < outcome.selection.size(); ++i)
    if (outcome.selection[i]) selected_ids.push_back(setup.profiles[i].client_id);
  if (selected_ids.empty())
    throw std::runtime_error("auction selected no clients; nothing to train");

  // phase 2: federated training with on-chain evidence
  FederationResult fed = run_federation(setup.clients, selected_ids, cfg.rounds, cfg.hyper,
                                        ledger, cfg.seed);

  // phase 3: pay-as-bid settlement
  double total_payments = 0;
  for (const auto& [id, amount] : outcome.payments) {
    std::ostringstream os;
    os.precision(17);
    os << "client " << id << " amount " << amount;
    ledger.append(PayloadType::Payment, id, cfg.rounds, text_payload(os.str()));
    total_payments += amount;
  }

  // evaluation over all clients with the final global model applied
  std::vector<int> ranks;
  std::vector<std::pair<double, double>> mse_pairs;
  for (auto& client : setup.clients) {
    apply_global(client.params, fed.shared);
    for (const auto& t : client.test) {
      auto candidates =
          sample_eval_candidates(t.user_id, t.item_id, client.train_raw, cfg.eval_candidates,
                                 setup.n_items, derive_seed(cfg.seed, 0xe7a1));
      std::vector<int> users(candidates.size(), t.user_id);
      Eigen::VectorXd scores = forward_batch(client.params, users, candidates);
      ranks.push_back(rank_of_test_item(candidates, scores, t.item_id));
      mse_pairs.emplace_back(forward(client.params, t.user_id, t.item_id),
                             t.rating / kRatingMax);
    }
  }

  ExperimentReport report;
  report.mechanism = mechanism_name(cfg.mechanism);
  report.seed = cfg.seed;
  report.n_clients = cfg.n_clients;
  report.selected = selected_ids;
  report.surplus = outcome.surplus;
  report.total_payments = total_payments;
  report.per_unit_surplus = total_payments > 0 ? outcome.surplus / total_payments : 0.0;
  for (const auto& m : fed.metrics) report.round_loss.push_back(m.global_loss);
  report.hr10 = ranks.empty() ? 0.0 : hr_at_k(ranks, 10);
  report.ndcg10 = ranks.empty() ? 0.0 : ndcg_at_k(ranks, 10);
  report.mse = mse_pairs.empty() ? 0.0 : mse(mse_pairs);
  report.chain_head = ledger.blocks().empty() ? "" : hex(ledger.blocks().back().block_hash);

  ledger.save(fs::path(cfg.out_dir) / "chain.bin");
  write_report(cfg.out_dir, report);
  return report;
}

AuctionReport cmd_auction(const Scenario& scenario, Mechanism mechanism, const D3QNConfig& d3qn,
                          std::uint64_t seed) {
  AuctionReport r;
  r.outcome = run_mechanism(mechanism, scenario.profiles, scenario.model, d3qn, seed);
  double paid = 0;
  for (const auto& [id, amount] : r.outcome.payments) paid += amount;
  r.per_unit_surplus = paid > 0 ? r.outcome.surplus / paid : 0.0;
  if (scenario.profiles.size() <= 20) {
    r.has_optimum = true;
    r.optimum = brute_force_optimal(scenario.profiles, scenario.model).surplus;
  }
  return r;
}

std::string format_auction_report(const AuctionReport& report,
                                  const std::vector<ClientProfile>& profiles) {
  std::ostringstream os;
  os.precision(10);
  os << "selection = ";
  for (auto b : report.outcome.selection) os << static_cast<int>(b);
  os << "\nsurplus = " << report.outcome.surplus;
  os << "\nper_unit_surplus = " << report.per_unit_surplus << "\n";
  for (const auto& [id, amount] : report.outcome.payments)
    os << "payment " << id << " " << amount << "\n";
  for (const auto& step : report.outcome.trace)
    os << "step " << step.action << " reward " << step.reward << "\n";
  if (report.has_optimum) {
    os << "brute_force_optimum = " << report.optimum << "\n";
    if (report.optimum != 0)
      os << "optimum_ratio = " << report.outcome.surplus / report.optimum << "\n";
  }
  (void)profiles;
  return os.str();
}

VerifyResult cmd_verify(const std::string& chain_path, const std::string& store_dir) {
  VerifyResult result;
  if (!fs::exists(chain_path)) throw std::runtime_error("cannot read chain file: " + chain_path);
  Ledger ledger;
  try {
    ledger = Ledger::load(chain_path);
  } catch (const std::exception& e) {
    // a chain file that no longer parses is itself evidence of tampering
    result.ok = false;
    result.message = std::string("chain violation: ") + e.what();
    return result;
  }
  std::optional<fs::path> store;
  if (!store_dir.empty()) store = fs::path(store_dir);
  if (auto violation = verify_chain(ledger.blocks(), store)) {
    result.ok = false;
    result.message = "chain violation at block " + std::to_string(violation->index) + ": " +
                     violation->reason;
  } else {
    result.message = "chain ok (" + std::to_string(ledger.blocks().size()) + " blocks)";
  }
  return result;
}

void write_report(const std::string& dir, const ExperimentReport& report) {
  fs::create_directories(dir);
  {
    std::ofstream out(fs::path(dir) / "report.txt");
    out.precision(17);
    out << "mechanism = " << report.mechanism << "\n";
    out << "seed = " << report.seed << "\n";
    out << "n_clients = " << report.n_clients << "\n";
    out << "selected = " << selection_csv(report.selected) << "\n";
    out << "surplus = " << report.surplus << "\n";
    out << "total_payments = " << report.total_payments << "\n";
    out << "per_unit_surplus = " << report.per_unit_surplus << "\n";
    out << "hr10 = " << report.hr10 << "\n";
    out << "ndcg10 = " << report.ndcg10 << "\n";
    out << "mse = " << report.mse << "\n";
    out << "chain_head = " << report.chain_head << "\n";
    out << "eval_scope = " << report.eval_scope << "\n";
    out << "round_loss = ";
    for (std::size_t i = 0; i < report.round_loss.size(); ++i)
      out << (i ? "," : "") << report.round_loss[i];
    out << "\n";
  }
  {
    std::ofstream out(fs::path(dir) / "rounds.csv");
    out.precision(17);
    out << "round,global_loss\n";
    for (std::size_t i = 0; i < report.round_loss.size(); ++i)
      out << i << "," << report.round_loss[i] << "\n";
  }
}

ExperimentReport read_report(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open report: " + path);
  ExperimentReport r;
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    std::string key = line.substr(0, eq);
    std::string value = line.substr(eq + 1);
    auto trim = [](std::string& s) {
      const auto a = s.find_first_not_of(" \t");
      const auto b = s.find_last_not_of(" \t\r");
      s = (a == std::string::npos) ? "" : s.substr(a, b - a + 1);
    };
    trim(key);
    trim(value);
    if (key == "mechanism") r.mechanism = value;
    else if (key == "seed") r.seed = std::stoull(value);
    else if (key == "n_clients") r.n_clients = std::stoi(value);
    else if (key == "surplus") r.surplus = std::stod(value);
    else if (key == "total_payments") r.total_payments = std::stod(value);
    else if (key == "per_unit_surplus") r.per_unit_surplus = std::stod(value);
    else if (key == "hr10") r.hr10 = std::stod(value);
    else if (key == "ndcg10") r.ndcg10 = std::stod(value);
    else if (key == "mse") r.mse = std::stod(value);
    else if (key == "chain_head") r.chain_head = value;
    else if (key == "eval_scope") r.eval_scope = value;
    else if (key == "selected") {
      std::stringstream ss(value);
      std::string tok;
      while (std::getline(ss, tok, ',')) if (!tok.empty()) r.selected.push_back(std::stoi(tok));
    } else if (key == "round_loss") {
      std::stringstream ss(value);
      std::string tok;
      while (std::getline(ss, tok, ',')) if (!tok.empty()) r.round_loss.push_back(std::stod(tok));
    }
  }
  return r;
}

void cmd_plot(const std::vector<std::string>& report_paths, const std::string& out_dir) {
  if (report_paths.empty()) throw std::invalid_argument("cmd_plot: no reports");
  std::vector<ExperimentReport> reports;
  for (const auto& p : report_paths) reports.push_back(read_report(p));

  const std::size_t rounds = reports.front().round_loss.size();
  for (const auto& r : reports)
    if (r.round_loss.size() != rounds)
      throw std::runtime_error("cmd_plot: reports disagree on round count");

  fs::create_directories(out_dir);
  {
    std::ofstream out(fs::path(out_dir) / "loss_vs_round.csv");
    out.precision(17);
    out << "round";
    for (const auto& r : reports) out << "," << r.mechanism;
    out << "\n";
    for (std::size_t t = 0; t < rounds; ++t) {
      out << t;
      for (const auto& r : reports) out << "," << r.round_loss[t];
      out << "\n";
    }
  }
  {
    std::ofstream out(fs::path(out_dir) / "surplus_bars.csv");
    out.precision(17);
    out << "mechanism,surplus,per_unit_surplus\n";
    for (const auto& r : reports)
      out << r.mechanism << "," << r.surplus << "," << r.per_unit_surplus << "\n";
  }
}

}  // namespace fedrec
