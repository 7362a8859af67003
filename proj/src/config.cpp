#include "fedrec/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fedrec {

Mechanism parse_mechanism(const std::string& name) {
  if (name == "d3qn") return Mechanism::D3qn;
  if (name == "simple") return Mechanism::Simple;
  if (name == "greedy-all") return Mechanism::GreedyAll;
  throw std::invalid_argument("unknown mechanism: " + name);
}

const char* mechanism_name(Mechanism m) {
  switch (m) {
    case Mechanism::D3qn: return "d3qn";
    case Mechanism::Simple: return "simple";
    case Mechanism::GreedyAll: return "greedy-all";
  }
  return "unknown";
}

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(std::stoi(trim(tok)));
  if (out.empty()) throw std::invalid_argument("empty integer list");
  return out;
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text, const std::string& origin) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string line, section;
  std::size_t lineno = 0;

  auto fail = [&](const std::string& why) {
    throw std::runtime_error(origin + ":" + std::to_string(lineno) + ": " + why);
  };

  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail("malformed section header");
      section = line.substr(1, line.size() - 2);
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail("expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    try {
      if (section == "experiment") {
        if (key == "mechanism") cfg.mechanism = parse_mechanism(value);
        else if (key == "seed") cfg.seed = std::stoull(value);
        else if (key == "rounds") cfg.rounds = std::stoi(value);
        else if (key == "out") cfg.out_dir = value;
        else fail("unknown key in [experiment]: " + key);
      } else if (section == "data") {
        if (key == "dataset") cfg.dataset = value;
        else if (key == "scenario") cfg.scenario = value;
        else if (key == "n_clients") cfg.n_clients = std::stoi(value);
        else if (key == "size_sigma") cfg.skew.size_sigma = std::stod(value);
        else if (key == "rating_bias") cfg.skew.rating_bias = std::stod(value);
        else if (key == "eval_candidates") cfg.eval_candidates = std::stoi(value);
        else if (key == "synth_users") cfg.synth.n_users = std::stoi(value);
        else if (key == "synth_items") cfg.synth.n_items = std::stoi(value);
        else if (key == "synth_interactions") cfg.synth.n_interactions = std::stoi(value);
        else if (key == "synth_noise") cfg.synth.noise = std::stod(value);
        else fail("unknown key in [data]: " + key);
      } else if (section == "model") {
        if (key == "factors") cfg.hyper.factors = std::stoi(value);
        else if (key == "mlp_widths") cfg.hyper.mlp_widths = parse_int_list(value);
        else if (key == "learning_rate") cfg.hyper.learning_rate = std::stod(value);
        else if (key == "batch_size") cfg.hyper.batch_size = std::stoi(value);
        else if (key == "local_epochs") cfg.hyper.local_epochs = std::stoi(value);
        else if (key == "neg_ratio") cfg.hyper.neg_ratio = std::stoi(value);
        else if (key == "optimizer") {
          if (value == "sgd") cfg.hyper.optimizer = Hyperparams::Optimizer::Sgd;
          else if (value == "adam") cfg.hyper.optimizer = Hyperparams::Optimizer::Adam;
          else fail("optimizer must be sgd or adam");
        } else fail("unknown key in [model]: " + key);
      } else if (section == "surplus") {
        if (key == "kappa1") cfg.surplus_model.k1 = std::stod(value);
        else if (key == "kappa2") cfg.surplus_model.k2 = std::stod(value);
        else if (key == "kappa3") cfg.surplus_model.k3 = std::stod(value);
        else if (key == "kappa4") cfg.surplus_model.k4 = std::stod(value);
        else if (key == "kappa5") cfg.surplus_model.k5 = std::stod(value);
        else if (key == "kappa6") cfg.surplus_model.k6 = std::stod(value);
        else if (key == "lambda") cfg.surplus_model.lambda = std::stod(value);
        else fail("unknown key in [surplus]: " + key);
      } else if (section == "bids") {
        if (key == "base_cost") cfg.bids.base_cost = std::stod(value);
        else if (key == "rho") cfg.bids.rho = std::stod(value);
        else if (key == "noise") cfg.bids.noise = std::stod(value);
        else fail("unknown key in [bids]: " + key);
      } else if (section == "d3qn") {
        if (key == "episodes") cfg.d3qn.episodes = std::stoi(value);
        else if (key == "eps_start") cfg.d3qn.eps_start = std::stod(value);
        else if (key == "eps_end") cfg.d3qn.eps_end = std::stod(value);
        else if (key == "eps_decay") cfg.d3qn.eps_decay = std::stod(value);
        else if (key == "gamma") cfg.d3qn.gamma = std::stod(value);
        else if (key == "replay_capacity") cfg.d3qn.replay_capacity = std::stoi(value);
        else if (key == "batch_size") cfg.d3qn.batch_size = std::stoi(value);
        else if (key == "target_sync") cfg.d3qn.target_sync = std::stoi(value);
        else if (key == "trunk_widths") cfg.d3qn.trunk_widths = parse_int_list(value);
        else if (key == "learning_rate") cfg.d3qn.learning_rate = std::stod(value);
        else fail("unknown key in [d3qn]: " + key);
      } else {
        fail("key outside a known section: " + key);
      }
    } catch (const std::invalid_argument& e) {
      fail(e.what());
    } catch (const std::out_of_range&) {
      fail("numeric value out of range");
    }
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path);
}

}  // namespace fedrec
