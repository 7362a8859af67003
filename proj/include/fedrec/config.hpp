#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "fedrec/auction.hpp"
#include "fedrec/economics.hpp"
#include "fedrec/neumf.hpp"
#include "fedrec/synth.hpp"

namespace fedrec {

enum class Mechanism { D3qn, Simple, GreedyAll };

Mechanism parse_mechanism(const std::string& name);
const char* mechanism_name(Mechanism m);

// Bid synthesis for dataset-driven runs: bid = base_cost * s^rho * (1 + noise * u).
struct BidModel {
  double base_cost = 0.01;
  double rho = 1.0;
  double noise = 0.2;
};

struct ExperimentConfig {
  std::string dataset = "synthetic";  // MovieLens file path or "synthetic"
  std::string scenario;               // optional scenario file (overrides profile computation)
  int n_clients = 20;
  SkewParams skew;
  int eval_candidates = 50;
  SynthDataConfig synth;

  Hyperparams hyper;
  int rounds = 10;

  SurplusModel surplus_model;
  BidModel bids;
  D3QNConfig d3qn;

  Mechanism mechanism = Mechanism::D3qn;
  std::uint64_t seed = 42;
  std::string out_dir = "out";
};

// Flat "[section]" + "key = value" text format; unknown keys are errors.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text, const std::string& origin = "<text>");

}  // namespace fedrec
