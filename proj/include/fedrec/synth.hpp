#pragma once

#include <cstdint>
#include <vector>

#include "fedrec/data.hpp"
#include "fedrec/economics.hpp"

namespace fedrec {

// Generator for a MovieLens-shaped ratings corpus with learnable latent
// structure: user/item factor vectors of dimension `latent_dim`, Zipf-like
// item popularity, and ratings derived from the factor inner product plus
// noise, clamped to 1..5. Timestamps are sequential per user.
struct SynthDataConfig {
  int n_users = 943;
  int n_items = 1682;
  int n_interactions = 100000;
  int latent_dim = 8;
  double noise = 0.4;
  double popularity_skew = 0.8;  // Zipf exponent for item exposure
};

std::vector<Interaction> generate_ratings(const SynthDataConfig& cfg, std::uint64_t seed);

// Generator for heterogeneous auction scenarios: log-normal dataset sizes,
// EMD values spread over [emd_min, emd_max], and bids that scale with
// size. A `n_poisoned` tail of clients gets both high EMD and inflated
// bids, making them unprofitable to select.
struct SynthScenarioConfig {
  int n_clients = 20;
  double size_mu = 7.0;  // log-scale of dataset sizes
  double size_sigma = 0.6;
  double emd_min = 0.05;
  double emd_max = 0.6;
  double bid_per_size = 0.04;
  double bid_noise = 0.3;
  int n_poisoned = 4;
  double poisoned_emd = 1.4;
  double poisoned_bid_factor = 3.0;
  SurplusModel model;
};

Scenario generate_scenario(const SynthScenarioConfig& cfg, std::uint64_t seed);

}  // namespace fedrec
