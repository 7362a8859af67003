#include "fedrec/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <unordered_set>

#include <Eigen/Core>

namespace fedrec {

std::vector<Interaction> generate_ratings(const SynthDataConfig& cfg, std::uint64_t seed) {
  if (cfg.n_users < 1 || cfg.n_items < 1 || cfg.n_interactions < 1)
    throw std::invalid_argument("generate_ratings: invalid sizes");

  std::mt19937_64 rng(derive_seed(seed, 0x5d17a));
  std::normal_distribution<double> gauss(0.0, 1.0);

  Eigen::MatrixXd uf(cfg.n_users, cfg.latent_dim);
  Eigen::MatrixXd vf(cfg.n_items, cfg.latent_dim);
  for (Eigen::Index j = 0; j < uf.cols(); ++j)
    for (Eigen::Index i = 0; i < uf.rows(); ++i) uf(i, j) = gauss(rng);
  for (Eigen::Index j = 0; j < vf.cols(); ++j)
    for (Eigen::Index i = 0; i < vf.rows(); ++i) vf(i, j) = gauss(rng);

  // Zipf-like exposure over items
  std::vector<double> pop(cfg.n_items);
  for (int i = 0; i < cfg.n_items; ++i) pop[i] = 1.0 / std::pow(i + 1.0, cfg.popularity_skew);
  std::discrete_distribution<int> item_pick(pop.begin(), pop.end());
  std::uniform_int_distribution<int> user_pick(0, cfg.n_users - 1);

  const double scale = 1.2 / std::sqrt(static_cast<double>(cfg.latent_dim));
  std::normal_distribution<double> jitter(0.0, cfg.noise);

  std::vector<Interaction> out;
  out.reserve(cfg.n_interactions);
  std::unordered_set<std::uint64_t> seen;
  std::vector<std::int64_t> clock_per_user(cfg.n_users, 0);
  int guard = 0;
  while (static_cast<int>(out.size()) < cfg.n_interactions) {
    const int u = user_pick(rng);
    const int i = item_pick(rng);
    const std::uint64_t key = (static_cast<std::uint64_t>(u) << 32) | static_cast<std::uint32_t>(i);
    if (seen.count(key)) {
      if (++guard > cfg.n_interactions * 50)
        throw std::runtime_error("generate_ratings: interaction space too dense");
      continue;
    }
    seen.insert(key);
    const double affinity = uf.row(u).dot(vf.row(i)) * scale + jitter(rng);
    const double raw = 3.0 + affinity;
    const double rating = std::clamp(std::round(raw), 1.0, 5.0);
    out.push_back({u, i, rating, 1'000'000 + (clock_per_user[u]++) * 10 + u % 10});
  }

  // every user needs at least 2 interactions for the leave-one-out split
  std::vector<int> per_user(cfg.n_users, 0);
  for (const auto& x : out) per_user[x.user_id]++;
  for (int u = 0; u < cfg.n_users; ++u) {
    while (per_user[u] < 2) {
      const int i = item_pick(rng);
      const std::uint64_t key =
          (static_cast<std::uint64_t>(u) << 32) | static_cast<std::uint32_t>(i);
      if (seen.count(key)) continue;
      seen.insert(key);
      const double affinity = uf.row(u).dot(vf.row(i)) * scale + jitter(rng);
      out.push_back({u, i, std::clamp(std::round(3.0 + affinity), 1.0, 5.0),
                     1'000'000 + (clock_per_user[u]++) * 10 + u % 10});
      per_user[u]++;
    }
  }
  return out;
}

Scenario generate_scenario(const SynthScenarioConfig& cfg, std::uint64_t seed) {
  if (cfg.n_clients < 1) throw std::invalid_argument("generate_scenario: need clients");
  if (cfg.n_poisoned > cfg.n_clients)
    throw std::invalid_argument("generate_scenario: too many poisoned clients");

  std::mt19937_64 rng(derive_seed(seed, 0xb1d5));
  std::lognormal_distribution<double> size_dist(cfg.size_mu, cfg.size_sigma);
  std::uniform_real_distribution<double> emd_dist(cfg.emd_min, cfg.emd_max);
  std::uniform_real_distribution<double> noise_dist(-cfg.bid_noise, cfg.bid_noise);

  Scenario sc;
  sc.model = cfg.model;
  for (int i = 0; i < cfg.n_clients; ++i) {
    ClientProfile p;
    p.client_id = i;
    p.dataset_size = std::max<long long>(1, static_cast<long long>(size_dist(rng)));
    p.emd = emd_dist(rng);
    p.bid = cfg.bid_per_size * static_cast<double>(p.dataset_size) * (1.0 + noise_dist(rng));
    if (i >= cfg.n_clients - cfg.n_poisoned) {
      p.emd = std::min(2.0, cfg.poisoned_emd);
      p.bid *= cfg.poisoned_bid_factor;
    }
    sc.profiles.push_back(p);
  }
  return sc;
}

}  // namespace fedrec
