#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Core>

#include "fedrec/economics.hpp"

namespace fedrec {

using AuctionState = Selection;  // 0/1 per client, 1 = in the candidate set

struct Transition {
  AuctionState state;
  int action = 0;
  double reward = 0;
  AuctionState next_state;
  bool terminal = false;
};

// Dueling feed-forward network: ReLU trunk, then a scalar value stream and
// a per-action advantage stream combined as Q(s,a) = V + A_a - mean(A).
struct QNetwork {
  std::vector<Eigen::MatrixXd> trunk_w;  // (fan_in x width)
  std::vector<Eigen::VectorXd> trunk_b;
  Eigen::VectorXd value_w;
  double value_b = 0;
  Eigen::MatrixXd adv_w;  // (trunk_out x n_actions)
  Eigen::VectorXd adv_b;

  int n_actions() const { return static_cast<int>(adv_w.cols()); }

  Eigen::VectorXd q_values(const AuctionState& state) const;
  Eigen::MatrixXd q_values_batch(const Eigen::MatrixXd& states) const;
};

QNetwork init_qnetwork(int n, const std::vector<int>& trunk_widths, std::uint64_t seed);

struct D3QNConfig {
  int episodes = 600;
  double eps_start = 0.1;  // greedy-branch probability at episode 0
  double eps_end = 0.99;
  double eps_decay = 0.99;  // per-episode geometric approach toward eps_end
  double gamma = 1.0;
  int replay_capacity = 10000;
  int batch_size = 64;
  int target_sync = 50;  // gradient updates between target copies
  std::vector<int> trunk_widths = {128, 64};
  double learning_rate = 1e-3;
};

AuctionState env_reset(int n);

Transition env_step(const AuctionState& state, int action,
                    const std::vector<ClientProfile>& profiles, const SurplusModel& model);

// With probability eps, the masked argmax of the net's Q values over
// unselected clients; otherwise a uniformly random unselected client.
int policy_action(const QNetwork& net, const AuctionState& state, double eps,
                  std::mt19937_64& rng);

// Double-Q targets: argmax on the evaluate net, value from the target net,
// both masked to legal (unselected) actions.
Eigen::VectorXd td_target(const std::vector<Transition>& batch, const QNetwork& evaluate,
                          const QNetwork& target, double gamma);

QNetwork train_agent(const std::vector<ClientProfile>& profiles, const SurplusModel& model,
                     const D3QNConfig& config, std::uint64_t seed);

struct AuctionOutcome {
  Selection selection;
  double surplus = 0;
  std::vector<std::pair<int, double>> payments;  // (client_id, amount), pay-as-bid
  struct Step {
    int action = 0;
    double reward = 0;
  };
  std::vector<Step> trace;
};

// Pure-greedy rollout; the answer is the max-surplus prefix of the
// trajectory (ties toward the shorter prefix).
AuctionOutcome greedy_rollout(const QNetwork& net, const std::vector<ClientProfile>& profiles,
                              const SurplusModel& model);

// Baseline: ascending-bid prefix of ceil(0.8 n) clients.
AuctionOutcome simple_auction(const std::vector<ClientProfile>& profiles,
                              const SurplusModel& model);

// Baseline: everyone participates.
AuctionOutcome greedy_all(const std::vector<ClientProfile>& profiles, const SurplusModel& model);

}  // namespace fedrec
