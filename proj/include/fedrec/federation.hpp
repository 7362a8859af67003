#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "fedrec/ledger.hpp"
#include "fedrec/neumf.hpp"

namespace fedrec {

// Everything a client uploads: NeuMF parameters minus both user-embedding
// matrices. User embeddings never leave the client.
struct SharedParams {
  Eigen::MatrixXd item_emb_gmf;
  Eigen::MatrixXd item_emb_mlp;
  std::vector<Eigen::MatrixXd> mlp_weights;
  std::vector<Eigen::VectorXd> mlp_biases;
  Eigen::VectorXd output_weights;
};

SharedParams extract_shared(const NeuMFParams& params);
void apply_global(NeuMFParams& params, const SharedParams& shared);

// Size-weighted mean per the FedAvg formula.
SharedParams fedavg(const std::vector<std::pair<SharedParams, long long>>& uploads);

std::vector<std::uint8_t> serialize_shared(const SharedParams& shared);
Digest hash_params(const SharedParams& shared);

struct ClientState {
  int client_id = 0;
  NeuMFParams params;
  std::vector<TrainInstance> train;
  std::vector<Interaction> train_raw;
  std::vector<Interaction> test;

  long long n_k() const { return static_cast<long long>(train.size()); }
};

// Unweighted mean of per-client per-instance losses with `shared` applied.
double global_loss(const std::vector<ClientState>& clients, const SharedParams& shared);
double global_loss(const std::vector<const ClientState*>& clients, const SharedParams& shared);

struct RoundRecord {
  int round = 0;
  std::vector<int> participants;
  std::vector<Digest> upload_digests;
  Digest aggregate_digest{};
  std::vector<long long> sizes;
};

SharedParams run_round(std::vector<ClientState*>& selected, const SharedParams& shared,
                       const Hyperparams& hyper, Ledger& ledger, int round, std::uint64_t seed,
                       RoundRecord* record = nullptr);

struct RoundMetrics {
  int round = 0;
  double global_loss = 0;
};

struct FederationResult {
  SharedParams shared;
  std::vector<RoundMetrics> metrics;
};

// Runs T rounds over the selected subset; global loss after each round is
// the unweighted mean over the participating clients.
FederationResult run_federation(std::vector<ClientState>& clients,
                                const std::vector<int>& selected_ids, int rounds,
                                const Hyperparams& hyper, Ledger& ledger, std::uint64_t seed);

}  // namespace fedrec
