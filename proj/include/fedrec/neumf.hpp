#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "fedrec/data.hpp"

namespace fedrec {

struct Hyperparams {
  int factors = 32;
  std::vector<int> mlp_widths = {64, 32, 16};
  double learning_rate = 0.0005;
  int batch_size = 64;
  int local_epochs = 5;
  enum class Optimizer { Sgd, Adam } optimizer = Optimizer::Adam;
  int neg_ratio = 4;
};

// All trainable tensors of one NeuMF model. MLP weights are stored
// (fan_in x fan_out) so a batch X (B x in) maps through X * W + b.
struct NeuMFParams {
  Eigen::MatrixXd user_emb_gmf;  // M x d
  Eigen::MatrixXd item_emb_gmf;  // N x d
  Eigen::MatrixXd user_emb_mlp;  // M x d
  Eigen::MatrixXd item_emb_mlp;  // N x d
  std::vector<Eigen::MatrixXd> mlp_weights;
  std::vector<Eigen::VectorXd> mlp_biases;
  Eigen::VectorXd output_weights;  // length d + last MLP width

  int n_users() const { return static_cast<int>(user_emb_gmf.rows()); }
  int n_items() const { return static_cast<int>(item_emb_gmf.rows()); }
  int factors() const { return static_cast<int>(user_emb_gmf.cols()); }
};

// Gradients share the parameter layout; only rows touched by a batch
// are nonzero in the embedding matrices.
using GradientSet = NeuMFParams;

NeuMFParams init_params(int n_users, int n_items, const Hyperparams& hyper, std::uint64_t seed);
GradientSet zeros_like(const NeuMFParams& params);

double forward(const NeuMFParams& params, int user_id, int item_id);
Eigen::VectorXd forward_batch(const NeuMFParams& params, const std::vector<int>& users,
                              const std::vector<int>& items);

// Eq-style weighted squared error, summed over the batch.
double loss(const NeuMFParams& params, const std::vector<TrainInstance>& batch);
GradientSet gradients(const NeuMFParams& params, const std::vector<TrainInstance>& batch);

struct OptState {
  int step = 0;
  GradientSet m;  // first moments
  GradientSet v;  // second moments
  bool initialized = false;
};

inline constexpr double kAdamBeta1 = 0.9;
inline constexpr double kAdamBeta2 = 0.999;
inline constexpr double kAdamEps = 1e-8;

void optimizer_step(NeuMFParams& params, const GradientSet& grads, const Hyperparams& hyper,
                    OptState& state);

NeuMFParams train_local(NeuMFParams params, const std::vector<TrainInstance>& instances,
                        const Hyperparams& hyper, std::uint64_t seed, OptState* state = nullptr);

// Canonical byte encoding of named real arrays: u32 tensor count, then per
// tensor u32 name length, name bytes, u64 rows, u64 cols, row-major
// little-endian f64 data. This is the encoding the ledger hashes.
void append_tensor(std::vector<std::uint8_t>& buf, const std::string& name,
                   const Eigen::MatrixXd& tensor);
void begin_tensor_list(std::vector<std::uint8_t>& buf, std::uint32_t count);

struct TensorView {
  std::string name;
  Eigen::MatrixXd values;
};
std::vector<TensorView> parse_tensor_list(const std::vector<std::uint8_t>& buf);

}  // namespace fedrec
