#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <Eigen/Core>

namespace fedrec {

// Ratings are integers 1..5 in the MovieLens scale.
inline constexpr int kRatingMin = 1;
inline constexpr int kRatingMax = 5;
inline constexpr int kRatingLevels = kRatingMax - kRatingMin + 1;

struct Interaction {
  int user_id = 0;   // dense index in [0, M)
  int item_id = 0;   // dense index in [0, N)
  double rating = 0; // 1..5
  std::int64_t timestamp = 0;
};

// Mapping from raw dataset ids to the dense indices used internally.
struct IdRemap {
  std::unordered_map<std::int64_t, int> users;
  std::unordered_map<std::int64_t, int> items;
  int n_users = 0;
  int n_items = 0;
};

struct LoadResult {
  std::vector<Interaction> interactions;
  IdRemap remap;
};

// Parses the "UserID::MovieID::Rating::Timestamp" format and re-indexes
// ids densely in first-seen order. Throws std::runtime_error naming the
// offending line on malformed input, and on an empty file.
LoadResult load_movielens(const std::string& path);

struct ClientPartition {
  int client_id = 0;
  std::vector<Interaction> interactions;
  std::unordered_set<int> local_user_ids;
};

// Non-iid partition controls: size_sigma drives a log-normal spread of
// per-client user counts; rating_bias > 0 steers users toward clients
// that prefer the user's modal rating, skewing per-client histograms.
struct SkewParams {
  double size_sigma = 0.8;
  double rating_bias = 3.0;
};

std::vector<ClientPartition> partition_clients(const std::vector<Interaction>& interactions,
                                               int n_clients, const SkewParams& skew,
                                               std::uint64_t seed);

struct SplitResult {
  std::vector<Interaction> train;
  std::vector<Interaction> test;
};

// Per user, the max-timestamp interaction goes to test (ties broken toward
// the larger item_id); users with a single interaction stay train-only.
SplitResult leave_one_out_split(const ClientPartition& partition);

struct TrainInstance {
  int user_id = 0;
  int item_id = 0;
  double label = 0;  // rating/5 for positives, 0 for negatives
  double weight = 1.0;
};

std::vector<TrainInstance> sample_negatives(const std::vector<Interaction>& train, int ratio,
                                            int n_items, std::uint64_t seed);

std::vector<int> sample_eval_candidates(int user_id, int test_item,
                                        const std::vector<Interaction>& train, int k, int n_items,
                                        std::uint64_t seed);

struct RatingHistogram {
  Eigen::VectorXd mass;  // indexed by rating - kRatingMin, sums to 1
};

RatingHistogram rating_histogram(const std::vector<Interaction>& interactions);

// Deterministic stream derivation so per-client / per-user sampling stays
// reproducible regardless of call order.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace fedrec
