#include "fedrec/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace fedrec {

double mse(const std::vector<std::pair<double, double>>& pairs) {
  if (pairs.empty()) throw std::invalid_argument("mse: no pairs");
  double total = 0;
  for (const auto& [pred, actual] : pairs) {
    const double r = pred - actual;
    total += r * r;
  }
  return total / static_cast<double>(pairs.size());
}

int rank_of_test_item(const std::vector<int>& candidates, const Eigen::VectorXd& scores,
                      int test_item) {
  if (static_cast<Eigen::Index>(candidates.size()) != scores.size())
    throw std::invalid_argument("rank_of_test_item: candidate/score length mismatch");
  int test_pos = -1;
  for (std::size_t i = 0; i < candidates.size(); ++i)
    if (candidates[i] == test_item) {
      test_pos = static_cast<int>(i);
      break;
    }
  if (test_pos < 0) throw std::invalid_argument("rank_of_test_item: test item not a candidate");

  const double ts = scores[test_pos];
  int rank = 1;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (static_cast<int>(i) == test_pos) continue;
    const double s = scores[static_cast<Eigen::Index>(i)];
    if (s > ts || (s == ts && candidates[i] < test_item)) ++rank;
  }
  return rank;
}

double hr_at_k(const std::vector<int>& ranks, int k) {
  if (ranks.empty()) throw std::invalid_argument("hr_at_k: no ranks");
  int hits = 0;
  for (int r : ranks)
    if (r <= k) ++hits;
  return static_cast<double>(hits) / static_cast<double>(ranks.size());
}

double ndcg_at_k(const std::vector<int>& ranks, int k) {
  if (ranks.empty()) throw std::invalid_argument("ndcg_at_k: no ranks");
  double total = 0;
  for (int r : ranks)
    if (r <= k) total += 1.0 / std::log2(static_cast<double>(r) + 1.0);
  return total / static_cast<double>(ranks.size());
}

}  // namespace fedrec
