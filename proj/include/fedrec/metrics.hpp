#pragma once

#include <utility>
#include <vector>

#include <Eigen/Core>

namespace fedrec {

// Mean squared error over (predicted, actual) pairs on the [0,1] scale.
double mse(const std::vector<std::pair<double, double>>& pairs);

// 1-based position of test_item among candidates sorted by descending
// score, ties broken by ascending item id.
int rank_of_test_item(const std::vector<int>& candidates, const Eigen::VectorXd& scores,
                      int test_item);

double hr_at_k(const std::vector<int>& ranks, int k = 10);

// Single-relevant-item NDCG: 1/log2(rank+1) for hits within k, else 0.
double ndcg_at_k(const std::vector<int>& ranks, int k = 10);

}  // namespace fedrec
