#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "fedrec/metrics.hpp"

using namespace fedrec;

TEST_CASE("mse basics") {
  CHECK(mse({{1.0, 1.0}, {0.2, 0.2}}) == doctest::Approx(0.0));
  CHECK(mse({{0.5, 1.0}}) == doctest::Approx(0.25));
  // constant offset c on all pairs -> c^2
  CHECK(mse({{0.3, 0.2}, {0.7, 0.6}, {0.9, 0.8}}) == doctest::Approx(0.01));
  CHECK_THROWS(mse({}));
}

TEST_CASE("rank of test item") {
  std::vector<int> cands = {7, 3, 9};
  Eigen::VectorXd scores(3);

  scores << 0.1, 0.9, 0.5;
  CHECK(rank_of_test_item(cands, scores, 3) == 1);
  CHECK(rank_of_test_item(cands, scores, 7) == 3);

  // all scores equal: ascending item id breaks ties
  scores << 0.5, 0.5, 0.5;
  CHECK(rank_of_test_item(cands, scores, 3) == 1);
  CHECK(rank_of_test_item(cands, scores, 9) == 3);

  CHECK_THROWS(rank_of_test_item(cands, scores, 42));
}

TEST_CASE("hr and ndcg trivial cases") {
  CHECK(hr_at_k({1, 1, 1}) == doctest::Approx(1.0));
  CHECK(hr_at_k({5, 15}) == doctest::Approx(0.5));
  CHECK(hr_at_k({3, 7, 2}, 10) == doctest::Approx(1.0));

  CHECK(ndcg_at_k({1}) == doctest::Approx(1.0));
  CHECK(ndcg_at_k({3}) == doctest::Approx(0.5));
  CHECK(ndcg_at_k({11}) == doctest::Approx(0.0));
}

TEST_CASE("ndcg <= hr and monotonicity on random rank multisets") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> rank_dist(1, 51);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<int> ranks(20);
    for (auto& r : ranks) r = rank_dist(rng);
    const double hr = hr_at_k(ranks, 10);
    const double ndcg = ndcg_at_k(ranks, 10);
    CHECK(ndcg <= hr + 1e-12);

    // worsening one rank never improves either metric
    std::vector<int> worse = ranks;
    worse[trial % worse.size()] = std::min(51, worse[trial % worse.size()] + 5);
    CHECK(hr_at_k(worse, 10) <= hr + 1e-12);
    CHECK(ndcg_at_k(worse, 10) <= ndcg + 1e-12);
  }
}

TEST_CASE("random scorer baseline: expected HR@10 with 51 candidates is 10/51") {
  std::mt19937_64 rng(123);
  std::uniform_int_distribution<int> pos(1, 51);
  const int trials = 20000;
  std::vector<int> ranks(trials);
  for (auto& r : ranks) r = pos(rng);
  CHECK(hr_at_k(ranks, 10) == doctest::Approx(10.0 / 51.0).epsilon(0.1));
  CHECK(std::abs(hr_at_k(ranks, 10) - 10.0 / 51.0) < 0.02);
}
