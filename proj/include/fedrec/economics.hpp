#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "fedrec/data.hpp"

namespace fedrec {

struct ClientProfile {
  int client_id = 0;
  long long dataset_size = 1;  // s_i
  double emd = 0;              // sigma_i in [0, 2]
  double bid = 0;              // b_i, currency units
};

// Quality / revenue parameters. alpha(delta) = k4 exp(-((delta+k5)/k6)^2).
struct SurplusModel {
  double k1 = 0.361;
  double k2 = 4.348;
  double k3 = 1e-3;
  double k4 = 0.993;
  double k5 = 0.31;
  double k6 = 1.743;
  double lambda = 3000.0;

  double alpha(double delta) const;
};

using Selection = std::vector<std::uint8_t>;  // 0/1 per client

// L1 distance between rating histograms (bounded by 2).
double emd(const RatingHistogram& local, const RatingHistogram& global);

// Total size D and mean EMD of the selected set; (0, 0) for the empty set.
std::pair<long long, double> aggregate_stats(const Selection& selection,
                                             const std::vector<ClientProfile>& profiles);

double quality(const Selection& selection, const std::vector<ClientProfile>& profiles,
               const SurplusModel& model);

// S = lambda * Q(C) - sum of selected bids.
double surplus(const Selection& selection, const std::vector<ClientProfile>& profiles,
               const SurplusModel& model);

struct OptimalSelection {
  Selection selection;
  double surplus = 0;
};

// Exhaustive argmax over all 2^n selections, n <= 25. Ties break toward
// fewer selected clients, then the lexicographically smallest vector.
OptimalSelection brute_force_optimal(const std::vector<ClientProfile>& profiles,
                                     const SurplusModel& model);

// Scenario files let auction experiments run without a dataset:
//   lambda <value>
//   kappa <k1> <k2> <k3> <k4> <k5> <k6>
//   client <id> <size> <emd> <bid>
struct Scenario {
  std::vector<ClientProfile> profiles;
  SurplusModel model;
};

Scenario load_scenario(const std::string& path);
void save_scenario(const std::string& path, const Scenario& scenario);

}  // namespace fedrec
