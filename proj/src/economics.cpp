#include "fedrec/economics.hpp"

#include <bit>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fedrec {

double SurplusModel::alpha(double delta) const {
  const double t = (delta + k5) / k6;
  return k4 * std::exp(-t * t);
}

double emd(const RatingHistogram& local, const RatingHistogram& global) {
  if (local.mass.size() != global.mass.size())
    throw std::invalid_argument("emd: mismatched rating supports");
  return (local.mass - global.mass).cwiseAbs().sum();
}

std::pair<long long, double> aggregate_stats(const Selection& selection,
                                             const std::vector<ClientProfile>& profiles) {
  if (selection.size() != profiles.size())
    throw std::invalid_argument("aggregate_stats: selection/profile length mismatch");
  long long d = 0;
  double sigma_sum = 0;
  int count = 0;
  for (std::size_t i = 0; i < selection.size(); ++i) {
    if (!selection[i]) continue;
    d += profiles[i].dataset_size;
    sigma_sum += profiles[i].emd;
    ++count;
  }
  return {d, count ? sigma_sum / count : 0.0};
}

double quality(const Selection& selection, const std::vector<ClientProfile>& profiles,
               const SurplusModel& model) {
  const auto [d, delta] = aggregate_stats(selection, profiles);
  const double a = model.alpha(delta);
  return a - model.k1 * std::exp(-model.k2 * std::pow(model.k3 * static_cast<double>(d), a));
}

double surplus(const Selection& selection, const std::vector<ClientProfile>& profiles,
               const SurplusModel& model) {
  double paid = 0;
  for (std::size_t i = 0; i < selection.size(); ++i)
    if (selection[i]) paid += profiles[i].bid;
  return model.lambda * quality(selection, profiles, model) - paid;
}

OptimalSelection brute_force_optimal(const std::vector<ClientProfile>& profiles,
                                     const SurplusModel& model) {
  const int n = static_cast<int>(profiles.size());
  if (n > 25)
    throw std::invalid_argument(
        "brute_force_optimal: n > 25, use the D3QN auction for larger instances");

  auto lex_less = [n](std::uint32_t a, std::uint32_t b) {
    // compares selection vectors [c0, c1, ...] elementwise
    for (int i = 0; i < n; ++i) {
      const int ai = (a >> i) & 1, bi = (b >> i) & 1;
      if (ai != bi) return ai < bi;
    }
    return false;
  };

  std::uint32_t best_mask = 0;
  double best_s = 0;
  bool first = true;
  Selection sel(n, 0);
  for (std::uint64_t mask = 0; mask < (1ULL << n); ++mask) {
    for (int i = 0; i < n; ++i) sel[i] = (mask >> i) & 1;
    const double s = surplus(sel, profiles, model);
    const auto m = static_cast<std::uint32_t>(mask);
    if (first || s > best_s ||
        (s == best_s && (std::popcount(m) < std::popcount(best_mask) ||
                         (std::popcount(m) == std::popcount(best_mask) &&
                          lex_less(m, best_mask))))) {
      best_mask = m;
      best_s = s;
      first = false;
    }
  }
  OptimalSelection out;
  out.selection.assign(n, 0);
  for (int i = 0; i < n; ++i) out.selection[i] = (best_mask >> i) & 1;
  out.surplus = best_s;
  return out;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scenario file: " + path);
  Scenario sc;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    std::string key;
    ss >> key;
    bool ok = true;
    if (key == "lambda") {
      ok = static_cast<bool>(ss >> sc.model.lambda);
    } else if (key == "kappa") {
      ok = static_cast<bool>(ss >> sc.model.k1 >> sc.model.k2 >> sc.model.k3 >> sc.model.k4 >>
                             sc.model.k5 >> sc.model.k6);
    } else if (key == "client") {
      ClientProfile p;
      ok = static_cast<bool>(ss >> p.client_id >> p.dataset_size >> p.emd >> p.bid);
      if (ok && (p.dataset_size < 1 || p.emd < 0 || p.emd > 2 || p.bid < 0)) ok = false;
      if (ok) sc.profiles.push_back(p);
    } else {
      ok = false;
    }
    if (!ok)
      throw std::runtime_error("scenario parse error at line " + std::to_string(lineno) + ": " +
                               line);
  }
  if (sc.profiles.empty()) throw std::runtime_error("scenario has no clients: " + path);
  return sc;
}

void save_scenario(const std::string& path, const Scenario& scenario) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write scenario file: " + path);
  out.precision(17);
  out << "lambda " << scenario.model.lambda << "\n";
  out << "kappa " << scenario.model.k1 << " " << scenario.model.k2 << " " << scenario.model.k3
      << " " << scenario.model.k4 << " " << scenario.model.k5 << " " << scenario.model.k6 << "\n";
  for (const auto& p : scenario.profiles)
    out << "client " << p.client_id << " " << p.dataset_size << " " << p.emd << " " << p.bid
        << "\n";
}

}  // namespace fedrec
