#include "fedrec/data.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>

namespace fedrec {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 over the combined value
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

LoadResult load_movielens(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset file: " + path);

  LoadResult out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::int64_t fields[4];
    std::size_t pos = 0;
    bool ok = true;
    for (int f = 0; f < 4 && ok; ++f) {
      std::size_t end = (f < 3) ? line.find("::", pos) : line.size();
      if (end == std::string::npos) {
        ok = false;
        break;
      }
      try {
        std::size_t used = 0;
        fields[f] = std::stoll(line.substr(pos, end - pos), &used);
        if (used != end - pos) ok = false;
      } catch (const std::exception&) {
        ok = false;
      }
      pos = end + 2;
    }
    if (!ok || fields[2] < kRatingMin || fields[2] > kRatingMax) {
      throw std::runtime_error("malformed MovieLens record at line " + std::to_string(lineno) +
                               ": " + line);
    }
    auto [uit, unew] = out.remap.users.try_emplace(fields[0], out.remap.n_users);
    if (unew) ++out.remap.n_users;
    auto [iit, inew] = out.remap.items.try_emplace(fields[1], out.remap.n_items);
    if (inew) ++out.remap.n_items;
    out.interactions.push_back(
        {uit->second, iit->second, static_cast<double>(fields[2]), fields[3]});
  }
  if (out.interactions.empty()) throw std::runtime_error("empty dataset file: " + path);
  return out;
}

std::vector<ClientPartition> partition_clients(const std::vector<Interaction>& interactions,
                                               int n_clients, const SkewParams& skew,
                                               std::uint64_t seed) {
  if (n_clients < 1) throw std::invalid_argument("n_clients must be >= 1");

  // group interactions by user, note each user's modal rating
  std::map<int, std::vector<const Interaction*>> by_user;
  for (const auto& x : interactions) by_user[x.user_id].push_back(&x);
  const int n_users = static_cast<int>(by_user.size());
  if (n_clients > n_users)
    throw std::invalid_argument("n_clients exceeds the number of distinct users");

  std::vector<int> user_ids;
  std::vector<int> modal_rating;
  user_ids.reserve(n_users);
  for (const auto& [uid, rows] : by_user) {
    user_ids.push_back(uid);
    int counts[kRatingLevels] = {};
    for (const auto* x : rows) counts[static_cast<int>(x->rating) - kRatingMin]++;
    int best = 0;
    for (int r = 1; r < kRatingLevels; ++r)
      if (counts[r] > counts[best]) best = r;
    modal_rating.push_back(best);
  }

  std::mt19937_64 rng(derive_seed(seed, 0));

  // log-normal size targets, each client gets at least one user
  std::vector<double> weight(n_clients);
  std::lognormal_distribution<double> logn(0.0, skew.size_sigma);
  double wsum = 0;
  for (auto& w : weight) {
    w = (skew.size_sigma > 0) ? logn(rng) : 1.0;
    wsum += w;
  }
  std::vector<int> capacity(n_clients, 1);
  int remaining = n_users - n_clients;
  for (int c = 0; c < n_clients && remaining > 0; ++c) {
    int extra = static_cast<int>(weight[c] / wsum * (n_users - n_clients));
    extra = std::min(extra, remaining);
    capacity[c] += extra;
    remaining -= extra;
  }
  for (int c = 0; remaining > 0; c = (c + 1) % n_clients) {
    capacity[c]++;
    remaining--;
  }

  // per-client preferred rating value for histogram skew
  std::vector<int> preferred(n_clients);
  std::uniform_int_distribution<int> rating_pick(0, kRatingLevels - 1);
  for (auto& p : preferred) p = rating_pick(rng);

  std::vector<int> order(n_users);
  for (int i = 0; i < n_users; ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);

  std::vector<ClientPartition> parts(n_clients);
  for (int c = 0; c < n_clients; ++c) parts[c].client_id = c;

  std::vector<int> used(n_clients, 0);
  for (int idx : order) {
    double total = 0;
    std::vector<double> w(n_clients, 0.0);
    for (int c = 0; c < n_clients; ++c) {
      if (used[c] >= capacity[c]) continue;
      w[c] = 1.0 + (modal_rating[idx] == preferred[c] ? skew.rating_bias : 0.0);
      total += w[c];
    }
    std::uniform_real_distribution<double> unif(0.0, total);
    double t = unif(rng);
    int chosen = -1;
    for (int c = 0; c < n_clients; ++c) {
      if (w[c] <= 0) continue;
      t -= w[c];
      chosen = c;
      if (t <= 0) break;
    }
    used[chosen]++;
    parts[chosen].local_user_ids.insert(user_ids[idx]);
    for (const auto* x : by_user[user_ids[idx]]) parts[chosen].interactions.push_back(*x);
  }
  return parts;
}

SplitResult leave_one_out_split(const ClientPartition& partition) {
  // pick per user the interaction with (max timestamp, max item_id)
  std::unordered_map<int, const Interaction*> latest;
  std::unordered_map<int, int> count;
  for (const auto& x : partition.interactions) {
    count[x.user_id]++;
    auto it = latest.find(x.user_id);
    if (it == latest.end() || x.timestamp > it->second->timestamp ||
        (x.timestamp == it->second->timestamp && x.item_id > it->second->item_id)) {
      latest[x.user_id] = &x;
    }
  }
  SplitResult out;
  for (const auto& x : partition.interactions) {
    const Interaction* held = latest[x.user_id];
    if (count[x.user_id] >= 2 && &x == held)
      out.test.push_back(x);
    else
      out.train.push_back(x);
  }
  return out;
}

namespace {

std::unordered_map<int, std::unordered_set<int>> items_by_user(
    const std::vector<Interaction>& train) {
  std::unordered_map<int, std::unordered_set<int>> seen;
  for (const auto& x : train) seen[x.user_id].insert(x.item_id);
  return seen;
}

// uniform draw of `want` distinct items outside `exclude`
std::vector<int> draw_outside(const std::unordered_set<int>& exclude, int want, int n_items,
                              std::mt19937_64& rng) {
  const int available = n_items - static_cast<int>(exclude.size());
  std::vector<int> out;
  if (available <= 0 || want <= 0) return out;
  want = std::min(want, available);
  std::uniform_int_distribution<int> pick(0, n_items - 1);
  std::unordered_set<int> taken;
  while (static_cast<int>(out.size()) < want) {
    int item = pick(rng);
    if (exclude.count(item) || taken.count(item)) continue;
    taken.insert(item);
    out.push_back(item);
  }
  return out;
}

}  // namespace

std::vector<TrainInstance> sample_negatives(const std::vector<Interaction>& train, int ratio,
                                            int n_items, std::uint64_t seed) {
  if (ratio < 0) throw std::invalid_argument("negative ratio must be >= 0");
  auto seen = items_by_user(train);
  std::vector<TrainInstance> out;
  out.reserve(train.size() * (1 + ratio));
  for (const auto& x : train) {
    out.push_back({x.user_id, x.item_id, x.rating / kRatingMax, 1.0});
    if (ratio == 0) continue;
    std::mt19937_64 rng(
        derive_seed(seed, (static_cast<std::uint64_t>(x.user_id) << 32) ^
                              static_cast<std::uint64_t>(x.item_id * 2654435761u)));
    for (int item : draw_outside(seen[x.user_id], ratio, n_items, rng))
      out.push_back({x.user_id, item, 0.0, 1.0});
  }
  return out;
}

std::vector<int> sample_eval_candidates(int user_id, int test_item,
                                        const std::vector<Interaction>& train, int k, int n_items,
                                        std::uint64_t seed) {
  if (k < 0) throw std::invalid_argument("k must be >= 0");
  std::unordered_set<int> exclude;
  for (const auto& x : train)
    if (x.user_id == user_id) exclude.insert(x.item_id);
  exclude.insert(test_item);
  std::mt19937_64 rng(derive_seed(seed, 0x5eed0000ULL + static_cast<std::uint64_t>(user_id)));
  std::vector<int> out = draw_outside(exclude, k, n_items, rng);
  out.push_back(test_item);
  return out;
}

RatingHistogram rating_histogram(const std::vector<Interaction>& interactions) {
  if (interactions.empty()) throw std::invalid_argument("rating_histogram: empty input");
  RatingHistogram h;
  h.mass = Eigen::VectorXd::Zero(kRatingLevels);
  for (const auto& x : interactions) h.mass[static_cast<int>(x.rating) - kRatingMin] += 1.0;
  h.mass /= h.mass.sum();
  return h;
}

}  // namespace fedrec
