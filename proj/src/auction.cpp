#include "fedrec/auction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "fedrec/data.hpp"
#include "fedrec/neumf.hpp"

namespace fedrec {

namespace {

Eigen::VectorXd to_vector(const AuctionState& s) {
  Eigen::VectorXd v(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) v[static_cast<Eigen::Index>(i)] = s[i];
  return v;
}

struct NetCache {
  Eigen::MatrixXd x;                // B x n input
  std::vector<Eigen::MatrixXd> z;   // trunk pre-activations
  std::vector<Eigen::MatrixXd> h;   // trunk post-activations
  Eigen::VectorXd value;            // B
  Eigen::MatrixXd advantage;        // B x n
  Eigen::MatrixXd q;                // B x n
};

NetCache net_forward(const QNetwork& net, const Eigen::MatrixXd& states) {
  NetCache c;
  c.x = states;
  const std::size_t L = net.trunk_w.size();
  c.z.resize(L);
  c.h.resize(L);
  const Eigen::MatrixXd* in = &c.x;
  for (std::size_t l = 0; l < L; ++l) {
    c.z[l].noalias() = (*in) * net.trunk_w[l];
    c.z[l].rowwise() += net.trunk_b[l].transpose();
    c.h[l] = c.z[l].cwiseMax(0.0);
    in = &c.h[l];
  }
  const Eigen::MatrixXd& top = L ? c.h.back() : c.x;
  c.value = top * net.value_w;
  c.value.array() += net.value_b;
  c.advantage.noalias() = top * net.adv_w;
  c.advantage.rowwise() += net.adv_b.transpose();
  Eigen::VectorXd adv_mean = c.advantage.rowwise().mean();
  c.q = c.advantage;
  c.q.colwise() += c.value - adv_mean;
  return c;
}

// Gradients with the same layout as QNetwork.
QNetwork zeros_like(const QNetwork& net) {
  QNetwork g;
  for (const auto& w : net.trunk_w) g.trunk_w.push_back(Eigen::MatrixXd::Zero(w.rows(), w.cols()));
  for (const auto& b : net.trunk_b) g.trunk_b.push_back(Eigen::VectorXd::Zero(b.size()));
  g.value_w = Eigen::VectorXd::Zero(net.value_w.size());
  g.value_b = 0;
  g.adv_w = Eigen::MatrixXd::Zero(net.adv_w.rows(), net.adv_w.cols());
  g.adv_b = Eigen::VectorXd::Zero(net.adv_b.size());
  return g;
}

// Backprop of dL/dQ (B x n) through the dueling decomposition and trunk.
QNetwork net_backward(const QNetwork& net, const NetCache& c, const Eigen::MatrixXd& dq) {
  const auto n = static_cast<double>(net.n_actions());
  Eigen::VectorXd dv = dq.rowwise().sum();
  Eigen::MatrixXd da = dq;
  da.colwise() -= (dq.rowwise().sum() / n).eval();

  QNetwork g = zeros_like(net);
  const std::size_t L = net.trunk_w.size();
  const Eigen::MatrixXd& top = L ? c.h.back() : c.x;
  g.value_w = top.transpose() * dv;
  g.value_b = dv.sum();
  g.adv_w.noalias() = top.transpose() * da;
  g.adv_b = da.colwise().sum().transpose();

  Eigen::MatrixXd dtop = dv * net.value_w.transpose() + da * net.adv_w.transpose();
  for (std::size_t l = L; l-- > 0;) {
    Eigen::MatrixXd dz = dtop.cwiseProduct((c.z[l].array() > 0.0).cast<double>().matrix());
    const Eigen::MatrixXd& input = (l == 0) ? c.x : c.h[l - 1];
    g.trunk_w[l].noalias() = input.transpose() * dz;
    g.trunk_b[l] = dz.colwise().sum().transpose();
    dtop.noalias() = dz * net.trunk_w[l].transpose();
  }
  return g;
}

struct QNetOptState {
  int step = 0;
  QNetwork m, v;
  bool initialized = false;
};

template <class F>
void zip_net(QNetwork& p, const QNetwork& g, QNetwork& m, QNetwork& v, F&& f) {
  for (std::size_t l = 0; l < p.trunk_w.size(); ++l)
    f(p.trunk_w[l], g.trunk_w[l], m.trunk_w[l], v.trunk_w[l]);
  for (std::size_t l = 0; l < p.trunk_b.size(); ++l)
    f(p.trunk_b[l], g.trunk_b[l], m.trunk_b[l], v.trunk_b[l]);
  f(p.value_w, g.value_w, m.value_w, v.value_w);
  f(p.adv_w, g.adv_w, m.adv_w, v.adv_w);
  f(p.adv_b, g.adv_b, m.adv_b, v.adv_b);
}

void adam_step(QNetwork& net, const QNetwork& grads, double lr, QNetOptState& state) {
  if (!state.initialized) {
    state.m = zeros_like(net);
    state.v = zeros_like(net);
    state.initialized = true;
  }
  state.step += 1;
  const double bc1 = 1.0 - std::pow(kAdamBeta1, state.step);
  const double bc2 = 1.0 - std::pow(kAdamBeta2, state.step);
  zip_net(net, grads, state.m, state.v, [&](auto& p, const auto& g, auto& m, auto& v) {
    m = kAdamBeta1 * m + (1.0 - kAdamBeta1) * g;
    v = (kAdamBeta2 * v.array() + (1.0 - kAdamBeta2) * g.array().square()).matrix();
    p.array() -= lr * (m.array() / bc1) / ((v.array() / bc2).sqrt() + kAdamEps);
  });
  // scalar bias of the value stream, updated with plain descent
  net.value_b -= lr * grads.value_b;
}

int masked_argmax(const Eigen::VectorXd& q, const AuctionState& state) {
  int best = -1;
  double best_q = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < state.size(); ++i) {
    if (state[i]) continue;
    const double v = q[static_cast<Eigen::Index>(i)];
    if (v > best_q) {
      best_q = v;
      best = static_cast<int>(i);
    }
  }
  return best;
}

AuctionOutcome settle(Selection selection, const std::vector<ClientProfile>& profiles,
                      const SurplusModel& model, std::vector<AuctionOutcome::Step> trace = {}) {
  AuctionOutcome out;
  out.surplus = surplus(selection, profiles, model);
  for (std::size_t i = 0; i < selection.size(); ++i)
    if (selection[i]) out.payments.emplace_back(profiles[i].client_id, profiles[i].bid);
  out.selection = std::move(selection);
  out.trace = std::move(trace);
  return out;
}

}  // namespace

Eigen::VectorXd QNetwork::q_values(const AuctionState& state) const {
  Eigen::MatrixXd s(1, state.size());
  s.row(0) = to_vector(state).transpose();
  return net_forward(*this, s).q.row(0).transpose();
}

Eigen::MatrixXd QNetwork::q_values_batch(const Eigen::MatrixXd& states) const {
  return net_forward(*this, states).q;
}

QNetwork init_qnetwork(int n, const std::vector<int>& trunk_widths, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("init_qnetwork: need at least one client");
  std::mt19937_64 rng(derive_seed(seed, 0xd3d3));
  auto xavier = [&](int fan_in, int fan_out) {
    Eigen::MatrixXd w(fan_in, fan_out);
    const double bound = std::sqrt(6.0 / (fan_in + fan_out));
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (Eigen::Index j = 0; j < w.cols(); ++j)
      for (Eigen::Index i = 0; i < w.rows(); ++i) w(i, j) = dist(rng);
    return w;
  };

  QNetwork net;
  int fan_in = n;
  for (int width : trunk_widths) {
    net.trunk_w.push_back(xavier(fan_in, width));
    net.trunk_b.push_back(Eigen::VectorXd::Zero(width));
    fan_in = width;
  }
  net.value_w = xavier(fan_in, 1).col(0);
  net.value_b = 0;
  net.adv_w = xavier(fan_in, n);
  net.adv_b = Eigen::VectorXd::Zero(n);
  return net;
}

AuctionState env_reset(int n) {
  if (n < 1) throw std::invalid_argument("env_reset: need at least one client");
  return AuctionState(n, 0);
}

Transition env_step(const AuctionState& state, int action,
                    const std::vector<ClientProfile>& profiles, const SurplusModel& model) {
  if (action < 0 || action >= static_cast<int>(state.size()))
    throw std::invalid_argument("env_step: action out of range");
  if (state[action]) throw std::invalid_argument("env_step: client already selected");

  Transition t;
  t.state = state;
  t.action = action;
  t.next_state = state;
  t.next_state[action] = 1;
  t.reward = surplus(t.next_state, profiles, model) - surplus(state, profiles, model);
  t.terminal = std::all_of(t.next_state.begin(), t.next_state.end(),
                           [](std::uint8_t b) { return b == 1; });
  return t;
}

int policy_action(const QNetwork& net, const AuctionState& state, double eps,
                  std::mt19937_64& rng) {
  std::vector<int> legal;
  for (std::size_t i = 0; i < state.size(); ++i)
    if (!state[i]) legal.push_back(static_cast<int>(i));
  if (legal.empty()) throw std::invalid_argument("policy_action: no legal action");

  std::uniform_real_distribution<double> unif(0.0, 1.0);
  if (unif(rng) < eps) return masked_argmax(net.q_values(state), state);
  std::uniform_int_distribution<std::size_t> pick(0, legal.size() - 1);
  return legal[pick(rng)];
}

Eigen::VectorXd td_target(const std::vector<Transition>& batch, const QNetwork& evaluate,
                          const QNetwork& target, double gamma) {
  if (batch.empty()) throw std::invalid_argument("td_target: empty batch");
  const int B = static_cast<int>(batch.size());
  Eigen::VectorXd y(B);
  for (int i = 0; i < B; ++i) {
    const Transition& t = batch[i];
    if (t.terminal) {
      y[i] = t.reward;
      continue;
    }
    const int a_star = masked_argmax(evaluate.q_values(t.next_state), t.next_state);
    y[i] = t.reward + gamma * target.q_values(t.next_state)[a_star];
  }
  return y;
}

QNetwork train_agent(const std::vector<ClientProfile>& profiles, const SurplusModel& model,
                     const D3QNConfig& config, std::uint64_t seed) {
  const int n = static_cast<int>(profiles.size());
  if (n < 1) throw std::invalid_argument("train_agent: need at least one client");

  std::mt19937_64 rng(derive_seed(seed, 0xa0c7));
  QNetwork evaluate = init_qnetwork(n, config.trunk_widths, derive_seed(seed, 1));
  QNetwork target = evaluate;
  QNetOptState opt;

  std::vector<Transition> replay;
  replay.reserve(config.replay_capacity);
  std::size_t write_pos = 0;
  int updates = 0;

  for (int ep = 0; ep < config.episodes; ++ep) {
    const double eps =
        config.eps_end + (config.eps_start - config.eps_end) * std::pow(config.eps_decay, ep);
    AuctionState s = env_reset(n);
    bool terminal = false;
    while (!terminal) {
      const int a = policy_action(evaluate, s, eps, rng);
      Transition t = env_step(s, a, profiles, model);
      s = t.next_state;
      terminal = t.terminal;
      if (static_cast<int>(replay.size()) < config.replay_capacity) {
        replay.push_back(std::move(t));
      } else {
        replay[write_pos] = std::move(t);
        write_pos = (write_pos + 1) % replay.size();
      }

      if (static_cast<int>(replay.size()) < config.batch_size) continue;

      std::uniform_int_distribution<std::size_t> pick(0, replay.size() - 1);
      std::vector<Transition> batch;
      batch.reserve(config.batch_size);
      for (int i = 0; i < config.batch_size; ++i) batch.push_back(replay[pick(rng)]);

      const Eigen::VectorXd y = td_target(batch, evaluate, target, config.gamma);
      Eigen::MatrixXd states(config.batch_size, n);
      for (int i = 0; i < config.batch_size; ++i)
        states.row(i) = to_vector(batch[i].state).transpose();
      NetCache cache = net_forward(evaluate, states);

      // squared TD error, mean over the batch, gradient only at taken actions
      Eigen::MatrixXd dq = Eigen::MatrixXd::Zero(config.batch_size, n);
      for (int i = 0; i < config.batch_size; ++i) {
        const int a_i = batch[i].action;
        dq(i, a_i) = 2.0 * (cache.q(i, a_i) - y[i]) / config.batch_size;
      }
      adam_step(evaluate, net_backward(evaluate, cache, dq), config.learning_rate, opt);
      ++updates;
      if (updates % config.target_sync == 0) target = evaluate;
    }
  }
  return evaluate;
}

AuctionOutcome greedy_rollout(const QNetwork& net, const std::vector<ClientProfile>& profiles,
                              const SurplusModel& model) {
  const int n = static_cast<int>(profiles.size());
  if (net.n_actions() != n) throw std::invalid_argument("greedy_rollout: net/profile mismatch");

  AuctionState s = env_reset(n);
  std::vector<AuctionOutcome::Step> trace;
  std::vector<int> actions;
  double running = surplus(s, profiles, model);
  double best_surplus = running;
  std::size_t best_len = 0;

  for (int step = 0; step < n; ++step) {
    const int a = masked_argmax(net.q_values(s), s);
    Transition t = env_step(s, a, profiles, model);
    trace.push_back({a, t.reward});
    actions.push_back(a);
    running += t.reward;
    if (running > best_surplus) {
      best_surplus = running;
      best_len = actions.size();
    }
    s = t.next_state;
  }

  Selection sel(n, 0);
  for (std::size_t i = 0; i < best_len; ++i) sel[actions[i]] = 1;
  return settle(std::move(sel), profiles, model, std::move(trace));
}

AuctionOutcome simple_auction(const std::vector<ClientProfile>& profiles,
                              const SurplusModel& model) {
  const int n = static_cast<int>(profiles.size());
  if (n < 1) throw std::invalid_argument("simple_auction: no clients");
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (profiles[a].bid != profiles[b].bid) return profiles[a].bid < profiles[b].bid;
    return profiles[a].client_id < profiles[b].client_id;
  });
  const int winners = static_cast<int>(std::ceil(0.8 * n));
  Selection sel(n, 0);
  for (int i = 0; i < winners; ++i) sel[order[i]] = 1;
  return settle(std::move(sel), profiles, model);
}

AuctionOutcome greedy_all(const std::vector<ClientProfile>& profiles, const SurplusModel& model) {
  if (profiles.empty()) throw std::invalid_argument("greedy_all: no clients");
  return settle(Selection(profiles.size(), 1), profiles, model);
}

}  // namespace fedrec
