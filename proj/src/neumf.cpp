#include "fedrec/neumf.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <random>
#include <stdexcept>

namespace fedrec {

namespace {

double xavier_bound(int fan_in, int fan_out) { return std::sqrt(6.0 / (fan_in + fan_out)); }
double kaiming_bound(int fan_in) { return std::sqrt(6.0 / fan_in); }

template <class Rng>
void fill_uniform(Eigen::MatrixXd& m, double bound, Rng& rng) {
  std::uniform_real_distribution<double> dist(-bound, bound);
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = dist(rng);
}

template <class Rng>
void fill_gaussian(Eigen::MatrixXd& m, double stddev, Rng& rng) {
  std::normal_distribution<double> dist(0.0, stddev);
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = dist(rng);
}

// Applies f to every corresponding tensor of the four containers.
template <class F>
void zip_tensors(NeuMFParams& p, const GradientSet& g, GradientSet& m, GradientSet& v, F&& f) {
  f(p.user_emb_gmf, g.user_emb_gmf, m.user_emb_gmf, v.user_emb_gmf);
  f(p.item_emb_gmf, g.item_emb_gmf, m.item_emb_gmf, v.item_emb_gmf);
  f(p.user_emb_mlp, g.user_emb_mlp, m.user_emb_mlp, v.user_emb_mlp);
  f(p.item_emb_mlp, g.item_emb_mlp, m.item_emb_mlp, v.item_emb_mlp);
  for (std::size_t l = 0; l < p.mlp_weights.size(); ++l)
    f(p.mlp_weights[l], g.mlp_weights[l], m.mlp_weights[l], v.mlp_weights[l]);
  for (std::size_t l = 0; l < p.mlp_biases.size(); ++l)
    f(p.mlp_biases[l], g.mlp_biases[l], m.mlp_biases[l], v.mlp_biases[l]);
  f(p.output_weights, g.output_weights, m.output_weights, v.output_weights);
}

void check_congruent(const NeuMFParams& a, const NeuMFParams& b) {
  bool ok = a.user_emb_gmf.rows() == b.user_emb_gmf.rows() &&
            a.user_emb_gmf.cols() == b.user_emb_gmf.cols() &&
            a.item_emb_gmf.rows() == b.item_emb_gmf.rows() &&
            a.mlp_weights.size() == b.mlp_weights.size() &&
            a.output_weights.size() == b.output_weights.size();
  for (std::size_t l = 0; ok && l < a.mlp_weights.size(); ++l)
    ok = a.mlp_weights[l].rows() == b.mlp_weights[l].rows() &&
         a.mlp_weights[l].cols() == b.mlp_weights[l].cols();
  if (!ok) throw std::invalid_argument("parameter/gradient shape mismatch");
}

struct ForwardCache {
  Eigen::MatrixXd pg, qg;          // gathered GMF rows, B x d
  Eigen::MatrixXd x0;              // MLP input, B x 2d
  std::vector<Eigen::MatrixXd> z;  // pre-activations per layer
  std::vector<Eigen::MatrixXd> a;  // post-activations per layer
  Eigen::MatrixXd feat;            // [phi_gmf, phi_mlp], B x (d + w_last)
  Eigen::VectorXd yhat;
};

ForwardCache run_forward(const NeuMFParams& p, const std::vector<int>& users,
                         const std::vector<int>& items) {
  const int B = static_cast<int>(users.size());
  const int d = p.factors();
  for (int b = 0; b < B; ++b) {
    if (users[b] < 0 || users[b] >= p.n_users() || items[b] < 0 || items[b] >= p.n_items())
      throw std::out_of_range("user/item id out of range");
  }

  ForwardCache c;
  c.pg.resize(B, d);
  c.qg.resize(B, d);
  c.x0.resize(B, 2 * d);
  for (int b = 0; b < B; ++b) {
    c.pg.row(b) = p.user_emb_gmf.row(users[b]);
    c.qg.row(b) = p.item_emb_gmf.row(items[b]);
    c.x0.row(b).head(d) = p.user_emb_mlp.row(users[b]);
    c.x0.row(b).tail(d) = p.item_emb_mlp.row(items[b]);
  }

  const std::size_t L = p.mlp_weights.size();
  c.z.resize(L);
  c.a.resize(L);
  const Eigen::MatrixXd* x = &c.x0;
  for (std::size_t l = 0; l < L; ++l) {
    c.z[l].noalias() = (*x) * p.mlp_weights[l];
    c.z[l].rowwise() += p.mlp_biases[l].transpose();
    c.a[l] = c.z[l].cwiseMax(0.0);
    x = &c.a[l];
  }

  const int w_last = L ? static_cast<int>(c.a.back().cols()) : 2 * d;
  c.feat.resize(B, d + w_last);
  c.feat.leftCols(d) = c.pg.cwiseProduct(c.qg);
  c.feat.rightCols(w_last) = L ? c.a.back() : c.x0;

  Eigen::VectorXd logits = c.feat * p.output_weights;
  c.yhat = (1.0 / (1.0 + (-logits.array()).exp())).matrix();
  return c;
}

}  // namespace

NeuMFParams init_params(int n_users, int n_items, const Hyperparams& hyper, std::uint64_t seed) {
  if (n_users < 1 || n_items < 1) throw std::invalid_argument("need at least one user and item");
  if (hyper.factors < 1 || hyper.mlp_widths.empty())
    throw std::invalid_argument("invalid hyperparameters");

  std::mt19937_64 rng(derive_seed(seed, 0xec0ded));
  const int d = hyper.factors;
  const double emb_std = std::sqrt(0.01);

  NeuMFParams p;
  p.user_emb_gmf.resize(n_users, d);
  p.item_emb_gmf.resize(n_items, d);
  p.user_emb_mlp.resize(n_users, d);
  p.item_emb_mlp.resize(n_items, d);
  fill_gaussian(p.user_emb_gmf, emb_std, rng);
  fill_gaussian(p.item_emb_gmf, emb_std, rng);
  fill_gaussian(p.user_emb_mlp, emb_std, rng);
  fill_gaussian(p.item_emb_mlp, emb_std, rng);

  int fan_in = 2 * d;
  for (int width : hyper.mlp_widths) {
    Eigen::MatrixXd w(fan_in, width);
    fill_uniform(w, xavier_bound(fan_in, width), rng);
    p.mlp_weights.push_back(std::move(w));
    p.mlp_biases.push_back(Eigen::VectorXd::Zero(width));
    fan_in = width;
  }

  const int out_len = d + hyper.mlp_widths.back();
  Eigen::MatrixXd h(out_len, 1);
  fill_uniform(h, kaiming_bound(out_len), rng);
  p.output_weights = h.col(0);
  return p;
}

GradientSet zeros_like(const NeuMFParams& params) {
  GradientSet g;
  g.user_emb_gmf = Eigen::MatrixXd::Zero(params.user_emb_gmf.rows(), params.user_emb_gmf.cols());
  g.item_emb_gmf = Eigen::MatrixXd::Zero(params.item_emb_gmf.rows(), params.item_emb_gmf.cols());
  g.user_emb_mlp = Eigen::MatrixXd::Zero(params.user_emb_mlp.rows(), params.user_emb_mlp.cols());
  g.item_emb_mlp = Eigen::MatrixXd::Zero(params.item_emb_mlp.rows(), params.item_emb_mlp.cols());
  for (const auto& w : params.mlp_weights)
    g.mlp_weights.push_back(Eigen::MatrixXd::Zero(w.rows(), w.cols()));
  for (const auto& b : params.mlp_biases) g.mlp_biases.push_back(Eigen::VectorXd::Zero(b.size()));
  g.output_weights = Eigen::VectorXd::Zero(params.output_weights.size());
  return g;
}

Eigen::VectorXd forward_batch(const NeuMFParams& params, const std::vector<int>& users,
                              const std::vector<int>& items) {
  if (users.size() != items.size()) throw std::invalid_argument("user/item lists differ in size");
  if (users.empty()) return {};
  return run_forward(params, users, items).yhat;
}

double forward(const NeuMFParams& params, int user_id, int item_id) {
  return forward_batch(params, {user_id}, {item_id})[0];
}

double loss(const NeuMFParams& params, const std::vector<TrainInstance>& batch) {
  if (batch.empty()) throw std::invalid_argument("loss: empty batch");
  std::vector<int> users, items;
  users.reserve(batch.size());
  items.reserve(batch.size());
  for (const auto& t : batch) {
    users.push_back(t.user_id);
    items.push_back(t.item_id);
  }
  Eigen::VectorXd yhat = forward_batch(params, users, items);
  double total = 0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const double r = batch[i].label - yhat[static_cast<Eigen::Index>(i)];
    total += batch[i].weight * r * r;
  }
  return total;
}

GradientSet gradients(const NeuMFParams& params, const std::vector<TrainInstance>& batch) {
  if (batch.empty()) throw std::invalid_argument("gradients: empty batch");
  const int B = static_cast<int>(batch.size());
  const int d = params.factors();
  std::vector<int> users(B), items(B);
  for (int i = 0; i < B; ++i) {
    users[i] = batch[i].user_id;
    items[i] = batch[i].item_id;
  }
  ForwardCache c = run_forward(params, users, items);

  // dL/dlogit = w * 2 (yhat - y) * yhat (1 - yhat)
  Eigen::VectorXd dlogit(B);
  for (int i = 0; i < B; ++i) {
    const double yh = c.yhat[i];
    dlogit[i] = batch[i].weight * 2.0 * (yh - batch[i].label) * yh * (1.0 - yh);
  }

  GradientSet g = zeros_like(params);
  g.output_weights = c.feat.transpose() * dlogit;

  Eigen::MatrixXd dfeat = dlogit * params.output_weights.transpose();  // B x (d + w_last)

  // GMF branch
  Eigen::MatrixXd dphi = dfeat.leftCols(d);
  Eigen::MatrixXd dpg = dphi.cwiseProduct(c.qg);
  Eigen::MatrixXd dqg = dphi.cwiseProduct(c.pg);

  // MLP branch
  const std::size_t L = params.mlp_weights.size();
  Eigen::MatrixXd dx = dfeat.rightCols(dfeat.cols() - d);
  for (std::size_t l = L; l-- > 0;) {
    Eigen::MatrixXd dz = dx.cwiseProduct((c.z[l].array() > 0.0).cast<double>().matrix());
    const Eigen::MatrixXd& input = (l == 0) ? c.x0 : c.a[l - 1];
    g.mlp_weights[l].noalias() = input.transpose() * dz;
    g.mlp_biases[l] = dz.colwise().sum().transpose();
    dx.noalias() = dz * params.mlp_weights[l].transpose();
  }

  for (int i = 0; i < B; ++i) {
    g.user_emb_gmf.row(users[i]) += dpg.row(i);
    g.item_emb_gmf.row(items[i]) += dqg.row(i);
    g.user_emb_mlp.row(users[i]) += dx.row(i).head(d);
    g.item_emb_mlp.row(items[i]) += dx.row(i).tail(d);
  }
  return g;
}

void optimizer_step(NeuMFParams& params, const GradientSet& grads, const Hyperparams& hyper,
                    OptState& state) {
  check_congruent(params, grads);
  const double lr = hyper.learning_rate;

  if (hyper.optimizer == Hyperparams::Optimizer::Sgd) {
    zip_tensors(params, grads, params, params,
                [&](auto& p, const auto& g, auto&, auto&) { p -= lr * g; });
    return;
  }

  if (!state.initialized) {
    state.m = zeros_like(params);
    state.v = zeros_like(params);
    state.initialized = true;
  }
  state.step += 1;
  const double bc1 = 1.0 - std::pow(kAdamBeta1, state.step);
  const double bc2 = 1.0 - std::pow(kAdamBeta2, state.step);
  zip_tensors(params, grads, state.m, state.v, [&](auto& p, const auto& g, auto& m, auto& v) {
    m = kAdamBeta1 * m + (1.0 - kAdamBeta1) * g;
    v = (kAdamBeta2 * v.array() + (1.0 - kAdamBeta2) * g.array().square()).matrix();
    p.array() -= lr * (m.array() / bc1) / ((v.array() / bc2).sqrt() + kAdamEps);
  });
}

NeuMFParams train_local(NeuMFParams params, const std::vector<TrainInstance>& instances,
                        const Hyperparams& hyper, std::uint64_t seed, OptState* state) {
  if (instances.empty()) throw std::invalid_argument("train_local: empty data");
  OptState local_state;
  OptState& opt = state ? *state : local_state;

  std::mt19937_64 rng(derive_seed(seed, 0x7ea1));
  std::vector<int> order(instances.size());
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 0; epoch < hyper.local_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < order.size(); start += hyper.batch_size) {
      const std::size_t end = std::min(order.size(), start + hyper.batch_size);
      std::vector<TrainInstance> batch;
      batch.reserve(end - start);
      for (std::size_t i = start; i < end; ++i) batch.push_back(instances[order[i]]);
      GradientSet g = gradients(params, batch);
      // normalize the summed gradient so the learning rate is batch-size independent
      const double inv = 1.0 / static_cast<double>(batch.size());
      zip_tensors(g, g, g, g, [&](auto& t, const auto&, auto&, auto&) { t *= inv; });
      optimizer_step(params, g, hyper, opt);
    }
  }
  return params;
}

namespace {

void put_u32(std::vector<std::uint8_t>& buf, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) buf.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_u64(std::vector<std::uint8_t>& buf, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) buf.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_f64(std::vector<std::uint8_t>& buf, double d) {
  std::uint64_t bits;
  std::memcpy(&bits, &d, sizeof bits);
  put_u64(buf, bits);
}

}  // namespace

void begin_tensor_list(std::vector<std::uint8_t>& buf, std::uint32_t count) {
  put_u32(buf, count);
}

void append_tensor(std::vector<std::uint8_t>& buf, const std::string& name,
                   const Eigen::MatrixXd& tensor) {
  put_u32(buf, static_cast<std::uint32_t>(name.size()));
  buf.insert(buf.end(), name.begin(), name.end());
  put_u64(buf, static_cast<std::uint64_t>(tensor.rows()));
  put_u64(buf, static_cast<std::uint64_t>(tensor.cols()));
  for (Eigen::Index i = 0; i < tensor.rows(); ++i)
    for (Eigen::Index j = 0; j < tensor.cols(); ++j) put_f64(buf, tensor(i, j));
}

std::vector<TensorView> parse_tensor_list(const std::vector<std::uint8_t>& buf) {
  std::size_t pos = 0;
  auto need = [&](std::size_t n) {
    if (pos + n > buf.size()) throw std::runtime_error("truncated tensor list");
  };
  auto get_u32 = [&] {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(buf[pos++]) << (8 * i);
    return v;
  };
  auto get_u64 = [&] {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[pos++]) << (8 * i);
    return v;
  };

  const std::uint32_t count = get_u32();
  std::vector<TensorView> out;
  out.reserve(count);
  for (std::uint32_t t = 0; t < count; ++t) {
    TensorView tv;
    const std::uint32_t name_len = get_u32();
    need(name_len);
    tv.name.assign(buf.begin() + pos, buf.begin() + pos + name_len);
    pos += name_len;
    const auto rows = static_cast<Eigen::Index>(get_u64());
    const auto cols = static_cast<Eigen::Index>(get_u64());
    tv.values.resize(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
      for (Eigen::Index j = 0; j < cols; ++j) {
        const std::uint64_t bits = get_u64();
        double d;
        std::memcpy(&d, &bits, sizeof d);
        tv.values(i, j) = d;
      }
    out.push_back(std::move(tv));
  }
  if (pos != buf.size()) throw std::runtime_error("trailing bytes after tensor list");
  return out;
}

}  // namespace fedrec
