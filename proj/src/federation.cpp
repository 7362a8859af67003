#include "fedrec/federation.hpp"

#include <algorithm>
#include <stdexcept>

namespace fedrec {

namespace {

template <class F>
void zip_shared(SharedParams& acc, const SharedParams& in, F&& f) {
  f(acc.item_emb_gmf, in.item_emb_gmf);
  f(acc.item_emb_mlp, in.item_emb_mlp);
  for (std::size_t l = 0; l < acc.mlp_weights.size(); ++l)
    f(acc.mlp_weights[l], in.mlp_weights[l]);
  for (std::size_t l = 0; l < acc.mlp_biases.size(); ++l) f(acc.mlp_biases[l], in.mlp_biases[l]);
  f(acc.output_weights, in.output_weights);
}

bool congruent(const SharedParams& a, const SharedParams& b) {
  if (a.item_emb_gmf.rows() != b.item_emb_gmf.rows() ||
      a.item_emb_gmf.cols() != b.item_emb_gmf.cols() ||
      a.item_emb_mlp.rows() != b.item_emb_mlp.rows() ||
      a.mlp_weights.size() != b.mlp_weights.size() ||
      a.mlp_biases.size() != b.mlp_biases.size() ||
      a.output_weights.size() != b.output_weights.size())
    return false;
  for (std::size_t l = 0; l < a.mlp_weights.size(); ++l)
    if (a.mlp_weights[l].rows() != b.mlp_weights[l].rows() ||
        a.mlp_weights[l].cols() != b.mlp_weights[l].cols())
      return false;
  return true;
}

}  // namespace

SharedParams extract_shared(const NeuMFParams& params) {
  SharedParams s;
  s.item_emb_gmf = params.item_emb_gmf;
  s.item_emb_mlp = params.item_emb_mlp;
  s.mlp_weights = params.mlp_weights;
  s.mlp_biases = params.mlp_biases;
  s.output_weights = params.output_weights;
  return s;
}

void apply_global(NeuMFParams& params, const SharedParams& shared) {
  if (!congruent(extract_shared(params), shared))
    throw std::invalid_argument("apply_global: shape mismatch");
  params.item_emb_gmf = shared.item_emb_gmf;
  params.item_emb_mlp = shared.item_emb_mlp;
  params.mlp_weights = shared.mlp_weights;
  params.mlp_biases = shared.mlp_biases;
  params.output_weights = shared.output_weights;
}

SharedParams fedavg(const std::vector<std::pair<SharedParams, long long>>& uploads) {
  if (uploads.empty()) throw std::invalid_argument("fedavg: no uploads");
  long long n = 0;
  for (const auto& [s, nk] : uploads) {
    if (nk <= 0) throw std::invalid_argument("fedavg: dataset sizes must be positive");
    if (!congruent(uploads.front().first, s))
      throw std::invalid_argument("fedavg: incongruent uploads");
    n += nk;
  }
  SharedParams out = uploads.front().first;
  const double w0 = static_cast<double>(uploads.front().second) / static_cast<double>(n);
  zip_shared(out, out, [&](auto& t, const auto&) { t *= w0; });
  for (std::size_t k = 1; k < uploads.size(); ++k) {
    const double wk = static_cast<double>(uploads[k].second) / static_cast<double>(n);
    zip_shared(out, uploads[k].first, [&](auto& acc, const auto& in) { acc += wk * in; });
  }
  return out;
}

std::vector<std::uint8_t> serialize_shared(const SharedParams& shared) {
  std::vector<std::uint8_t> buf;
  const auto count = static_cast<std::uint32_t>(3 + shared.mlp_weights.size() +
                                                shared.mlp_biases.size());
  begin_tensor_list(buf, count);
  append_tensor(buf, "item_emb_gmf", shared.item_emb_gmf);
  append_tensor(buf, "item_emb_mlp", shared.item_emb_mlp);
  for (std::size_t l = 0; l < shared.mlp_weights.size(); ++l)
    append_tensor(buf, "mlp_w" + std::to_string(l), shared.mlp_weights[l]);
  for (std::size_t l = 0; l < shared.mlp_biases.size(); ++l)
    append_tensor(buf, "mlp_b" + std::to_string(l), shared.mlp_biases[l]);
  append_tensor(buf, "output_weights", shared.output_weights);
  return buf;
}

Digest hash_params(const SharedParams& shared) { return sha256(serialize_shared(shared)); }

double global_loss(const std::vector<const ClientState*>& clients, const SharedParams& shared) {
  if (clients.empty()) throw std::invalid_argument("global_loss: no clients");
  double total = 0;
  for (const ClientState* c : clients) {
    NeuMFParams p = c->params;
    apply_global(p, shared);
    total += loss(p, c->train) / static_cast<double>(c->train.size());
  }
  return total / static_cast<double>(clients.size());
}

double global_loss(const std::vector<ClientState>& clients, const SharedParams& shared) {
  std::vector<const ClientState*> ptrs;
  ptrs.reserve(clients.size());
  for (const auto& c : clients) ptrs.push_back(&c);
  return global_loss(ptrs, shared);
}

SharedParams run_round(std::vector<ClientState*>& selected, const SharedParams& shared,
                       const Hyperparams& hyper, Ledger& ledger, int round, std::uint64_t seed,
                       RoundRecord* record) {
  if (selected.empty()) throw std::invalid_argument("run_round: empty selection");

  // appends happen in ascending client_id order so the chain is deterministic
  std::vector<ClientState*> order = selected;
  std::sort(order.begin(), order.end(),
            [](const ClientState* a, const ClientState* b) { return a->client_id < b->client_id; });

  if (record) {
    record->round = round;
    record->participants.clear();
    record->upload_digests.clear();
    record->sizes.clear();
  }

  std::vector<std::pair<SharedParams, long long>> uploads;
  uploads.reserve(order.size());
  for (ClientState* c : order) {
    apply_global(c->params, shared);
    c->params = train_local(std::move(c->params), c->train, hyper,
                            derive_seed(seed, (static_cast<std::uint64_t>(round) << 32) ^
                                                  static_cast<std::uint64_t>(c->client_id)));
    SharedParams up = extract_shared(c->params);
    const auto payload = serialize_shared(up);
    const auto& block = ledger.append(PayloadType::LocalUpdate, c->client_id, round, payload);
    if (record) {
      record->participants.push_back(c->client_id);
      record->upload_digests.push_back(block.payload_digest);
      record->sizes.push_back(c->n_k());
    }
    uploads.emplace_back(std::move(up), c->n_k());
  }

  SharedParams aggregate = fedavg(uploads);
  const auto& block =
      ledger.append(PayloadType::GlobalModel, kServerActor, round, serialize_shared(aggregate));
  if (record) record->aggregate_digest = block.payload_digest;
  return aggregate;
}

FederationResult run_federation(std::vector<ClientState>& clients,
                                const std::vector<int>& selected_ids, int rounds,
                                const Hyperparams& hyper, Ledger& ledger, std::uint64_t seed) {
  if (rounds < 1) throw std::invalid_argument("run_federation: rounds must be >= 1");
  if (clients.empty()) throw std::invalid_argument("run_federation: no clients");

  std::vector<ClientState*> selected;
  for (int id : selected_ids) {
    auto it = std::find_if(clients.begin(), clients.end(),
                           [&](const ClientState& c) { return c.client_id == id; });
    if (it == clients.end()) throw std::invalid_argument("run_federation: unknown client id");
    selected.push_back(&*it);
  }
  if (selected.empty()) throw std::invalid_argument("run_federation: empty selection");

  FederationResult result;
  result.shared = extract_shared(selected.front()->params);
  // the global loss is the mean over the participating set
  std::vector<const ClientState*> participants(selected.begin(), selected.end());
  for (int t = 0; t < rounds; ++t) {
    result.shared = run_round(selected, result.shared, hyper, ledger, t, seed);
    result.metrics.push_back({t, global_loss(participants, result.shared)});
  }
  return result;
}

}  // namespace fedrec
