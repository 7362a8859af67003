#include "fedrec/ledger.hpp"

#include <chrono>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include <openssl/sha.h>

namespace fedrec {

Digest sha256(const std::uint8_t* data, std::size_t len) {
  Digest out{};
  SHA256(data, len, out.data());
  return out;
}

Digest sha256(const std::vector<std::uint8_t>& data) { return sha256(data.data(), data.size()); }

std::string hex(const Digest& d) {
  static const char* digits = "0123456789abcdef";
  std::string s;
  s.reserve(64);
  for (auto b : d) {
    s.push_back(digits[b >> 4]);
    s.push_back(digits[b & 0xf]);
  }
  return s;
}

const char* payload_type_name(PayloadType t) {
  switch (t) {
    case PayloadType::LocalUpdate: return "local-update";
    case PayloadType::GlobalModel: return "global-model";
    case PayloadType::AuctionResult: return "auction-result";
    case PayloadType::Payment: return "payment";
  }
  return "unknown";
}

namespace {

void put_u64(std::vector<std::uint8_t>& buf, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) buf.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_i64(std::vector<std::uint8_t>& buf, std::int64_t v) {
  put_u64(buf, static_cast<std::uint64_t>(v));
}

}  // namespace

std::vector<std::uint8_t> encode_block_header(const EvidenceBlock& b) {
  std::vector<std::uint8_t> buf;
  buf.reserve(97);
  put_u64(buf, b.index);
  put_i64(buf, b.timestamp);
  buf.insert(buf.end(), b.prev_hash.begin(), b.prev_hash.end());
  buf.push_back(static_cast<std::uint8_t>(b.payload_type));
  put_i64(buf, b.actor_id);
  put_i64(buf, b.round);
  buf.insert(buf.end(), b.payload_digest.begin(), b.payload_digest.end());
  return buf;
}

void Ledger::set_store_dir(const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  store_dir_ = dir;
}

const EvidenceBlock& Ledger::append(PayloadType type, std::int64_t actor_id, std::int64_t round,
                                    const std::vector<std::uint8_t>& payload) {
  EvidenceBlock b;
  b.index = chain_.size();
  if (clock_ == Clock::Logical) {
    b.timestamp = logical_++;
  } else {
    b.timestamp = std::chrono::duration_cast<std::chrono::seconds>(
                      std::chrono::system_clock::now().time_since_epoch())
                      .count();
  }
  if (!chain_.empty()) b.prev_hash = chain_.back().block_hash;
  b.payload_type = type;
  b.actor_id = actor_id;
  b.round = round;
  b.payload_digest = sha256(payload);
  b.block_hash = sha256(encode_block_header(b));

  if (store_dir_) {
    const auto file = *store_dir_ / hex(b.payload_digest);
    if (!std::filesystem::exists(file)) {
      std::ofstream out(file, std::ios::binary);
      out.write(reinterpret_cast<const char*>(payload.data()),
                static_cast<std::streamsize>(payload.size()));
    }
  }
  chain_.push_back(b);
  return chain_.back();
}

std::vector<EvidenceBlock> Ledger::retrieve(const BlockFilter& filter) const {
  std::vector<EvidenceBlock> out;
  for (const auto& b : chain_) {
    if (filter.payload_type && *filter.payload_type != b.payload_type) continue;
    if (filter.actor_id && *filter.actor_id != b.actor_id) continue;
    if (filter.round && *filter.round != b.round) continue;
    out.push_back(b);
  }
  return out;
}

std::optional<Violation> verify_chain(const std::vector<EvidenceBlock>& chain) {
  return verify_chain(chain, std::nullopt);
}

std::optional<Violation> verify_chain(const std::vector<EvidenceBlock>& chain,
                                      const std::optional<std::filesystem::path>& store_dir) {
  Digest prev{};
  for (std::size_t i = 0; i < chain.size(); ++i) {
    const auto& b = chain[i];
    if (b.index != i) return Violation{i, "index-mismatch"};
    if (b.prev_hash != prev) return Violation{i, "link-mismatch"};
    if (sha256(encode_block_header(b)) != b.block_hash) return Violation{i, "hash-mismatch"};
    if (store_dir) {
      const auto file = *store_dir / hex(b.payload_digest);
      std::ifstream in(file, std::ios::binary);
      if (!in) return Violation{i, "payload-missing"};
      std::vector<std::uint8_t> payload((std::istreambuf_iterator<char>(in)),
                                        std::istreambuf_iterator<char>());
      if (sha256(payload) != b.payload_digest) return Violation{i, "payload-mismatch"};
    }
    prev = b.block_hash;
  }
  return std::nullopt;
}

std::optional<Violation> Ledger::verify() const { return verify_chain(chain_, store_dir_); }

void Ledger::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write chain file: " + path.string());
  for (const auto& b : chain_) {
    std::vector<std::uint8_t> body = encode_block_header(b);
    body.insert(body.end(), b.block_hash.begin(), b.block_hash.end());
    const auto len = static_cast<std::uint32_t>(body.size());
    std::uint8_t lenbuf[4];
    for (int i = 0; i < 4; ++i) lenbuf[i] = static_cast<std::uint8_t>(len >> (8 * i));
    out.write(reinterpret_cast<const char*>(lenbuf), 4);
    out.write(reinterpret_cast<const char*>(body.data()), static_cast<std::streamsize>(len));
  }
}

Ledger Ledger::load(const std::filesystem::path& path, Clock clock) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read chain file: " + path.string());
  Ledger ledger(clock);
  while (true) {
    std::uint8_t lenbuf[4];
    in.read(reinterpret_cast<char*>(lenbuf), 4);
    if (in.gcount() == 0 && in.eof()) break;
    if (in.gcount() != 4) throw std::runtime_error("truncated chain file");
    std::uint32_t len = 0;
    for (int i = 0; i < 4; ++i) len |= static_cast<std::uint32_t>(lenbuf[i]) << (8 * i);
    if (len != 129) throw std::runtime_error("unexpected block length in chain file");
    std::vector<std::uint8_t> body(len);
    in.read(reinterpret_cast<char*>(body.data()), len);
    if (in.gcount() != static_cast<std::streamsize>(len))
      throw std::runtime_error("truncated chain file");

    EvidenceBlock b;
    std::size_t pos = 0;
    auto get_u64 = [&] {
      std::uint64_t v = 0;
      for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(body[pos++]) << (8 * i);
      return v;
    };
    b.index = get_u64();
    b.timestamp = static_cast<std::int64_t>(get_u64());
    std::memcpy(b.prev_hash.data(), body.data() + pos, 32);
    pos += 32;
    b.payload_type = static_cast<PayloadType>(body[pos++]);
    b.actor_id = static_cast<std::int64_t>(get_u64());
    b.round = static_cast<std::int64_t>(get_u64());
    std::memcpy(b.payload_digest.data(), body.data() + pos, 32);
    pos += 32;
    std::memcpy(b.block_hash.data(), body.data() + pos, 32);
    ledger.chain_.push_back(b);
  }
  return ledger;
}

std::optional<std::vector<std::uint8_t>> Ledger::load_payload(const Digest& digest) const {
  if (!store_dir_) return std::nullopt;
  std::ifstream in(*store_dir_ / hex(digest), std::ios::binary);
  if (!in) return std::nullopt;
  return std::vector<std::uint8_t>((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
}

}  // namespace fedrec
