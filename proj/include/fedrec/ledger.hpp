#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace fedrec {

using Digest = std::array<std::uint8_t, 32>;

Digest sha256(const std::uint8_t* data, std::size_t len);
Digest sha256(const std::vector<std::uint8_t>& data);
std::string hex(const Digest& d);

enum class PayloadType : std::uint8_t {
  LocalUpdate = 0,
  GlobalModel = 1,
  AuctionResult = 2,
  Payment = 3,
};

const char* payload_type_name(PayloadType t);

inline constexpr std::int64_t kServerActor = -1;

struct EvidenceBlock {
  std::uint64_t index = 0;
  std::int64_t timestamp = 0;
  Digest prev_hash{};
  PayloadType payload_type = PayloadType::LocalUpdate;
  std::int64_t actor_id = kServerActor;
  std::int64_t round = 0;
  Digest payload_digest{};
  Digest block_hash{};
};

// Canonical header bytes (everything except block_hash), the hash preimage.
std::vector<std::uint8_t> encode_block_header(const EvidenceBlock& b);

struct Violation {
  std::uint64_t index = 0;
  std::string reason;
};

struct BlockFilter {
  std::optional<PayloadType> payload_type;
  std::optional<std::int64_t> actor_id;
  std::optional<std::int64_t> round;
};

// Append-only hash-chained evidence store. Payload bytes go to a
// content-addressed directory when one is configured; blocks carry
// digests only.
class Ledger {
 public:
  enum class Clock { Wall, Logical };

  explicit Ledger(Clock clock = Clock::Wall) : clock_(clock) {}

  void set_store_dir(const std::filesystem::path& dir);
  const std::optional<std::filesystem::path>& store_dir() const { return store_dir_; }

  const EvidenceBlock& append(PayloadType type, std::int64_t actor_id, std::int64_t round,
                              const std::vector<std::uint8_t>& payload);

  const std::vector<EvidenceBlock>& blocks() const { return chain_; }
  std::vector<EvidenceBlock> retrieve(const BlockFilter& filter) const;

  std::optional<Violation> verify() const;

  void save(const std::filesystem::path& path) const;
  static Ledger load(const std::filesystem::path& path, Clock clock = Clock::Wall);

  std::optional<std::vector<std::uint8_t>> load_payload(const Digest& digest) const;

 private:
  std::vector<EvidenceBlock> chain_;
  std::optional<std::filesystem::path> store_dir_;
  Clock clock_;
  std::int64_t logical_ = 0;
};

// Chain-only verification (hash recomputation and link checks).
std::optional<Violation> verify_chain(const std::vector<EvidenceBlock>& chain);

// Verification including payload files in a content-addressed store.
std::optional<Violation> verify_chain(const std::vector<EvidenceBlock>& chain,
                                      const std::optional<std::filesystem::path>& store_dir);

}  // namespace fedrec
