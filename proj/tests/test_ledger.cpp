#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "fedrec/ledger.hpp"

using namespace fedrec;

namespace {

std::vector<std::uint8_t> bytes(const std::string& s) { return {s.begin(), s.end()}; }

Ledger build_chain(int n) {
  Ledger ledger(Ledger::Clock::Logical);
  for (int i = 0; i < n; ++i)
    ledger.append(static_cast<PayloadType>(i % 4), i % 3, i / 3, bytes("payload-" + std::to_string(i)));
  return ledger;
}

}  // namespace

TEST_CASE("append basics") {
  Ledger ledger(Ledger::Clock::Logical);

  const auto& genesis = ledger.append(PayloadType::LocalUpdate, 0, 0, bytes("a"));
  CHECK(genesis.index == 0);
  CHECK(genesis.prev_hash == Digest{});

  const auto& second = ledger.append(PayloadType::LocalUpdate, 1, 0, bytes("a"));
  CHECK(second.index == 1);
  CHECK(second.prev_hash == genesis.block_hash);
  // identical payloads share a digest, but headers (and hashes) differ
  CHECK(second.payload_digest == genesis.payload_digest);
  CHECK(second.block_hash != genesis.block_hash);

  for (int i = 0; i < 5; ++i) ledger.append(PayloadType::Payment, 2, 1, bytes("x"));
  CHECK(ledger.blocks().back().index == 6);
}

TEST_CASE("verify detects tampering") {
  auto ledger = build_chain(10);
  CHECK(!verify_chain(ledger.blocks()));

  SUBCASE("payload digest bit flip") {
    auto chain = ledger.blocks();
    chain[4].payload_digest[0] ^= 1;
    auto v = verify_chain(chain);
    REQUIRE(v);
    CHECK(v->index == 4);
    CHECK(v->reason == "hash-mismatch");
  }

  SUBCASE("deleted block breaks the link") {
    auto chain = ledger.blocks();
    chain.erase(chain.begin() + 3);
    auto v = verify_chain(chain);
    REQUIRE(v);
    CHECK(v->index == 3);
  }

  SUBCASE("randomized single-bit tampering always detected at or before the mutation") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 200; ++trial) {
      auto chain = ledger.blocks();
      std::uniform_int_distribution<std::size_t> pick_block(0, chain.size() - 1);
      const std::size_t b = pick_block(rng);
      auto header = encode_block_header(chain[b]);
      std::uniform_int_distribution<std::size_t> pick_byte(0, header.size() + 31);
      const std::size_t byte = pick_byte(rng);
      std::uniform_int_distribution<int> pick_bit(0, 7);
      const std::uint8_t mask = static_cast<std::uint8_t>(1u << pick_bit(rng));

      // mutate one bit of one stored field
      if (byte < 8) chain[b].index ^= static_cast<std::uint64_t>(mask) << (8 * byte);
      else if (byte < 16) chain[b].timestamp ^= static_cast<std::int64_t>(mask) << (8 * (byte - 8));
      else if (byte < 48) chain[b].prev_hash[byte - 16] ^= mask;
      else if (byte < 49) chain[b].payload_type = static_cast<PayloadType>(
          static_cast<std::uint8_t>(chain[b].payload_type) ^ (mask & 3 ? mask & 3 : 1));
      else if (byte < 57) chain[b].actor_id ^= static_cast<std::int64_t>(mask) << (8 * (byte - 49));
      else if (byte < 65) chain[b].round ^= static_cast<std::int64_t>(mask) << (8 * (byte - 57));
      else if (byte < 97) chain[b].payload_digest[byte - 65] ^= mask;
      else chain[b].block_hash[byte - 97] ^= mask;

      auto v = verify_chain(chain);
      REQUIRE(v);
      CHECK(v->index <= b);
    }
  }
}

TEST_CASE("retrieve filters") {
  Ledger ledger(Ledger::Clock::Logical);
  // round 3 with two local updates from two clients
  ledger.append(PayloadType::LocalUpdate, 0, 3, bytes("u0"));
  ledger.append(PayloadType::LocalUpdate, 1, 3, bytes("u1"));
  ledger.append(PayloadType::GlobalModel, kServerActor, 3, bytes("g"));
  ledger.append(PayloadType::LocalUpdate, 0, 4, bytes("u0b"));

  CHECK(ledger.retrieve({PayloadType::LocalUpdate, std::nullopt, 3}).size() == 2);
  CHECK(ledger.retrieve({}).size() == 4);
  CHECK(ledger.retrieve({std::nullopt, 42, std::nullopt}).empty());
  CHECK(ledger.retrieve({std::nullopt, kServerActor, std::nullopt}).size() == 1);
}

TEST_CASE("persistence round trip and payload store verification") {
  namespace fs = std::filesystem;
  const fs::path dir = "test_ledger_store";
  fs::remove_all(dir);

  Ledger ledger(Ledger::Clock::Logical);
  ledger.set_store_dir(dir);
  for (int i = 0; i < 6; ++i)
    ledger.append(PayloadType::LocalUpdate, i, 0, bytes("payload" + std::to_string(i)));
  ledger.save("test_chain.bin");

  auto loaded = Ledger::load("test_chain.bin");
  REQUIRE(loaded.blocks().size() == 6);
  CHECK(!verify_chain(loaded.blocks(), dir));
  for (std::size_t i = 0; i < 6; ++i)
    CHECK(loaded.blocks()[i].block_hash == ledger.blocks()[i].block_hash);

  // corrupt one payload file: verification names its block
  const auto victim = dir / hex(ledger.blocks()[2].payload_digest);
  {
    std::fstream f(victim, std::ios::in | std::ios::out | std::ios::binary);
    char c;
    f.read(&c, 1);
    f.seekp(0);
    c = static_cast<char>(c ^ 0x40);
    f.write(&c, 1);
  }
  auto v = verify_chain(loaded.blocks(), dir);
  REQUIRE(v);
  CHECK(v->index == 2);
  CHECK(v->reason == "payload-mismatch");

  fs::remove_all(dir);
  fs::remove("test_chain.bin");
}

TEST_CASE("empty chain is vacuously valid") {
  Ledger ledger(Ledger::Clock::Logical);
  CHECK(!ledger.verify());
  ledger.save("empty_chain.bin");
  auto loaded = Ledger::load("empty_chain.bin");
  CHECK(loaded.blocks().empty());
  CHECK(!verify_chain(loaded.blocks()));
  std::filesystem::remove("empty_chain.bin");
}

TEST_CASE("sha256 sanity") {
  // SHA-256 of the empty string, a published constant
  const auto d = sha256(nullptr, 0);
  CHECK(hex(d) == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(hex(sha256(bytes("abc"))) ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}
