// Copyright 2026 The emoctl Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "emoctl/memory.hpp"

#include <bit>
#include <numeric>

#include <doctest.h>

#include "emoctl/rng.hpp"
#include "emoctl/trace_io.hpp"
#include "reconcile_oracle.hpp"

using namespace emoctl;
using emoctl::testing::OracleRecord;
using emoctl::testing::oracle_reconcile;

namespace {

StoreConfig small_config(int capacity = 16, bool audit = true) {
  StoreConfig config;
  config.capacity = capacity;
  config.key_dim = 4;
  config.channels = 2;
  config.drives = 2;
  config.policies = 5;
  config.combine_lambda = 0.5;
  config.flash_threshold = 0.8;
  config.audit_access = audit;
  return config;
}

CategoryVector unit_key(double a, double b, double c = 0.0, double d = 0.0) {
  Eigen::VectorXd v(4);
  v << a, b, c, d;
  return CategoryVector{v / v.norm()};
}

Episode make_episode(const CategoryVector& key, double succ, int policy = 0,
                     double magnitude = 0.1) {
  Episode e;
  e.key = key;
  e.z_pre = AffectState::zero(2, 2);
  e.z_pre.magnitude.setConstant(magnitude);
  e.z_pre.valence.setConstant(-magnitude);
  e.z_post = AffectState::zero(2, 2);
  e.z_post.magnitude.setConstant(magnitude / 2.0);
  e.hints = PolicyHints::zero(5);
  e.hints.scores[policy] = 1.0;
  e.succ = succ;
  return e;
}

Episode random_episode(Rng& rng) {
  Eigen::VectorXd raw(4);
  for (int i = 0; i < 4; ++i) raw[i] = rng.uniform01() + 1e-6;
  Episode e;
  e.key = CategoryVector{raw / raw.norm()};
  e.z_pre = AffectState::zero(2, 2);
  e.z_post = AffectState::zero(2, 2);
  for (int i = 0; i < 2; ++i) {
    e.z_pre.valence[i] = rng.uniform01() * 2 - 1;
    e.z_pre.magnitude[i] = rng.uniform01();
    e.z_post.valence[i] = rng.uniform01() * 2 - 1;
    e.z_post.magnitude[i] = rng.uniform01();
    e.z_pre.drive[i] = rng.uniform01() * 2 - 1;
    e.z_post.drive[i] = rng.uniform01() * 2 - 1;
  }
  e.z_pre.arousal = rng.uniform01();
  e.z_post.arousal = rng.uniform01();
  e.hints = PolicyHints::zero(5);
  for (int i = 0; i < 5; ++i) e.hints.scores[i] = rng.uniform01() * 4 - 2;
  e.succ = rng.uniform01() * 2 - 1;
  return e;
}

bool same_bits(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  if (a.size() != b.size()) return false;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (std::bit_cast<std::uint64_t>(a[i]) != std::bit_cast<std::uint64_t>(b[i])) return false;
  }
  return true;
}

bool same_bits(const RetrievalResult& a, const RetrievalResult& b) {
  return same_bits(a.z_mem.flatten(), b.z_mem.flatten()) &&
         same_bits(a.h_mem.scores, b.h_mem.scores) &&
         std::bit_cast<std::uint64_t>(a.reliability) ==
             std::bit_cast<std::uint64_t>(b.reliability);
}

}  // namespace

TEST_CASE("store: first write lands at index 0") {
  EpisodeStore store(small_config());
  WriterToken writer = store.make_writer();
  auto phase = store.enter_phase(TickPhase::kStorage);
  const std::uint64_t index = store.store(writer, make_episode(unit_key(1, 0), 0.5));
  CHECK(index == 0);
  CHECK(store.size() == 1);
}

TEST_CASE("store: out-of-range succ is a schema violation") {
  EpisodeStore store(small_config());
  WriterToken writer = store.make_writer();
  auto phase = store.enter_phase(TickPhase::kStorage);
  Episode bad = make_episode(unit_key(1, 0), 0.5);
  bad.succ = 1.5;
  CHECK_THROWS_AS(store.store(writer, bad), std::invalid_argument);
  CHECK(store.size() == 0);
}

TEST_CASE("store: malformed keys are rejected") {
  EpisodeStore store(small_config());
  WriterToken writer = store.make_writer();
  auto phase = store.enter_phase(TickPhase::kStorage);
  Episode bad = make_episode(unit_key(1, 0), 0.5);
  bad.key.c *= 2.0;  // not unit norm
  CHECK_THROWS_AS(store.store(writer, bad), std::invalid_argument);
  bad = make_episode(unit_key(1, 0), 0.5);
  bad.key.c[0] = -bad.key.c[0];  // negative entry
  CHECK_THROWS_AS(store.store(writer, bad), std::invalid_argument);
}

TEST_CASE("store: capacity eviction removes the lowest-utility record") {
  // Four records; utility is (flash-bulb, retrieval count, recency).
  //   0: flash (succ 0.9), never retrieved
  //   1: plain, retrieved once (via a targeted query)
  //   2: plain, never retrieved   <- expected victim (oldest of the ties)
  //   3: plain, never retrieved
  StoreConfig config = small_config(/*capacity=*/4);
  EpisodeStore store(config);
  WriterToken writer = store.make_writer();
  ReaderToken reader = store.make_reader();
  {
    auto phase = store.enter_phase(TickPhase::kStorage);
    store.store(writer, make_episode(unit_key(1, 0, 0, 0), 0.9));   // flash
    store.store(writer, make_episode(unit_key(0, 1, 0, 0), 0.2));
    store.store(writer, make_episode(unit_key(0, 0, 1, 0), 0.3));
    store.store(writer, make_episode(unit_key(0, 0, 0, 1), 0.4));
  }
  {
    auto phase = store.enter_phase(TickPhase::kRetrieval);
    store.retrieve(reader, unit_key(0, 1, 0, 0), 1);  // bumps record 1 only
  }
  {
    auto phase = store.enter_phase(TickPhase::kStorage);
    store.store(writer, make_episode(unit_key(1, 1, 1, 1), 0.5));
  }
  CHECK(store.size() == 4);
  const std::vector<Episode> kept = store.snapshot(reader);
  // write order of survivors: 0 (flash), 1 (retrieved), 3, 4 (new)
  CHECK(kept.size() == 4);
  CHECK(kept[0].succ == 0.9);
  CHECK(kept[1].succ == 0.2);
  CHECK(kept[2].succ == 0.4);
  CHECK(kept[3].succ == 0.5);
}

TEST_CASE("retrieve: empty memory yields the empty result") {
  EpisodeStore store(small_config());
  ReaderToken reader = store.make_reader();
  auto phase = store.enter_phase(TickPhase::kRetrieval);
  const RetrievalResult r = store.retrieve(reader, unit_key(1, 0), 4);
  CHECK(r.reliability == 0.0);
  CHECK(r.z_mem.flatten().isZero(0.0));
  CHECK(r.h_mem.scores.isZero(0.0));
}

TEST_CASE("retrieve: two identical keys average field-wise") {
  EpisodeStore store(small_config());
  WriterToken writer = store.make_writer();
  ReaderToken reader = store.make_reader();
  const CategoryVector key = unit_key(1, 1);
  Episode a = make_episode(key, 0.5);
  a.z_pre.valence.setConstant(-0.4);
  a.z_post.valence.setConstant(-0.2);
  Episode b = make_episode(key, 0.5);
  b.z_pre.valence.setConstant(0.8);
  b.z_post.valence.setConstant(0.6);
  {
    auto phase = store.enter_phase(TickPhase::kStorage);
    store.store(writer, a);
    store.store(writer, b);
  }
  auto phase = store.enter_phase(TickPhase::kRetrieval);
  const RetrievalResult r = store.retrieve(reader, key, 2);
  // combine = 0.5 z_pre + 0.5 z_post; equal weights 0.5 each:
  //   0.5*(-0.3) + 0.5*(0.7) = 0.2
  CHECK(r.z_mem.valence[0] == doctest::Approx(0.2).epsilon(1e-14));
  CHECK(r.reliability == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("retrieve: worked three-episode fixture with signed success") {
  // similarities (0.9, 0.5, 0.1) against query (1,0,0,0); K = 2 keeps the
  // first two, weights (0.9, 0.5)/1.4; succ (+1, -1) with one-hot hints on
  // policies 0 and 1:
  //   h_mem = (0.9/1.4, -0.5/1.4, 0, 0, 0)
  EpisodeStore store(small_config());
  WriterToken writer = store.make_writer();
  ReaderToken reader = store.make_reader();
  auto key_for = [](double sim) { return unit_key(sim, std::sqrt(1.0 - sim * sim)); };
  Episode e0 = make_episode(key_for(0.9), 1.0, /*policy=*/0);
  Episode e1 = make_episode(key_for(0.5), -1.0, /*policy=*/1);
  Episode e2 = make_episode(key_for(0.1), 0.5, /*policy=*/2);
  e0.z_pre.arousal = 0.8;
  e0.z_post.arousal = 0.4;
  e1.z_pre.arousal = 0.2;
  e1.z_post.arousal = 0.0;
  {
    auto phase = store.enter_phase(TickPhase::kStorage);
    store.store(writer, e0);
    store.store(writer, e1);
    store.store(writer, e2);
  }
  auto phase = store.enter_phase(TickPhase::kRetrieval);
  const RetrievalResult r = store.retrieve(reader, unit_key(1, 0), 2);

  const double w0 = 0.9 / 1.4, w1 = 0.5 / 1.4;
  CHECK(r.reliability == doctest::Approx(0.9).epsilon(1e-12));
  CHECK(r.h_mem.scores[0] == doctest::Approx(w0 * 1.0 * 1.0).epsilon(1e-12));
  CHECK(r.h_mem.scores[1] == doctest::Approx(w1 * -1.0 * 1.0).epsilon(1e-12));
  CHECK(r.h_mem.scores[2] == 0.0);
  // arousal: w0*(0.5*0.8 + 0.5*0.4) + w1*(0.5*0.2 + 0.5*0.0)
  CHECK(r.z_mem.arousal == doctest::Approx(w0 * 0.6 + w1 * 0.1).epsilon(1e-12));
}

TEST_CASE("retrieve: orthogonal memory content is reported as no match") {
  EpisodeStore store(small_config());
  WriterToken writer = store.make_writer();
  ReaderToken reader = store.make_reader();
  {
    auto phase = store.enter_phase(TickPhase::kStorage);
    store.store(writer, make_episode(unit_key(0, 0, 1, 0), 0.7));
  }
  auto phase = store.enter_phase(TickPhase::kRetrieval);
  const RetrievalResult r = store.retrieve(reader, unit_key(1, 0), 2);
  CHECK(r.reliability == 0.0);
  CHECK(r.z_mem.flatten().isZero(0.0));
}

TEST_CASE("tokens: a second reader or writer is refused") {
  EpisodeStore store(small_config());
  [[maybe_unused]] ReaderToken reader = store.make_reader();
  CHECK_THROWS_AS(store.make_reader(), SicViolation);
  [[maybe_unused]] WriterToken writer = store.make_writer();
  CHECK_THROWS_AS(store.make_writer(), SicViolation);
  try {
    store.make_reader();
  } catch (const SicViolation& e) {
    CHECK(e.clause() == "SIC-1");
  }
}

TEST_CASE("tokens: a token from another store is forgery") {
  EpisodeStore store_a(small_config());
  EpisodeStore store_b(small_config());
  ReaderToken reader_b = store_b.make_reader();
  auto phase = store_a.enter_phase(TickPhase::kRetrieval);
  CHECK_THROWS_AS(store_a.retrieve(reader_b, unit_key(1, 0), 1), SicViolation);
}

TEST_CASE("phases: reads and writes outside their phases are fatal") {
  EpisodeStore store(small_config());
  WriterToken writer = store.make_writer();
  ReaderToken reader = store.make_reader();
  CHECK_THROWS_AS(store.store(writer, make_episode(unit_key(1, 0), 0.1)), SicViolation);
  CHECK_THROWS_AS(store.retrieve(reader, unit_key(1, 0), 1), SicViolation);
  {
    auto phase = store.enter_phase(TickPhase::kRetrieval);
    CHECK_THROWS_AS(store.store(writer, make_episode(unit_key(1, 0), 0.1)), SicViolation);
    CHECK_THROWS_AS(store.reconcile(ReconcileConfig{}), SicViolation);
    CHECK_THROWS_AS(store.enter_phase(TickPhase::kStorage), SicViolation);
  }
  {
    auto phase = store.enter_phase(TickPhase::kStorage);
    CHECK_THROWS_AS(store.retrieve(reader, unit_key(1, 0), 1), SicViolation);
  }
  // back to idle: maintenance is legal again
  CHECK_NOTHROW(store.reconcile(ReconcileConfig{}));
}

TEST_CASE("retrieve: insertion order cannot change the result") {
  Rng rng(101);
  for (int round = 0; round < 10; ++round) {
    // distinct similarities by construction
    std::vector<Episode> episodes;
    for (int i = 0; i < 6; ++i) {
      const double angle = (5.0 + 14.0 * i + round) * 3.14159265358979323846 / 180.0;
      Episode e = random_episode(rng);
      Eigen::VectorXd key(4);
      key << std::cos(angle), std::sin(angle), 0.0, 0.0;
      e.key = CategoryVector{key};
      episodes.push_back(e);
    }
    const CategoryVector query = unit_key(1, 0);

    auto run_with_order = [&](const std::vector<std::size_t>& order) {
      EpisodeStore store(small_config());
      WriterToken writer = store.make_writer();
      ReaderToken reader = store.make_reader();
      {
        auto phase = store.enter_phase(TickPhase::kStorage);
        for (std::size_t idx : order) store.store(writer, episodes[idx]);
      }
      auto phase = store.enter_phase(TickPhase::kRetrieval);
      return store.retrieve(reader, query, 3);
    };

    std::vector<std::size_t> order(episodes.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    const RetrievalResult baseline = run_with_order(order);
    for (int p = 0; p < 20; ++p) {
      for (std::size_t i = order.size(); i > 1; --i) {
        std::swap(order[i - 1], order[rng.uniform_int(static_cast<int>(i))]);
      }
      CHECK(same_bits(run_with_order(order), baseline));
    }
  }
}

TEST_CASE("retrieve: result schema size is constant in memory size") {
  const StoreConfig config = small_config(64);
  for (int count : {1, 8, 40}) {
    EpisodeStore store(config);
    WriterToken writer = store.make_writer();
    ReaderToken reader = store.make_reader();
    Rng rng(7 + count);
    {
      auto phase = store.enter_phase(TickPhase::kStorage);
      for (int i = 0; i < count; ++i) store.store(writer, random_episode(rng));
    }
    auto phase = store.enter_phase(TickPhase::kRetrieval);
    const RetrievalResult r = store.retrieve(reader, unit_key(1, 1, 1, 1), 4);
    CHECK(r.z_mem.flatten().size() == 2 * 2 + 1 + 2);
    CHECK(r.h_mem.scores.size() == 5);
  }
}

TEST_CASE("reconcile: empty store reports nothing") {
  EpisodeStore store(small_config());
  const ReconcileReport report = store.reconcile(ReconcileConfig{});
  CHECK(report.merged == 0);
  CHECK(report.pruned == 0);
  CHECK(report.reestimated == 0);
  CHECK(report.bonuses == 0);
}

TEST_CASE("reconcile: duplicate keys keep the high-|succ| exemplar") {
  EpisodeStore store(small_config());
  WriterToken writer = store.make_writer();
  ReaderToken reader = store.make_reader();
  const CategoryVector key = unit_key(1, 1);
  {
    auto phase = store.enter_phase(TickPhase::kStorage);
    store.store(writer, make_episode(key, 0.9));
    store.store(writer, make_episode(key, 0.1));
  }
  ReconcileConfig rc;
  rc.reestimate_lambda = 1.0;  // keep tags as-is for this check
  rc.prune_max_age_rank = 100;
  const ReconcileReport report = store.reconcile(rc);
  CHECK(report.merged == 1);
  const std::vector<Episode> kept = store.snapshot(reader);
  REQUIRE(kept.size() == 1);
  CHECK(kept[0].succ == 0.9);
}

TEST_CASE("reconcile: duplicates with different preferred policies both survive") {
  EpisodeStore store(small_config());
  WriterToken writer = store.make_writer();
  ReaderToken reader = store.make_reader();
  const CategoryVector key = unit_key(1, 1);
  {
    auto phase = store.enter_phase(TickPhase::kStorage);
    store.store(writer, make_episode(key, 0.9, /*policy=*/0));
    store.store(writer, make_episode(key, 0.1, /*policy=*/1));
  }
  ReconcileConfig rc;
  rc.reestimate_lambda = 1.0;
  rc.prune_max_age_rank = 100;
  store.reconcile(rc);
  CHECK(store.snapshot(reader).size() == 2);
}

TEST_CASE("reconcile: backward bonus rewards the step before a rare success") {
  // chain succ (0.2, 0.2, 1.0) with lambda_r = 1, theta_rare = 0.9,
  // delta = 0.1: the middle record becomes 0.3.
  EpisodeStore store(small_config());
  WriterToken writer = store.make_writer();
  ReaderToken reader = store.make_reader();
  {
    auto phase = store.enter_phase(TickPhase::kStorage);
    store.store(writer, make_episode(unit_key(1, 0, 0, 0), 0.2));
    store.store(writer, make_episode(unit_key(0, 1, 0, 0), 0.2));
    store.store(writer, make_episode(unit_key(0, 0, 1, 0), 1.0));
  }
  ReconcileConfig rc;
  rc.reestimate_lambda = 1.0;
  rc.rare_threshold = 0.9;
  rc.rare_bonus = 0.1;
  rc.prune_max_age_rank = 100;
  const ReconcileReport report = store.reconcile(rc);
  CHECK(report.bonuses == 1);
  const std::vector<Episode> kept = store.snapshot(reader);
  REQUIRE(kept.size() == 3);
  CHECK(kept[0].succ == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(kept[1].succ == doctest::Approx(0.3).epsilon(1e-14));
  CHECK(kept[2].succ == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("reconcile: prune drops stale never-retrieved records, sparing flash-bulbs") {
  EpisodeStore store(small_config());
  WriterToken writer = store.make_writer();
  ReaderToken reader = store.make_reader();
  {
    auto phase = store.enter_phase(TickPhase::kStorage);
    store.store(writer, make_episode(unit_key(1, 0, 0, 0), 0.1));           // stale, plain
    store.store(writer, make_episode(unit_key(0, 1, 0, 0), 0.95));          // stale, flash
    store.store(writer, make_episode(unit_key(0, 0, 1, 0), 0.2));
  }
  ReconcileConfig rc;
  rc.reestimate_lambda = 1.0;
  rc.prune_max_age_rank = 1;  // only the newest record counts as fresh
  rc.prune_min_retrievals = 1;
  const ReconcileReport report = store.reconcile(rc);
  CHECK(report.pruned == 1);
  const std::vector<Episode> kept = store.snapshot(reader);
  REQUIRE(kept.size() == 2);
  CHECK(kept[0].succ == doctest::Approx(0.95).epsilon(1e-12));
  CHECK(kept[1].succ == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("reconcile: matches the brute-force oracle on random stores") {
  Rng rng(2024);
  for (int round = 0; round < 20; ++round) {
    EpisodeStore store(small_config(64));
    WriterToken writer = store.make_writer();
    ReaderToken reader = store.make_reader();
    std::vector<OracleRecord> mirror;
    const int count = 5 + rng.uniform_int(15);
    {
      auto phase = store.enter_phase(TickPhase::kStorage);
      for (int i = 0; i < count; ++i) {
        Episode e = random_episode(rng);
        const std::uint64_t index = store.store(writer, e);
        mirror.push_back(OracleRecord{e, index, 0});
      }
    }
    ReconcileConfig rc;
    rc.dup_threshold = 0.95;
    rc.flash_threshold = 0.8;
    rc.rare_threshold = 0.85;
    rc.rare_bonus = 0.1;
    rc.reestimate_lambda = 0.7;
    rc.horizon = 3;
    rc.prune_max_age_rank = 6;
    rc.prune_min_retrievals = 1;

    store.reconcile(rc);
    const std::vector<OracleRecord> expected = oracle_reconcile(mirror, rc);
    const std::vector<Episode> actual = store.snapshot(reader);

    REQUIRE(actual.size() == expected.size());
    for (std::size_t i = 0; i < actual.size(); ++i) {
      CHECK(same_bits(actual[i].key.c, expected[i].episode.key.c));
      CHECK(actual[i].succ == doctest::Approx(expected[i].episode.succ).epsilon(1e-15));
      CHECK(actual[i].succ >= -1.0);
      CHECK(actual[i].succ <= 1.0);
    }
  }
}

TEST_CASE("snapshot: audit-gated, meta-free, write-ordered") {
  StoreConfig no_audit = small_config(16, /*audit=*/false);
  EpisodeStore closed(no_audit);
  ReaderToken closed_reader = closed.make_reader();
  CHECK_THROWS_AS(closed.snapshot(closed_reader), SicViolation);

  EpisodeStore store(small_config());
  WriterToken writer = store.make_writer();
  ReaderToken reader = store.make_reader();
  CHECK(store.snapshot(reader).empty());
  Episode e = make_episode(unit_key(1, 2), 0.4);
  {
    auto phase = store.enter_phase(TickPhase::kStorage);
    store.store(writer, e);
  }
  const std::vector<Episode> snap = store.snapshot(reader);
  REQUIRE(snap.size() == 1);
  CHECK(same_bits(snap[0].key.c, e.key.c));
  CHECK(snap[0].succ == e.succ);
}

TEST_CASE("persistence: episode JSONL round-trips bit-exactly") {
  Rng rng(555);
  std::vector<Episode> episodes;
  for (int i = 0; i < 20; ++i) episodes.push_back(random_episode(rng));
  const std::string path = "episodes_roundtrip_test.jsonl";
  save_episodes(path, episodes);
  const std::vector<Episode> loaded = load_episodes(path);
  REQUIRE(loaded.size() == episodes.size());
  for (std::size_t i = 0; i < episodes.size(); ++i) {
    CHECK(same_bits(loaded[i].key.c, episodes[i].key.c));
    CHECK(same_bits(loaded[i].z_pre.flatten(), episodes[i].z_pre.flatten()));
    CHECK(same_bits(loaded[i].hints.scores, episodes[i].hints.scores));
    CHECK(same_bits(loaded[i].z_post.flatten(), episodes[i].z_post.flatten()));
    CHECK(std::bit_cast<std::uint64_t>(loaded[i].succ) ==
          std::bit_cast<std::uint64_t>(episodes[i].succ));
  }
  std::remove(path.c_str());
}

TEST_CASE("load: seeds the store only while idle") {
  EpisodeStore store(small_config());
  WriterToken writer = store.make_writer();
  std::vector<Episode> episodes{make_episode(unit_key(1, 0), 0.5)};
  {
    auto phase = store.enter_phase(TickPhase::kRetrieval);
    CHECK_THROWS_AS(store.load(writer, episodes), SicViolation);
  }
  CHECK_NOTHROW(store.load(writer, episodes));
  CHECK(store.size() == 1);
}
