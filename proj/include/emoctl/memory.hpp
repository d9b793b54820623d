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

#ifndef EMOCTL_MEMORY_HPP
#define EMOCTL_MEMORY_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "emoctl/affect.hpp"

namespace emoctl {

// ---------------------------------------------------------------------------
// Access-contract violation
// ---------------------------------------------------------------------------

/// Fatal audit event: a clause of the memory access contract was violated
/// (wrong phase, second reader, forged token, ...). Carries the clause id
/// so diagnostics can name it.
class SicViolation : public std::runtime_error {
 public:
  SicViolation(std::string clause, const std::string& what)
      : std::runtime_error(clause + ": " + what), clause_(std::move(clause)) {}

  const std::string& clause() const { return clause_; }

 private:
  std::string clause_;
};

// ---------------------------------------------------------------------------
// Domain types
// ---------------------------------------------------------------------------

/// Unit-norm, nonnegative fuzzy situation category. The sole retrieval key;
/// carries no identity, time, or affect-derived fields.
struct CategoryVector {
  Eigen::VectorXd c;
};

inline bool is_valid_key(const CategoryVector& key, double norm_tol = 1e-9) {
  return key.c.allFinite() && (key.c.array() >= 0.0).all() &&
         std::abs(key.c.norm() - 1.0) <= norm_tol;
}

/// One stored control step. Exactly these five fields are controller-visible.
struct Episode {
  CategoryVector key;
  AffectState z_pre;
  PolicyHints hints;
  AffectState z_post;
  double succ = 0.0;  // in [-1, +1]; negative means failure
};

/// Fixed-schema retrieval output: aggregated affect and hints plus a single
/// reliability scalar. Its size is constant in memory size; no episode lists
/// cross the interface.
struct RetrievalResult {
  AffectState z_mem;
  PolicyHints h_mem;
  double reliability = 0.0;  // best-match similarity; 0 when memory empty

  static RetrievalResult empty(Eigen::Index channels, Eigen::Index drives,
                               Eigen::Index policies) {
    return RetrievalResult{AffectState::zero(channels, drives),
                           PolicyHints::zero(policies), 0.0};
  }
};

/// Tick phases the store cares about: reads are legal only during retrieval
/// (A3) and writes only during storage (A8). Maintenance requires idle.
enum class TickPhase { kIdle, kRetrieval, kStorage };

class EpisodeStore;

/// Move-only read capability. At most one exists per store.
class ReaderToken {
 public:
  ReaderToken(ReaderToken&& other) noexcept { move_from(other); }
  ReaderToken& operator=(ReaderToken&& other) noexcept {
    move_from(other);
    return *this;
  }
  ReaderToken(const ReaderToken&) = delete;
  ReaderToken& operator=(const ReaderToken&) = delete;

 private:
  friend class EpisodeStore;
  ReaderToken(const EpisodeStore* owner, std::uint64_t nonce)
      : owner_(owner), nonce_(nonce) {}
  void move_from(ReaderToken& other) {
    owner_ = other.owner_;
    nonce_ = other.nonce_;
    other.owner_ = nullptr;
  }
  const EpisodeStore* owner_ = nullptr;
  std::uint64_t nonce_ = 0;
};

/// Move-only write capability. At most one exists per store.
class WriterToken {
 public:
  WriterToken(WriterToken&& other) noexcept { move_from(other); }
  WriterToken& operator=(WriterToken&& other) noexcept {
    move_from(other);
    return *this;
  }
  WriterToken(const WriterToken&) = delete;
  WriterToken& operator=(const WriterToken&) = delete;

 private:
  friend class EpisodeStore;
  WriterToken(const EpisodeStore* owner, std::uint64_t nonce)
      : owner_(owner), nonce_(nonce) {}
  void move_from(WriterToken& other) {
    owner_ = other.owner_;
    nonce_ = other.nonce_;
    other.owner_ = nullptr;
  }
  const EpisodeStore* owner_ = nullptr;
  std::uint64_t nonce_ = 0;
};

/// Offline maintenance parameters: key-similarity threshold for dedup,
/// flash-bulb exemption threshold, rare-success bonus, success re-estimation
/// blend and horizon, and the age/retrieval prune thresholds.
struct ReconcileConfig {
  double dup_threshold = 0.98;       // key similarity above which records merge
  double flash_threshold = 0.8;      // |succ| or max magnitude exempting a record
  double rare_threshold = 0.9;       // succ at or above which a bonus propagates
  double rare_bonus = 0.1;           // added to the immediately preceding record
  double reestimate_lambda = 0.7;    // weight kept on the original succ
  int horizon = 5;                   // future records averaged for re-estimation
  int prune_max_age_rank = 64;       // records younger than this rank are kept
  std::uint64_t prune_min_retrievals = 1;  // retrieved at least this often: kept
};

struct ReconcileReport {
  int merged = 0;
  int pruned = 0;
  int reestimated = 0;
  int bonuses = 0;
};

/// Structural parameters of a store, fixed at construction.
struct StoreConfig {
  int capacity = 256;
  Eigen::Index key_dim = 6;
  Eigen::Index channels = 2;   // B
  Eigen::Index drives = 3;     // L
  Eigen::Index policies = 5;   // |Pi|
  double combine_lambda = 0.5;  // weight of z_pre in the retrieval tag
  double flash_threshold = 0.8;  // flash-bulb bound used by capacity eviction
  bool audit_access = false;     // enables snapshot()
};

/// Access counters, used by discipline tests (one read and one write per tick).
struct StoreStats {
  std::uint64_t retrieves = 0;
  std::uint64_t stores = 0;
};

// ---------------------------------------------------------------------------
// EpisodeStore
// ---------------------------------------------------------------------------

/// Bounded episodic memory with similarity-based retrieval. Reads and writes
/// are capability-gated and phase-checked; retrieval aggregates the top-K
/// matches into a fixed-schema result so no episode content escapes.
class EpisodeStore {
 public:
  explicit EpisodeStore(const StoreConfig& config);

  EpisodeStore(const EpisodeStore&) = delete;
  EpisodeStore& operator=(const EpisodeStore&) = delete;

  /// Hands out the single write capability. A second call is a contract
  /// violation.
  WriterToken make_writer();

  /// Hands out the single read capability. A second call is a contract
  /// violation (the memory must not serve as a shared workspace).
  ReaderToken make_reader();

  /// RAII phase marker; the controller opens one around the retrieval and
  /// storage steps of its tick.
  class PhaseScope {
   public:
    PhaseScope(PhaseScope&& other) noexcept : store_(other.store_) {
      other.store_ = nullptr;
    }
    PhaseScope(const PhaseScope&) = delete;
    PhaseScope& operator=(const PhaseScope&) = delete;
    PhaseScope& operator=(PhaseScope&&) = delete;
    ~PhaseScope();

   private:
    friend class EpisodeStore;
    explicit PhaseScope(EpisodeStore* store) : store_(store) {}
    EpisodeStore* store_;
  };

  PhaseScope enter_phase(TickPhase phase);
  TickPhase phase() const { return phase_; }

  /// Appends an episode (storage phase only). Evicts the lowest-utility
  /// record when at capacity. Returns the record's write index.
  std::uint64_t store(const WriterToken& token, const Episode& episode);

  /// Top-K similarity retrieval (retrieval phase only). Bounded output:
  /// similarity-weighted affect tag, success-weighted hints, best-match
  /// reliability. Empty memory or all-zero similarity yields the empty
  /// result.
  RetrievalResult retrieve(const ReaderToken& token, const CategoryVector& key,
                           int top_k);

  /// Offline maintenance pass (idle phase only): dedup near-identical keys,
  /// prune stale rarely-retrieved records with flash-bulb exceptions, and
  /// re-estimate success tags from later outcomes. Per-record scalar rewrites
  /// only; keys are never touched.
  ReconcileReport reconcile(const ReconcileConfig& config);

  /// Full copy of the controller-visible fields in write order. Requires the
  /// read capability and a store built with audit access; test/audit only.
  std::vector<Episode> snapshot(const ReaderToken& token) const;

  /// Bulk initialization before deployment (idle phase only); used by the
  /// persistence path. Capacity eviction applies as in store().
  void load(const WriterToken& token, const std::vector<Episode>& episodes);

  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }
  const StoreConfig& config() const { return config_; }
  const StoreStats& stats() const { return stats_; }

 private:
  struct StoredRecord {
    Episode episode;
    std::uint64_t write_index = 0;     // monotone counter, not wall-clock time
    std::uint64_t retrieval_count = 0;  // memory-internal housekeeping
  };

  void check_reader(const ReaderToken& token) const;
  void check_writer(const WriterToken& token) const;
  void check_episode(const Episode& episode) const;
  bool is_flash_bulb(const Episode& episode, double threshold) const;
  void append_with_eviction(const Episode& episode);

  StoreConfig config_;
  std::vector<StoredRecord> records_;  // kept in ascending write-index order
  std::uint64_t next_write_index_ = 0;
  TickPhase phase_ = TickPhase::kIdle;
  bool reader_issued_ = false;
  bool writer_issued_ = false;
  std::uint64_t reader_nonce_ = 0;
  std::uint64_t writer_nonce_ = 0;
  StoreStats stats_;
};

}  // namespace emoctl

#endif  // EMOCTL_MEMORY_HPP
