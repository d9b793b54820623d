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

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

namespace emoctl {

namespace {

// Token nonces only need to be unpredictable enough to catch accidental
// cross-store reuse, not adversaries.
std::uint64_t next_nonce() {
  static std::uint64_t counter = 0x51abc0ffee17ULL;
  counter = counter * 6364136223846793005ULL + 1442695040888963407ULL;
  return counter;
}

}  // namespace

EpisodeStore::EpisodeStore(const StoreConfig& config) : config_(config) {
  if (config_.capacity <= 0) throw std::invalid_argument("store capacity must be positive");
  if (config_.combine_lambda < 0.0 || config_.combine_lambda > 1.0) {
    throw std::invalid_argument("combine_lambda must be in [0,1]");
  }
}

WriterToken EpisodeStore::make_writer() {
  if (writer_issued_) {
    throw SicViolation("SIC-1", "second writer token requested");
  }
  writer_issued_ = true;
  writer_nonce_ = next_nonce();
  return WriterToken(this, writer_nonce_);
}

ReaderToken EpisodeStore::make_reader() {
  if (reader_issued_) {
    throw SicViolation("SIC-1", "second memory-external reader requested");
  }
  reader_issued_ = true;
  reader_nonce_ = next_nonce();
  return ReaderToken(this, reader_nonce_);
}

EpisodeStore::PhaseScope EpisodeStore::enter_phase(TickPhase phase) {
  if (phase_ != TickPhase::kIdle) {
    throw SicViolation("SIC-5", "nested tick phase");
  }
  if (phase == TickPhase::kIdle) {
    throw std::invalid_argument("enter_phase: cannot enter idle");
  }
  phase_ = phase;
  return PhaseScope(this);
}

EpisodeStore::PhaseScope::~PhaseScope() {
  if (store_ != nullptr) store_->phase_ = TickPhase::kIdle;
}

void EpisodeStore::check_reader(const ReaderToken& token) const {
  if (token.owner_ != this || token.nonce_ != reader_nonce_) {
    throw SicViolation("SIC-1", "reader token does not belong to this store");
  }
}

void EpisodeStore::check_writer(const WriterToken& token) const {
  if (token.owner_ != this || token.nonce_ != writer_nonce_) {
    throw SicViolation("SIC-1", "writer token does not belong to this store");
  }
}

void EpisodeStore::check_episode(const Episode& episode) const {
  if (episode.key.c.size() != config_.key_dim || !is_valid_key(episode.key)) {
    throw std::invalid_argument("episode key is not a unit-norm nonnegative vector");
  }
  if (episode.z_pre.channels() != config_.channels ||
      episode.z_pre.drives() != config_.drives ||
      episode.z_post.channels() != config_.channels ||
      episode.z_post.drives() != config_.drives ||
      episode.hints.size() != config_.policies) {
    throw std::invalid_argument("episode dimensions do not match store config");
  }
  if (!std::isfinite(episode.succ) || episode.succ < -1.0 || episode.succ > 1.0) {
    throw std::invalid_argument("episode succ outside [-1, +1]");
  }
}

bool EpisodeStore::is_flash_bulb(const Episode& episode, double threshold) const {
  double peak_magnitude = 0.0;
  if (episode.z_pre.magnitude.size() > 0) {
    peak_magnitude = episode.z_pre.magnitude.maxCoeff();
  }
  if (episode.z_post.magnitude.size() > 0) {
    peak_magnitude = std::max(peak_magnitude, episode.z_post.magnitude.maxCoeff());
  }
  return std::abs(episode.succ) >= threshold || peak_magnitude >= threshold;
}

void EpisodeStore::append_with_eviction(const Episode& episode) {
  if (records_.size() >= static_cast<std::size_t>(config_.capacity)) {
    // Lowest utility leaves first: non-flash-bulb, then fewest retrievals,
    // then oldest.
    auto utility = [this](const StoredRecord& r) {
      return std::make_tuple(is_flash_bulb(r.episode, config_.flash_threshold) ? 1 : 0,
                             r.retrieval_count, r.write_index);
    };
    auto victim = std::min_element(
        records_.begin(), records_.end(),
        [&](const StoredRecord& a, const StoredRecord& b) { return utility(a) < utility(b); });
    records_.erase(victim);
  }
  records_.push_back(StoredRecord{episode, next_write_index_++, 0});
}

std::uint64_t EpisodeStore::store(const WriterToken& token, const Episode& episode) {
  check_writer(token);
  if (phase_ != TickPhase::kStorage) {
    throw SicViolation("SIC-5", "write attempted outside the storage (A8) phase");
  }
  check_episode(episode);
  append_with_eviction(episode);
  ++stats_.stores;
  return records_.back().write_index;
}

RetrievalResult EpisodeStore::retrieve(const ReaderToken& token,
                                       const CategoryVector& key, int top_k) {
  check_reader(token);
  if (phase_ != TickPhase::kRetrieval) {
    throw SicViolation("SIC-5", "read attempted outside the retrieval (A3) phase");
  }
  if (top_k < 1) throw std::invalid_argument("retrieve: top_k must be >= 1");
  if (key.c.size() != config_.key_dim || !is_valid_key(key)) {
    throw std::invalid_argument("retrieve: malformed query key");
  }
  ++stats_.retrieves;

  RetrievalResult result =
      RetrievalResult::empty(config_.channels, config_.drives, config_.policies);
  if (records_.empty()) return result;

  // Rank by similarity, ties broken toward the older record. Aggregation
  // runs in this canonical order so the output is independent of insertion
  // order whenever similarities are distinct.
  struct Ranked {
    double similarity;
    std::size_t index;
  };
  std::vector<Ranked> ranked;
  ranked.reserve(records_.size());
  for (std::size_t i = 0; i < records_.size(); ++i) {
    ranked.push_back({key.c.dot(records_[i].episode.key.c), i});
  }
  std::sort(ranked.begin(), ranked.end(), [this](const Ranked& a, const Ranked& b) {
    if (a.similarity != b.similarity) return a.similarity > b.similarity;
    return records_[a.index].write_index < records_[b.index].write_index;
  });

  const std::size_t keep = std::min<std::size_t>(static_cast<std::size_t>(top_k),
                                                 ranked.size());
  double similarity_sum = 0.0;
  for (std::size_t j = 0; j < keep; ++j) similarity_sum += ranked[j].similarity;
  if (similarity_sum <= 0.0) return result;  // no situational overlap at all

  const double lambda = config_.combine_lambda;
  for (std::size_t j = 0; j < keep; ++j) {
    StoredRecord& record = records_[ranked[j].index];
    const Episode& e = record.episode;
    const double w = ranked[j].similarity / similarity_sum;
    result.z_mem.valence += w * (lambda * e.z_pre.valence + (1.0 - lambda) * e.z_post.valence);
    result.z_mem.magnitude +=
        w * (lambda * e.z_pre.magnitude + (1.0 - lambda) * e.z_post.magnitude);
    result.z_mem.arousal += w * (lambda * e.z_pre.arousal + (1.0 - lambda) * e.z_post.arousal);
    result.z_mem.drive += w * (lambda * e.z_pre.drive + (1.0 - lambda) * e.z_post.drive);
    result.h_mem.scores += w * e.succ * e.hints.scores;
    ++record.retrieval_count;
  }
  result.reliability = ranked[0].similarity;
  clip_to_ranges(result.z_mem);  // convexity keeps ranges; clip absorbs rounding
  return result;
}

ReconcileReport EpisodeStore::reconcile(const ReconcileConfig& config) {
  if (phase_ != TickPhase::kIdle) {
    throw SicViolation("SIC-5", "reconcile invoked while a tick is in progress");
  }
  ReconcileReport report;

  // (i) Dedup: among near-identical keys with the same preferred policy,
  // keep the exemplar with the largest |succ| (ties to the older record).
  {
    std::vector<StoredRecord> kept;
    kept.reserve(records_.size());
    for (StoredRecord& candidate : records_) {
      Eigen::Index candidate_policy;
      candidate.episode.hints.scores.maxCoeff(&candidate_policy);
      bool merged = false;
      for (StoredRecord& incumbent : kept) {
        Eigen::Index incumbent_policy;
        incumbent.episode.hints.scores.maxCoeff(&incumbent_policy);
        if (incumbent_policy != candidate_policy) continue;
        if (candidate.episode.key.c.dot(incumbent.episode.key.c) <= config.dup_threshold) {
          continue;
        }
        if (std::abs(candidate.episode.succ) > std::abs(incumbent.episode.succ)) {
          incumbent = std::move(candidate);
        }
        merged = true;
        ++report.merged;
        break;
      }
      if (!merged) kept.push_back(std::move(candidate));
    }
    std::sort(kept.begin(), kept.end(), [](const StoredRecord& a, const StoredRecord& b) {
      return a.write_index < b.write_index;
    });
    records_ = std::move(kept);
  }

  // (ii) Prune stale, rarely retrieved records; flash-bulb records are exempt.
  {
    std::vector<StoredRecord> kept;
    kept.reserve(records_.size());
    const std::size_t count = records_.size();
    for (std::size_t i = 0; i < count; ++i) {
      const StoredRecord& record = records_[i];
      const std::size_t recency_rank = count - 1 - i;  // 0 = newest
      const bool stale = recency_rank >= static_cast<std::size_t>(config.prune_max_age_rank);
      const bool rarely_used = record.retrieval_count < config.prune_min_retrievals;
      if (stale && rarely_used && !is_flash_bulb(record.episode, config.flash_threshold)) {
        ++report.pruned;
      } else {
        kept.push_back(records_[i]);
      }
    }
    records_ = std::move(kept);
  }

  // (iii) Re-estimate success tags against the next `horizon` outcomes in
  // write order, computed from a snapshot of the pre-pass values. Then give a
  // small backward bonus to the record immediately preceding a rare
  // high-success event. Scalar rewrites only; keys and counts untouched.
  {
    std::vector<double> original(records_.size());
    for (std::size_t i = 0; i < records_.size(); ++i) original[i] = records_[i].episode.succ;

    for (std::size_t i = 0; i < records_.size(); ++i) {
      const std::size_t last = std::min(records_.size(), i + 1 + static_cast<std::size_t>(
                                                                     config.horizon));
      if (last <= i + 1) continue;  // no later outcomes to learn from
      double horizon_sum = 0.0;
      for (std::size_t j = i + 1; j < last; ++j) horizon_sum += original[j];
      const double horizon_aggregate = horizon_sum / static_cast<double>(last - i - 1);
      const double updated = std::clamp(config.reestimate_lambda * original[i] +
                                            (1.0 - config.reestimate_lambda) * horizon_aggregate,
                                        -1.0, 1.0);
      if (updated != records_[i].episode.succ) ++report.reestimated;
      records_[i].episode.succ = updated;
    }

    for (std::size_t i = 1; i < records_.size(); ++i) {
      if (records_[i].episode.succ >= config.rare_threshold) {
        records_[i - 1].episode.succ =
            std::clamp(records_[i - 1].episode.succ + config.rare_bonus, -1.0, 1.0);
        ++report.bonuses;
      }
    }
  }

  return report;
}

std::vector<Episode> EpisodeStore::snapshot(const ReaderToken& token) const {
  check_reader(token);
  if (!config_.audit_access) {
    throw SicViolation("SIC-3", "snapshot requires a store built with audit access");
  }
  std::vector<Episode> out;
  out.reserve(records_.size());
  for (const StoredRecord& record : records_) out.push_back(record.episode);
  return out;
}

void EpisodeStore::load(const WriterToken& token, const std::vector<Episode>& episodes) {
  check_writer(token);
  if (phase_ != TickPhase::kIdle) {
    throw SicViolation("SIC-5", "load is a pre-deployment operation; tick in progress");
  }
  for (const Episode& episode : episodes) {
    check_episode(episode);
    append_with_eviction(episode);
  }
}

}  // namespace emoctl
