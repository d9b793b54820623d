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

#ifndef EMOCTL_TRACE_IO_HPP
#define EMOCTL_TRACE_IO_HPP

#include <string>
#include <vector>

#include <json.hpp>

#include "emoctl/controller.hpp"
#include "emoctl/memory.hpp"

namespace emoctl {

/// 17-significant-digit decimal encoding; parses back to the identical
/// double for any finite value.
std::string format_double(double v);

/// One JSONL line per trace, fixed field order, doubles at 17 significant
/// digits.
std::string trace_to_json_line(const TickTrace& trace);
TickTrace trace_from_json(const nlohmann::json& j);

void save_traces(const std::string& path, const std::vector<TickTrace>& traces);
std::vector<TickTrace> load_traces(const std::string& path);

/// Episode persistence: one JSONL line per episode with field order
/// (key, z_pre, hints, z_post, succ). Round-trips bit-exactly.
std::string episode_to_json_line(const Episode& episode);
Episode episode_from_json(const nlohmann::json& j);

void save_episodes(const std::string& path, const std::vector<Episode>& episodes);
std::vector<Episode> load_episodes(const std::string& path);

/// Per-tick metrics row; CSV columns are stable:
/// tick, nearest_peer_distance, need_disc_<i>..., policy_entropy,
/// policy_argmax, succ, memory_size.
struct MetricsRow {
  int tick = 0;
  double nearest_peer_distance = 0.0;  // NaN when no peer is observed
  Eigen::VectorXd need_discrepancy;    // target - value, per channel
  double policy_entropy = 0.0;
  PolicyId policy_argmax = PolicyId::kSeek;
  double succ = 0.0;
  std::size_t memory_size = 0;
};

MetricsRow metrics_from_trace(const TickTrace& trace, std::size_t memory_size);
std::string metrics_header(Eigen::Index need_channels);
std::string metrics_row_to_csv(const MetricsRow& row);
void save_metrics(const std::string& path, const std::vector<MetricsRow>& rows,
                  Eigen::Index need_channels);

}  // namespace emoctl

#endif  // EMOCTL_TRACE_IO_HPP
