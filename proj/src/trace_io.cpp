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

#include "emoctl/trace_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace emoctl {

namespace {

using nlohmann::json;

void append_double(std::string& out, double v) {
  if (!std::isfinite(v)) throw std::invalid_argument("refusing to serialize non-finite value");
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  out.append(buf, res.ptr);
}

void append_vector(std::string& out, const Eigen::VectorXd& v) {
  out += '[';
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i > 0) out += ',';
    append_double(out, v[i]);
  }
  out += ']';
}

void append_affect(std::string& out, const AffectState& z) {
  out += "{\"v\":";
  append_vector(out, z.valence);
  out += ",\"m\":";
  append_vector(out, z.magnitude);
  out += ",\"a\":";
  append_double(out, z.arousal);
  out += ",\"d\":";
  append_vector(out, z.drive);
  out += '}';
}

void append_needs(std::string& out, const Needs& n) {
  out += "{\"values\":";
  append_vector(out, n.values);
  out += ",\"targets\":";
  append_vector(out, n.targets);
  out += '}';
}

void append_params(std::string& out, const InstantiationParams& y) {
  out += "{\"bearing_peers\":";
  append_double(out, y.bearing_to_peers);
  out += ",\"peers_valid\":";
  out += y.peers_valid ? "true" : "false";
  out += ",\"dist_nearest_peer\":";
  append_double(out, y.distance_to_nearest_peer);
  out += ",\"bearing_threat\":";
  append_double(out, y.bearing_to_threat);
  out += ",\"threat_valid\":";
  out += y.threat_valid ? "true" : "false";
  out += ",\"bearing_safe\":";
  append_double(out, y.bearing_to_safe_region);
  out += ",\"safe_valid\":";
  out += y.safe_region_valid ? "true" : "false";
  out += '}';
}

void append_retrieval(std::string& out, const RetrievalResult& r) {
  out += "{\"z_mem\":";
  append_affect(out, r.z_mem);
  out += ",\"h_mem\":";
  append_vector(out, r.h_mem.scores);
  out += ",\"reliability\":";
  append_double(out, r.reliability);
  out += '}';
}

Eigen::VectorXd vector_from(const json& j) {
  Eigen::VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return v;
}

AffectState affect_from(const json& j) {
  AffectState z;
  z.valence = vector_from(j.at("v"));
  z.magnitude = vector_from(j.at("m"));
  z.arousal = j.at("a").get<double>();
  z.drive = vector_from(j.at("d"));
  return z;
}

Needs needs_from(const json& j) {
  return Needs{vector_from(j.at("values")), vector_from(j.at("targets"))};
}

InstantiationParams params_from(const json& j) {
  InstantiationParams y;
  y.bearing_to_peers = j.at("bearing_peers").get<double>();
  y.peers_valid = j.at("peers_valid").get<bool>();
  y.distance_to_nearest_peer = j.at("dist_nearest_peer").get<double>();
  y.bearing_to_threat = j.at("bearing_threat").get<double>();
  y.threat_valid = j.at("threat_valid").get<bool>();
  y.bearing_to_safe_region = j.at("bearing_safe").get<double>();
  y.safe_region_valid = j.at("safe_valid").get<bool>();
  return y;
}

RetrievalResult retrieval_from(const json& j) {
  RetrievalResult r;
  r.z_mem = affect_from(j.at("z_mem"));
  r.h_mem.scores = vector_from(j.at("h_mem"));
  r.reliability = j.at("reliability").get<double>();
  return r;
}

}  // namespace

std::string format_double(double v) {
  std::string out;
  append_double(out, v);
  return out;
}

std::string trace_to_json_line(const TickTrace& t) {
  std::string out;
  out.reserve(2048);
  out += "{\"schema\":\"";
  out += kTraceSchemaVersion;
  out += "\",\"tick\":";
  out += std::to_string(t.tick);
  out += ",\"x\":";
  append_vector(out, t.x.flatten());
  out += ",\"c\":";
  append_vector(out, t.c.c);
  out += ",\"y\":";
  append_params(out, t.y);
  out += ",\"needs\":";
  append_needs(out, t.needs);
  out += ",\"z_need\":";
  append_affect(out, t.z_need);
  out += ",\"h_need\":";
  append_vector(out, t.h_need.scores);
  out += ",\"retrieval\":";
  append_retrieval(out, t.retrieval);
  out += ",\"z\":";
  append_affect(out, t.z);
  out += ",\"h\":";
  append_vector(out, t.h.scores);
  out += ",\"q\":";
  append_vector(out, t.q);
  out += ",\"s\":";
  append_vector(out, t.action_scores);
  out += ",\"action\":";
  out += std::to_string(action_index(t.action));
  out += ",\"x_post\":";
  append_vector(out, t.x_post.flatten());
  out += ",\"c_post\":";
  append_vector(out, t.c_post.c);
  out += ",\"y_post\":";
  append_params(out, t.y_post);
  out += ",\"needs_post\":";
  append_needs(out, t.needs_post);
  out += ",\"z_post\":";
  append_affect(out, t.z_post);
  out += ",\"succ\":";
  append_double(out, t.succ);
  out += ",\"episode_index\":";
  out += std::to_string(t.episode_index);
  out += '}';
  return out;
}

TickTrace trace_from_json(const json& j) {
  if (j.at("schema").get<std::string>() != kTraceSchemaVersion) {
    throw std::invalid_argument("trace line has unsupported schema version");
  }
  TickTrace t;
  t.tick = j.at("tick").get<int>();
  const Eigen::VectorXd x = vector_from(j.at("x"));
  const int num_peers = (static_cast<int>(x.size()) - 8) / 3;
  t.x = Observation::unflatten(x, num_peers);
  t.c.c = vector_from(j.at("c"));
  t.y = params_from(j.at("y"));
  t.needs = needs_from(j.at("needs"));
  t.z_need = affect_from(j.at("z_need"));
  t.h_need.scores = vector_from(j.at("h_need"));
  t.retrieval = retrieval_from(j.at("retrieval"));
  t.z = affect_from(j.at("z"));
  t.h.scores = vector_from(j.at("h"));
  t.q = vector_from(j.at("q"));
  t.action_scores = vector_from(j.at("s"));
  t.action = action_from_index(j.at("action").get<int>());
  const Eigen::VectorXd x_post = vector_from(j.at("x_post"));
  t.x_post = Observation::unflatten(x_post, num_peers);
  t.c_post.c = vector_from(j.at("c_post"));
  t.y_post = params_from(j.at("y_post"));
  t.needs_post = needs_from(j.at("needs_post"));
  t.z_post = affect_from(j.at("z_post"));
  t.succ = j.at("succ").get<double>();
  t.episode_index = j.at("episode_index").get<std::uint64_t>();
  return t;
}

void save_traces(const std::string& path, const std::vector<TickTrace>& traces) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  for (const TickTrace& t : traces) out << trace_to_json_line(t) << '\n';
}

std::vector<TickTrace> load_traces(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open traces file: " + path);
  std::vector<TickTrace> traces;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    traces.push_back(trace_from_json(json::parse(line)));
  }
  return traces;
}

std::string episode_to_json_line(const Episode& e) {
  std::string out;
  out.reserve(512);
  out += "{\"key\":";
  append_vector(out, e.key.c);
  out += ",\"z_pre\":";
  append_affect(out, e.z_pre);
  out += ",\"hints\":";
  append_vector(out, e.hints.scores);
  out += ",\"z_post\":";
  append_affect(out, e.z_post);
  out += ",\"succ\":";
  append_double(out, e.succ);
  out += '}';
  return out;
}

Episode episode_from_json(const json& j) {
  Episode e;
  e.key.c = vector_from(j.at("key"));
  e.z_pre = affect_from(j.at("z_pre"));
  e.hints.scores = vector_from(j.at("hints"));
  e.z_post = affect_from(j.at("z_post"));
  e.succ = j.at("succ").get<double>();
  return e;
}

void save_episodes(const std::string& path, const std::vector<Episode>& episodes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  for (const Episode& e : episodes) out << episode_to_json_line(e) << '\n';
}

std::vector<Episode> load_episodes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open episodes file: " + path);
  std::vector<Episode> episodes;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    episodes.push_back(episode_from_json(json::parse(line)));
  }
  return episodes;
}

MetricsRow metrics_from_trace(const TickTrace& trace, std::size_t memory_size) {
  MetricsRow row;
  row.tick = trace.tick;
  row.nearest_peer_distance = trace.y.peers_valid
                                  ? trace.y.distance_to_nearest_peer
                                  : std::numeric_limits<double>::quiet_NaN();
  row.need_discrepancy = trace.needs.targets - trace.needs.values;
  row.policy_entropy = entropy(trace.q);
  Eigen::Index argmax = 0;
  trace.q.maxCoeff(&argmax);
  row.policy_argmax = policy_from_index(static_cast<int>(argmax));
  row.succ = trace.succ;
  row.memory_size = memory_size;
  return row;
}

std::string metrics_header(Eigen::Index need_channels) {
  std::string out = "tick,nearest_peer_distance";
  for (Eigen::Index i = 0; i < need_channels; ++i) {
    out += ",need_disc_" + std::to_string(i);
  }
  out += ",policy_entropy,policy_argmax,succ,memory_size";
  return out;
}

std::string metrics_row_to_csv(const MetricsRow& row) {
  std::string out = std::to_string(row.tick);
  out += ',';
  if (std::isnan(row.nearest_peer_distance)) {
    out += "nan";
  } else {
    out += format_double(row.nearest_peer_distance);
  }
  for (Eigen::Index i = 0; i < row.need_discrepancy.size(); ++i) {
    out += ',';
    out += format_double(row.need_discrepancy[i]);
  }
  out += ',';
  out += format_double(row.policy_entropy);
  out += ',';
  out += to_string(row.policy_argmax);
  out += ',';
  out += format_double(row.succ);
  out += ',';
  out += std::to_string(row.memory_size);
  return out;
}

void save_metrics(const std::string& path, const std::vector<MetricsRow>& rows,
                  Eigen::Index need_channels) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << metrics_header(need_channels) << '\n';
  for (const MetricsRow& row : rows) out << metrics_row_to_csv(row) << '\n';
}

}  // namespace emoctl
