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

#ifndef EMOCTL_JSON_UTIL_HPP
#define EMOCTL_JSON_UTIL_HPP

#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <json.hpp>

namespace emoctl {

class ConfigError;

namespace jsonutil {

/// Strict object reader: every key must be consumed via at(); finish()
/// rejects anything left over. Keeps config files honest.
template <typename Error>
class StrictFields {
 public:
  StrictFields(const nlohmann::json& j, std::string context)
      : j_(j), context_(std::move(context)) {
    if (!j.is_object()) throw Error(context_ + ": expected an object");
  }

  const nlohmann::json& at(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) throw Error(context_ + ": missing key '" + key + "'");
    return *it;
  }

  void finish() const {
    for (const auto& item : j_.items()) {
      if (seen_.find(item.key()) == seen_.end()) {
        throw Error(context_ + ": unknown key '" + item.key() + "'");
      }
    }
  }

 private:
  const nlohmann::json& j_;
  std::string context_;
  std::set<std::string> seen_;
};

template <typename Error>
double as_double(const nlohmann::json& j, const std::string& what) {
  if (!j.is_number()) throw Error(what + ": expected a number");
  return j.get<double>();
}

template <typename Error>
int as_int(const nlohmann::json& j, const std::string& what) {
  if (!j.is_number_integer()) throw Error(what + ": expected an integer");
  return j.get<int>();
}

template <typename Error>
std::uint64_t as_u64(const nlohmann::json& j, const std::string& what) {
  if (!j.is_number_integer() || j.get<std::int64_t>() < 0) {
    throw Error(what + ": expected a nonnegative integer");
  }
  return j.get<std::uint64_t>();
}

template <typename Error>
bool as_bool(const nlohmann::json& j, const std::string& what) {
  if (!j.is_boolean()) throw Error(what + ": expected a boolean");
  return j.get<bool>();
}

template <typename Error>
std::string as_string(const nlohmann::json& j, const std::string& what) {
  if (!j.is_string()) throw Error(what + ": expected a string");
  return j.get<std::string>();
}

template <typename Error>
std::vector<std::string> as_string_list(const nlohmann::json& j, const std::string& what) {
  if (!j.is_array()) throw Error(what + ": expected an array of strings");
  std::vector<std::string> out;
  out.reserve(j.size());
  for (const auto& item : j) out.push_back(as_string<Error>(item, what));
  return out;
}

template <typename Error>
Eigen::VectorXd as_vector(const nlohmann::json& j, const std::string& what) {
  if (!j.is_array()) throw Error(what + ": expected an array");
  Eigen::VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    v[static_cast<Eigen::Index>(i)] = as_double<Error>(j[i], what);
  }
  return v;
}

template <typename Error>
Eigen::MatrixXd as_matrix(const nlohmann::json& j, const std::string& what) {
  if (!j.is_array() || j.empty()) throw Error(what + ": expected an array of rows");
  const std::size_t cols = j[0].size();
  Eigen::MatrixXd m(j.size(), cols);
  for (std::size_t r = 0; r < j.size(); ++r) {
    if (!j[r].is_array() || j[r].size() != cols) throw Error(what + ": ragged matrix rows");
    for (std::size_t c = 0; c < cols; ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          as_double<Error>(j[r][c], what);
    }
  }
  return m;
}

template <typename Error>
Eigen::Vector2d as_point(const nlohmann::json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 2) throw Error(what + ": expected [x, y]");
  return {as_double<Error>(j[0], what), as_double<Error>(j[1], what)};
}

inline nlohmann::ordered_json vector_to_json(const Eigen::VectorXd& v) {
  nlohmann::ordered_json out = nlohmann::ordered_json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

inline nlohmann::ordered_json matrix_to_json(const Eigen::MatrixXd& m) {
  nlohmann::ordered_json out = nlohmann::ordered_json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    nlohmann::ordered_json row = nlohmann::ordered_json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    out.push_back(row);
  }
  return out;
}

inline nlohmann::ordered_json point_to_json(const Eigen::Vector2d& p) {
  return nlohmann::ordered_json::array({p.x(), p.y()});
}

}  // namespace jsonutil
}  // namespace emoctl

#endif  // EMOCTL_JSON_UTIL_HPP
