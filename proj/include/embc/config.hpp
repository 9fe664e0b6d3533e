// Copyright 2026 The embc Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "embc/commsim.hpp"
#include "embc/csv.hpp"
#include "embc/datagen.hpp"
#include "embc/errors.hpp"
#include "embc/policy.hpp"

namespace embc {

/// Plain-text `key = value` configuration. Lines starting with '#' and blank
/// lines are ignored; keys use dotted segments (table.0.rows). Insertion
/// order is preserved on write.
class KeyValueConfig {
 public:
  static KeyValueConfig parse_string(const std::string& text, const std::string& origin = "<string>") {
    KeyValueConfig cfg;
    std::istringstream in(text);
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const std::string trimmed = trim(line);
      if (trimmed.empty() || trimmed[0] == '#') continue;
      const size_t eq = trimmed.find('=');
      if (eq == std::string::npos) {
        throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected 'key = value'");
      }
      const std::string key = trim(trimmed.substr(0, eq));
      const std::string value = trim(trimmed.substr(eq + 1));
      if (key.empty()) {
        throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
      }
      cfg.set(key, value);
    }
    return cfg;
  }

  static KeyValueConfig parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_string(buf.str(), path);
  }

  void set(const std::string& key, const std::string& value) {
    auto it = index_.find(key);
    if (it == index_.end()) {
      index_[key] = entries_.size();
      entries_.emplace_back(key, value);
    } else {
      entries_[it->second].second = value;
    }
  }

  bool has(const std::string& key) const { return index_.contains(key); }

  std::string get_string(const std::string& key) const {
    auto it = index_.find(key);
    if (it == index_.end()) throw ConfigError("missing config key '" + key + "'");
    return entries_[it->second].second;
  }

  std::string get_string(const std::string& key, const std::string& fallback) const {
    return has(key) ? get_string(key) : fallback;
  }

  double get_f64(const std::string& key) const { return parse_f64(key, get_string(key)); }
  double get_f64(const std::string& key, double fallback) const {
    return has(key) ? get_f64(key) : fallback;
  }

  uint64_t get_u64(const std::string& key) const { return parse_u64(key, get_string(key)); }
  uint64_t get_u64(const std::string& key, uint64_t fallback) const {
    return has(key) ? get_u64(key) : fallback;
  }

  bool get_bool(const std::string& key) const {
    const std::string v = get_string(key);
    if (v == "on" || v == "true" || v == "1" || v == "yes") return true;
    if (v == "off" || v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("key '" + key + "' expects on/off, got '" + v + "'");
  }
  bool get_bool(const std::string& key, bool fallback) const {
    return has(key) ? get_bool(key) : fallback;
  }

  std::string serialize() const {
    std::string out;
    for (const auto& [key, value] : entries_) {
      out += key;
      out += " = ";
      out += value;
      out += '\n';
    }
    return out;
  }

  void write_file(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write config file '" + path + "'");
    out << serialize();
  }

  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

 private:
  static std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
  }

  static double parse_f64(const std::string& key, const std::string& v) {
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size()) {
      throw ConfigError("key '" + key + "' expects a number, got '" + v + "'");
    }
    return out;
  }

  static uint64_t parse_u64(const std::string& key, const std::string& v) {
    uint64_t out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size()) {
      throw ConfigError("key '" + key + "' expects a non-negative integer, got '" + v + "'");
    }
    return out;
  }

  std::vector<std::pair<std::string, std::string>> entries_;
  std::map<std::string, size_t> index_;
};

inline DecayConfig::Fn decay_fn_from_name(const std::string& name) {
  if (name == "stepwise") return DecayConfig::Fn::stepwise;
  if (name == "linear") return DecayConfig::Fn::linear;
  if (name == "logarithmic") return DecayConfig::Fn::logarithmic;
  throw ConfigError("unknown decay function '" + name + "'");
}

inline const char* decay_fn_name(DecayConfig::Fn fn) {
  switch (fn) {
    case DecayConfig::Fn::stepwise: return "stepwise";
    case DecayConfig::Fn::linear: return "linear";
    case DecayConfig::Fn::logarithmic: return "logarithmic";
  }
  return "unknown";
}

inline Codec codec_from_name(const std::string& name) {
  if (name == "raw") return Codec::raw;
  if (name == "vlz") return Codec::vlz;
  if (name == "huffman") return Codec::huffman;
  throw ConfigError("unknown codec '" + name + "'");
}

inline PolicyConfig load_policy(const KeyValueConfig& cfg) {
  PolicyConfig p;
  p.global_eb = cfg.get_f64("policy.global_eb", p.global_eb);
  p.alpha = cfg.get_f64("policy.alpha", p.alpha);
  p.beta = cfg.get_f64("policy.beta", p.beta);
  p.large_threshold = cfg.get_f64("policy.l_thr", p.large_threshold);
  p.small_threshold = cfg.get_f64("policy.s_thr", p.small_threshold);
  p.decay.function = decay_fn_from_name(cfg.get_string("policy.decay.function", "stepwise"));
  p.decay.start_scale = cfg.get_f64("policy.decay.start_scale", p.decay.start_scale);
  p.decay.decay_end = cfg.get_u64("policy.decay.end", p.decay.decay_end);
  p.decay.step_count = static_cast<uint32_t>(cfg.get_u64("policy.decay.steps", p.decay.step_count));
  p.validate();
  return p;
}

inline std::vector<TableSpec> load_tables(const KeyValueConfig& cfg) {
  const uint64_t count = cfg.get_u64("tables.count");
  if (count == 0) throw ConfigError("tables.count must be >= 1");
  std::vector<TableSpec> tables;
  tables.reserve(count);
  for (uint64_t i = 0; i < count; ++i) {
    const std::string prefix = "table." + std::to_string(i) + ".";
    TableSpec t;
    t.table_id = static_cast<int32_t>(i);
    t.rows = static_cast<uint32_t>(cfg.get_u64(prefix + "rows"));
    t.dim = static_cast<uint32_t>(cfg.get_u64(prefix + "dim"));
    const std::string dist = cfg.get_string(prefix + "dist", "gaussian");
    if (dist == "gaussian") {
      t.dist = ValueDist::gaussian;
      t.mu = cfg.get_f64(prefix + "mu", 0.0);
      t.sigma = cfg.get_f64(prefix + "sigma", 0.1);
    } else if (dist == "uniform") {
      t.dist = ValueDist::uniform;
      t.lo = cfg.get_f64(prefix + "lo", 0.0);
      t.hi = cfg.get_f64(prefix + "hi", 1.0);
    } else {
      throw ConfigError("table " + std::to_string(i) + ": unknown distribution '" + dist + "'");
    }
    t.zipf_s = cfg.get_f64(prefix + "zipf", 0.0);
    t.seed = cfg.get_u64(prefix + "seed", i + 1);
    t.validate();
    tables.push_back(t);
  }
  return tables;
}

inline SimConfig load_sim_config(const KeyValueConfig& cfg) {
  SimConfig sim;
  sim.ranks = static_cast<uint32_t>(cfg.get_u64("ranks", sim.ranks));
  sim.bandwidth = cfg.get_f64("bandwidth", sim.bandwidth);
  sim.latency = cfg.get_f64("latency", sim.latency);
  sim.iterations = static_cast<uint32_t>(cfg.get_u64("iterations", sim.iterations));
  sim.batch = static_cast<uint32_t>(cfg.get_u64("batch", sim.batch));
  sim.compression = cfg.get_bool("compression", sim.compression);
  sim.workers = static_cast<unsigned>(cfg.get_u64("workers", sim.workers));
  sim.seed = cfg.get_u64("seed", sim.seed);
  sim.policy = load_policy(cfg);
  sim.tables = load_tables(cfg);
  sim.validate();
  return sim;
}

/// Profiles persist as the same key-value format, one block per table.
inline void write_profiles(const std::string& path,
                           const std::map<int32_t, TableProfile>& profiles) {
  KeyValueConfig out;
  out.set("profiles.count", std::to_string(profiles.size()));
  size_t i = 0;
  for (const auto& [table_id, p] : profiles) {
    const std::string prefix = "profile." + std::to_string(i) + ".";
    out.set(prefix + "table", std::to_string(table_id));
    out.set(prefix + "n_original", std::to_string(p.n_original_patterns));
    out.set(prefix + "n_quantized", std::to_string(p.n_quantized_patterns));
    out.set(prefix + "survival", detail::format_double(p.survival_ratio));
    out.set(prefix + "homo", detail::format_double(p.homo_index));
    out.set(prefix + "class", table_class_name(p.cls));
    out.set(prefix + "codec", codec_name(p.codec));
    out.set(prefix + "eb", detail::format_double(p.eb));
    for (const auto& m : p.measured) {
      const std::string mp = prefix + std::string(codec_name(m.codec)) + ".";
      out.set(mp + "ratio", detail::format_double(m.ratio));
      out.set(mp + "comp_bps", detail::format_double(m.comp_bps));
      out.set(mp + "decomp_bps", detail::format_double(m.decomp_bps));
    }
    ++i;
  }
  out.write_file(path);
}

inline std::map<int32_t, TableProfile> read_profiles(const std::string& path) {
  const KeyValueConfig cfg = KeyValueConfig::parse_file(path);
  const uint64_t count = cfg.get_u64("profiles.count");
  std::map<int32_t, TableProfile> profiles;
  for (uint64_t i = 0; i < count; ++i) {
    const std::string prefix = "profile." + std::to_string(i) + ".";
    TableProfile p;
    p.table_id = static_cast<int32_t>(cfg.get_u64(prefix + "table"));
    p.n_original_patterns = cfg.get_u64(prefix + "n_original");
    p.n_quantized_patterns = cfg.get_u64(prefix + "n_quantized");
    p.survival_ratio = cfg.get_f64(prefix + "survival");
    p.homo_index = cfg.get_f64(prefix + "homo");
    p.cls = table_class_from_name(cfg.get_string(prefix + "class"));
    p.codec = codec_from_name(cfg.get_string(prefix + "codec"));
    p.eb = cfg.get_f64(prefix + "eb");
    for (const Codec c : {Codec::vlz, Codec::huffman}) {
      const std::string mp = prefix + std::string(codec_name(c)) + ".";
      if (!cfg.has(mp + "ratio")) continue;
      ThroughputSample m;
      m.codec = c;
      m.ratio = cfg.get_f64(mp + "ratio");
      m.comp_bps = cfg.get_f64(mp + "comp_bps");
      m.decomp_bps = cfg.get_f64(mp + "decomp_bps");
      p.measured.push_back(m);
    }
    profiles[p.table_id] = p;
  }
  return profiles;
}

}  // namespace embc
