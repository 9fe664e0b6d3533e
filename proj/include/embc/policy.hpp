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

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "embc/batch.hpp"
#include "embc/bytes.hpp"
#include "embc/container.hpp"
#include "embc/errors.hpp"
#include "embc/quantizer.hpp"

namespace embc {

enum class TableClass { large, medium, small };

inline const char* table_class_name(TableClass c) {
  switch (c) {
    case TableClass::large: return "large";
    case TableClass::medium: return "medium";
    case TableClass::small: return "small";
  }
  return "unknown";
}

inline TableClass table_class_from_name(const std::string& name) {
  if (name == "large") return TableClass::large;
  if (name == "medium") return TableClass::medium;
  if (name == "small") return TableClass::small;
  throw ConfigError("unknown table class '" + name + "'");
}

/// Error-bound decay schedule for the early training phase. The multiplier
/// descends from start_scale to 1.0 over [0, decay_end) and stays at 1.0
/// afterwards.
struct DecayConfig {
  enum class Fn { stepwise, linear, logarithmic };

  Fn function = Fn::stepwise;
  double start_scale = 1.0;
  uint64_t decay_end = 0;
  uint32_t step_count = 4;

  void validate() const {
    if (!(start_scale >= 1.0)) throw ConfigError("decay start_scale must be >= 1");
    if (step_count < 1) throw ConfigError("decay step_count must be >= 1");
  }
};

/// Table-wise and iteration-wise error-bound policy. Tables whose quantized
/// batches collapse heavily (low survival ratio) tolerate a large error
/// bound; tables that barely collapse get a small one.
struct PolicyConfig {
  double global_eb = 0.02;
  double alpha = 5.0 / 3.0;       // large-class multiplier on global_eb
  double beta = 3.0;              // small-class divisor on global_eb
  double large_threshold = 0.70;  // survival ratio below this -> large
  double small_threshold = 0.95;  // survival ratio above this -> small
  DecayConfig decay;

  void validate() const {
    if (!(global_eb > 0.0 && std::isfinite(global_eb))) {
      throw ConfigError("global_eb must be finite and > 0");
    }
    if (!(alpha >= 1.0)) throw ConfigError("alpha must be >= 1");
    if (!(beta >= 1.0)) throw ConfigError("beta must be >= 1");
    if (!(0.0 < large_threshold && large_threshold < small_threshold && small_threshold <= 1.0)) {
      throw ConfigError("thresholds must satisfy 0 < large < small <= 1");
    }
    decay.validate();
  }

  double eb_for(TableClass c) const {
    switch (c) {
      case TableClass::large: return global_eb * alpha;
      case TableClass::small: return global_eb / beta;
      case TableClass::medium: break;
    }
    return global_eb;
  }
};

/// One measured codec run on a sample: compression ratio plus compression and
/// decompression throughput in bytes/s on the uncompressed basis.
struct ThroughputSample {
  Codec codec = Codec::raw;
  double comp_bps = 0.0;
  double decomp_bps = 0.0;
  double ratio = 1.0;
};

/// Offline analysis result for one table.
struct TableProfile {
  int32_t table_id = 0;
  uint64_t n_original_patterns = 0;
  uint64_t n_quantized_patterns = 0;
  double survival_ratio = 1.0;    // quantized / original unique patterns
  double homo_index = 0.0;        // 1 - survival_ratio
  TableClass cls = TableClass::medium;
  Codec codec = Codec::raw;
  double eb = 0.02;
  std::vector<ThroughputSample> measured;
};

inline double survival_ratio(uint64_t n_original, uint64_t n_quantized) {
  if (n_original == 0) throw ValueError("survival ratio needs a nonempty sample");
  return static_cast<double>(n_quantized) / static_cast<double>(n_original);
}

/// Homogenization: the fraction of unique vectors that collapse together
/// under quantization. 0 means no collapse; values near 1 mean the sample
/// collapses toward a single vector.
inline double homo_index(uint64_t n_original, uint64_t n_quantized) {
  return 1.0 - survival_ratio(n_original, n_quantized);
}

namespace detail {

// Exact distinct-row count: sorts row indices by content and counts runs.
template <typename T>
uint64_t count_unique_rows(std::span<const T> data, uint32_t dim) {
  const size_t rows = dim == 0 ? 0 : data.size() / dim;
  if (rows == 0) return 0;
  std::vector<uint32_t> order(rows);
  for (size_t i = 0; i < rows; ++i) order[i] = static_cast<uint32_t>(i);
  auto row_less = [&](uint32_t a, uint32_t b) {
    return std::lexicographical_compare(data.begin() + static_cast<size_t>(a) * dim,
                                        data.begin() + static_cast<size_t>(a + 1) * dim,
                                        data.begin() + static_cast<size_t>(b) * dim,
                                        data.begin() + static_cast<size_t>(b + 1) * dim);
  };
  std::sort(order.begin(), order.end(), row_less);
  uint64_t unique = 1;
  for (size_t i = 1; i < rows; ++i) {
    if (row_less(order[i - 1], order[i])) ++unique;
  }
  return unique;
}

struct PatternCounts {
  uint64_t original = 0;
  uint64_t quantized = 0;
};

inline PatternCounts pattern_counts(const EmbeddingBatch& sample, const ErrorBound& eb) {
  sample.check_shape();
  if (sample.batch_size() == 0) throw ValueError("survival ratio needs a nonempty sample");
  const QuantizedBatch q = quantize(sample, eb);
  return {count_unique_rows(std::span<const double>(sample.values), sample.dim),
          count_unique_rows(std::span<const int32_t>(q.codes), q.dim)};
}

}  // namespace detail

inline double survival_ratio(const EmbeddingBatch& sample, const ErrorBound& eb) {
  const auto counts = detail::pattern_counts(sample, eb);
  return survival_ratio(counts.original, counts.quantized);
}

inline double homo_index(const EmbeddingBatch& sample, const ErrorBound& eb) {
  const auto counts = detail::pattern_counts(sample, eb);
  return homo_index(counts.original, counts.quantized);
}

/// Partitions (0, 1] into exactly three classes by survival ratio.
inline TableClass classify_table(double survival, const PolicyConfig& cfg) {
  cfg.validate();
  if (survival > cfg.small_threshold) return TableClass::small;
  if (survival < cfg.large_threshold) return TableClass::large;
  return TableClass::medium;
}

/// Speed-up of compressed over uncompressed transfer for a link of bandwidth
/// `bandwidth`:
///
///   speedup = 1 / (1/ratio + bandwidth * (1/comp_bps + 1/decomp_bps))
///
/// All rates share one unit. As bandwidth -> 0 the codec overhead vanishes
/// and the speedup approaches the compression ratio.
inline double estimate_speedup(double ratio, double bandwidth, double comp_bps,
                               double decomp_bps) {
  if (!(ratio > 0.0 && bandwidth > 0.0 && comp_bps > 0.0 && decomp_bps > 0.0)) {
    throw ValueError("estimate_speedup arguments must all be positive");
  }
  return 1.0 / (1.0 / ratio + bandwidth * (1.0 / comp_bps + 1.0 / decomp_bps));
}

struct CodecSelection {
  Codec chosen = Codec::raw;
  double bandwidth = 0.0;
  std::vector<ThroughputSample> measured;  // one per candidate, input order
};

namespace detail {

// Median of five timed runs; wall-clock noise is the reason for the median.
template <typename Fn>
double median_seconds(Fn&& fn) {
  constexpr int kRuns = 5;
  std::array<double, kRuns> times;
  for (int i = 0; i < kRuns; ++i) {
    const auto start = std::chrono::steady_clock::now();
    fn();
    const auto stop = std::chrono::steady_clock::now();
    times[i] = std::chrono::duration<double>(stop - start).count();
  }
  std::sort(times.begin(), times.end());
  return std::max(times[kRuns / 2], 1e-9);
}

}  // namespace detail

/// Runs every candidate codec on the sample, measures ratio and throughput,
/// and returns the speed-up argmax (ties go to the lower codec tag). If even
/// the best candidate expands the data, the raw fallback wins: a ratio <= 1
/// can never beat an untouched transfer.
inline CodecSelection select_codec(const EmbeddingBatch& sample, const ErrorBound& eb,
                                   std::span<const Codec> candidates, double bandwidth,
                                   const VlzConfig& vlz_cfg = {}) {
  if (candidates.empty()) throw ValueError("select_codec needs at least one candidate");
  sample.check_shape();
  const double uncompressed_bytes = static_cast<double>(sample.wire_bytes());

  CodecSelection sel;
  sel.bandwidth = bandwidth;
  double best_speedup = -1.0;
  double best_ratio = 0.0;
  for (const Codec codec : candidates) {
    CompressedChunk chunk;
    const double comp_s =
        detail::median_seconds([&] { chunk = encode_chunk(sample, eb, codec, vlz_cfg); });
    const double decomp_s = detail::median_seconds([&] { (void)decode_chunk(chunk); });

    ThroughputSample m;
    m.codec = codec;
    m.ratio = uncompressed_bytes / static_cast<double>(chunk.payload.size());
    m.comp_bps = uncompressed_bytes / comp_s;
    m.decomp_bps = uncompressed_bytes / decomp_s;
    sel.measured.push_back(m);

    const double speedup = estimate_speedup(m.ratio, bandwidth, m.comp_bps, m.decomp_bps);
    const bool better = speedup > best_speedup ||
                        (speedup == best_speedup && codec < sel.chosen);
    if (best_speedup < 0.0 || better) {
      best_speedup = speedup;
      best_ratio = m.ratio;
      sel.chosen = codec;
    }
  }
  if (best_ratio <= 1.0) sel.chosen = Codec::raw;
  return sel;
}

/// Offline analysis: one profile per sampled table, with the class-derived
/// error bound and the codec picked by the speed-up model at that bound.
inline std::map<int32_t, TableProfile> offline_analysis(std::span<const EmbeddingBatch> samples,
                                                        const PolicyConfig& cfg, double bandwidth,
                                                        const VlzConfig& vlz_cfg = {}) {
  cfg.validate();
  std::map<int32_t, TableProfile> profiles;
  const std::array<Codec, 2> candidates = {Codec::vlz, Codec::huffman};
  for (const EmbeddingBatch& sample : samples) {
    TableProfile p;
    p.table_id = sample.table_id;
    const auto counts = detail::pattern_counts(sample, ErrorBound(cfg.global_eb));
    p.n_original_patterns = counts.original;
    p.n_quantized_patterns = counts.quantized;
    p.survival_ratio = survival_ratio(counts.original, counts.quantized);
    p.homo_index = homo_index(counts.original, counts.quantized);
    p.cls = classify_table(p.survival_ratio, cfg);
    p.eb = cfg.eb_for(p.cls);

    const CodecSelection sel =
        select_codec(sample, ErrorBound(p.eb), candidates, bandwidth, vlz_cfg);
    p.codec = sel.chosen;
    p.measured = sel.measured;
    profiles[p.table_id] = p;
  }
  return profiles;
}

/// Decay multiplier at `iteration`. Stepwise uses step_count evenly spaced
/// multipliers from start_scale down to 1.0 inclusive; linear interpolates;
/// logarithmic front-loads the descent. All reach 1.0 at decay_end and stay
/// there.
inline double decay_multiplier(uint64_t iteration, const DecayConfig& decay) {
  decay.validate();
  if (decay.decay_end == 0 || iteration >= decay.decay_end || decay.start_scale == 1.0) {
    return 1.0;
  }
  const double span = decay.start_scale - 1.0;
  switch (decay.function) {
    case DecayConfig::Fn::stepwise: {
      if (decay.step_count == 1) return decay.start_scale;
      const uint64_t stair = iteration * decay.step_count / decay.decay_end;
      return decay.start_scale -
             span * static_cast<double>(stair) / static_cast<double>(decay.step_count - 1);
    }
    case DecayConfig::Fn::linear: {
      const double t = static_cast<double>(iteration) / static_cast<double>(decay.decay_end);
      return decay.start_scale - span * t;
    }
    case DecayConfig::Fn::logarithmic: {
      const double t = static_cast<double>(iteration) / static_cast<double>(decay.decay_end);
      return 1.0 + span * (1.0 - std::log1p((std::numbers::e - 1.0) * t));
    }
  }
  return 1.0;
}

/// Error bound in force for a table at an iteration: the profile's assigned
/// bound scaled by the decay multiplier. Non-increasing in the iteration and
/// constant from decay_end on.
inline ErrorBound eb_at(int32_t table_id, uint64_t iteration,
                        const std::map<int32_t, TableProfile>& profiles,
                        const PolicyConfig& cfg) {
  const auto it = profiles.find(table_id);
  const double base = it != profiles.end() ? it->second.eb : cfg.global_eb;
  return ErrorBound(base * decay_multiplier(iteration, cfg.decay));
}

}  // namespace embc
