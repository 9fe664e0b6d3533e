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
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "embc/batch.hpp"
#include "embc/errors.hpp"

namespace embc {

enum class ValueDist { gaussian, uniform };

/// Synthetic embedding table description: value distribution for the rows and
/// a Zipf exponent for how skewed lookups into it are (s = 0 means uniform
/// queries).
struct TableSpec {
  int32_t table_id = 0;
  uint32_t rows = 1;
  uint32_t dim = 1;
  ValueDist dist = ValueDist::gaussian;
  double mu = 0.0;
  double sigma = 0.1;
  double lo = 0.0;
  double hi = 1.0;
  double zipf_s = 0.0;
  uint64_t seed = 1;

  void validate() const {
    if (rows < 1) throw ValueError("table rows must be >= 1");
    if (dim < 1) throw ValueError("table dim must be >= 1");
    if (dist == ValueDist::gaussian && !(sigma > 0.0)) {
      throw ValueError("gaussian sigma must be > 0, got " + std::to_string(sigma));
    }
    if (dist == ValueDist::uniform && !(lo < hi)) {
      throw ValueError("uniform bounds must satisfy lo < hi");
    }
    if (zipf_s < 0.0) throw ValueError("zipf exponent must be >= 0");
  }
};

namespace detail {

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

inline uint64_t mix_seed(uint64_t seed, uint64_t salt) {
  return splitmix64(seed ^ splitmix64(salt));
}

// Uniform double in [0, 1) from the top 53 bits; identical on every platform.
inline double u01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// Box-Muller; drawn one at a time so the stream does not depend on library
// internals.
inline double gaussian(std::mt19937_64& rng, double mu, double sigma) {
  const double u1 = (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53;  // (0, 1]
  const double u2 = u01(rng);
  return mu + sigma * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace detail

/// Zipf(s) index sampler over [0, rows): weight of rank k is (k+1)^-s,
/// sampled by inverse CDF over the precomputed normalized weights.
class ZipfSampler {
 public:
  ZipfSampler(uint32_t rows, double s) {
    cdf_.resize(rows);
    double total = 0.0;
    for (uint32_t k = 0; k < rows; ++k) {
      total += std::pow(static_cast<double>(k) + 1.0, -s);
      cdf_[k] = total;
    }
    for (double& c : cdf_) c /= total;
    cdf_.back() = 1.0;
  }

  uint32_t operator()(std::mt19937_64& rng) const {
    const double u = detail::u01(rng);
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    return static_cast<uint32_t>(it - cdf_.begin());
  }

 private:
  std::vector<double> cdf_;
};

/// Generates the full rows x dim value matrix, reproducibly from the spec
/// seed. Values are rounded to the float32 grid (the wire precision of
/// embedding data) and carried as doubles.
inline std::vector<double> gen_table(const TableSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(detail::mix_seed(spec.seed, 0xEBC0A11ull));
  std::vector<double> values(static_cast<size_t>(spec.rows) * spec.dim);
  for (double& v : values) {
    const double x = spec.dist == ValueDist::gaussian
                         ? detail::gaussian(rng, spec.mu, spec.sigma)
                         : spec.lo + (spec.hi - spec.lo) * detail::u01(rng);
    v = static_cast<double>(static_cast<float>(x));
  }
  return values;
}

namespace detail {

inline std::vector<uint32_t> draw_indices(const ZipfSampler& sample, uint64_t seed,
                                          uint32_t batch_size, uint64_t stream) {
  std::mt19937_64 rng(mix_seed(seed, 0xEBC10C0ull ^ stream));
  std::vector<uint32_t> indices(batch_size);
  for (auto& idx : indices) idx = sample(rng);
  return indices;
}

}  // namespace detail

/// Lookup indices for one batch; `stream` distinguishes independent draws
/// (iterations, ranks) from the same table.
inline std::vector<uint32_t> gen_lookup_indices(const TableSpec& spec, uint32_t batch_size,
                                                uint64_t stream = 0) {
  spec.validate();
  return detail::draw_indices(ZipfSampler(spec.rows, spec.zipf_s), spec.seed, batch_size, stream);
}

/// A generated table plus its sampler, for repeated lookups.
class Table {
 public:
  explicit Table(TableSpec spec)
      : spec_(spec), values_(gen_table(spec)), sampler_(spec.rows, spec.zipf_s) {}

  const TableSpec& spec() const { return spec_; }
  const std::vector<double>& values() const { return values_; }

  /// Same draws as gen_lookup_indices, with the sampler built once.
  std::vector<uint32_t> sample_indices(uint32_t batch_size, uint64_t stream = 0) const {
    return detail::draw_indices(sampler_, spec_.seed, batch_size, stream);
  }

  EmbeddingBatch gather(const std::vector<uint32_t>& indices) const {
    EmbeddingBatch batch{spec_.table_id, spec_.dim, {}};
    batch.values.reserve(static_cast<size_t>(indices.size()) * spec_.dim);
    for (uint32_t idx : indices) {
      const double* row = values_.data() + static_cast<size_t>(idx) * spec_.dim;
      batch.values.insert(batch.values.end(), row, row + spec_.dim);
    }
    return batch;
  }

  EmbeddingBatch lookup_batch(uint32_t batch_size, uint64_t stream = 0) const {
    return gather(sample_indices(batch_size, stream));
  }

 private:
  TableSpec spec_;
  std::vector<double> values_;
  ZipfSampler sampler_;
};

/// One-shot form: generates the table and samples a batch of lookups from it.
inline EmbeddingBatch gen_lookup_batch(const TableSpec& spec, uint32_t batch_size,
                                       uint64_t stream = 0) {
  return Table(spec).lookup_batch(batch_size, stream);
}

}  // namespace embc
