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

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "embc/errors.hpp"

namespace embc {

/// Absolute point-wise error tolerance. Every reconstructed value must stay
/// within `value()` of its source, in the same units as the embedding data.
class ErrorBound {
 public:
  explicit ErrorBound(double value) : value_(value) {
    if (!(std::isfinite(value) && value > 0.0)) {
      throw ValueError("error bound must be finite and > 0, got " + std::to_string(value));
    }
  }

  double value() const { return value_; }

  /// Quantization bin width. Values are binned at 2x the tolerance so that
  /// the bin center is never farther than the tolerance from any member.
  double bin_width() const { return 2.0 * value_; }

 private:
  double value_;
};

/// Embedding data is float32 on the wire; one value costs this many bytes in
/// uncompressed transfers and compression-ratio accounting.
inline constexpr uint64_t kWireBytesPerValue = 4;

/// A batch of embedding lookup results: batch_size x dim values in row-major
/// order, tagged with the table they came from. Values are held as doubles so
/// reconstructed bin centers are carried exactly; source data itself is
/// float32-representable.
struct EmbeddingBatch {
  int32_t table_id = 0;
  uint32_t dim = 0;
  std::vector<double> values;

  uint32_t batch_size() const {
    return dim == 0 ? 0 : static_cast<uint32_t>(values.size() / dim);
  }

  uint64_t wire_bytes() const { return kWireBytesPerValue * values.size(); }

  std::span<const double> row(uint32_t i) const {
    return std::span<const double>(values.data() + static_cast<size_t>(i) * dim, dim);
  }

  void check_shape() const {
    if (dim == 0) throw ValueError("embedding batch dim must be >= 1");
    if (values.size() % dim != 0) {
      throw ValueError("embedding batch has " + std::to_string(values.size()) +
                       " values, not a multiple of dim " + std::to_string(dim));
    }
  }
};

/// Integer quantization codes of a batch together with the error bound that
/// produced them. Codes reconstruct to bin centers: value = code * 2 * eb.
struct QuantizedBatch {
  int32_t table_id = 0;
  uint32_t dim = 0;
  std::vector<int32_t> codes;
  ErrorBound eb;

  uint32_t vector_count() const {
    return dim == 0 ? 0 : static_cast<uint32_t>(codes.size() / dim);
  }

  std::span<const int32_t> row(uint32_t i) const {
    return std::span<const int32_t>(codes.data() + static_cast<size_t>(i) * dim, dim);
  }
};

}  // namespace embc
