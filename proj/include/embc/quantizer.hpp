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
#include <limits>
#include <string>

#include "embc/batch.hpp"
#include "embc/errors.hpp"

namespace embc {

/// Bin-center reconstruction of a single code.
inline double reconstruct_value(int32_t code, const ErrorBound& eb) {
  return static_cast<double>(code) * eb.bin_width();
}

namespace detail {

/// Quantizes one value to its bin index. Rounding is half-away-from-zero so
/// that results do not depend on platform rounding state. The chosen code is
/// verified against the actual reconstruction; if the nearest bin misses, the
/// adjacent bin on the residual side is taken instead. The check forgives one
/// ulp of the reconstruction product: bin centers tile at exactly 2*eb (the
/// doubling is exact in binary), so some center is always within the bound in
/// exact arithmetic, and only the final rounding of code*width can poke past
/// it when a value sits exactly on a bin edge.
inline int32_t quantize_value(double value, const ErrorBound& eb, size_t index) {
  if (!std::isfinite(value)) {
    throw ValueError("non-finite value at index " + std::to_string(index));
  }
  const double w = eb.bin_width();
  const double x = value;
  const double quotient = x / w;
  if (std::abs(quotient) > 2.0 * static_cast<double>(std::numeric_limits<int32_t>::max())) {
    throw ValueError("quantization code overflow at index " + std::to_string(index) +
                     ": error bound too small for value magnitude");
  }
  const long long nearest = std::llround(quotient);

  auto within_bound = [&](long long c) {
    const double recon = static_cast<double>(c) * w;
    const double slack = std::abs(recon) * 0x1.0p-52;
    return std::abs(recon - x) <= eb.value() + slack;
  };

  long long code = nearest;
  if (!within_bound(code)) {
    const long long neighbor = (x > static_cast<double>(code) * w) ? code + 1 : code - 1;
    if (!within_bound(neighbor)) {
      throw ValueError("error bound " + std::to_string(eb.value()) +
                       " too small to represent value at index " + std::to_string(index));
    }
    code = neighbor;
  }
  if (code > std::numeric_limits<int32_t>::max() || code < -std::numeric_limits<int32_t>::max()) {
    throw ValueError("quantization code overflow at index " + std::to_string(index) +
                     ": error bound too small for value magnitude");
  }
  return static_cast<int32_t>(code);
}

}  // namespace detail

/// Error-bounded uniform scalar quantization: code = round(value / (2 * eb)),
/// half away from zero. No prediction stage; codes are raw bin indices, so
/// equal input vectors always produce equal code rows.
inline QuantizedBatch quantize(const EmbeddingBatch& batch, const ErrorBound& eb) {
  batch.check_shape();
  QuantizedBatch q{batch.table_id, batch.dim, {}, eb};
  q.codes.resize(batch.values.size());
  for (size_t i = 0; i < batch.values.size(); ++i) {
    q.codes[i] = detail::quantize_value(batch.values[i], eb, i);
  }
  return q;
}

/// Exact inverse of the bin mapping: every code becomes its bin center.
/// dequantize(quantize(x, eb)) is within eb of x point-wise.
inline EmbeddingBatch dequantize(const QuantizedBatch& q) {
  EmbeddingBatch batch{q.table_id, q.dim, {}};
  batch.values.resize(q.codes.size());
  for (size_t i = 0; i < q.codes.size(); ++i) {
    batch.values[i] = reconstruct_value(q.codes[i], q.eb);
  }
  return batch;
}

}  // namespace embc
