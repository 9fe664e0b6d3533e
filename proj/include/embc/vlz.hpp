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
#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "embc/batch.hpp"
#include "embc/bytes.hpp"
#include "embc/errors.hpp"

namespace embc {

/// Vector-granularity LZ. The match unit is exactly one embedding vector of
/// `dim` codes: a vector either repeats an identical vector seen at most
/// `window` vectors back, or is emitted literally. There are no partial or
/// multi-vector matches, which lets the encoder skip whole vectors between
/// match attempts instead of sliding byte by byte.
struct VlzConfig {
  uint32_t window = 255;  // number of previous vectors searchable

  void validate() const {
    if (window < 1 || window > kMaxWindow) {
      throw ValueError("vlz window must be in [1, 65536], got " + std::to_string(window));
    }
  }

  static constexpr uint32_t kMaxWindow = 1u << 16;
};

/// Token stream layout (byte-aligned):
///   0x00  literal   followed by dim zigzag-varint codes
///   0x01  reference followed by a varint back-offset >= 1
struct VlzStream {
  uint32_t dim = 0;
  uint32_t vector_count = 0;
  std::vector<uint8_t> tokens;
};

struct MatchStats {
  uint64_t literal_count = 0;
  uint64_t reference_count = 0;
};

namespace detail {

struct CodeRowRef {
  const int32_t* data;
  uint32_t dim;
};

struct CodeRowHash {
  size_t operator()(const CodeRowRef& r) const {
    return static_cast<size_t>(fnv1a(r.data, sizeof(int32_t) * r.dim));
  }
};

struct CodeRowEq {
  bool operator()(const CodeRowRef& a, const CodeRowRef& b) const {
    return a.dim == b.dim && std::equal(a.data, a.data + a.dim, b.data);
  }
};

// Runs the match scan shared by the encoder and match_stats. For each vector,
// calls on_match(i, offset) when an identical vector occurred `offset` back
// within the window, else on_literal(i). The candidate is always the most
// recent occurrence of the same content, so offsets stay small and a wider
// window can only turn literals into references.
template <typename LiteralFn, typename MatchFn>
void vlz_scan(const QuantizedBatch& q, const VlzConfig& cfg, LiteralFn&& on_literal,
              MatchFn&& on_match) {
  cfg.validate();
  const uint32_t n = q.vector_count();
  std::unordered_map<CodeRowRef, uint32_t, CodeRowHash, CodeRowEq> last_seen;
  last_seen.reserve(n);
  for (uint32_t i = 0; i < n; ++i) {
    const CodeRowRef row{q.codes.data() + static_cast<size_t>(i) * q.dim, q.dim};
    auto it = last_seen.find(row);
    if (it != last_seen.end() && i - it->second <= cfg.window) {
      on_match(i, i - it->second);
    } else {
      on_literal(i);
    }
    last_seen[row] = i;
  }
}

}  // namespace detail

constexpr uint8_t kVlzLiteralTag = 0x00;
constexpr uint8_t kVlzReferenceTag = 0x01;

/// Always succeeds; worst case every vector is a literal.
inline VlzStream vlz_encode(const QuantizedBatch& q, const VlzConfig& cfg = {}) {
  ByteWriter w;
  detail::vlz_scan(
      q, cfg,
      [&](uint32_t i) {
        w.u8(kVlzLiteralTag);
        const auto row = q.row(i);
        for (int32_t code : row) w.varint(zigzag_encode(code));
      },
      [&](uint32_t, uint32_t offset) {
        w.u8(kVlzReferenceTag);
        w.varint(offset);
      });
  return VlzStream{q.dim, q.vector_count(), w.take()};
}

/// Restores the exact code sequence; the error bound is supplied by the
/// caller (the container carries it alongside the payload).
inline QuantizedBatch vlz_decode(const VlzStream& s, const ErrorBound& eb, int32_t table_id = 0) {
  QuantizedBatch q{table_id, s.dim, {}, eb};
  if (s.dim == 0 && s.vector_count > 0) throw FormatError("vlz stream with dim 0");
  q.codes.reserve(static_cast<size_t>(s.dim) * s.vector_count);
  ByteReader r(s.tokens);
  for (uint32_t i = 0; i < s.vector_count; ++i) {
    const uint8_t tag = r.u8();
    if (tag == kVlzLiteralTag) {
      for (uint32_t j = 0; j < s.dim; ++j) {
        q.codes.push_back(zigzag_decode(static_cast<uint32_t>(r.varint())));
      }
    } else if (tag == kVlzReferenceTag) {
      const uint64_t offset = r.varint();
      if (offset < 1 || offset > i || offset > VlzConfig::kMaxWindow) {
        throw FormatError("vlz reference offset " + std::to_string(offset) + " invalid at token " +
                          std::to_string(i));
      }
      const size_t src = (static_cast<size_t>(i) - offset) * s.dim;
      for (uint32_t j = 0; j < s.dim; ++j) q.codes.push_back(q.codes[src + j]);
    } else {
      throw FormatError("vlz unknown token tag " + std::to_string(tag) + " at token " +
                        std::to_string(i));
    }
  }
  if (!r.exhausted()) {
    throw FormatError("vlz stream has " + std::to_string(r.remaining()) +
                      " trailing bytes after " + std::to_string(s.vector_count) + " vectors");
  }
  return q;
}

/// Counts how many vectors would be matched vs emitted literally; the counts
/// always sum to the vector count.
inline MatchStats match_stats(const QuantizedBatch& q, const VlzConfig& cfg = {}) {
  MatchStats stats;
  detail::vlz_scan(
      q, cfg, [&](uint32_t) { ++stats.literal_count; },
      [&](uint32_t, uint32_t) { ++stats.reference_count; });
  return stats;
}

}  // namespace embc
