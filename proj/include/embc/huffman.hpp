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
#include <utility>
#include <vector>

#include "embc/batch.hpp"
#include "embc/bitstream.hpp"
#include "embc/bytes.hpp"
#include "embc/errors.hpp"

namespace embc {

constexpr uint32_t kMaxHuffmanCodeLength = 32;

/// Canonical Huffman codebook over sparse int32 symbols. Only (symbol, bit
/// length) pairs are stored; code values follow from the canonical rule:
/// entries sorted by (length, symbol), codes assigned in ascending order.
class Codebook {
 public:
  struct Entry {
    int32_t symbol;
    uint8_t length;
  };

  /// Builds an optimal prefix code for the histogram. Length assignment uses
  /// the two-queue Huffman construction with FIFO tie-breaking on equal
  /// weights, so identical inputs give identical codebooks on any platform.
  /// A single distinct symbol gets length 1 by convention.
  static Codebook from_histogram(std::vector<std::pair<int32_t, uint64_t>> histogram) {
    if (histogram.empty()) throw ValueError("cannot build a codebook from an empty histogram");
    std::sort(histogram.begin(), histogram.end());
    for (size_t i = 1; i < histogram.size(); ++i) {
      if (histogram[i].first == histogram[i - 1].first) {
        throw ValueError("duplicate symbol in histogram");
      }
    }
    for (const auto& [symbol, count] : histogram) {
      (void)symbol;
      if (count == 0) throw ValueError("zero count in histogram");
    }

    Codebook book;
    if (histogram.size() == 1) {
      book.entries_.push_back({histogram[0].first, 1});
      book.finalize();
      return book;
    }

    // Leaves sorted by (count, symbol); merged nodes are produced in
    // non-decreasing weight order, so two plain queues suffice.
    std::stable_sort(histogram.begin(), histogram.end(),
                     [](const auto& a, const auto& b) {
                       return a.second != b.second ? a.second < b.second : a.first < b.first;
                     });

    const size_t n = histogram.size();
    struct Node {
      uint64_t weight;
      int32_t parent = -1;
    };
    std::vector<Node> nodes;
    nodes.reserve(2 * n - 1);
    for (const auto& [symbol, count] : histogram) {
      (void)symbol;
      nodes.push_back({count});
    }

    size_t leaf_head = 0;
    size_t merged_head = n;
    auto pop_min = [&]() -> int32_t {
      const bool leaf_ok = leaf_head < n;
      const bool merged_ok = merged_head < nodes.size();
      // Prefer the leaf queue on ties.
      if (leaf_ok && (!merged_ok || nodes[leaf_head].weight <= nodes[merged_head].weight)) {
        return static_cast<int32_t>(leaf_head++);
      }
      return static_cast<int32_t>(merged_head++);
    };

    while (nodes.size() < 2 * n - 1) {
      const int32_t a = pop_min();
      const int32_t b = pop_min();
      nodes.push_back({nodes[a].weight + nodes[b].weight});
      nodes[a].parent = static_cast<int32_t>(nodes.size() - 1);
      nodes[b].parent = static_cast<int32_t>(nodes.size() - 1);
    }

    book.entries_.resize(n);
    for (size_t i = 0; i < n; ++i) {
      uint32_t depth = 0;
      for (int32_t p = nodes[i].parent; p != -1; p = nodes[p].parent) ++depth;
      if (depth > kMaxHuffmanCodeLength) {
        throw ValueError("huffman code length " + std::to_string(depth) + " exceeds cap " +
                         std::to_string(kMaxHuffmanCodeLength));
      }
      book.entries_[i] = {histogram[i].first, static_cast<uint8_t>(depth)};
    }
    book.finalize();
    return book;
  }

  static Codebook build(std::span<const int32_t> codes) {
    if (codes.empty()) throw ValueError("cannot build a codebook from an empty sequence");
    std::unordered_map<int32_t, uint64_t> counts;
    for (int32_t c : codes) ++counts[c];
    std::vector<std::pair<int32_t, uint64_t>> histogram(counts.begin(), counts.end());
    return from_histogram(std::move(histogram));
  }

  /// Reconstructs a codebook from (symbol, length) pairs, validating the
  /// Kraft inequality and the length cap.
  static Codebook from_lengths(std::vector<Entry> entries) {
    if (entries.empty()) throw FormatError("empty codebook");
    Codebook book;
    book.entries_ = std::move(entries);
    uint64_t kraft = 0;  // in units of 2^-kMaxHuffmanCodeLength
    for (const auto& e : book.entries_) {
      if (e.length == 0 || e.length > kMaxHuffmanCodeLength) {
        throw FormatError("codebook length " + std::to_string(e.length) + " out of range");
      }
      kraft += 1ull << (kMaxHuffmanCodeLength - e.length);
    }
    if (kraft > (1ull << kMaxHuffmanCodeLength)) {
      throw FormatError("codebook violates the Kraft inequality");
    }
    book.finalize();
    return book;
  }

  /// Entries in canonical order: length ascending, symbol ascending within
  /// equal length.
  const std::vector<Entry>& entries() const { return entries_; }

  /// Canonical code value for entries()[i], aligned to its own length.
  uint32_t code_of(size_t i) const { return codes_[i]; }

  uint8_t length_of(int32_t symbol) const {
    auto it = index_.find(symbol);
    return it == index_.end() ? 0 : entries_[it->second].length;
  }

  bool contains(int32_t symbol) const { return index_.contains(symbol); }

 private:
  void finalize() {
    std::sort(entries_.begin(), entries_.end(), [](const Entry& a, const Entry& b) {
      return a.length != b.length ? a.length < b.length : a.symbol < b.symbol;
    });
    codes_.resize(entries_.size());
    uint32_t code = 0;
    uint32_t prev_len = entries_.front().length;
    for (size_t i = 0; i < entries_.size(); ++i) {
      const uint32_t len = entries_[i].length;
      code <<= (len - prev_len);
      if (static_cast<uint64_t>(code) >= (1ull << len)) {
        throw FormatError("codebook lengths do not form a prefix code");
      }
      codes_[i] = code;
      index_[entries_[i].symbol] = i;
      prev_len = len;
      ++code;
    }
    if (index_.size() != entries_.size()) {
      throw FormatError("duplicate symbol in codebook");
    }
  }

  std::vector<Entry> entries_;
  std::vector<uint32_t> codes_;
  std::unordered_map<int32_t, size_t> index_;
};

/// Self-contained entropy-coded stream: serialized codebook, symbol count,
/// then the MSB-first bit payload. Length fields inside this codec payload
/// are big-endian.
struct HuffStream {
  std::vector<uint8_t> bytes;
};

namespace detail {

inline void write_codebook(ByteWriter& w, const Codebook& book, uint64_t symbol_count) {
  w.u64be(symbol_count);
  w.u32be(static_cast<uint32_t>(book.entries().size()));
  for (const auto& e : book.entries()) {
    w.i32be(e.symbol);
    w.u8(e.length);
  }
}

inline std::pair<Codebook, uint64_t> read_codebook(ByteReader& r) {
  const uint64_t symbol_count = r.u64be();
  const uint32_t entry_count = r.u32be();
  std::vector<Codebook::Entry> entries;
  entries.reserve(entry_count);
  for (uint32_t i = 0; i < entry_count; ++i) {
    const int32_t symbol = r.i32be();
    const uint8_t length = r.u8();
    entries.push_back({symbol, length});
  }
  return {Codebook::from_lengths(std::move(entries)), symbol_count};
}

}  // namespace detail

/// Encodes a raw symbol sequence. Payload bit length is exactly
/// sum(count(s) * length(s)) over the codebook.
inline HuffStream huff_encode_codes(std::span<const int32_t> codes) {
  if (codes.empty()) throw ValueError("huffman encoder requires a nonempty sequence");
  const Codebook book = Codebook::build(codes);

  std::unordered_map<int32_t, std::pair<uint32_t, uint8_t>> table;  // symbol -> (code, len)
  table.reserve(book.entries().size());
  for (size_t i = 0; i < book.entries().size(); ++i) {
    table[book.entries()[i].symbol] = {book.code_of(i), book.entries()[i].length};
  }

  ByteWriter w;
  detail::write_codebook(w, book, codes.size());
  BitWriter bits;
  for (int32_t c : codes) {
    const auto& [code, len] = table.find(c)->second;
    bits.put(code, len);
  }
  const std::vector<uint8_t> payload = bits.finish();
  w.bytes(payload.data(), payload.size());
  return HuffStream{w.take()};
}

inline HuffStream huff_encode(const QuantizedBatch& q) { return huff_encode_codes(q.codes); }

/// Decodes exactly the recorded number of symbols; an early end of the
/// bitstream or a walk past the deepest code length is a format error.
inline std::vector<int32_t> huff_decode(const HuffStream& s) {
  ByteReader r(s.bytes);
  auto [book, symbol_count] = detail::read_codebook(r);

  // Canonical decode tables indexed by code length.
  const uint32_t max_len = book.entries().back().length;
  std::vector<uint32_t> first_code(max_len + 1, 0);
  std::vector<uint32_t> count(max_len + 1, 0);
  std::vector<uint32_t> base_index(max_len + 1, 0);
  for (size_t i = 0; i < book.entries().size(); ++i) {
    const uint8_t len = book.entries()[i].length;
    if (count[len] == 0) {
      first_code[len] = book.code_of(i);
      base_index[len] = static_cast<uint32_t>(i);
    }
    ++count[len];
  }

  BitReader bits(r.bytes(r.remaining()));
  std::vector<int32_t> out;
  out.reserve(symbol_count);
  for (uint64_t i = 0; i < symbol_count; ++i) {
    uint32_t code = 0;
    uint32_t len = 0;
    for (;;) {
      code = (code << 1) | bits.bit();
      ++len;
      if (count[len] != 0 && code >= first_code[len] && code - first_code[len] < count[len]) {
        out.push_back(book.entries()[base_index[len] + (code - first_code[len])].symbol);
        break;
      }
      if (len >= max_len) {
        throw FormatError("invalid huffman prefix at symbol " + std::to_string(i));
      }
    }
  }
  return out;
}

}  // namespace embc
