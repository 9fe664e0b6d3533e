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

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "embc/batch.hpp"
#include "embc/errors.hpp"
#include "embc/huffman.hpp"
#include "embc/parallel.hpp"
#include "embc/quantizer.hpp"
#include "embc/vlz.hpp"

namespace embc {

enum class Codec : uint8_t {
  raw = 0,      // quantization codes as int32 little-endian
  vlz = 1,      // vector LZ token stream
  huffman = 2,  // canonical huffman stream
};

inline const char* codec_name(Codec c) {
  switch (c) {
    case Codec::raw: return "raw";
    case Codec::vlz: return "vlz";
    case Codec::huffman: return "huffman";
  }
  return "unknown";
}

/// Self-describing compressed unit. Serialized layout, all fields
/// little-endian:
///
///   magic   "EMBC"        4 bytes
///   version u8            currently 1
///   codec   u8            Codec tag
///   eb      f64           error bound the codes were produced at
///   dim     u32           vector length
///   count   u32           vector count
///   paylen  u64           payload byte length
///   payload bytes
struct CompressedChunk {
  uint8_t version = kFormatVersion;
  Codec codec = Codec::raw;
  double eb = 0.0;
  uint32_t dim = 0;
  uint32_t vector_count = 0;
  std::vector<uint8_t> payload;

  static constexpr uint8_t kFormatVersion = 1;
  static constexpr size_t kHeaderSize = 4 + 1 + 1 + 8 + 4 + 4 + 8;

  size_t serialized_size() const { return kHeaderSize + payload.size(); }
};

inline constexpr char kChunkMagic[4] = {'E', 'M', 'B', 'C'};

inline std::vector<uint8_t> serialize_chunk(const CompressedChunk& c) {
  ByteWriter w;
  for (char m : kChunkMagic) w.u8(static_cast<uint8_t>(m));
  w.u8(c.version);
  w.u8(static_cast<uint8_t>(c.codec));
  w.f64le(c.eb);
  w.u32le(c.dim);
  w.u32le(c.vector_count);
  w.u64le(c.payload.size());
  w.bytes(c.payload.data(), c.payload.size());
  return w.take();
}

/// Parses one chunk from the start of `data`; the chunk must span the whole
/// input.
inline CompressedChunk parse_chunk(std::span<const uint8_t> data) {
  ByteReader r(data);
  for (char m : kChunkMagic) {
    if (r.u8() != static_cast<uint8_t>(m)) throw FormatError("bad chunk magic");
  }
  CompressedChunk c;
  c.version = r.u8();
  if (c.version != CompressedChunk::kFormatVersion) {
    throw FormatError("unsupported chunk version " + std::to_string(c.version));
  }
  const uint8_t codec = r.u8();
  if (codec > static_cast<uint8_t>(Codec::huffman)) {
    throw FormatError("unknown codec tag " + std::to_string(codec));
  }
  c.codec = static_cast<Codec>(codec);
  c.eb = r.f64le();
  c.dim = r.u32le();
  c.vector_count = r.u32le();
  const uint64_t paylen = r.u64le();
  if (paylen != r.remaining()) {
    throw FormatError("chunk payload length " + std::to_string(paylen) + " does not match " +
                      std::to_string(r.remaining()) + " available bytes");
  }
  auto p = r.bytes(paylen);
  c.payload.assign(p.begin(), p.end());
  return c;
}

/// Quantizes a batch and encodes it with the requested codec. The raw codec
/// is the fallback when both encoders would expand the data.
inline CompressedChunk encode_chunk(const EmbeddingBatch& batch, const ErrorBound& eb, Codec codec,
                                    const VlzConfig& vlz_cfg = {}) {
  const QuantizedBatch q = quantize(batch, eb);
  CompressedChunk c;
  c.codec = codec;
  c.eb = eb.value();
  c.dim = q.dim;
  c.vector_count = q.vector_count();
  switch (codec) {
    case Codec::raw: {
      ByteWriter w;
      for (int32_t code : q.codes) w.u32le(static_cast<uint32_t>(code));
      c.payload = w.take();
      break;
    }
    case Codec::vlz:
      c.payload = vlz_encode(q, vlz_cfg).tokens;
      break;
    case Codec::huffman:
      c.payload = huff_encode(q).bytes;
      break;
  }
  return c;
}

/// Dispatches on the codec tag and dequantizes. The result is within the
/// chunk's error bound of the original batch, point-wise.
inline EmbeddingBatch decode_chunk(const CompressedChunk& c, int32_t table_id = 0) {
  const ErrorBound eb(c.eb);
  const size_t expected = static_cast<size_t>(c.dim) * c.vector_count;
  QuantizedBatch q{table_id, c.dim, {}, eb};
  switch (c.codec) {
    case Codec::raw: {
      if (c.payload.size() != 4 * expected) {
        throw FormatError("raw payload of " + std::to_string(c.payload.size()) +
                          " bytes does not hold " + std::to_string(expected) + " codes");
      }
      ByteReader r(c.payload);
      q.codes.resize(expected);
      for (size_t i = 0; i < expected; ++i) q.codes[i] = static_cast<int32_t>(r.u32le());
      break;
    }
    case Codec::vlz: {
      VlzStream s{c.dim, c.vector_count, {}};
      s.tokens.assign(c.payload.begin(), c.payload.end());
      q = vlz_decode(s, eb, table_id);
      break;
    }
    case Codec::huffman: {
      std::vector<int32_t> codes = huff_decode(HuffStream{c.payload});
      if (codes.size() != expected) {
        throw FormatError("huffman payload decoded " + std::to_string(codes.size()) +
                          " symbols, expected " + std::to_string(expected));
      }
      q.codes = std::move(codes);
      break;
    }
    default:
      throw FormatError("unknown codec tag " +
                        std::to_string(static_cast<unsigned>(c.codec)));
  }
  return dequantize(q);
}

/// Fixed-width description of one chunk, exchanged ahead of the payload so
/// receivers can size their buffers. Serialized little-endian:
///   compressed length u64, codec u8, eb f64, dim u32, vector count u32
struct ChunkMetadata {
  uint64_t compressed_len = 0;
  uint8_t codec = 0;
  double eb = 0.0;
  uint32_t dim = 0;
  uint32_t vector_count = 0;

  static constexpr size_t kWireSize = 8 + 1 + 8 + 4 + 4;
};

inline ChunkMetadata metadata_for(const CompressedChunk& c) {
  return ChunkMetadata{c.serialized_size(), static_cast<uint8_t>(c.codec), c.eb, c.dim,
                       c.vector_count};
}

inline std::vector<uint8_t> serialize_metadata(const ChunkMetadata& m) {
  ByteWriter w;
  w.u64le(m.compressed_len);
  w.u8(m.codec);
  w.f64le(m.eb);
  w.u32le(m.dim);
  w.u32le(m.vector_count);
  return w.take();
}

inline ChunkMetadata parse_metadata(std::span<const uint8_t> data) {
  ByteReader r(data);
  ChunkMetadata m;
  m.compressed_len = r.u64le();
  m.codec = r.u8();
  m.eb = r.f64le();
  m.dim = r.u32le();
  m.vector_count = r.u32le();
  if (!r.exhausted()) throw FormatError("trailing bytes after chunk metadata");
  return m;
}

/// One contiguous send buffer holding every destination's chunk plus an
/// offset table, so concurrent per-destination encoders can land in a single
/// output. Layout, little-endian:
///   rank_count u32
///   rank_count x (offset u64, length u64)   offsets from buffer start
///   concatenated serialized chunks
struct PackedSendBuffer {
  std::vector<uint8_t> bytes;

  uint32_t rank_count() const {
    if (bytes.size() < 4) return 0;
    ByteReader r(bytes);
    return r.u32le();
  }
};

/// Offsets are assigned by destination index, never by completion order, so
/// a buffer packed from concurrently produced chunks is byte-identical to a
/// sequentially packed one.
inline PackedSendBuffer pack(std::span<const CompressedChunk> chunks) {
  ByteWriter w;
  w.u32le(static_cast<uint32_t>(chunks.size()));
  uint64_t offset = 4 + 16ull * chunks.size();
  for (const auto& c : chunks) {
    w.u64le(offset);
    w.u64le(c.serialized_size());
    offset += c.serialized_size();
  }
  for (const auto& c : chunks) {
    const std::vector<uint8_t> body = serialize_chunk(c);
    w.bytes(body.data(), body.size());
  }
  return PackedSendBuffer{w.take()};
}

inline std::vector<CompressedChunk> unpack(const PackedSendBuffer& buf) {
  ByteReader r(buf.bytes);
  const uint32_t rank_count = r.u32le();
  std::vector<std::pair<uint64_t, uint64_t>> table;
  table.reserve(rank_count);
  for (uint32_t i = 0; i < rank_count; ++i) {
    const uint64_t offset = r.u64le();
    const uint64_t length = r.u64le();
    table.emplace_back(offset, length);
  }
  uint64_t expected = 4 + 16ull * rank_count;
  for (uint32_t i = 0; i < rank_count; ++i) {
    const auto [offset, length] = table[i];
    if (offset != expected) {
      throw FormatError("send buffer offset " + std::to_string(offset) + " for entry " +
                        std::to_string(i) + " overlaps or skips bytes (expected " +
                        std::to_string(expected) + ")");
    }
    if (offset + length > buf.bytes.size()) {
      throw FormatError("send buffer entry " + std::to_string(i) + " runs past the end");
    }
    expected = offset + length;
  }
  if (expected != buf.bytes.size()) {
    throw FormatError("send buffer has " + std::to_string(buf.bytes.size() - expected) +
                      " unclaimed trailing bytes");
  }
  std::vector<CompressedChunk> chunks;
  chunks.reserve(rank_count);
  for (uint32_t i = 0; i < rank_count; ++i) {
    const auto [offset, length] = table[i];
    chunks.push_back(parse_chunk(std::span<const uint8_t>(buf.bytes).subspan(offset, length)));
  }
  return chunks;
}

/// Inputs for one destination's chunk.
struct EncodeJob {
  const EmbeddingBatch* batch = nullptr;
  double eb = 0.0;
  Codec codec = Codec::raw;
  VlzConfig vlz;
};

/// Encodes every job on up to `workers` threads; result order matches job
/// order regardless of scheduling.
inline std::vector<CompressedChunk> encode_chunks(std::span<const EncodeJob> jobs,
                                                  unsigned workers) {
  std::vector<CompressedChunk> chunks(jobs.size());
  parallel_for(jobs.size(), workers, [&](size_t i) {
    chunks[i] = encode_chunk(*jobs[i].batch, ErrorBound(jobs[i].eb), jobs[i].codec, jobs[i].vlz);
  });
  return chunks;
}

}  // namespace embc
