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

#include <fstream>
#include <string>
#include <vector>

#include "embc/batch.hpp"
#include "embc/bytes.hpp"
#include "embc/errors.hpp"

namespace embc {

/// Uncompressed batch file used by the CLI. Layout, little-endian:
///   magic "EMBV", version u8 (1), dim u32, vector count u32, float64 values
inline constexpr char kValueFileMagic[4] = {'E', 'M', 'B', 'V'};
inline constexpr uint8_t kValueFileVersion = 1;

inline std::vector<uint8_t> serialize_values(const EmbeddingBatch& batch) {
  batch.check_shape();
  ByteWriter w;
  for (char m : kValueFileMagic) w.u8(static_cast<uint8_t>(m));
  w.u8(kValueFileVersion);
  w.u32le(batch.dim);
  w.u32le(batch.batch_size());
  for (double v : batch.values) w.f64le(v);
  return w.take();
}

inline EmbeddingBatch parse_values(std::span<const uint8_t> data) {
  ByteReader r(data);
  for (char m : kValueFileMagic) {
    if (r.u8() != static_cast<uint8_t>(m)) throw FormatError("bad value file magic");
  }
  const uint8_t version = r.u8();
  if (version != kValueFileVersion) {
    throw FormatError("unsupported value file version " + std::to_string(version));
  }
  EmbeddingBatch batch;
  batch.dim = r.u32le();
  const uint32_t count = r.u32le();
  const size_t n = static_cast<size_t>(batch.dim) * count;
  if (r.remaining() != 8 * n) {
    throw FormatError("value file holds " + std::to_string(r.remaining() / 8) +
                      " values, header claims " + std::to_string(n));
  }
  batch.values.resize(n);
  for (auto& v : batch.values) v = r.f64le();
  return batch;
}

inline std::vector<uint8_t> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open file '" + path + "'");
  std::vector<uint8_t> data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return data;
}

inline void write_file(const std::string& path, std::span<const uint8_t> data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write file '" + path + "'");
  out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
  if (!out) throw Error("short write to '" + path + "'");
}

}  // namespace embc
