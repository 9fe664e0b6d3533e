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

#include "embc/errors.hpp"

namespace embc {

/// MSB-first bit writer: the first bit written lands in the most significant
/// bit of the first output byte. The final byte is zero-padded.
class BitWriter {
 public:
  // nbits must be <= 32; pending bits never exceed 39 before the flush below.
  void put(uint32_t code, uint32_t nbits) {
    const uint64_t mask = (nbits >= 64) ? ~0ull : ((1ull << nbits) - 1);
    acc_ = (acc_ << nbits) | (static_cast<uint64_t>(code) & mask);
    pending_ += nbits;
    while (pending_ >= 8) {
      pending_ -= 8;
      out_.push_back(static_cast<uint8_t>(acc_ >> pending_));
    }
  }

  uint64_t bit_count() const { return 8 * out_.size() + pending_; }

  std::vector<uint8_t> finish() {
    if (pending_ > 0) {
      out_.push_back(static_cast<uint8_t>(acc_ << (8 - pending_)));
      pending_ = 0;
    }
    acc_ = 0;
    return std::move(out_);
  }

 private:
  uint64_t acc_ = 0;
  uint32_t pending_ = 0;
  std::vector<uint8_t> out_;
};

/// MSB-first bit reader over a fixed byte span.
class BitReader {
 public:
  explicit BitReader(std::span<const uint8_t> data) : data_(data) {}

  uint32_t bit() {
    if (byte_ >= data_.size()) {
      throw FormatError("bitstream exhausted at bit " + std::to_string(8 * byte_));
    }
    uint32_t b = (data_[byte_] >> (7 - shift_)) & 1u;
    if (++shift_ == 8) {
      shift_ = 0;
      ++byte_;
    }
    return b;
  }

  uint64_t bits_consumed() const { return 8 * byte_ + shift_; }

 private:
  std::span<const uint8_t> data_;
  size_t byte_ = 0;
  uint32_t shift_ = 0;
};

}  // namespace embc
