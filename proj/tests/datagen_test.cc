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

#include "embc/datagen.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "embc/policy.hpp"
#include "embc/vlz.hpp"

namespace embc {
namespace {

TEST(Datagen, TableDeterministicPerSeed) {
  TableSpec spec{0, 4, 2, ValueDist::gaussian, 0.0, 0.1, 0.0, 1.0, 0.0, 123};
  const auto a = gen_table(spec);
  const auto b = gen_table(spec);
  EXPECT_EQ(a, b);
  spec.seed = 124;
  EXPECT_NE(gen_table(spec), a);
}

TEST(Datagen, LookupStreamsAreIndependent) {
  const TableSpec spec{0, 32, 4, ValueDist::gaussian, 0.0, 0.1, 0.0, 1.0, 1.0, 9};
  EXPECT_EQ(gen_lookup_indices(spec, 64, 0), gen_lookup_indices(spec, 64, 0));
  EXPECT_NE(gen_lookup_indices(spec, 64, 0), gen_lookup_indices(spec, 64, 1));
}

TEST(Datagen, UniformMeanNearHalf) {
  const TableSpec spec{0, 100000, 1, ValueDist::uniform, 0.0, 0.1, 0.0, 1.0, 0.0, 7};
  const auto values = gen_table(spec);
  double sum = 0.0;
  for (float v : values) {
    EXPECT_GE(v, 0.0f);
    EXPECT_LT(v, 1.0f);
    sum += v;
  }
  EXPECT_NEAR(sum / static_cast<double>(values.size()), 0.5, 0.01);
}

TEST(Datagen, GaussianMoments) {
  const TableSpec spec{0, 100000, 1, ValueDist::gaussian, 0.25, 0.1, 0.0, 1.0, 0.0, 8};
  const auto values = gen_table(spec);
  double sum = 0.0, sq = 0.0;
  for (float v : values) {
    sum += v;
    sq += static_cast<double>(v) * v;
  }
  const double n = static_cast<double>(values.size());
  const double mean = sum / n;
  const double sd = std::sqrt(sq / n - mean * mean);
  EXPECT_NEAR(mean, 0.25, 0.002);
  EXPECT_NEAR(sd, 0.1, 0.002);
}

TEST(Datagen, SpecValidation) {
  TableSpec spec{0, 4, 2, ValueDist::gaussian, 0.0, 0.0, 0.0, 1.0, 0.0, 1};
  EXPECT_THROW(gen_table(spec), ValueError);  // sigma <= 0
  spec.sigma = 0.1;
  spec.rows = 0;
  EXPECT_THROW(gen_table(spec), ValueError);
  spec.rows = 4;
  spec.dim = 0;
  EXPECT_THROW(gen_table(spec), ValueError);
  spec.dim = 2;
  spec.dist = ValueDist::uniform;
  spec.lo = 1.0;
  spec.hi = 1.0;
  EXPECT_THROW(gen_table(spec), ValueError);
  spec.hi = 2.0;
  spec.zipf_s = -0.5;
  EXPECT_THROW(gen_table(spec), ValueError);
}

TEST(Datagen, ZipfSkewConcentratesTopRow) {
  const TableSpec spec{0, 64, 2, ValueDist::gaussian, 0.0, 0.1, 0.0, 1.0, 1.5, 21};
  const auto indices = gen_lookup_indices(spec, 2048);
  std::map<uint32_t, uint32_t> hist;
  for (uint32_t idx : indices) ++hist[idx];
  uint32_t top = 0;
  for (const auto& [idx, count] : hist) top = std::max(top, count);
  EXPECT_GT(static_cast<double>(top) / 2048.0, 0.2);
}

TEST(Datagen, ZipfZeroIsNearUniform) {
  const TableSpec spec{0, 16, 1, ValueDist::uniform, 0.0, 0.1, 0.0, 1.0, 0.0, 33};
  const uint32_t n = 16000;
  const auto indices = gen_lookup_indices(spec, n);
  std::vector<uint32_t> counts(16, 0);
  for (uint32_t idx : indices) {
    ASSERT_LT(idx, 16u);
    ++counts[idx];
  }
  const double expected = n / 16.0;
  double chi2 = 0.0;
  for (uint32_t c : counts) {
    const double d = static_cast<double>(c) - expected;
    chi2 += d * d / expected;
  }
  // 15 degrees of freedom; far tail at 50.
  EXPECT_LT(chi2, 50.0);
}

TEST(Datagen, TopRowFrequencyGrowsWithSkew) {
  double prev = 0.0;
  for (double s : {0.0, 0.5, 1.0, 1.5}) {
    TableSpec spec{0, 64, 1, ValueDist::uniform, 0.0, 0.1, 0.0, 1.0, s, 55};
    const auto indices = gen_lookup_indices(spec, 4096);
    std::vector<uint32_t> counts(64, 0);
    for (uint32_t idx : indices) ++counts[idx];
    const double top =
        static_cast<double>(*std::max_element(counts.begin(), counts.end())) / 4096.0;
    EXPECT_GE(top, prev) << "s=" << s;
    prev = top;
  }
}

TEST(Datagen, SingleRowTableIsDegenerate) {
  const TableSpec spec{0, 1, 4, ValueDist::gaussian, 0.0, 0.1, 0.0, 1.0, 1.0, 3};
  const EmbeddingBatch batch = gen_lookup_batch(spec, 128);
  for (uint32_t i = 1; i < batch.batch_size(); ++i) {
    for (uint32_t j = 0; j < batch.dim; ++j) {
      ASSERT_EQ(batch.values[i * batch.dim + j], batch.values[j]);
    }
  }
  EXPECT_EQ(survival_ratio(batch, ErrorBound(0.01)), 1.0);
  const QuantizedBatch q = quantize(batch, ErrorBound(0.01));
  EXPECT_EQ(match_stats(q, VlzConfig{255}).literal_count, 1u);
}

TEST(Datagen, GatherMapsIndicesToRows) {
  const TableSpec spec{3, 8, 2, ValueDist::uniform, 0.0, 0.1, 0.0, 1.0, 0.0, 44};
  const Table table(spec);
  const EmbeddingBatch batch = table.gather({5, 0, 5});
  EXPECT_EQ(batch.table_id, 3);
  ASSERT_EQ(batch.values.size(), 6u);
  EXPECT_EQ(batch.values[0], table.values()[10]);
  EXPECT_EQ(batch.values[1], table.values()[11]);
  EXPECT_EQ(batch.values[2], table.values()[0]);
  EXPECT_EQ(batch.values[4], table.values()[10]);
}

TEST(Datagen, CachedSamplerMatchesFreeFunction) {
  const TableSpec spec{0, 128, 2, ValueDist::gaussian, 0.0, 0.1, 0.0, 1.0, 1.2, 66};
  const Table table(spec);
  EXPECT_EQ(table.sample_indices(256, 5), gen_lookup_indices(spec, 256, 5));
}

}  // namespace
}  // namespace embc
