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

#include "embc/policy.hpp"

#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <random>

namespace embc {
namespace {

TEST(Policy, SurvivalRatioFromCounts) {
  EXPECT_NEAR(survival_ratio(110, 68), 0.618182, 1e-6);
  EXPECT_NEAR(survival_ratio(1055, 484), 0.458768, 1e-6);
  EXPECT_EQ(survival_ratio(19, 19), 1.0);
  EXPECT_THROW(survival_ratio(0, 0), ValueError);
}

TEST(Policy, HomoIndexIsOneMinusSurvival) {
  EXPECT_NEAR(homo_index(110, 68), 42.0 / 110.0, 1e-12);
  EXPECT_EQ(homo_index(61, 61), 0.0);
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 1000; ++trial) {
    const uint64_t original = 1 + rng() % 5000;
    const uint64_t quantized = 1 + rng() % original;
    const double r = survival_ratio(original, quantized);
    const double eta = homo_index(original, quantized);
    ASSERT_EQ(eta + r, 1.0);  // exact in double arithmetic
    ASSERT_GE(eta, 0.0);
    ASSERT_LE(eta, 1.0 - 1.0 / static_cast<double>(original));
  }
}

TEST(Policy, HomoIndexZeroForRepeatedVector) {
  EmbeddingBatch batch{0, 2, {}};
  for (int i = 0; i < 50; ++i) {
    batch.values.push_back(0.4f);
    batch.values.push_back(-0.2f);
  }
  EXPECT_EQ(homo_index(batch, ErrorBound(0.05)), 0.0);
  EXPECT_EQ(survival_ratio(batch, ErrorBound(0.05)), 1.0);
}

TEST(Policy, SurvivalOneWhenNoBinsCollide) {
  EmbeddingBatch batch{0, 1, {}};
  for (int i = 0; i < 32; ++i) batch.values.push_back(static_cast<float>(i));
  EXPECT_EQ(survival_ratio(batch, ErrorBound(1e-4)), 1.0);
}

TEST(Policy, QuantizationCollapsesNearbyVectors) {
  // Two distinct vectors land in the same bins at a coarse bound.
  EmbeddingBatch batch{0, 1, {0.100f, 0.101f, 0.50f}};
  const auto r = survival_ratio(batch, ErrorBound(0.05));
  EXPECT_NEAR(r, 2.0 / 3.0, 1e-12);
}

TEST(Policy, ClassifyExamples) {
  const PolicyConfig cfg;
  EXPECT_EQ(classify_table(0.99, cfg), TableClass::small);
  EXPECT_EQ(classify_table(0.50, cfg), TableClass::large);
  EXPECT_EQ(classify_table(0.85, cfg), TableClass::medium);
}

TEST(Policy, ClassifyPartitionsUnitInterval) {
  const PolicyConfig cfg;
  EXPECT_EQ(classify_table(cfg.large_threshold, cfg), TableClass::medium);
  EXPECT_EQ(classify_table(cfg.small_threshold, cfg), TableClass::medium);
  for (double r = 0.005; r <= 1.0; r += 0.005) {
    const TableClass c = classify_table(r, cfg);
    if (r < cfg.large_threshold) {
      ASSERT_EQ(c, TableClass::large) << r;
    } else if (r > cfg.small_threshold) {
      ASSERT_EQ(c, TableClass::small) << r;
    } else {
      ASSERT_EQ(c, TableClass::medium) << r;
    }
  }
}

TEST(Policy, ClassEbAssignment) {
  PolicyConfig cfg;
  cfg.global_eb = 0.03;
  cfg.alpha = 5.0 / 3.0;
  cfg.beta = 3.0;
  EXPECT_NEAR(cfg.eb_for(TableClass::large), 0.05, 1e-12);
  EXPECT_NEAR(cfg.eb_for(TableClass::medium), 0.03, 1e-12);
  EXPECT_NEAR(cfg.eb_for(TableClass::small), 0.01, 1e-12);
}

TEST(Policy, EstimateSpeedupExamples) {
  EXPECT_NEAR(estimate_speedup(10, 4, 40, 200), 1.0 / 0.22, 1e-9);
  // bandwidth -> 0 removes the codec overhead term entirely.
  EXPECT_NEAR(estimate_speedup(12.5, 1e-12, 1.0, 1.0), 12.5, 1e-9);
  // ratio 1 with negligible overhead: no speedup.
  EXPECT_NEAR(estimate_speedup(1.0, 1.0, 1e30, 1e30), 1.0, 1e-9);
  EXPECT_THROW(estimate_speedup(0.0, 4, 40, 200), ValueError);
  EXPECT_THROW(estimate_speedup(10, -1, 40, 200), ValueError);
}

EmbeddingBatch all_repeats_sample() {
  std::mt19937_64 rng(71);
  EmbeddingBatch batch{0, 16, {}};
  std::vector<float> row(16);
  for (auto& v : row) {
    v = static_cast<float>((static_cast<double>(rng() >> 11) * 0x1.0p-53) * 0.4 - 0.2);
  }
  for (int i = 0; i < 512; ++i) batch.values.insert(batch.values.end(), row.begin(), row.end());
  return batch;
}

EmbeddingBatch distinct_concentrated_sample() {
  // Rows never repeat (a counter rides in column 0 at widely spaced values)
  // while every other element sits in a narrow band, so the code histogram
  // is concentrated but vector-level matching finds nothing.
  std::mt19937_64 rng(72);
  EmbeddingBatch batch{0, 16, {}};
  for (int i = 0; i < 512; ++i) {
    batch.values.push_back(static_cast<float>(i) * 0.5f);
    for (int j = 1; j < 16; ++j) {
      batch.values.push_back(
          static_cast<float>((static_cast<double>(rng() >> 11) * 0x1.0p-53) * 0.008));
    }
  }
  return batch;
}

EmbeddingBatch expanding_sample() {
  // 2048 distinct values sitting exactly on bin centers of width 1/16, with
  // codes large enough that every vlz literal needs a 3-byte varint (so vlz
  // lands at ratio 1.0) while the huffman codebook of 2048 one-off symbols
  // expands the stream outright.
  EmbeddingBatch batch{0, 1, {}};
  for (int32_t i = 0; i < 2048; ++i) {
    batch.values.push_back(static_cast<float>(8192 + 42 * i) * 0.0625f);
  }
  return batch;
}

TEST(Policy, SelectorPrefersVlzOnRepeats) {
  const std::array<Codec, 2> candidates = {Codec::vlz, Codec::huffman};
  const CodecSelection sel =
      select_codec(all_repeats_sample(), ErrorBound(0.01), candidates, 1e6);
  EXPECT_EQ(sel.chosen, Codec::vlz);
}

TEST(Policy, SelectorPrefersHuffmanOnDistinctConcentrated) {
  const std::array<Codec, 2> candidates = {Codec::vlz, Codec::huffman};
  const CodecSelection sel =
      select_codec(distinct_concentrated_sample(), ErrorBound(0.01), candidates, 1e6);
  EXPECT_EQ(sel.chosen, Codec::huffman);
}

TEST(Policy, SelectorFallsBackToRawOnExpansion) {
  const std::array<Codec, 2> candidates = {Codec::vlz, Codec::huffman};
  const CodecSelection sel =
      select_codec(expanding_sample(), ErrorBound(0.03125), candidates, 1e6);
  for (const auto& m : sel.measured) EXPECT_LE(m.ratio, 1.0) << codec_name(m.codec);
  EXPECT_EQ(sel.chosen, Codec::raw);
}

TEST(Policy, SelectorChoiceMatchesReplayedArgmax) {
  const std::array<Codec, 2> candidates = {Codec::vlz, Codec::huffman};
  for (const EmbeddingBatch& sample : {all_repeats_sample(), distinct_concentrated_sample()}) {
    const CodecSelection sel = select_codec(sample, ErrorBound(0.01), candidates, 1e6);
    double best = -1.0;
    Codec argmax = Codec::raw;
    for (const auto& m : sel.measured) {
      const double s = estimate_speedup(m.ratio, sel.bandwidth, m.comp_bps, m.decomp_bps);
      if (s > best) {
        best = s;
        argmax = m.codec;
      }
    }
    EXPECT_EQ(sel.chosen, argmax);
  }
}

TEST(Policy, SelectorRequiresCandidates) {
  EXPECT_THROW(select_codec(all_repeats_sample(), ErrorBound(0.01), {}, 1e6), ValueError);
}

TEST(Policy, OfflineAnalysisAssignsClassBounds) {
  std::vector<EmbeddingBatch> samples;

  EmbeddingBatch collapsing = all_repeats_sample();  // survival 1 via 1 unique row
  collapsing.table_id = 0;
  // survival 1.0 -> small
  samples.push_back(collapsing);

  // Near-duplicate rows at coarse bins collapse: survival low -> large.
  EmbeddingBatch merging{1, 1, {}};
  std::mt19937_64 rng(74);
  for (int i = 0; i < 256; ++i) {
    merging.values.push_back(0.001f * static_cast<float>(rng() % 400));
  }
  samples.push_back(merging);

  PolicyConfig cfg;
  cfg.global_eb = 0.03;
  const auto profiles = offline_analysis(samples, cfg, 1e6);
  ASSERT_EQ(profiles.size(), 2u);
  EXPECT_EQ(profiles.at(0).cls, TableClass::small);
  EXPECT_NEAR(profiles.at(0).eb, cfg.global_eb / cfg.beta, 1e-12);
  EXPECT_EQ(profiles.at(1).cls, TableClass::large);
  EXPECT_NEAR(profiles.at(1).eb, cfg.global_eb * cfg.alpha, 1e-12);
  for (const auto& [id, p] : profiles) {
    EXPECT_EQ(p.measured.size(), 2u) << id;
    EXPECT_EQ(p.homo_index + p.survival_ratio, 1.0);
  }
}

PolicyConfig stepwise_policy() {
  PolicyConfig cfg;
  cfg.global_eb = 0.03;
  cfg.alpha = 1.0;
  cfg.beta = 1.0;
  cfg.decay = DecayConfig{DecayConfig::Fn::stepwise, 2.0, 1000, 4};
  return cfg;
}

TEST(Policy, StepwiseDecayExamples) {
  const PolicyConfig cfg = stepwise_policy();
  const std::map<int32_t, TableProfile> none;
  EXPECT_NEAR(eb_at(0, 0, none, cfg).value(), 0.06, 1e-12);
  EXPECT_NEAR(eb_at(0, 300, none, cfg).value(), 0.05, 1e-12);  // 0.03 * 5/3
  EXPECT_NEAR(eb_at(0, 999, none, cfg).value(), 0.03, 1e-12);
  EXPECT_NEAR(eb_at(0, 1000, none, cfg).value(), 0.03, 1e-12);
  EXPECT_NEAR(eb_at(0, 1500, none, cfg).value(), 0.03, 1e-12);
}

TEST(Policy, DecayNonIncreasingAllFunctions) {
  for (auto fn : {DecayConfig::Fn::stepwise, DecayConfig::Fn::linear,
                  DecayConfig::Fn::logarithmic}) {
    PolicyConfig cfg = stepwise_policy();
    cfg.decay.function = fn;
    double prev = std::numeric_limits<double>::infinity();
    for (uint64_t i = 0; i <= 2000; ++i) {
      const double eb = eb_at(0, i, {}, cfg).value();
      ASSERT_LE(eb, prev) << "fn " << static_cast<int>(fn) << " at " << i;
      ASSERT_GE(eb, cfg.global_eb - 1e-15);
      prev = eb;
    }
    EXPECT_NEAR(eb_at(0, 0, {}, cfg).value(), 0.06, 1e-12);
    EXPECT_NEAR(eb_at(0, 2000, {}, cfg).value(), 0.03, 1e-12);
  }
}

TEST(Policy, DecayUsesProfileBound) {
  const PolicyConfig cfg = stepwise_policy();
  std::map<int32_t, TableProfile> profiles;
  TableProfile p;
  p.table_id = 5;
  p.eb = 0.01;
  profiles[5] = p;
  EXPECT_NEAR(eb_at(5, 0, profiles, cfg).value(), 0.02, 1e-12);
  EXPECT_NEAR(eb_at(5, 1200, profiles, cfg).value(), 0.01, 1e-12);
}

TEST(Policy, ValidationErrors) {
  PolicyConfig cfg;
  cfg.large_threshold = 0.96;  // above small_threshold
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = PolicyConfig{};
  cfg.alpha = 0.5;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = PolicyConfig{};
  cfg.decay.start_scale = 0.5;
  EXPECT_THROW(cfg.validate(), ConfigError);
}

}  // namespace
}  // namespace embc
