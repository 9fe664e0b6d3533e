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

#include "embc/commsim.hpp"

#include <gtest/gtest.h>

namespace embc {
namespace {

TableSpec skewed_table() {
  TableSpec t;
  t.rows = 64;
  t.dim = 16;
  t.dist = ValueDist::gaussian;
  t.sigma = 0.1;
  t.zipf_s = 1.5;
  return t;
}

std::map<int32_t, TableProfile> fixed_profiles(uint32_t ranks, double eb, Codec codec) {
  std::map<int32_t, TableProfile> profiles;
  for (uint32_t r = 0; r < ranks; ++r) {
    TableProfile p;
    p.table_id = static_cast<int32_t>(r);
    p.eb = eb;
    p.codec = codec;
    profiles[p.table_id] = p;
  }
  return profiles;
}

SimConfig base_config() {
  SimConfig cfg;
  cfg.ranks = 2;
  cfg.bandwidth = 1e8;
  cfg.latency = 0.0;
  cfg.iterations = 4;
  cfg.batch = 64;
  cfg.seed = 42;
  cfg.tables = {skewed_table()};
  return cfg;
}

TEST(Commsim, BaselineWireBytesAreExact) {
  SimConfig cfg = base_config();
  cfg.compression = false;
  const SimReport report = run_training_schedule(cfg, {});
  // Two ranks exchange batch x dim float32 in both directions each iteration.
  const uint64_t expected_per_iter = 2ull * cfg.batch * 16 * 4;
  for (const auto& it : report.iterations) {
    EXPECT_EQ(it.wire_bytes, expected_per_iter);
    EXPECT_EQ(it.metadata_bytes, 0u);
    EXPECT_EQ(it.max_abs_error, 0.0);
    EXPECT_EQ(it.modeled_speedup, 1.0);
    EXPECT_TRUE(it.delivery_conserved);
  }
}

TEST(Commsim, CompressionReducesWireBytesWithinBound) {
  SimConfig cfg = base_config();
  cfg.ranks = 4;
  cfg.iterations = 8;
  cfg.batch = 256;
  const double eb = 0.03;
  const SimReport report =
      run_training_schedule(cfg, fixed_profiles(cfg.ranks, eb, Codec::vlz));

  SimConfig off = cfg;
  off.compression = false;
  const SimReport baseline = run_training_schedule(off, {});

  EXPECT_EQ(baseline.total_wire(), report.total_uncompressed());
  EXPECT_GE(static_cast<double>(baseline.total_wire()),
            5.0 * static_cast<double>(report.total_wire()));
  EXPECT_LE(report.max_abs_error(), eb);
  EXPECT_GT(report.max_abs_error(), 0.0);
  EXPECT_TRUE(report.all_conserved());
}

TEST(Commsim, MetadataAccountingIsFixedWidth) {
  SimConfig cfg = base_config();
  cfg.ranks = 3;
  const SimReport report = run_training_schedule(cfg, fixed_profiles(3, 0.02, Codec::vlz));
  for (const auto& it : report.iterations) {
    EXPECT_EQ(it.metadata_bytes, 3ull * 2 * ChunkMetadata::kWireSize);
    EXPECT_EQ(it.wire_bytes, it.payload_bytes + it.metadata_bytes);
  }
}

TEST(Commsim, DeterministicAcrossRunsAndWorkers) {
  SimConfig cfg = base_config();
  cfg.ranks = 4;
  const auto profiles = fixed_profiles(4, 0.02, Codec::vlz);

  const SimReport a = run_training_schedule(cfg, profiles);
  const SimReport b = run_training_schedule(cfg, profiles);
  EXPECT_EQ(a.deterministic_digest(), b.deterministic_digest());

  cfg.workers = 4;
  const SimReport c = run_training_schedule(cfg, profiles);
  EXPECT_EQ(a.deterministic_digest(), c.deterministic_digest());

  cfg.seed = 43;
  const SimReport d = run_training_schedule(cfg, profiles);
  EXPECT_NE(a.deterministic_digest(), d.deterministic_digest());
}

TEST(Commsim, ModelAgreesWithClosedFormAtZeroLatency) {
  SimConfig cfg = base_config();
  cfg.ranks = 4;
  cfg.batch = 512;
  cfg.iterations = 10;
  const SimReport report = run_training_schedule(cfg, fixed_profiles(4, 0.02, Codec::vlz));
  const SpeedupModel model = model_speedup(report);
  EXPECT_GT(model.modeled, 0.0);
  EXPECT_NEAR(model.modeled, model.closed_form, 0.05 * model.closed_form);
}

TEST(Commsim, DecaySchedulesTheBoundPerIteration) {
  SimConfig cfg = base_config();
  cfg.iterations = 12;
  cfg.policy.global_eb = 0.02;
  cfg.policy.decay = DecayConfig{DecayConfig::Fn::stepwise, 2.0, 8, 4};
  const auto profiles = fixed_profiles(cfg.ranks, 0.02, Codec::vlz);
  const SimReport report = run_training_schedule(cfg, profiles);

  ASSERT_EQ(report.iterations.size(), 12u);
  for (const auto& it : report.iterations) {
    const double expected = 0.02 * decay_multiplier(it.iteration, cfg.policy.decay);
    EXPECT_NEAR(it.eb_max, expected, 1e-12) << "iteration " << it.iteration;
    EXPECT_LE(it.max_abs_error, it.eb_max);
  }
  // Stairs: scale 2.0 over 8 iterations in 4 steps, then flat.
  EXPECT_NEAR(report.iterations[0].eb_max, 0.04, 1e-12);
  EXPECT_NEAR(report.iterations[2].eb_max, 0.02 * (2.0 - 1.0 / 3.0), 1e-12);
  EXPECT_NEAR(report.iterations[11].eb_max, 0.02, 1e-12);
}

TEST(Commsim, PhaseCompressionRatios) {
  SimConfig cfg = base_config();
  cfg.iterations = 8;
  cfg.policy.decay = DecayConfig{DecayConfig::Fn::stepwise, 2.0, 4, 2};
  const SimReport report = run_training_schedule(cfg, fixed_profiles(cfg.ranks, 0.02, Codec::vlz));
  const double initial = report.compression_ratio(0, 4);
  const double later = report.compression_ratio(4, ~0ull);
  EXPECT_GT(initial, 1.0);
  EXPECT_GT(later, 1.0);
  EXPECT_NE(initial, later);  // phase split actually separates iterations
}

TEST(Commsim, HuffmanProfilesWorkEndToEnd) {
  SimConfig cfg = base_config();
  const SimReport report = run_training_schedule(cfg, fixed_profiles(cfg.ranks, 0.02, Codec::huffman));
  EXPECT_LE(report.max_abs_error(), 0.02);
  EXPECT_TRUE(report.all_conserved());
  EXPECT_LT(report.total_payload(), report.total_uncompressed());
}

TEST(Commsim, AnalysisPicksProfilesForSimTables) {
  SimConfig cfg = base_config();
  cfg.ranks = 4;
  const auto profiles = analyze_sim_tables(cfg);
  ASSERT_EQ(profiles.size(), 4u);
  for (const auto& [id, p] : profiles) {
    EXPECT_GE(id, 0);
    EXPECT_LT(id, 4);
    EXPECT_GT(p.eb, 0.0);
    EXPECT_EQ(p.measured.size(), 2u);
  }
  const SimReport report = run_training_schedule(cfg, profiles);
  EXPECT_TRUE(report.all_conserved());
}

TEST(Commsim, ConfigValidation) {
  SimConfig cfg = base_config();
  cfg.ranks = 1;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = base_config();
  cfg.tables.clear();
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = base_config();
  cfg.bandwidth = 0.0;
  EXPECT_THROW(cfg.validate(), ConfigError);
}

TEST(Commsim, RawProfilesDeliverExactQuantizedValues) {
  SimConfig cfg = base_config();
  const SimReport report = run_training_schedule(cfg, fixed_profiles(cfg.ranks, 0.01, Codec::raw));
  EXPECT_LE(report.max_abs_error(), 0.01);
  // Raw codes are 4 bytes each, same as the float payload.
  EXPECT_EQ(report.total_payload(),
            report.total_uncompressed() + report.iterations.size() * 2 *
                                              CompressedChunk::kHeaderSize);
}

}  // namespace
}  // namespace embc
