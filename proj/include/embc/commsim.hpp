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

#include <barrier>
#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include "embc/batch.hpp"
#include "embc/bytes.hpp"
#include "embc/container.hpp"
#include "embc/datagen.hpp"
#include "embc/errors.hpp"
#include "embc/parallel.hpp"
#include "embc/policy.hpp"

namespace embc {

/// In-process model of a hybrid-parallel training job: R ranks, one embedding
/// table shard per rank, a modeled interconnect. The network is not real;
/// wire time is computed from byte counts at the configured bandwidth and
/// per-message latency.
struct SimConfig {
  uint32_t ranks = 4;
  double bandwidth = 4e9;  // bytes/s of the modeled interconnect
  double latency = 0.0;    // seconds per message round per rank
  uint32_t iterations = 1;
  uint32_t batch = 128;  // local batch size per rank
  bool compression = true;
  unsigned workers = 1;  // per-rank fan-out for chunk encode/decode
  uint64_t seed = 1;
  PolicyConfig policy;
  std::vector<TableSpec> tables;  // table i is sharded onto rank i (cycled)

  void validate() const {
    if (ranks < 2) throw ConfigError("simulation needs at least 2 ranks");
    if (!(bandwidth > 0.0)) throw ConfigError("bandwidth must be > 0");
    if (latency < 0.0) throw ConfigError("latency must be >= 0");
    if (iterations < 1) throw ConfigError("iterations must be >= 1");
    if (batch < 1) throw ConfigError("batch must be >= 1");
    if (tables.empty()) throw ConfigError("simulation needs at least one table spec");
    policy.validate();
    for (const auto& t : tables) t.validate();
  }
};

/// Per-iteration accounting. Byte counts, errors, and digests are pure
/// functions of (seed, config, profiles); the *_time fields are wall-clock
/// measurements and vary run to run.
struct IterationStats {
  uint64_t iteration = 0;
  double eb_max = 0.0;             // largest error bound in force
  uint64_t uncompressed_bytes = 0;  // float32 payload across all rank pairs
  uint64_t payload_bytes = 0;       // serialized chunks on the wire
  uint64_t metadata_bytes = 0;      // fixed-width metadata round
  uint64_t wire_bytes = 0;          // payload + metadata
  double comp_time = 0.0;           // measured, max over ranks
  double decomp_time = 0.0;         // measured, max over ranks
  double modeled_base_time = 0.0;   // uncompressed_bytes/B + R*latency
  double modeled_wire_time = 0.0;   // wire_bytes/B + R*latency
  double modeled_speedup = 1.0;
  double max_abs_error = 0.0;
  bool delivery_conserved = true;
  uint64_t delivered_digest = 0;  // FNV over delivered values in rank order
};

struct SimReport {
  uint32_t ranks = 0;
  uint32_t batch = 0;
  bool compression = true;
  double bandwidth = 0.0;
  double latency = 0.0;
  uint64_t decay_end = 0;
  std::vector<IterationStats> iterations;

  uint64_t total_uncompressed() const {
    uint64_t n = 0;
    for (const auto& it : iterations) n += it.uncompressed_bytes;
    return n;
  }
  uint64_t total_payload() const {
    uint64_t n = 0;
    for (const auto& it : iterations) n += it.payload_bytes;
    return n;
  }
  uint64_t total_wire() const {
    uint64_t n = 0;
    for (const auto& it : iterations) n += it.wire_bytes;
    return n;
  }
  double total_comp_time() const {
    double t = 0.0;
    for (const auto& it : iterations) t += it.comp_time;
    return t;
  }
  double total_decomp_time() const {
    double t = 0.0;
    for (const auto& it : iterations) t += it.decomp_time;
    return t;
  }
  double max_abs_error() const {
    double e = 0.0;
    for (const auto& it : iterations) e = std::max(e, it.max_abs_error);
    return e;
  }
  bool all_conserved() const {
    for (const auto& it : iterations) {
      if (!it.delivery_conserved) return false;
    }
    return true;
  }

  /// Aggregate compression ratio (payload basis) over a half-open iteration
  /// range; returns 1.0 for an empty range.
  double compression_ratio(uint64_t begin, uint64_t end) const {
    uint64_t unc = 0, pay = 0;
    for (const auto& it : iterations) {
      if (it.iteration >= begin && it.iteration < end) {
        unc += it.uncompressed_bytes;
        pay += it.payload_bytes;
      }
    }
    return pay == 0 ? 1.0 : static_cast<double>(unc) / static_cast<double>(pay);
  }

  /// Digest over every seed-derived field; identical configs and seeds give
  /// identical digests regardless of timing or thread scheduling.
  uint64_t deterministic_digest() const {
    uint64_t h = 0xCBF29CE484222325ull;
    auto mix = [&h](uint64_t v) { h = fnv1a(&v, sizeof(v), h); };
    mix(ranks);
    mix(batch);
    mix(compression ? 1 : 0);
    for (const auto& it : iterations) {
      mix(it.iteration);
      mix(std::bit_cast<uint64_t>(it.eb_max));
      mix(it.uncompressed_bytes);
      mix(it.payload_bytes);
      mix(it.metadata_bytes);
      mix(std::bit_cast<uint64_t>(it.max_abs_error));
      mix(it.delivery_conserved ? 1 : 0);
      mix(it.delivered_digest);
    }
    return h;
  }
};

/// Modeled aggregate speedup next to the closed-form estimate derived from
/// the same run, for cross-checking. The two agree as latency and metadata
/// volume go to zero.
struct SpeedupModel {
  double modeled = 1.0;
  double closed_form = 1.0;
  double ratio = 1.0;       // payload-basis compression ratio
  double comp_bps = 0.0;    // effective system compression throughput
  double decomp_bps = 0.0;  // effective system decompression throughput
};

inline SpeedupModel model_speedup(const SimReport& report) {
  SpeedupModel m;
  if (!report.compression || report.iterations.empty()) return m;
  const double unc = static_cast<double>(report.total_uncompressed());
  if (unc == 0.0) return m;
  const double base_time =
      unc / report.bandwidth +
      report.iterations.size() * report.ranks * report.latency;
  const double comp = report.total_comp_time();
  const double decomp = report.total_decomp_time();
  const double wire_time =
      static_cast<double>(report.total_wire()) / report.bandwidth +
      report.iterations.size() * report.ranks * report.latency;
  m.modeled = base_time / (comp + decomp + wire_time);
  m.ratio = static_cast<double>(report.total_uncompressed()) /
            static_cast<double>(report.total_payload());
  m.comp_bps = unc / std::max(comp, 1e-12);
  m.decomp_bps = unc / std::max(decomp, 1e-12);
  m.closed_form = estimate_speedup(m.ratio, report.bandwidth, m.comp_bps, m.decomp_bps);
  return m;
}

/// Executes the compressed all-to-all pipeline: quantize and encode per
/// destination, exchange metadata, exchange payload, decode on arrival. Ranks
/// run as threads; messages move through slots indexed by (source,
/// destination), and phases are separated by barriers, so results do not
/// depend on scheduling.
class Simulator {
 public:
  /// Table spec actually instantiated on a rank: the configured spec list is
  /// cycled over ranks, re-identified, and re-seeded per rank.
  static TableSpec rank_table_spec(const SimConfig& config, uint32_t rank) {
    TableSpec spec = config.tables[rank % config.tables.size()];
    spec.table_id = static_cast<int32_t>(rank);
    spec.seed = detail::mix_seed(config.seed, 0x7AB1Eull ^ rank);
    return spec;
  }

  Simulator(SimConfig config, std::map<int32_t, TableProfile> profiles)
      : config_(std::move(config)), profiles_(std::move(profiles)) {
    config_.validate();
    tables_.reserve(config_.ranks);
    for (uint32_t r = 0; r < config_.ranks; ++r) {
      tables_.push_back(std::make_unique<Table>(rank_table_spec(config_, r)));
    }
  }

  const SimConfig& config() const { return config_; }
  const std::map<int32_t, TableProfile>& profiles() const { return profiles_; }

  /// One forward all-to-all across all ranks. Aborts with rank and stage
  /// attribution when any codec or container contract is violated.
  IterationStats run_forward_alltoall(uint64_t iteration) {
    const uint32_t R = config_.ranks;
    std::vector<RankResult> results(R);
    std::vector<PackedSendBuffer> buffers(R);
    std::vector<std::vector<ChunkMetadata>> metadata(R);
    std::barrier sync(static_cast<std::ptrdiff_t>(R));

    {
      std::vector<std::jthread> threads;
      threads.reserve(R);
      for (uint32_t r = 0; r < R; ++r) {
        threads.emplace_back([&, r] {
          rank_body(iteration, r, results[r], buffers, metadata, sync);
        });
      }
    }

    for (uint32_t r = 0; r < R; ++r) {
      if (results[r].error) std::rethrow_exception(results[r].error);
    }
    return reduce(iteration, results);
  }

  /// Runs the full schedule with the decaying error bound.
  SimReport run_schedule() {
    SimReport report;
    report.ranks = config_.ranks;
    report.batch = config_.batch;
    report.compression = config_.compression;
    report.bandwidth = config_.bandwidth;
    report.latency = config_.latency;
    report.decay_end = config_.policy.decay.decay_end;
    report.iterations.reserve(config_.iterations);
    for (uint64_t i = 0; i < config_.iterations; ++i) {
      report.iterations.push_back(run_forward_alltoall(i));
    }
    return report;
  }

 private:
  struct RankResult {
    uint64_t uncompressed_bytes = 0;
    uint64_t payload_bytes = 0;
    uint64_t metadata_bytes = 0;
    double comp_time = 0.0;
    double decomp_time = 0.0;
    double max_abs_error = 0.0;
    double eb_in_force = 0.0;
    bool conserved = true;
    uint64_t digest = 0;
    std::exception_ptr error;
  };

  uint64_t lookup_stream(uint64_t iteration, uint32_t src, uint32_t dst) const {
    return (iteration * config_.ranks + src) * config_.ranks + dst + 1;
  }

  void rank_body(uint64_t iteration, uint32_t rank, RankResult& out,
                 std::vector<PackedSendBuffer>& buffers,
                 std::vector<std::vector<ChunkMetadata>>& metadata, std::barrier<>& sync) {
    int phases_done = 0;
    try {
      const uint32_t R = config_.ranks;
      const Table& table = *tables_[rank];

      // Stage 1: gather per-destination batches and compress them into one
      // send buffer.
      ErrorBound eb = ErrorBound(config_.policy.global_eb);
      if (config_.compression) {
        eb = eb_at(static_cast<int32_t>(rank), iteration, profiles_, config_.policy);
      }
      out.eb_in_force = config_.compression ? eb.value() : 0.0;

      std::vector<EmbeddingBatch> outgoing(R);
      for (uint32_t d = 0; d < R; ++d) {
        outgoing[d] =
            table.gather(table.sample_indices(config_.batch, lookup_stream(iteration, rank, d)));
      }

      const auto comp_start = std::chrono::steady_clock::now();
      if (config_.compression) {
        const Codec codec = codec_for(rank);
        std::vector<EncodeJob> jobs(R);
        for (uint32_t d = 0; d < R; ++d) {
          jobs[d] = EncodeJob{&outgoing[d], eb.value(), codec, VlzConfig{}};
        }
        std::vector<CompressedChunk> chunks;
        try {
          chunks = encode_chunks(jobs, config_.workers);
        } catch (const Error& e) {
          throw Error("rank " + std::to_string(rank) + " compress stage: " + e.what());
        }
        buffers[rank] = pack(chunks);
        auto& meta = metadata[rank];
        meta.resize(R);
        for (uint32_t d = 0; d < R; ++d) {
          meta[d] = metadata_for(chunks[d]);
          if (d != rank) {
            out.payload_bytes += meta[d].compressed_len;
            out.metadata_bytes += ChunkMetadata::kWireSize;
          }
        }
      } else {
        // Baseline: raw float32 values, no metadata round (sizes are fixed).
        ByteWriter w;
        w.u32le(R);
        uint64_t offset = 4 + 16ull * R;
        for (uint32_t d = 0; d < R; ++d) {
          w.u64le(offset);
          w.u64le(kWireBytesPerValue * outgoing[d].values.size());
          offset += kWireBytesPerValue * outgoing[d].values.size();
        }
        for (uint32_t d = 0; d < R; ++d) {
          for (double v : outgoing[d].values) w.f32le(static_cast<float>(v));
        }
        buffers[rank] = PackedSendBuffer{w.take()};
      }
      out.comp_time = config_.compression
                          ? std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                                          comp_start)
                                .count()
                          : 0.0;
      for (uint32_t d = 0; d < R; ++d) {
        if (d != rank) out.uncompressed_bytes += outgoing[d].wire_bytes();
      }

      // Stage 2+3: metadata then payload become visible to every peer.
      sync.arrive_and_wait();
      ++phases_done;

      // Stage 4: unpack this rank's slice from every sender and decode.
      const auto decomp_start = std::chrono::steady_clock::now();
      std::vector<EmbeddingBatch> received(R);
      for (uint32_t src = 0; src < R; ++src) {
        try {
          if (config_.compression) {
            std::vector<CompressedChunk> chunks = unpack(buffers[src]);
            if (chunks.size() != R) {
              throw FormatError("send buffer from rank " + std::to_string(src) + " holds " +
                                std::to_string(chunks.size()) + " chunks, expected " +
                                std::to_string(R));
            }
            const ChunkMetadata& m = metadata[src][rank];
            if (m.compressed_len != chunks[rank].serialized_size() ||
                m.vector_count != chunks[rank].vector_count) {
              throw FormatError("metadata from rank " + std::to_string(src) +
                                " disagrees with its chunk");
            }
            received[src] = decode_chunk(chunks[rank], static_cast<int32_t>(src));
          } else {
            ByteReader r(buffers[src].bytes);
            (void)r.u32le();
            uint64_t offset = 0, length = 0;
            for (uint32_t d = 0; d < R; ++d) {
              const uint64_t o = r.u64le();
              const uint64_t l = r.u64le();
              if (d == rank) {
                offset = o;
                length = l;
              }
            }
            ByteReader body(std::span<const uint8_t>(buffers[src].bytes).subspan(offset, length));
            EmbeddingBatch b{static_cast<int32_t>(src), tables_[src]->spec().dim, {}};
            b.values.resize(length / kWireBytesPerValue);
            for (auto& v : b.values) v = static_cast<double>(body.f32le());
            received[src] = std::move(b);
          }
        } catch (const Error& e) {
          throw Error("rank " + std::to_string(rank) + " decompress stage (from rank " +
                      std::to_string(src) + "): " + e.what());
        }
      }
      out.decomp_time = config_.compression
                            ? std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                                            decomp_start)
                                  .count()
                            : 0.0;

      // Verify delivery against the ground truth and digest the delivered
      // values in source order.
      uint64_t digest = 0xCBF29CE484222325ull;
      for (uint32_t src = 0; src < R; ++src) {
        const Table& src_table = *tables_[src];
        const EmbeddingBatch truth = src_table.gather(
            src_table.sample_indices(config_.batch, lookup_stream(iteration, src, rank)));
        const EmbeddingBatch& got = received[src];
        if (got.values.size() != truth.values.size() || got.dim != truth.dim) {
          out.conserved = false;
          continue;
        }
        for (size_t i = 0; i < truth.values.size(); ++i) {
          const double err = std::abs(static_cast<double>(got.values[i]) -
                                      static_cast<double>(truth.values[i]));
          out.max_abs_error = std::max(out.max_abs_error, err);
        }
        digest = fnv1a(got.values.data(), sizeof(double) * got.values.size(), digest);
      }
      out.digest = digest;

      sync.arrive_and_wait();
      ++phases_done;
    } catch (...) {
      out.error = std::current_exception();
      // Keep the barrier balanced so peers are not left waiting.
      for (; phases_done < 2; ++phases_done) sync.arrive_and_wait();
    }
  }

  Codec codec_for(uint32_t rank) const {
    const auto it = profiles_.find(static_cast<int32_t>(rank));
    return it != profiles_.end() ? it->second.codec : Codec::raw;
  }

  IterationStats reduce(uint64_t iteration, const std::vector<RankResult>& results) const {
    IterationStats stats;
    stats.iteration = iteration;
    uint64_t digest = 0xCBF29CE484222325ull;
    for (const auto& r : results) {
      stats.eb_max = std::max(stats.eb_max, r.eb_in_force);
      stats.uncompressed_bytes += r.uncompressed_bytes;
      stats.payload_bytes += r.payload_bytes;
      stats.metadata_bytes += r.metadata_bytes;
      stats.comp_time = std::max(stats.comp_time, r.comp_time);
      stats.decomp_time = std::max(stats.decomp_time, r.decomp_time);
      stats.max_abs_error = std::max(stats.max_abs_error, r.max_abs_error);
      stats.delivery_conserved = stats.delivery_conserved && r.conserved;
      digest = fnv1a(&r.digest, sizeof(r.digest), digest);
    }
    stats.delivered_digest = digest;
    if (!config_.compression) {
      stats.payload_bytes = stats.uncompressed_bytes;
      stats.metadata_bytes = 0;
    }
    stats.wire_bytes = stats.payload_bytes + stats.metadata_bytes;

    const double round_latency = config_.ranks * config_.latency;
    stats.modeled_base_time =
        static_cast<double>(stats.uncompressed_bytes) / config_.bandwidth + round_latency;
    stats.modeled_wire_time =
        static_cast<double>(stats.wire_bytes) / config_.bandwidth + round_latency;
    stats.modeled_speedup =
        config_.compression
            ? stats.modeled_base_time /
                  (stats.comp_time + stats.decomp_time + stats.modeled_wire_time)
            : 1.0;

    if (config_.compression && stats.max_abs_error > stats.eb_max) {
      throw Error("iteration " + std::to_string(iteration) + ": reconstruction error " +
                  std::to_string(stats.max_abs_error) + " exceeds error bound " +
                  std::to_string(stats.eb_max));
    }
    if (!config_.compression && stats.max_abs_error != 0.0) {
      throw Error("iteration " + std::to_string(iteration) +
                  ": baseline delivery must be exact");
    }
    if (!stats.delivery_conserved) {
      throw Error("iteration " + std::to_string(iteration) + ": delivery not conserved");
    }
    return stats;
  }

  SimConfig config_;
  std::map<int32_t, TableProfile> profiles_;
  std::vector<std::unique_ptr<Table>> tables_;
};

/// Offline analysis matching the simulator's table layout: samples one batch
/// per rank-table and profiles it.
inline std::map<int32_t, TableProfile> analyze_sim_tables(const SimConfig& config) {
  config.validate();
  std::vector<EmbeddingBatch> samples;
  samples.reserve(config.ranks);
  for (uint32_t r = 0; r < config.ranks; ++r) {
    samples.push_back(Table(Simulator::rank_table_spec(config, r)).lookup_batch(config.batch, 0));
  }
  return offline_analysis(samples, config.policy, config.bandwidth);
}

inline SimReport run_training_schedule(const SimConfig& config,
                                       const std::map<int32_t, TableProfile>& profiles) {
  return Simulator(config, profiles).run_schedule();
}

}  // namespace embc
