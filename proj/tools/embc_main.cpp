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

#include <algorithm>
#include <array>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "embc/embc.hpp"

namespace {

using embc::Codec;
using embc::CsvWriter;
using embc::ErrorBound;
using embc::KeyValueConfig;

constexpr const char* kAnalyzeSchema = "embc.analyze.v1";
constexpr const char* kBenchSchema = "embc.bench.v1";
constexpr const char* kSimulateSchema = "embc.simulate.v1";

std::string fmt(double v) { return embc::detail::format_double(v); }

// Table specs as analyzed and simulated: seeds derive from the run seed the
// same way the simulator derives its per-rank shards.
std::vector<embc::TableSpec> seeded_tables(const KeyValueConfig& kv, uint64_t seed) {
  std::vector<embc::TableSpec> tables = embc::load_tables(kv);
  for (auto& t : tables) {
    t.seed = embc::detail::mix_seed(seed, 0x7AB1Eull ^ static_cast<uint32_t>(t.table_id));
  }
  return tables;
}

uint64_t resolve_seed(const KeyValueConfig& kv, const std::optional<uint64_t>& flag) {
  if (flag) return *flag;
  return kv.get_u64("seed", 1);
}

int cmd_analyze(const std::string& config_path, std::optional<uint64_t> seed_flag,
                std::optional<double> bandwidth_flag, const std::string& profiles_out,
                const std::string& csv_out, const std::string& dump_dir) {
  const KeyValueConfig kv = KeyValueConfig::parse_file(config_path);
  const embc::PolicyConfig policy = embc::load_policy(kv);
  const uint64_t seed = resolve_seed(kv, seed_flag);
  const double bandwidth = bandwidth_flag.value_or(kv.get_f64("bandwidth", 4e9));
  const uint32_t batch = static_cast<uint32_t>(kv.get_u64("batch", 128));

  std::vector<embc::EmbeddingBatch> samples;
  for (const auto& spec : seeded_tables(kv, seed)) {
    samples.push_back(embc::Table(spec).lookup_batch(batch, 0));
  }
  const auto profiles = embc::offline_analysis(samples, policy, bandwidth);

  std::cout << "table  survival  homo      class   eb        codec\n";
  for (const auto& [id, p] : profiles) {
    std::cout << id << "  " << fmt(p.survival_ratio) << "  " << fmt(p.homo_index) << "  "
              << embc::table_class_name(p.cls) << "  " << fmt(p.eb) << "  "
              << embc::codec_name(p.codec) << "\n";
  }

  if (!profiles_out.empty()) {
    embc::write_profiles(profiles_out, profiles);
    std::cout << "profiles written to " << profiles_out << "\n";
  }
  if (!csv_out.empty()) {
    std::ofstream out(csv_out);
    if (!out) throw embc::Error("cannot write '" + csv_out + "'");
    CsvWriter csv(out, kAnalyzeSchema,
                  {"table_id", "survival_ratio", "homo_index", "class", "eb", "cr_vlz", "cr_huff",
                   "codec"});
    for (const auto& [id, p] : profiles) {
      double cr_vlz = 0.0, cr_huff = 0.0;
      for (const auto& m : p.measured) {
        if (m.codec == Codec::vlz) cr_vlz = m.ratio;
        if (m.codec == Codec::huffman) cr_huff = m.ratio;
      }
      csv.row({std::to_string(id), fmt(p.survival_ratio), fmt(p.homo_index),
               embc::table_class_name(p.cls), fmt(p.eb), fmt(cr_vlz), fmt(cr_huff),
               embc::codec_name(p.codec)});
    }
    std::cout << "csv written to " << csv_out << "\n";
  }
  if (!dump_dir.empty()) {
    std::filesystem::create_directories(dump_dir);
    for (size_t i = 0; i < samples.size(); ++i) {
      const auto& p = profiles.at(samples[i].table_id);
      const embc::CompressedChunk chunk =
          embc::encode_chunk(samples[i], ErrorBound(p.eb), Codec::raw);
      const std::string path =
          dump_dir + "/table_" + std::to_string(samples[i].table_id) + ".embc";
      embc::write_file(path, embc::serialize_chunk(chunk));
    }
    std::cout << "sample batches dumped to " << dump_dir << "\n";
  }
  return 0;
}

int cmd_compress(const std::string& in_path, const std::string& out_path, double eb_value,
                 const std::string& codec_name, uint32_t window, double bandwidth) {
  const embc::EmbeddingBatch batch = embc::parse_values(embc::read_file(in_path));
  const ErrorBound eb(eb_value);
  const embc::VlzConfig vlz{window};

  Codec codec;
  if (codec_name == "auto") {
    const std::array<Codec, 2> candidates = {Codec::vlz, Codec::huffman};
    codec = embc::select_codec(batch, eb, candidates, bandwidth, vlz).chosen;
  } else {
    codec = embc::codec_from_name(codec_name);
  }

  const embc::CompressedChunk chunk = embc::encode_chunk(batch, eb, codec, vlz);
  embc::write_file(out_path, embc::serialize_chunk(chunk));
  const double in_bytes = static_cast<double>(batch.wire_bytes());
  std::cout << "codec " << embc::codec_name(codec) << ", " << batch.batch_size() << " x "
            << batch.dim << " values, ratio "
            << fmt(in_bytes / static_cast<double>(chunk.payload.size())) << "\n";
  return 0;
}

int cmd_decompress(const std::string& in_path, const std::string& out_path) {
  const embc::CompressedChunk chunk = embc::parse_chunk(embc::read_file(in_path));
  const embc::EmbeddingBatch batch = embc::decode_chunk(chunk);
  embc::write_file(out_path, embc::serialize_values(batch));
  std::cout << "decoded " << batch.batch_size() << " x " << batch.dim << " values (codec "
            << embc::codec_name(chunk.codec) << ", eb " << fmt(chunk.eb) << ")\n";
  return 0;
}

int cmd_bench(const std::string& config_path, std::optional<uint64_t> seed_flag,
              std::optional<double> bandwidth_flag, uint32_t window, const std::string& csv_out) {
  const KeyValueConfig kv = KeyValueConfig::parse_file(config_path);
  const embc::PolicyConfig policy = embc::load_policy(kv);
  const uint64_t seed = resolve_seed(kv, seed_flag);
  const double bandwidth = bandwidth_flag.value_or(kv.get_f64("bandwidth", 4e9));
  const uint32_t batch = static_cast<uint32_t>(kv.get_u64("batch", 128));
  const ErrorBound eb(policy.global_eb);
  const embc::VlzConfig vlz{window};

  std::ostream* out = &std::cout;
  std::ofstream file;
  if (!csv_out.empty()) {
    file.open(csv_out);
    if (!file) throw embc::Error("cannot write '" + csv_out + "'");
    out = &file;
  }
  CsvWriter csv(*out, kBenchSchema,
                {"table_id", "codec", "eb", "compression_ratio", "comp_bps", "decomp_bps",
                 "est_speedup"});

  const std::array<Codec, 3> candidates = {Codec::raw, Codec::vlz, Codec::huffman};
  for (const auto& spec : seeded_tables(kv, seed)) {
    const embc::EmbeddingBatch sample = embc::Table(spec).lookup_batch(batch, 0);
    const auto sel = embc::select_codec(sample, eb, candidates, bandwidth, vlz);
    for (const auto& m : sel.measured) {
      const double speedup = embc::estimate_speedup(m.ratio, bandwidth, m.comp_bps, m.decomp_bps);
      csv.row({std::to_string(spec.table_id), embc::codec_name(m.codec), fmt(eb.value()),
               fmt(m.ratio), fmt(m.comp_bps), fmt(m.decomp_bps), fmt(speedup)});
    }
  }
  if (!csv_out.empty()) std::cout << "csv written to " << csv_out << "\n";
  return 0;
}

int cmd_simulate(const std::string& config_path, uint64_t seed, const std::string& csv_out,
                 const std::string& profiles_path, std::optional<uint64_t> ranks,
                 std::optional<double> bandwidth, std::optional<double> latency,
                 std::optional<uint64_t> iterations, std::optional<uint64_t> workers,
                 std::optional<std::string> compression) {
  const KeyValueConfig kv = KeyValueConfig::parse_file(config_path);
  embc::SimConfig sim = embc::load_sim_config(kv);
  sim.seed = seed;
  if (ranks) sim.ranks = static_cast<uint32_t>(*ranks);
  if (bandwidth) sim.bandwidth = *bandwidth;
  if (latency) sim.latency = *latency;
  if (iterations) sim.iterations = static_cast<uint32_t>(*iterations);
  if (workers) sim.workers = static_cast<unsigned>(*workers);
  if (compression) {
    if (*compression == "on") sim.compression = true;
    else if (*compression == "off") sim.compression = false;
    else throw embc::ConfigError("--compression expects on|off");
  }
  sim.validate();

  const auto profiles =
      profiles_path.empty() ? embc::analyze_sim_tables(sim) : embc::read_profiles(profiles_path);
  const embc::SimReport report = embc::run_training_schedule(sim, profiles);

  if (!csv_out.empty()) {
    std::ofstream out(csv_out);
    if (!out) throw embc::Error("cannot write '" + csv_out + "'");
    CsvWriter csv(out, kSimulateSchema,
                  {"iteration", "eb_max", "uncompressed_bytes", "payload_bytes", "metadata_bytes",
                   "wire_bytes", "comp_time_s", "decomp_time_s", "modeled_base_time_s",
                   "modeled_wire_time_s", "modeled_speedup", "max_abs_error"});
    for (const auto& it : report.iterations) {
      csv.row({std::to_string(it.iteration), fmt(it.eb_max), std::to_string(it.uncompressed_bytes),
               std::to_string(it.payload_bytes), std::to_string(it.metadata_bytes),
               std::to_string(it.wire_bytes), fmt(it.comp_time), fmt(it.decomp_time),
               fmt(it.modeled_base_time), fmt(it.modeled_wire_time), fmt(it.modeled_speedup),
               fmt(it.max_abs_error)});
    }
  }

  const embc::SpeedupModel model = embc::model_speedup(report);
  const uint64_t decay_end = report.decay_end;
  std::cout << "== embc simulate ==\n"
            << "ranks " << report.ranks << "  iterations " << report.iterations.size()
            << "  batch " << report.batch << "  compression "
            << (report.compression ? "on" : "off") << "  bandwidth " << fmt(report.bandwidth)
            << " B/s  latency " << fmt(report.latency) << " s\n"
            << "wire bytes:        " << report.total_uncompressed() << " -> "
            << report.total_wire() << " (payload " << report.total_payload() << " + metadata "
            << (report.total_wire() - report.total_payload()) << ")\n"
            << "compression ratio: " << fmt(report.compression_ratio(0, ~0ull)) << " overall";
  if (decay_end > 0 && !report.iterations.empty()) {
    if (report.iterations.front().iteration < decay_end) {
      std::cout << " | initial phase " << fmt(report.compression_ratio(0, decay_end));
    }
    if (report.iterations.back().iteration >= decay_end) {
      std::cout << " | later phase " << fmt(report.compression_ratio(decay_end, ~0ull));
    }
  }
  std::cout << "\n"
            << "max abs error:     " << fmt(report.max_abs_error())
            << " (delivery conserved: " << (report.all_conserved() ? "yes" : "NO") << ")\n";
  if (report.compression) {
    std::cout << "codec time:        compress " << fmt(report.total_comp_time())
              << " s, decompress " << fmt(report.total_decomp_time()) << " s\n"
              << "modeled speedup:   " << fmt(model.modeled) << " (closed-form estimate "
              << fmt(model.closed_form) << ")\n";
  } else {
    std::cout << "modeled speedup:   1 (baseline)\n";
  }
  if (!csv_out.empty()) std::cout << "csv written to " << csv_out << "\n";
  return 0;
}

bool is_number(const std::string& s) {
  if (s.empty()) return false;
  return s.find_first_not_of("0123456789+-.eE") == std::string::npos &&
         s.find_first_of("0123456789") != std::string::npos;
}

int cmd_report(const std::vector<std::string>& paths) {
  for (const auto& path : paths) {
    const embc::CsvTable table = embc::parse_csv_file(path);
    std::cout << "== " << path;
    if (!table.schema.empty()) std::cout << " (" << table.schema << ")";
    std::cout << " ==\n";
    if (table.header.empty()) {
      std::cout << "(empty)\n";
      continue;
    }

    std::vector<size_t> width(table.header.size());
    for (size_t c = 0; c < table.header.size(); ++c) width[c] = table.header[c].size();
    for (const auto& row : table.rows) {
      for (size_t c = 0; c < row.size() && c < width.size(); ++c) {
        width[c] = std::max(width[c], row[c].size());
      }
    }
    auto print_row = [&](const std::vector<std::string>& row) {
      for (size_t c = 0; c < row.size(); ++c) {
        const size_t pad = c < width.size() && width[c] > row[c].size() ? width[c] - row[c].size() : 0;
        std::cout << (c ? "  " : "") << row[c] << std::string(pad, ' ');
      }
      std::cout << "\n";
    };
    print_row(table.header);
    for (const auto& row : table.rows) print_row(row);

    // Column means for the numeric columns.
    if (!table.rows.empty()) {
      std::vector<std::string> means(table.header.size());
      bool any = false;
      for (size_t c = 0; c < table.header.size(); ++c) {
        double sum = 0.0;
        size_t n = 0;
        for (const auto& row : table.rows) {
          if (c < row.size() && is_number(row[c])) {
            sum += std::stod(row[c]);
            ++n;
          }
        }
        if (n == table.rows.size()) {
          means[c] = "mean " + fmt(sum / static_cast<double>(n));
          any = true;
        }
      }
      if (any) print_row(means);
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"embedding-lookup compression toolkit"};
  app.require_subcommand(1);

  // analyze
  std::string an_config, an_profiles, an_csv, an_dump;
  std::optional<uint64_t> an_seed;
  std::optional<double> an_bandwidth;
  auto* analyze = app.add_subcommand("analyze", "profile tables and pick codecs/error bounds");
  analyze->add_option("--config", an_config, "config file")->required();
  analyze->add_option("--seed", an_seed, "run seed (defaults to the config's seed key)");
  analyze->add_option("--bandwidth", an_bandwidth, "bytes/s for the speed-up model");
  analyze->add_option("--out", an_profiles, "profiles output path");
  analyze->add_option("--csv", an_csv, "per-table csv output path");
  analyze->add_option("--dump-dir", an_dump, "dump sampled batches as raw-codes chunks");

  // compress
  std::string c_in, c_out, c_codec = "auto";
  double c_eb = 0.0, c_bandwidth = 4e9;
  uint32_t c_window = 255;
  auto* compress = app.add_subcommand("compress", "compress a value file into a chunk");
  compress->add_option("--in", c_in, "input value file")->required();
  compress->add_option("--out", c_out, "output chunk file")->required();
  compress->add_option("--eb", c_eb, "absolute error bound")->required();
  compress->add_option("--codec", c_codec, "auto|raw|vlz|huffman")
      ->check(CLI::IsMember({"auto", "raw", "vlz", "huffman"}));
  compress->add_option("--window", c_window, "vlz window in vectors");
  compress->add_option("--bandwidth", c_bandwidth, "bytes/s for auto selection");

  // decompress
  std::string d_in, d_out;
  auto* decompress = app.add_subcommand("decompress", "decode a chunk back to a value file");
  decompress->add_option("--in", d_in, "input chunk file")->required();
  decompress->add_option("--out", d_out, "output value file")->required();

  // bench
  std::string b_config, b_csv;
  std::optional<uint64_t> b_seed;
  std::optional<double> b_bandwidth;
  uint32_t b_window = 255;
  auto* bench = app.add_subcommand("bench", "measure per-codec ratio/throughput/speed-up");
  bench->add_option("--config", b_config, "config file")->required();
  bench->add_option("--seed", b_seed, "run seed (defaults to the config's seed key)");
  bench->add_option("--bandwidth", b_bandwidth, "bytes/s for the speed-up model");
  bench->add_option("--window", b_window, "vlz window in vectors");
  bench->add_option("--out", b_csv, "csv output path (stdout when omitted)");

  // simulate
  std::string s_config, s_csv, s_profiles;
  uint64_t s_seed = 0;
  std::optional<uint64_t> s_ranks, s_iterations, s_workers;
  std::optional<double> s_bandwidth, s_latency;
  std::optional<std::string> s_compression;
  auto* simulate = app.add_subcommand("simulate", "run the multi-rank all-to-all pipeline");
  simulate->add_option("--config", s_config, "config file")->required();
  simulate->add_option("--seed", s_seed, "run seed (required for reproducibility)")->required();
  simulate->add_option("--out", s_csv, "per-iteration csv output path");
  simulate->add_option("--profiles", s_profiles, "reuse profiles from analyze");
  simulate->add_option("--ranks", s_ranks, "override rank count");
  simulate->add_option("--bandwidth", s_bandwidth, "override bandwidth (bytes/s)");
  simulate->add_option("--latency", s_latency, "override per-message latency (s)");
  simulate->add_option("--iterations", s_iterations, "override iteration count");
  simulate->add_option("--workers", s_workers, "per-rank codec worker cap");
  simulate->add_option("--compression", s_compression, "on|off");

  // report
  std::vector<std::string> r_paths;
  auto* report = app.add_subcommand("report", "pretty-print csv output with column means");
  report->add_option("csv", r_paths, "csv files")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*analyze) {
      return cmd_analyze(an_config, an_seed, an_bandwidth, an_profiles, an_csv, an_dump);
    }
    if (*compress) return cmd_compress(c_in, c_out, c_eb, c_codec, c_window, c_bandwidth);
    if (*decompress) return cmd_decompress(d_in, d_out);
    if (*bench) return cmd_bench(b_config, b_seed, b_bandwidth, b_window, b_csv);
    if (*simulate) {
      return cmd_simulate(s_config, s_seed, s_csv, s_profiles, s_ranks, s_bandwidth, s_latency,
                          s_iterations, s_workers, s_compression);
    }
    if (*report) return cmd_report(r_paths);
  } catch (const embc::Error& e) {
    std::cerr << "embc: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "embc: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
