// Copyright 2026 The SSA-ASR Authors
// SPDX-License-Identifier: Apache-2.0
//
// Pieces shared by the subcommands: exit codes, file helpers, activity
// resolution and the MetricsReport layout.

#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "ssa/formats.hpp"
#include "ssa/metrics.hpp"
#include "ssa/model.hpp"

namespace ssa::cli {

enum ExitCode : int {
  kOk = 0,
  kOther = 1,
  kParseFailure = 2,
  kContractFailure = 3,
  kNumericFailure = 4,
  kPartialFailure = 5,
};

inline constexpr const char* kMetricsSchema = "ssa-metrics/1";
inline constexpr const char* kStreamSchema = "ssa-stream/1";
inline constexpr const char* kEmbeddingSchema = "ssa-embeddings/1";

/// Opened file or the caller's stream for "-".
class Output {
 public:
  Output(const std::string& path, std::ostream& fallback);
  std::ostream& stream() { return file_ ? *file_ : *fallback_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* fallback_;
};

/// Whole file as text; an unreadable path is reported as a contract failure.
std::string slurp(const std::string& path);
nlohmann::json read_json_file(const std::string& path);
std::vector<ManifestRecord> load_manifest(const std::string& path);

nlohmann::json reproducibility(std::optional<std::uint64_t> seed, const nlohmann::json& config,
                               std::optional<std::string> checkpoint_hash);

/// Where per-speaker activities come from during decoding.
struct ActivityOptions {
  std::string source = "oracle";  // oracle | rttm | degraded | ones | zeros
  std::string rttm_path;
  double severity = 0.0;
  std::uint64_t seed = 0;

  void validate() const;
  nlohmann::json to_json() const;
};

class ActivityResolver {
 public:
  explicit ActivityResolver(ActivityOptions opt);
  /// One activity per reference speaker, or an error message when any of
  /// them is unavailable.
  std::vector<ActivitySeq> resolve(const ManifestRecord& rec, std::size_t index, std::string* error) const;

 private:
  ActivityOptions opt_;
  std::map<std::string, SegmentSet> rttm_;
};

std::uint64_t mix_seed(std::uint64_t seed, std::size_t index, std::size_t slot);

nlohmann::json counts_json(const ErrorCounts& c);
std::string format_rate(const ErrorCounts& c);

/// Fixed-width rows: one per (mode, k) plus an "all" row per mode.
struct TableRow {
  std::string mode;
  std::string activity;
  std::string k;
  std::size_t samples = 0;
  ErrorCounts counts;
};
void print_table(std::ostream& out, const std::vector<TableRow>& rows);

/// Copy of `params` with the injection output forced to zero.
ModelParams without_injection(const ModelParams& params);

}  // namespace ssa::cli
