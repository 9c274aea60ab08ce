// Copyright 2026 The SSA-ASR Authors
// SPDX-License-Identifier: Apache-2.0
//
// Entry point of the `ssa` command-line tool. Flags are listed in
// docs/cli.md.

#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "cli/common.hpp"

namespace ssa::cli {

struct SimulateOptions {
  std::string out;
  std::string rttm;
  std::string transcripts;
  std::size_t count = 100;
  std::uint64_t seed = 1;
  std::vector<double> ratios{1.0, 3.0, 6.0};
  std::string overlap = "random";  // random | full
  std::string sim_config;
  std::string id_prefix = "mix";
};

struct TrainOptions {
  std::string config;
  std::string model_config;
  std::string init;
  std::string out;
  std::string log = "-";
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> steps;
};

struct EvalOptions {
  std::string checkpoint;
  std::string manifest;
  ActivityOptions activity;
  std::vector<std::string> modes{"offline"};
  std::string out;
  std::string hyps;
};

struct StreamOptions {
  std::string checkpoint;
  std::string manifest;
  ActivityOptions activity;
  std::string preset;
  std::string sample;
  std::string out = "-";
};

struct ScoreOptions {
  std::string ref;
  std::string hyp;
  std::string ref_rttm;
  std::string hyp_rttm;
  double collar = 0.0;
  bool ignore_edges = false;
  std::string out;
};

struct ExportOptions {
  std::string checkpoint;
  std::string manifest;
  ActivityOptions activity;
  std::string sample;
  bool baseline = false;
  std::string out = "-";
};

int run_simulate(const SimulateOptions& o, std::ostream& out);
int run_train(const TrainOptions& o, std::ostream& out);
int run_eval(const EvalOptions& o, std::ostream& out);
int run_stream(const StreamOptions& o, std::ostream& out);
int run_score(const ScoreOptions& o, std::ostream& out);
int run_export(const ExportOptions& o, std::ostream& out);

/// Parses `args` (without the program name), runs the subcommand and maps
/// library errors to exit codes. Diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ssa::cli
