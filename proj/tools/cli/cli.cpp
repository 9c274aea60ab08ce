// Copyright 2026 The SSA-ASR Authors
// SPDX-License-Identifier: Apache-2.0

#include "cli/cli.hpp"

#include "CLI11.hpp"
#include "ssa/errors.hpp"

namespace ssa::cli {

namespace {

void add_activity_flags(CLI::App* cmd, ActivityOptions& a) {
  cmd->add_option("--activity", a.source, "Activity source")
      ->check(CLI::IsMember({"oracle", "rttm", "degraded", "ones", "zeros"}))
      ->capture_default_str();
  cmd->add_option("--rttm", a.rttm_path, "RTTM with one speaker label spk<id> per reference speaker");
  cmd->add_option("--severity", a.severity, "Degradation severity in [0, 1]")->capture_default_str();
  cmd->add_option("--seed", a.seed, "Seed of the degradation noise")->capture_default_str();
}

int exit_code(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::kParse:
      return kParseFailure;
    case ErrorKind::kNumeric:
      return kNumericFailure;
    case ErrorKind::kDimension:
    case ErrorKind::kContract:
    case ErrorKind::kState:
    case ErrorKind::kConfigMismatch:
    case ErrorKind::kInfeasible:
    case ErrorKind::kUndefinedRate:
      return kContractFailure;
  }
  return kOther;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Self-speaker-adaptation toolkit for multi-talker ASR", "ssa"};
  app.require_subcommand(1);

  SimulateOptions sim;
  auto* c_sim = app.add_subcommand("simulate", "Write a manifest of simulated mixtures");
  c_sim->add_option("--out", sim.out, "Manifest path ('-' for stdout)")->required();
  c_sim->add_option("--rttm", sim.rttm, "Also write reference RTTM");
  c_sim->add_option("--transcripts", sim.transcripts, "Also write reference transcripts");
  c_sim->add_option("--count", sim.count, "Number of mixtures")->capture_default_str();
  c_sim->add_option("--seed", sim.seed, "Sampling seed")->capture_default_str();
  c_sim->add_option("--ratios", sim.ratios, "Weights of 1-, 2- and 3-speaker mixtures")
      ->delimiter(',')
      ->expected(3);
  c_sim->add_option("--overlap", sim.overlap, "random delays or full overlap")
      ->check(CLI::IsMember({"random", "full"}))
      ->capture_default_str();
  c_sim->add_option("--sim-config", sim.sim_config, "Simulator config JSON");
  c_sim->add_option("--id-prefix", sim.id_prefix, "Prefix of sample ids")->capture_default_str();

  TrainOptions tr;
  std::uint64_t tr_seed = 0;
  std::size_t tr_steps = 0;
  auto* c_train = app.add_subcommand("train", "Train and write the averaged checkpoint");
  c_train->add_option("--config", tr.config, "Training config JSON");
  c_train->add_option("--model-config", tr.model_config, "Model config JSON");
  c_train->add_option("--init", tr.init, "Start from this checkpoint (second-stage training)");
  c_train->add_option("--out", tr.out, "Checkpoint path")->required();
  c_train->add_option("--log", tr.log, "JSON-lines training log ('-' for stdout)")->capture_default_str();
  auto* o_seed = c_train->add_option("--seed", tr_seed, "Override the config seed");
  auto* o_steps = c_train->add_option("--steps", tr_steps, "Override the step count");

  EvalOptions ev;
  auto* c_eval = app.add_subcommand("eval", "Decode a manifest and report cpWER");
  c_eval->add_option("--checkpoint", ev.checkpoint, "Checkpoint path")->required();
  c_eval->add_option("--manifest", ev.manifest, "Manifest path")->required();
  add_activity_flags(c_eval, ev.activity);
  c_eval->add_option("--mode", ev.modes, "offline or a latency preset (80ms .. 2720ms); repeatable")
      ->delimiter(',')
      ->capture_default_str();
  c_eval->add_option("--out", ev.out, "MetricsReport path; the table goes to stdout");
  c_eval->add_option("--hyps", ev.hyps, "Write hypothesis transcripts");

  StreamOptions st;
  auto* c_stream = app.add_subcommand("stream", "Stream a manifest chunk by chunk and emit events");
  c_stream->add_option("--checkpoint", st.checkpoint, "Checkpoint path")->required();
  c_stream->add_option("--manifest", st.manifest, "Manifest path")->required();
  add_activity_flags(c_stream, st.activity);
  c_stream->add_option("--preset", st.preset, "Latency preset, e.g. 560ms")->required();
  c_stream->add_option("--sample", st.sample, "Only this sample id");
  c_stream->add_option("--out", st.out, "Event path ('-' for stdout)")->capture_default_str();

  ScoreOptions sc;
  auto* c_score = app.add_subcommand("score", "Score transcripts (cpWER) and RTTM (DER)");
  c_score->add_option("--ref", sc.ref, "Reference transcripts");
  c_score->add_option("--hyp", sc.hyp, "Hypothesis transcripts");
  c_score->add_option("--ref-rttm", sc.ref_rttm, "Reference RTTM");
  c_score->add_option("--hyp-rttm", sc.hyp_rttm, "Hypothesis RTTM");
  c_score->add_option("--collar", sc.collar, "DER collar in seconds")->capture_default_str();
  c_score->add_flag("--ignore-edges", sc.ignore_edges, "Skip time outside the reference speech span");
  c_score->add_option("--out", sc.out, "MetricsReport path; the table goes to stdout");

  ExportOptions ex;
  auto* c_export = app.add_subcommand("export-embeddings", "Write last-layer encoder states per speaker");
  c_export->add_option("--checkpoint", ex.checkpoint, "Checkpoint path")->required();
  c_export->add_option("--manifest", ex.manifest, "Manifest path")->required();
  add_activity_flags(c_export, ex.activity);
  c_export->add_option("--sample", ex.sample, "Sample id (default: first)");
  c_export->add_flag("--baseline", ex.baseline, "Also write states with the injection removed");
  c_export->add_option("--out", ex.out, "Output path ('-' for stdout)")->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "ssa: " << e.what() << '\n';
    return kParseFailure;
  }
  if (*o_seed) tr.seed = tr_seed;
  if (*o_steps) tr.steps = tr_steps;

  try {
    if (*c_sim) return run_simulate(sim, out);
    if (*c_train) return run_train(tr, out);
    if (*c_eval) return run_eval(ev, out);
    if (*c_stream) return run_stream(st, out);
    if (*c_score) return run_score(sc, out);
    if (*c_export) return run_export(ex, out);
  } catch (const Error& e) {
    err << "ssa: " << e.what() << '\n';
    return exit_code(e);
  } catch (const std::exception& e) {
    err << "ssa: " << e.what() << '\n';
    return kOther;
  }
  return kOther;
}

}  // namespace ssa::cli
