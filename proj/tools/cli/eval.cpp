// Copyright 2026 The SSA-ASR Authors
// SPDX-License-Identifier: Apache-2.0

#include <map>

#include "cli/cli.hpp"
#include "ssa/checkpoint.hpp"
#include "ssa/errors.hpp"
#include "ssa/serialize.hpp"
#include "ssa/streaming.hpp"

namespace ssa::cli {

using nlohmann::json;

namespace {

json assignment_json(const CpwerResult& r) {
  json a = json::array();
  for (const auto& [ref, hyp] : r.assignment) a.push_back({ref, hyp});
  return a;
}

std::string speaker_label(const MixtureSample& s, std::size_t j) {
  return "spk" + std::to_string(s.speaker_ids[j]);
}

}  // namespace

int run_eval(const EvalOptions& o, std::ostream& out) {
  if (o.modes.empty()) throw ContractError("eval needs at least one --mode");
  const std::string ckpt_bytes = slurp(o.checkpoint);
  const LoadedCheckpoint ckpt = parse_checkpoint(ckpt_bytes);
  const ModelParams& params = ckpt.params;
  const ModelConfig& mc = params.config();
  const auto records = load_manifest(o.manifest);
  const ActivityResolver resolver(o.activity);

  std::vector<std::optional<ChunkConfig>> chunking;
  for (const auto& m : o.modes) {
    if (m == "offline") {
      chunking.emplace_back();
      continue;
    }
    ChunkConfig c = find_preset(m);
    c.lookahead_frames = mc.lookahead * mc.subsample;
    chunking.emplace_back(c);
  }

  const json config{{"model", to_json(mc)}, {"activity", o.activity.to_json()}, {"modes", o.modes}};
  const json repro = reproducibility(o.activity.seed, config, sha256_hex(ckpt_bytes));

  // Activities are resolved once so every mode sees the same inputs.
  std::vector<std::vector<ActivitySeq>> activities(records.size());
  json failures = json::array();
  for (std::size_t i = 0; i < records.size(); ++i) {
    std::string error;
    activities[i] = resolver.resolve(records[i], i, &error);
    if (!error.empty()) failures.push_back({{"id", records[i].id}, {"error", error}});
  }

  std::unique_ptr<Output> hyps;
  if (!o.hyps.empty()) hyps = std::make_unique<Output>(o.hyps, out);

  json runs = json::array();
  std::vector<TableRow> table;
  for (std::size_t m = 0; m < o.modes.size(); ++m) {
    ErrorCounts total;
    std::map<std::size_t, ErrorCounts> per_k;
    std::map<std::size_t, std::size_t> per_k_samples;
    std::size_t scored = 0;
    json samples = json::array();
    for (std::size_t i = 0; i < records.size(); ++i) {
      if (activities[i].empty()) continue;
      const MixtureSample& s = records[i].sample;
      const auto hyp = chunking[m] ? decode_streaming(params, s.features, activities[i], *chunking[m])
                                   : decode_offline(params, s.features, activities[i]);
      const CpwerResult r = cpwer(s.references, hyp);
      total += r.counts;
      per_k[s.k()] += r.counts;
      ++per_k_samples[s.k()];
      ++scored;
      samples.push_back({{"id", records[i].id},
                         {"k", s.k()},
                         {"counts", counts_json(r.counts)},
                         {"assignment", assignment_json(r)}});
      if (hyps) {
        TranscriptRecord t{records[i].id, {}};
        for (std::size_t j = 0; j < hyp.size(); ++j) t.speakers.push_back({speaker_label(s, j), render_words(hyp[j])});
        json line = transcript_json(t);
        line["mode"] = o.modes[m];
        hyps->stream() << line.dump() << '\n';
      }
    }
    json k_json = json::object();
    for (const auto& [k, c] : per_k) {
      json entry = counts_json(c);
      entry["samples"] = per_k_samples[k];
      k_json[std::to_string(k)] = entry;
      table.push_back({o.modes[m], o.activity.source, std::to_string(k), per_k_samples[k], c});
    }
    table.push_back({o.modes[m], o.activity.source, "all", scored, total});
    json run{{"mode", o.modes[m]}, {"cpwer", counts_json(total)}, {"per_k", k_json}, {"samples", samples}};
    run["latency_ms"] = chunking[m] ? json(latency_ms(*chunking[m])) : json(nullptr);
    runs.push_back(run);
  }

  json report{{"schema", kMetricsSchema},
              {"command", "eval"},
              {"manifest", o.manifest},
              {"activity", o.activity.to_json()},
              {"runs", runs},
              {"failures", failures},
              {"reproducibility", repro}};
  if (o.out.empty() || o.out == "-") {
    out << report.dump(2) << '\n';
  } else {
    Output file(o.out, out);
    file.stream() << report.dump(2) << '\n';
    print_table(out, table);
  }
  return failures.empty() ? kOk : kPartialFailure;
}

}  // namespace ssa::cli
