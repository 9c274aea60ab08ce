// Copyright 2026 The SSA-ASR Authors
// SPDX-License-Identifier: Apache-2.0

#include "cli/cli.hpp"
#include "ssa/checkpoint.hpp"
#include "ssa/errors.hpp"
#include "ssa/serialize.hpp"
#include "ssa/streaming.hpp"

namespace ssa::cli {

using nlohmann::json;

int run_stream(const StreamOptions& o, std::ostream& out) {
  if (o.preset.empty()) throw ContractError("stream needs --preset");
  const std::string ckpt_bytes = slurp(o.checkpoint);
  const LoadedCheckpoint ckpt = parse_checkpoint(ckpt_bytes);
  const ModelParams& params = ckpt.params;
  const ModelConfig& mc = params.config();
  const auto records = load_manifest(o.manifest);
  const ActivityResolver resolver(o.activity);

  ChunkConfig cfg = find_preset(o.preset);
  cfg.lookahead_frames = mc.lookahead * mc.subsample;

  const json config{{"model", to_json(mc)}, {"activity", o.activity.to_json()}, {"preset", cfg.preset_name}};
  const json repro = reproducibility(o.activity.seed, config, sha256_hex(ckpt_bytes));
  Output dest(o.out, out);
  std::ostream& os = dest.stream();
  os << json{{"event", "header"},
             {"schema", kStreamSchema},
             {"preset", cfg.preset_name},
             {"chunk_frames", cfg.chunk_frames},
             {"lookahead_frames", cfg.lookahead_frames},
             {"latency_ms", latency_ms(cfg)},
             {"reproducibility", repro}}
            .dump()
     << '\n';

  bool partial = false;
  bool found = o.sample.empty();
  for (std::size_t i = 0; i < records.size(); ++i) {
    const ManifestRecord& rec = records[i];
    if (!o.sample.empty() && rec.id != o.sample) continue;
    found = true;
    std::string error;
    const auto acts = resolver.resolve(rec, i, &error);
    if (!error.empty()) {
      os << json{{"event", "error"}, {"sample", rec.id}, {"error", error}}.dump() << '\n';
      partial = true;
      continue;
    }
    const MixtureSample& s = rec.sample;
    const std::size_t frames = s.features.frames();
    Session session = open_session(params, s.k(), cfg);
    std::size_t consumed = 0;
    std::size_t chunk = 0;
    auto emit = [&](const std::vector<TokenSeq>& tokens, bool final) {
      for (std::size_t j = 0; j < tokens.size(); ++j) {
        os << json{{"event", "chunk"},
                   {"sample", rec.id},
                   {"chunk", chunk},
                   {"slot", j},
                   {"speaker", "spk" + std::to_string(s.speaker_ids[j])},
                   {"tokens", tokens[j].tokens},
                   {"words", render_words(tokens[j])},
                   {"final", final},
                   {"cumulative_latency_ms", static_cast<double>(consumed) * cfg.frame_ms}}
                  .dump()
           << '\n';
      }
      ++chunk;
    };
    while (consumed < frames) {
      const std::size_t n = std::min(cfg.chunk_frames, frames - consumed);
      std::vector<ActivitySeq> ys;
      for (const auto& y : acts) ys.push_back(y.slice(consumed, n));
      const auto tokens = session.push_chunk(s.features.slice(consumed, n), ys);
      consumed += n;
      emit(tokens, false);
    }
    emit(session.finalize(), true);
    const auto hyp = session.hypotheses();
    for (std::size_t j = 0; j < hyp.size(); ++j) {
      os << json{{"event", "transcript"},
                 {"sample", rec.id},
                 {"slot", j},
                 {"speaker", "spk" + std::to_string(s.speaker_ids[j])},
                 {"tokens", hyp[j].tokens},
                 {"words", render_words(hyp[j])}}
                .dump()
         << '\n';
    }
  }
  if (!found) throw ContractError("no sample '" + o.sample + "' in " + o.manifest);
  return partial ? kPartialFailure : kOk;
}

}  // namespace ssa::cli
