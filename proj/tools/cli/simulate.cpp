// Copyright 2026 The SSA-ASR Authors
// SPDX-License-Identifier: Apache-2.0

#include <random>

#include "cli/cli.hpp"
#include "ssa/errors.hpp"
#include "ssa/serialize.hpp"

namespace ssa::cli {

using nlohmann::json;

int run_simulate(const SimulateOptions& o, std::ostream& out) {
  SimConfig sim;
  if (!o.sim_config.empty()) sim = sim_config_from_json(read_json_file(o.sim_config));
  if (o.overlap == "full") {
    sim.max_delay_fraction = 0.0;
  } else if (o.overlap != "random") {
    throw ContractError("--overlap must be 'random' or 'full'");
  }
  sim.validate();
  if (o.ratios.size() != 3) throw ContractError("--ratios takes three values (1-mix, 2-mix, 3-mix)");
  const MixRatios ratios{o.ratios[0], o.ratios[1], o.ratios[2]};

  const json config{{"sim", to_json(sim)}, {"ratios", o.ratios}, {"count", o.count}};
  const json repro = reproducibility(o.seed, config, std::nullopt);

  const auto pool = make_speaker_pool(sim);
  std::mt19937_64 rng(o.seed);
  Output manifest(o.out, out);
  std::unique_ptr<Output> rttm;
  std::unique_ptr<Output> transcripts;
  if (!o.rttm.empty()) rttm = std::make_unique<Output>(o.rttm, out);
  if (!o.transcripts.empty()) transcripts = std::make_unique<Output>(o.transcripts, out);

  std::size_t counts[3] = {0, 0, 0};
  for (std::size_t i = 0; i < o.count; ++i) {
    ManifestRecord rec;
    rec.id = o.id_prefix + std::to_string(i);
    rec.sample = sample_mixture(rng, ratios, pool, sim);
    rec.provenance = {{"index", i}, {"reproducibility", repro}};
    ++counts[rec.sample.k() - 1];
    manifest.stream() << manifest_json(rec).dump() << '\n';
    if (rttm) write_rttm(rttm->stream(), rec.id, reference_segments(rec));
    if (transcripts) transcripts->stream() << transcript_json(reference_transcript(rec)).dump() << '\n';
  }
  if (o.out != "-") {
    out << json{{"event", "simulate"},
                {"samples", o.count},
                {"k_counts", {counts[0], counts[1], counts[2]}},
                {"reproducibility", repro}}
               .dump()
        << '\n';
  }
  return kOk;
}

}  // namespace ssa::cli
