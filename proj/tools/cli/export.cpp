// Copyright 2026 The SSA-ASR Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include "cli/cli.hpp"
#include "ssa/checkpoint.hpp"
#include "ssa/errors.hpp"
#include "ssa/serialize.hpp"

namespace ssa::cli {

using nlohmann::json;

int run_export(const ExportOptions& o, std::ostream& out) {
  const std::string ckpt_bytes = slurp(o.checkpoint);
  const LoadedCheckpoint ckpt = parse_checkpoint(ckpt_bytes);
  const ModelParams& params = ckpt.params;
  const auto records = load_manifest(o.manifest);
  if (records.empty()) throw ContractError(o.manifest + " holds no samples");
  std::size_t index = 0;
  if (!o.sample.empty()) {
    while (index < records.size() && records[index].id != o.sample) ++index;
    if (index == records.size()) throw ContractError("no sample '" + o.sample + "' in " + o.manifest);
  }
  const ManifestRecord& rec = records[index];
  const ActivityResolver resolver(o.activity);
  std::string error;
  const auto acts = resolver.resolve(rec, index, &error);
  if (!error.empty()) throw ContractError(rec.id + ": " + error);

  const MixtureSample& s = rec.sample;
  std::vector<Tensor> states;
  for (const auto& y : acts) states.push_back(encode(params, s.features, y));

  const json config{{"model", to_json(params.config())}, {"activity", o.activity.to_json()},
                    {"sample", rec.id}, {"baseline", o.baseline}};
  Output dest(o.out, out);
  std::ostream& os = dest.stream();
  os << json{{"event", "header"},
             {"schema", kEmbeddingSchema},
             {"sample", rec.id},
             {"k", s.k()},
             {"frames", states.front().rows()},
             {"dim", states.front().cols()},
             {"reproducibility", reproducibility(o.activity.seed, config, sha256_hex(ckpt_bytes))}}
            .dump()
     << '\n';
  auto write_rows = [&](const Tensor& h, json slot, json speaker) {
    const auto d = h.data();
    const std::size_t dim = h.cols();
    for (std::size_t t = 0; t < h.rows(); ++t) {
      std::vector<double> row(d.begin() + static_cast<std::ptrdiff_t>(t * dim),
                              d.begin() + static_cast<std::ptrdiff_t>((t + 1) * dim));
      os << json{{"event", "state"}, {"slot", slot}, {"speaker", speaker}, {"frame", t}, {"state", row}}.dump()
         << '\n';
    }
  };
  for (std::size_t j = 0; j < states.size(); ++j) {
    write_rows(states[j], j, "spk" + std::to_string(s.speaker_ids[j]));
  }
  if (o.baseline) {
    const ModelParams plain = without_injection(params);
    const auto zeros = ActivitySeq::zeros(s.features.frames(), s.features.frame_ms);
    write_rows(encode(plain, s.features, zeros), "baseline", nullptr);
  }

  // Mean Euclidean distance between slots, frame by frame, over all pairs.
  double total = 0.0;
  std::size_t pairs = 0;
  for (std::size_t a = 0; a < states.size(); ++a) {
    for (std::size_t b = a + 1; b < states.size(); ++b) {
      const auto x = states[a].data();
      const auto y = states[b].data();
      const std::size_t dim = states[a].cols();
      for (std::size_t t = 0; t < states[a].rows(); ++t) {
        double sq = 0.0;
        for (std::size_t c = 0; c < dim; ++c) {
          const double diff = x[t * dim + c] - y[t * dim + c];
          sq += diff * diff;
        }
        total += std::sqrt(sq);
        ++pairs;
      }
    }
  }
  json summary{{"event", "summary"}, {"sample", rec.id}};
  summary["mean_pairwise_distance"] = pairs == 0 ? json(nullptr) : json(total / static_cast<double>(pairs));
  os << summary.dump() << '\n';
  return kOk;
}

}  // namespace ssa::cli
