// Copyright 2026 The SSA-ASR Authors
// SPDX-License-Identifier: Apache-2.0

#include <map>
#include <set>
#include <sstream>

#include "cli/cli.hpp"
#include "ssa/errors.hpp"

namespace ssa::cli {

using nlohmann::json;

namespace {

std::vector<TranscriptRecord> load_transcripts(const std::string& path) {
  std::istringstream in(slurp(path));
  return read_transcripts(in, path);
}

std::map<std::string, SegmentSet> load_rttm(const std::string& path) {
  std::istringstream in(slurp(path));
  return read_rttm(in, path);
}

json score_transcripts(const ScoreOptions& o, std::vector<TableRow>& table) {
  const auto refs = load_transcripts(o.ref);
  const auto hyps = load_transcripts(o.hyp);
  std::map<std::string, const TranscriptRecord*> by_id;
  for (const auto& h : hyps) {
    if (!by_id.emplace(h.id, &h).second) throw ContractError(o.hyp + ": duplicate id '" + h.id + "'");
  }
  std::set<std::string> ref_ids;
  ErrorCounts total;
  json samples = json::array();
  json missing = json::array();
  for (const auto& r : refs) {
    if (!ref_ids.insert(r.id).second) throw ContractError(o.ref + ": duplicate id '" + r.id + "'");
    std::vector<Words> hyp_words;
    json hyp_speakers = json::array();
    auto it = by_id.find(r.id);
    if (it == by_id.end()) {
      missing.push_back(r.id);
    } else {
      for (const auto& s : it->second->speakers) {
        hyp_words.push_back(s.words);
        hyp_speakers.push_back(s.speaker);
      }
    }
    std::size_t ref_words = 0;
    for (const auto& s : r.speakers) ref_words += s.words.size();
    json sample{{"id", r.id}};
    if (ref_words == 0) {
      // Nothing to permute against: every hypothesis word is an insertion.
      ErrorCounts c;
      for (const auto& w : hyp_words) c.insertions += w.size();
      total += c;
      sample["counts"] = counts_json(c);
      sample["assignment"] = nullptr;
    } else {
      const CpwerResult res = cpwer(r.speakers, hyp_words);
      total += res.counts;
      sample["counts"] = counts_json(res.counts);
      json a = json::array();
      for (const auto& [ri, hi] : res.assignment) {
        a.push_back({{"ref", ri < 0 ? json(nullptr) : json(r.speakers[static_cast<std::size_t>(ri)].speaker)},
                     {"hyp", hi < 0 ? json(nullptr) : hyp_speakers[static_cast<std::size_t>(hi)]}});
      }
      sample["assignment"] = a;
    }
    samples.push_back(sample);
  }
  for (const auto& h : hyps) {
    if (!ref_ids.count(h.id)) throw ContractError(o.hyp + ": id '" + h.id + "' has no reference");
  }
  table.push_back({"score", "transcripts", "all", refs.size(), total});
  return {{"ref", o.ref}, {"hyp", o.hyp}, {"counts", counts_json(total)}, {"samples", samples},
          {"missing_hypotheses", missing}};
}

json score_rttm(const ScoreOptions& o) {
  const auto ref = load_rttm(o.ref_rttm);
  const auto hyp = load_rttm(o.hyp_rttm);
  for (const auto& [file, segs] : hyp) {
    if (!ref.count(file)) throw ContractError(o.hyp_rttm + ": file '" + file + "' has no reference");
  }
  double miss = 0.0, fa = 0.0, conf = 0.0, scored = 0.0;
  json files = json::array();
  for (const auto& [file, segs] : ref) {
    auto it = hyp.find(file);
    const DerResult r = der(segs, it == hyp.end() ? SegmentSet{} : it->second, o.collar, o.ignore_edges);
    miss += r.miss;
    fa += r.false_alarm;
    conf += r.confusion;
    scored += r.scored_ref;
    json mapping = json::object();
    for (const auto& [a, b] : r.mapping) mapping[a] = b;
    files.push_back({{"file", file}, {"rate", r.rate}, {"miss", r.miss}, {"false_alarm", r.false_alarm},
                     {"confusion", r.confusion}, {"scored_ref", r.scored_ref}, {"mapping", mapping}});
  }
  if (scored <= 0.0) throw UndefinedRateError("DER: no scored reference speech in " + o.ref_rttm);
  return {{"ref", o.ref_rttm},
          {"hyp", o.hyp_rttm},
          {"collar", o.collar},
          {"ignore_edges", o.ignore_edges},
          {"rate", (miss + fa + conf) / scored},
          {"miss", miss},
          {"false_alarm", fa},
          {"confusion", conf},
          {"scored_ref", scored},
          {"files", files}};
}

}  // namespace

int run_score(const ScoreOptions& o, std::ostream& out) {
  const bool words = !o.ref.empty() || !o.hyp.empty();
  const bool rttm = !o.ref_rttm.empty() || !o.hyp_rttm.empty();
  if (words && (o.ref.empty() || o.hyp.empty())) throw ContractError("--ref and --hyp go together");
  if (rttm && (o.ref_rttm.empty() || o.hyp_rttm.empty())) {
    throw ContractError("--ref-rttm and --hyp-rttm go together");
  }
  if (!words && !rttm) throw ContractError("score needs transcripts (--ref/--hyp) or RTTM (--ref-rttm/--hyp-rttm)");
  if (o.collar < 0.0) throw ContractError("--collar must be non-negative");

  const json config{{"collar", o.collar}, {"ignore_edges", o.ignore_edges}};
  json report{{"schema", kMetricsSchema},
              {"command", "score"},
              {"reproducibility", reproducibility(std::nullopt, config, std::nullopt)}};
  std::vector<TableRow> table;
  if (words) report["cpwer"] = score_transcripts(o, table);
  if (rttm) report["der"] = score_rttm(o);

  if (o.out.empty() || o.out == "-") {
    out << report.dump(2) << '\n';
    return kOk;
  }
  Output file(o.out, out);
  file.stream() << report.dump(2) << '\n';
  if (words) print_table(out, table);
  if (rttm) {
    const json& d = report["der"];
    char buf[160];
    std::snprintf(buf, sizeof buf, "DER %.4f%%  miss %.3fs  fa %.3fs  conf %.3fs  scored %.3fs\n",
                  100.0 * d["rate"].get<double>(), d["miss"].get<double>(), d["false_alarm"].get<double>(),
                  d["confusion"].get<double>(), d["scored_ref"].get<double>());
    out << buf;
  }
  return kOk;
}

}  // namespace ssa::cli
