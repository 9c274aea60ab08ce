// Copyright 2026 The SSA-ASR Authors
// SPDX-License-Identifier: Apache-2.0

#include "ssa/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "ssa/errors.hpp"

namespace ssa {

double ErrorCounts::rate() const {
  if (ref_words == 0) throw UndefinedRateError("error rate undefined with zero reference words");
  return static_cast<double>(errors()) / static_cast<double>(ref_words);
}

ErrorCounts& ErrorCounts::operator+=(const ErrorCounts& o) {
  substitutions += o.substitutions;
  deletions += o.deletions;
  insertions += o.insertions;
  ref_words += o.ref_words;
  return *this;
}

std::string normalize_word(const std::string& word) {
  std::string out;
  for (unsigned char c : word) {
    if (std::ispunct(c)) continue;
    out.push_back(static_cast<char>(std::tolower(c)));
  }
  return out;
}

Words normalize_text(const std::string& text) {
  std::istringstream in(text);
  Words out;
  std::string w;
  while (in >> w) {
    std::string n = normalize_word(w);
    if (!n.empty()) out.push_back(std::move(n));
  }
  return out;
}

namespace {

template <typename Seq>
ErrorCounts edit_ops_impl(const Seq& ref, const Seq& hyp) {
  // Each cell holds (cost, deletions + insertions); lexicographic minimum.
  struct Cell {
    std::size_t cost = 0, gaps = 0, sub = 0, del = 0, ins = 0;
    bool operator<(const Cell& o) const { return cost != o.cost ? cost < o.cost : gaps < o.gaps; }
  };
  const std::size_t n = ref.size(), m = hyp.size();
  std::vector<Cell> prev(m + 1), cur(m + 1);
  for (std::size_t j = 0; j <= m; ++j) prev[j] = {j, j, 0, 0, j};
  for (std::size_t i = 1; i <= n; ++i) {
    cur[0] = {i, i, 0, i, 0};
    for (std::size_t j = 1; j <= m; ++j) {
      Cell diag = prev[j - 1];
      if (!(ref[i - 1] == hyp[j - 1])) {
        ++diag.cost;
        ++diag.sub;
      }
      Cell del = prev[j];
      ++del.cost, ++del.gaps, ++del.del;
      Cell ins = cur[j - 1];
      ++ins.cost, ++ins.gaps, ++ins.ins;
      Cell best = diag;
      if (del < best) best = del;
      if (ins < best) best = ins;
      cur[j] = best;
    }
    std::swap(prev, cur);
  }
  return {prev[m].sub, prev[m].del, prev[m].ins, n};
}

}  // namespace

ErrorCounts edit_ops(const Words& ref, const Words& hyp) { return edit_ops_impl(ref, hyp); }
ErrorCounts edit_ops(const TokenSeq& ref, const TokenSeq& hyp) {
  return edit_ops_impl(ref.tokens, hyp.tokens);
}

std::vector<std::size_t> hungarian_assignment(const std::vector<std::vector<double>>& cost) {
  const std::size_t n = cost.size();
  for (const auto& row : cost) {
    if (row.size() != n) throw DimensionError("assignment: cost matrix is not square");
  }
  if (n == 0) return {};
  constexpr double kInf = std::numeric_limits<double>::infinity();
  // 1-based potentials formulation; p[j] is the row matched to column j.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(n + 1, kInf);
    std::vector<bool> used(n + 1, false);
    do {
      used[j0] = true;
      const std::size_t i0 = p[j0];
      double delta = kInf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<std::size_t> row_to_col(n);
  for (std::size_t j = 1; j <= n; ++j) row_to_col[p[j] - 1] = j - 1;
  return row_to_col;
}

std::vector<std::size_t> exhaustive_assignment(const std::vector<std::vector<double>>& cost) {
  const std::size_t n = cost.size();
  if (n > 8) throw ContractError("exhaustive assignment limited to 8 rows");
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<std::size_t> best = perm;
  double best_cost = std::numeric_limits<double>::infinity();
  do {
    double c = 0.0;
    for (std::size_t i = 0; i < n; ++i) c += cost[i][perm[i]];
    if (c < best_cost) {
      best_cost = c;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

CpwerResult cpwer(const std::vector<SpeakerWords>& refs, const std::vector<Words>& hyps) {
  if (refs.empty()) throw UndefinedRateError("cpWER undefined without reference speakers");
  std::size_t total = 0;
  for (const auto& r : refs) total += r.words.size();
  if (total == 0) throw UndefinedRateError("cpWER undefined with zero reference words");

  const std::size_t n = std::max(refs.size(), hyps.size());
  const Words empty;
  std::vector<std::vector<ErrorCounts>> counts(n, std::vector<ErrorCounts>(n));
  std::vector<std::vector<double>> cost(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const Words& r = i < refs.size() ? refs[i].words : empty;
      const Words& h = j < hyps.size() ? hyps[j] : empty;
      counts[i][j] = edit_ops(r, h);
      cost[i][j] = static_cast<double>(counts[i][j].errors());
    }
  }
  const auto assign = hungarian_assignment(cost);
  CpwerResult res;
  for (std::size_t i = 0; i < n; ++i) {
    res.counts += counts[i][assign[i]];
    res.assignment.emplace_back(i < refs.size() ? static_cast<long>(i) : -1,
                                assign[i] < hyps.size() ? static_cast<long>(assign[i]) : -1);
  }
  res.rate = res.counts.rate();
  return res;
}

CpwerResult cpwer(const std::vector<TokenSeq>& refs, const std::vector<TokenSeq>& hyps) {
  std::vector<SpeakerWords> r;
  for (std::size_t i = 0; i < refs.size(); ++i) r.push_back({"s" + std::to_string(i), render_words(refs[i])});
  std::vector<Words> h;
  for (const auto& t : hyps) h.push_back(render_words(t));
  return cpwer(r, h);
}

namespace {

using Interval = std::pair<double, double>;

// Union of intervals, sorted.
std::vector<Interval> merge(std::vector<Interval> v) {
  std::sort(v.begin(), v.end());
  std::vector<Interval> out;
  for (const auto& iv : v) {
    if (!out.empty() && iv.first <= out.back().second) {
      out.back().second = std::max(out.back().second, iv.second);
    } else {
      out.push_back(iv);
    }
  }
  return out;
}

std::map<std::string, std::vector<Interval>> by_speaker(const SegmentSet& set, const char* side) {
  std::map<std::string, std::vector<Interval>> out;
  for (const auto& s : set) {
    if (!std::isfinite(s.onset) || !std::isfinite(s.offset) || !(s.offset > s.onset)) {
      throw ContractError(std::string("der: malformed ") + side + " segment for speaker '" + s.speaker + "'");
    }
    out[s.speaker].emplace_back(s.onset, s.offset);
  }
  for (auto& [spk, v] : out) v = merge(std::move(v));
  return out;
}

bool covers(const std::vector<Interval>& v, double t) {
  auto it = std::upper_bound(v.begin(), v.end(), t, [](double x, const Interval& iv) { return x < iv.first; });
  return it != v.begin() && t < std::prev(it)->second;
}

}  // namespace

DerResult der(const SegmentSet& ref, const SegmentSet& hyp, double collar, bool ignore_edges) {
  if (!(collar >= 0.0)) throw ContractError("der: collar must be non-negative");
  const auto rmap = by_speaker(ref, "reference");
  const auto hmap = by_speaker(hyp, "hypothesis");
  std::vector<std::string> rnames, hnames;
  std::vector<const std::vector<Interval>*> rsegs, hsegs;
  for (const auto& [k, v] : rmap) rnames.push_back(k), rsegs.push_back(&v);
  for (const auto& [k, v] : hmap) hnames.push_back(k), hsegs.push_back(&v);

  std::vector<Interval> excluded;
  std::vector<double> cuts;
  double first = std::numeric_limits<double>::infinity();
  double last = -first;
  for (const auto* v : rsegs) {
    for (const auto& [a, b] : *v) {
      cuts.push_back(a), cuts.push_back(b);
      first = std::min(first, a), last = std::max(last, b);
      if (collar > 0.0) {
        excluded.emplace_back(a - collar, a + collar);
        excluded.emplace_back(b - collar, b + collar);
      }
    }
  }
  for (const auto* v : hsegs) {
    for (const auto& [a, b] : *v) cuts.push_back(a), cuts.push_back(b);
  }
  if (rsegs.empty()) throw UndefinedRateError("der undefined without reference speech");
  if (ignore_edges) {
    const double lo = std::min(first, *std::min_element(cuts.begin(), cuts.end())) - 1.0;
    const double hi = std::max(last, *std::max_element(cuts.begin(), cuts.end())) + 1.0;
    excluded.emplace_back(lo, first);
    excluded.emplace_back(last, hi);
  }
  excluded = merge(std::move(excluded));
  for (const auto& [a, b] : excluded) cuts.push_back(a), cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  struct Piece {
    double dur;
    std::vector<std::size_t> r, h;
  };
  std::vector<Piece> pieces;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double mid = 0.5 * (cuts[i] + cuts[i + 1]);
    if (covers(excluded, mid)) continue;
    Piece p{cuts[i + 1] - cuts[i], {}, {}};
    for (std::size_t s = 0; s < rsegs.size(); ++s)
      if (covers(*rsegs[s], mid)) p.r.push_back(s);
    for (std::size_t s = 0; s < hsegs.size(); ++s)
      if (covers(*hsegs[s], mid)) p.h.push_back(s);
    if (!p.r.empty() || !p.h.empty()) pieces.push_back(std::move(p));
  }

  // Speaker mapping maximising scored overlap, as a min-cost assignment on
  // the negated overlap matrix padded to square.
  const std::size_t n = std::max(rnames.size(), hnames.size());
  std::vector<std::vector<double>> cost(n, std::vector<double>(n, 0.0));
  for (const auto& p : pieces)
    for (std::size_t r : p.r)
      for (std::size_t h : p.h) cost[r][h] -= p.dur;
  std::vector<std::size_t> assign = hungarian_assignment(cost);
  if (n <= 8) {
    const auto exact = exhaustive_assignment(cost);
    double a = 0.0, b = 0.0;
    for (std::size_t i = 0; i < n; ++i) a += cost[i][assign[i]], b += cost[i][exact[i]];
    if (std::abs(a - b) > 1e-9 * std::max(1.0, std::abs(b))) {
      throw NumericError("der: Hungarian mapping disagrees with exhaustive search");
    }
    assign = exact;
  }

  DerResult res;
  for (std::size_t r = 0; r < rnames.size(); ++r) {
    if (assign[r] < hnames.size() && cost[r][assign[r]] < 0.0) res.mapping.emplace_back(rnames[r], hnames[assign[r]]);
  }
  for (const auto& p : pieces) {
    const double nr = static_cast<double>(p.r.size());
    const double nh = static_cast<double>(p.h.size());
    std::size_t correct = 0;
    for (std::size_t r : p.r) {
      if (assign[r] < hnames.size() && cost[r][assign[r]] < 0.0 &&
          std::find(p.h.begin(), p.h.end(), assign[r]) != p.h.end()) {
        ++correct;
      }
    }
    res.scored_ref += nr * p.dur;
    res.miss += std::max(0.0, nr - nh) * p.dur;
    res.false_alarm += std::max(0.0, nh - nr) * p.dur;
    res.confusion += (std::min(nr, nh) - static_cast<double>(correct)) * p.dur;
  }
  if (res.scored_ref <= 0.0) throw UndefinedRateError("der undefined: no scored reference time");
  res.rate = (res.miss + res.false_alarm + res.confusion) / res.scored_ref;
  return res;
}

}  // namespace ssa
