#include "rw/limits.hpp"

#include <algorithm>
#include <sstream>

#include "rw/errors.hpp"

namespace rw {

void Schedule::validate() const {
  if (sizes.empty()) throw Error("schedule needs at least one domain size");
  if (stages.empty()) throw Error("schedule needs at least one tolerance stage");
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (sizes[i] == 0) throw Error("domain sizes must be positive");
    if (i && sizes[i] <= sizes[i - 1]) throw Error("domain sizes must be strictly increasing");
  }
  for (std::size_t s = 1; s < stages.size(); ++s) {
    const auto& prev = stages[s - 1].values();
    const auto& cur = stages[s].values();
    if (prev.size() != cur.size()) throw Error("every stage must cover the same tolerance indices");
    for (const auto& [i, tau] : cur) {
      auto it = prev.find(i);
      if (it == prev.end()) throw Error("every stage must cover the same tolerance indices");
      if (!(tau < it->second)) throw Error("tolerance stages must decrease strictly in every index");
    }
  }
}

Schedule Schedule::uniform(std::vector<unsigned> sizes, const std::vector<Rational>& taus,
                           const std::set<unsigned>& indices) {
  Schedule s;
  s.sizes = std::move(sizes);
  if (indices.empty()) {
    s.stages.emplace_back();
  } else {
    for (const auto& t : taus) s.stages.push_back(ToleranceVector::uniform(indices, t));
  }
  return s;
}

Schedule default_schedule(const Vocabulary& vocab, const Formula& kb, const Formula& query) {
  std::set<unsigned> indices = tolerance_indices(kb);
  auto qi = tolerance_indices(query);
  indices.insert(qi.begin(), qi.end());
  std::vector<unsigned> sizes;
  unsigned top = vocab.is_unary() ? 8 : 5;
  for (unsigned n = 2; n <= top; ++n) sizes.push_back(n);
  return Schedule::uniform(sizes, {Rational(1, 4), Rational(1, 8), Rational(1, 16)}, indices);
}

const char* status_name(Status s) {
  switch (s) {
    case Status::Converged: return "converged";
    case Status::Nonrobust: return "nonrobust";
    case Status::Undefined: return "undefined";
    case Status::BudgetLimited: return "budget-limited";
    case Status::Unconverged: return "unconverged";
  }
  return "?";
}

const char* consistency_name(Consistency c) {
  switch (c) {
    case Consistency::ConsistentEvidence: return "consistent-evidence";
    case Consistency::InconsistentEvidence: return "inconsistent-evidence";
    case Consistency::Inconclusive: return "inconclusive";
  }
  return "?";
}

std::string decimal(const mpq_class& q, int digits) {
  mpz_class scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, digits);
  mpz_class num = q.get_num() * scale;
  mpz_class whole;
  mpz_tdiv_q(whole.get_mpz_t(), num.get_mpz_t(), q.get_den().get_mpz_t());
  bool negative = whole < 0 || (whole == 0 && q < 0);
  mpz_class mag = abs(whole);
  std::string digits_text = mag.get_str();
  if (static_cast<int>(digits_text.size()) <= digits)
    digits_text = std::string(digits + 1 - digits_text.size(), '0') + digits_text;
  std::string out = digits_text.substr(0, digits_text.size() - digits);
  if (digits > 0) out += "." + digits_text.substr(digits_text.size() - digits);
  return negative ? "-" + out : out;
}

namespace {

mpq_class to_q(const Rational& r) { return r.to_mpq(); }

// The last ceil(n/2) entries of the computed sizes.
std::vector<unsigned> top_half(const std::vector<unsigned>& sizes) {
  std::size_t keep = (sizes.size() + 1) / 2;
  return std::vector<unsigned>(sizes.end() - keep, sizes.end());
}

StageSummary summarize(const std::vector<GridCell>& cells, const std::vector<unsigned>& top) {
  StageSummary s;
  for (const auto& c : cells) {
    if (std::find(top.begin(), top.end(), c.n) == top.end()) continue;
    if (c.budget_limited || !c.p.defined) continue;
    if (!s.defined) {
      s.min = s.max = c.p.value;
      s.defined = true;
    }
    s.min = std::min(s.min, c.p.value);
    s.max = std::max(s.max, c.p.value);
    if (c.n >= s.representative_n) {
      s.representative = c.p.value;
      s.representative_n = c.n;
    }
  }
  return s;
}

}  // namespace

BeliefEstimate degree_of_belief(const Vocabulary& vocab, const Formula& query, const Formula& kb,
                                const Schedule& schedule, const Thresholds& thresholds, const CountOptions& opts) {
  schedule.validate();
  BeliefEstimate est;

  // Index-skewed probes at the smallest stage when several indices occur.
  // Scaling tau_i by 4 is realized as dividing every other index by 4: the
  // ratios are the same, and no probe is looser than the stage itself, so a
  // robust KB does not pick up the O(tau) shift of a looser tolerance.
  std::set<unsigned> indices = tolerance_indices(kb);
  auto qi = tolerance_indices(query);
  indices.insert(qi.begin(), qi.end());
  const ToleranceVector& smallest = schedule.stages.back();
  if (indices.size() >= 2) {
    for (unsigned i : indices) {
      for (bool up : {true, false}) {
        Probe p;
        p.tol = smallest;
        for (unsigned j : indices)
          if ((j == i) != up) p.tol.set(j, smallest.at(j) / Rational(4));
        p.label = "eps" + std::to_string(i) + (up ? " x4" : " /4");
        bool seen = false;
        for (const auto& q : est.probes) seen |= q.tol == p.tol;
        if (!seen) est.probes.push_back(p);
      }
    }
  }

  std::vector<ToleranceVector> all = schedule.stages;
  for (const auto& p : est.probes) all.push_back(p.tol);

  std::vector<unsigned> computed;
  std::vector<std::vector<GridCell>> per_stage(all.size());
  bool budget_hit = false;
  for (unsigned n : schedule.sizes) {
    if (budget_hit) {
      for (std::size_t s = 0; s < schedule.stages.size(); ++s) {
        GridCell c{n, s, {}, true};
        est.grid.push_back(c);
      }
      continue;
    }
    try {
      auto probs = conditional_probabilities(vocab, n, all, query, kb, opts);
      computed.push_back(n);
      for (std::size_t s = 0; s < all.size(); ++s) {
        GridCell c{n, s, probs[s], false};
        per_stage[s].push_back(c);
        if (s < schedule.stages.size()) est.grid.push_back(c);
      }
    } catch (const BudgetExceeded& e) {
      budget_hit = true;
      est.diagnostics.push_back(std::string("budget: ") + e.what() + " (required " + e.required() + ", cap " +
                                e.cap() + ")");
      for (std::size_t s = 0; s < schedule.stages.size(); ++s) est.grid.push_back(GridCell{n, s, {}, true});
    }
  }
  if (computed.empty()) {
    est.status = Status::BudgetLimited;
    est.diagnostics.push_back("no domain size fits the evaluation budget");
    return est;
  }

  std::vector<unsigned> top = top_half(computed);
  for (std::size_t s = 0; s < schedule.stages.size(); ++s) est.stages.push_back(summarize(per_stage[s], top));
  for (std::size_t p = 0; p < est.probes.size(); ++p) {
    StageSummary sum = summarize(per_stage[schedule.stages.size() + p], top);
    est.probes[p].defined = sum.defined;
    est.probes[p].representative = sum.representative;
    est.probes[p].representative_n = sum.representative_n;
  }

  for (std::size_t s = 0; s < est.stages.size(); ++s) {
    if (!est.stages[s].defined) {
      est.status = Status::Undefined;
      est.diagnostics.push_back("stage " + std::to_string(s) + " (" + schedule.stages[s].str() +
                                "): every top-half entry is undefined");
      return est;
    }
  }
  const StageSummary& last = est.stages.back();
  est.value = last.representative;

  bool converged = true;
  for (std::size_t s = 0; s < est.stages.size(); ++s) {
    mpq_class spread = est.stages[s].max - est.stages[s].min;
    if (spread > to_q(thresholds.delta_n)) {
      converged = false;
      est.diagnostics.push_back("stage " + std::to_string(s) + ": spread " + decimal(spread) +
                                " over the top half exceeds delta_N");
    }
    if (s > 0) {
      mpq_class drift = abs(est.stages[s].representative - est.stages[s - 1].representative);
      if (drift > to_q(thresholds.delta_eps)) {
        converged = false;
        est.diagnostics.push_back("stages " + std::to_string(s - 1) + "->" + std::to_string(s) + ": drift " +
                                  decimal(drift) + " exceeds delta_eps");
      }
    }
  }

  bool nonrobust = false;
  if (!est.probes.empty()) {
    mpq_class lo = last.representative, hi = last.representative;
    for (const auto& p : est.probes) {
      if (!p.defined) {
        est.diagnostics.push_back("probe " + p.label + ": undefined on the top half");
        continue;
      }
      lo = std::min(lo, p.representative);
      hi = std::max(hi, p.representative);
    }
    if (hi - lo > to_q(thresholds.delta_eps)) {
      nonrobust = true;
      est.diagnostics.push_back("skewed tolerance probes disagree: representatives range over [" + decimal(lo) +
                                ", " + decimal(hi) + "]");
    }
  }

  if (budget_hit)
    est.status = Status::BudgetLimited;
  else if (nonrobust)
    est.status = Status::Nonrobust;
  else if (converged)
    est.status = Status::Converged;
  else
    est.status = Status::Unconverged;
  return est;
}

ConsistencyReport eventually_consistent(const Vocabulary& vocab, const Formula& kb, const Schedule& schedule,
                                        const CountOptions& opts) {
  schedule.validate();
  ConsistencyReport rep;
  std::vector<unsigned> computed;
  std::vector<std::vector<mpz_class>> counts(schedule.stages.size());
  for (unsigned n : schedule.sizes) {
    std::vector<Formula> kbs;
    for (const auto& tol : schedule.stages) kbs.push_back(ground(kb, tol));
    try {
      BatchCounts b = count_batch(vocab, n, kbs, {}, std::vector<int>(kbs.size(), -1), opts);
      computed.push_back(n);
      for (std::size_t s = 0; s < kbs.size(); ++s) {
        counts[s].push_back(b.kb[s]);
        GridCell c;
        c.n = n;
        c.stage = s;
        c.p.kb_count = b.kb[s];
        c.p.defined = b.kb[s] > 0;
        rep.grid.push_back(c);
      }
    } catch (const BudgetExceeded& e) {
      rep.diagnostics.push_back(std::string("budget: ") + e.what());
      break;
    }
  }
  if (computed.empty()) return rep;

  std::size_t keep = (computed.size() + 1) / 2;
  const auto& smallest = counts.back();
  bool consistent = true;
  for (std::size_t i = computed.size() - keep; i < computed.size(); ++i)
    if (smallest[i] == 0) consistent = false;
  if (consistent) {
    rep.verdict = Consistency::ConsistentEvidence;
    return rep;
  }
  for (std::size_t s = 0; s < counts.size(); ++s) {
    std::size_t onset = computed.size();
    while (onset > 0 && counts[s][onset - 1] == 0) --onset;
    if (onset < computed.size()) {
      rep.verdict = Consistency::InconsistentEvidence;
      rep.diagnostics.push_back("stage " + std::to_string(s) + " (" + schedule.stages[s].str() +
                                "): no world for every N >= " + std::to_string(computed[onset]));
      return rep;
    }
  }
  return rep;
}

}  // namespace rw
