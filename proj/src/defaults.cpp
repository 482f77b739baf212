#include "rw/defaults.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

#include "rw/corpus.hpp"
#include "rw/errors.hpp"
#include "rw/parser.hpp"
#include "rw/printer.hpp"

namespace rw {

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Yes: return "yes";
    case Verdict::No: return "no";
    case Verdict::Nonrobust: return "nonrobust";
    case Verdict::Unknown: return "unknown";
  }
  return "?";
}

// ---------------------------------------------------------------- rules

namespace {

Vocabulary letter_vocab(const std::vector<std::string>& letters) {
  Vocabulary v;
  for (const auto& l : letters) v.add_predicate(l, 1);
  return v;
}

bool ident_char(char ch) { return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_'; }

// Appends "(x)" to every letter so the text parses as a formula in x.
std::string lift(const std::string& text, const std::vector<std::string>& letters) {
  std::string out;
  std::size_t i = 0;
  while (i < text.size()) {
    if (ident_char(text[i])) {
      std::size_t j = i;
      while (j < text.size() && ident_char(text[j])) ++j;
      std::string word = text.substr(i, j - i);
      out += word;
      if (std::find(letters.begin(), letters.end(), word) != letters.end()) out += "(x)";
      i = j;
    } else {
      out += text[i++];
    }
  }
  return out;
}

}  // namespace

Formula parse_letters(const std::string& text, const std::vector<std::string>& letters) {
  Formula wrapped = parse_formula("exists x (" + lift(text, letters) + ")", letter_vocab(letters));
  return wrapped.sub[0];
}

DefaultRule parse_default_rule(const std::string& text, const std::vector<std::string>& letters) {
  std::size_t arrow = text.find("->");
  if (arrow == std::string::npos) throw ParseError("default rule needs '->'", 1, 1);
  std::string lhs = text.substr(0, arrow);
  std::string rhs = text.substr(arrow + 2);
  DefaultRule rule;
  std::size_t open = rhs.rfind('[');
  if (open != std::string::npos) {
    std::size_t close = rhs.find(']', open);
    if (close == std::string::npos) throw ParseError("unterminated rule index", 1, arrow + 3 + open);
    std::string idx = rhs.substr(open + 1, close - open - 1);
    try {
      rule.index = static_cast<unsigned>(std::stoul(idx));
    } catch (const std::exception&) {
      throw ParseError("bad rule index '" + idx + "'", 1, arrow + 3 + open);
    }
    if (rule.index == 0) throw ParseError("rule indices are positive", 1, arrow + 3 + open);
    rhs = rhs.substr(0, open);
  }
  rule.antecedent = parse_letters(lhs, letters);
  rule.consequent = parse_letters(rhs, letters);
  return rule;
}

// ---------------------------------------------------------------- entailment

EntailmentVerdict default_entails(const Vocabulary& vocab, const Formula& kb, const Formula& phi,
                                  const Schedule& schedule, const Thresholds& thresholds, const CountOptions& opts) {
  EntailmentVerdict out;
  out.estimate = degree_of_belief(vocab, phi, kb, schedule, thresholds, opts);
  const mpq_class one_minus = 1 - thresholds.delta_eps.to_mpq();
  switch (out.estimate.status) {
    case Status::Converged:
      out.verdict = *out.estimate.value >= one_minus ? Verdict::Yes : Verdict::No;
      break;
    case Status::Nonrobust:
      out.verdict = Verdict::Nonrobust;
      break;
    default:
      out.verdict = Verdict::Unknown;
      out.diagnostics.push_back(std::string("estimate status ") + status_name(out.estimate.status));
  }
  return out;
}

std::vector<Rational> default_maxent_taus(unsigned k) {
  std::vector<Rational> out;
  Rational t(1, 4);
  for (unsigned i = 0; i < k; ++i) {
    t = t / Rational(4);
    out.push_back(t);
  }
  return out;
}

MaxentVerdict maxent_entails(const Vocabulary& vocab, const Formula& kb, const Formula& phi,
                             const std::optional<Formula>& context, const std::vector<Rational>& taus,
                             const std::vector<std::map<unsigned, unsigned>>& probes, const Thresholds& thresholds) {
  MaxentVerdict out;
  const double delta = thresholds.delta_eps.to_double();
  out.limit = maxent_limit(vocab, kb, phi, context, taus, {}, delta);
  std::optional<double> lo = out.limit.value, hi = out.limit.value;
  bool probes_converged = true;
  for (const auto& powers : probes) {
    out.probes.push_back(maxent_limit(vocab, kb, phi, context, taus, powers, delta));
    const auto& p = out.probes.back();
    probes_converged = probes_converged && p.converged;
    if (!p.value) continue;
    lo = lo ? std::min(*lo, *p.value) : *p.value;
    hi = hi ? std::max(*hi, *p.value) : *p.value;
  }
  if (lo && hi && *hi - *lo > delta) {
    out.verdict = Verdict::Nonrobust;
    std::ostringstream os;
    os << "probes disagree: values range over [" << *lo << ", " << *hi << "]";
    out.diagnostics.push_back(os.str());
    return out;
  }
  if (!out.limit.value || !out.limit.converged || !probes_converged) {
    out.diagnostics.push_back("the tolerance sequence did not stabilize");
    return out;
  }
  out.verdict = *out.limit.value >= 1 - delta ? Verdict::Yes : Verdict::No;
  return out;
}

// ---------------------------------------------------------------- Dempster

Rational dempster_combine(const std::vector<Rational>& alphas) {
  if (alphas.empty()) throw UndefinedInput("dempster_combine needs at least one argument");
  bool zero = false, one = false;
  mpq_class pos = 1, neg = 1;
  for (const auto& a : alphas) {
    if (a < Rational(0) || a > Rational(1)) throw UndefinedInput("arguments must lie in [0,1], got " + a.str());
    zero = zero || a.is_zero();
    one = one || a == Rational(1);
    pos *= a.to_mpq();
    neg *= 1 - a.to_mpq();
  }
  if (zero && one) throw UndefinedInput("undefined when one argument is 0 and another is 1");
  mpq_class v = pos / (pos + neg);
  v.canonicalize();
  return Rational::from_mpq(v);
}

// ---------------------------------------------------------------- suites

bool SuiteReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const PropertyCheck& c) { return c.passed; });
}

namespace {

struct Triple {
  std::string kb;      // corpus name
  std::string phi;
  std::string theta;
};

// Finite-N triples: small vocabularies so N <= 5 stays inside the budget.
const std::vector<Triple>& triples() {
  static const std::vector<Triple> t = {
      {"hepatitis", "Hep(Eric)", "exists x (Hep(x) and not Jaun(x))"},
      {"tweety", "Fly(Tweety)", "exists x (Penguin(x) and Fly(x))"},
      {"lottery", "Winner(c)", "exists x (Ticket(x) and not Winner(x))"},
      {"unique_names", "c1 = c2", "c2 = c3"},
      {"nixon_shared", "Pacifist(Nixon)", "exists x (Quaker(x) and not Republican(x))"},
      {"white", "White(c)", "exists x White(x)"},
      {"independence", "Hep(Eric)", "Over60(Eric)"},
      {"flying_bird", "Bird(Opus)", "FlyingBird(Tweety)"},
  };
  return t;
}

std::string q(const mpq_class& v) { return mpq_str(v); }

Schedule finite_schedule(const Formula& kb, const Formula& phi, const Formula& theta) {
  std::set<unsigned> idx = tolerance_indices(kb);
  for (const auto* f : {&phi, &theta}) {
    auto more = tolerance_indices(*f);
    idx.insert(more.begin(), more.end());
  }
  return Schedule::uniform({2, 3, 4, 5}, {Rational(1, 4), Rational(1, 8)}, idx);
}

void exact_identities(const std::string& dir, const CountOptions& opts, SuiteReport& rep) {
  for (const auto& t : triples()) {
    CorpusCase c = load_case(dir, t.kb);
    const Vocabulary& v = c.kb.vocab;
    const Formula& kb = c.kb.formula;
    Formula phi = parse_formula(t.phi, v), theta = parse_formula(t.theta, v);
    Formula nphi = Formula::negation(phi), ntheta = Formula::negation(theta);
    Schedule s = finite_schedule(kb, phi, theta);
    PropertyCheck cond{"conditioning identity on " + t.kb, true, ""};
    PropertyCheck comp{"complementarity on " + t.kb, true, ""};
    PropertyCheck refl{"finite reflexivity on " + t.kb, true, ""};
    PropertyCheck weak{"finite right weakening on " + t.kb, true, ""};
    int checked = 0;
    for (unsigned n : s.sizes) {
      try {
        auto pf = conditional_probabilities(v, n, s.stages, phi, kb, opts);
        auto pnf = conditional_probabilities(v, n, s.stages, nphi, kb, opts);
        auto pt = conditional_probabilities(v, n, s.stages, theta, kb, opts);
        auto pft = conditional_probabilities(v, n, s.stages, phi, Formula::conjunction(kb, theta), opts);
        auto pfnt = conditional_probabilities(v, n, s.stages, phi, Formula::conjunction(kb, ntheta), opts);
        auto pkk = conditional_probabilities(v, n, s.stages, kb, kb, opts);
        auto por = conditional_probabilities(v, n, s.stages, Formula::disjunction(phi, theta), kb, opts);
        for (std::size_t i = 0; i < s.stages.size(); ++i) {
          std::string at = " at N=" + std::to_string(n) + ", " + s.stages[i].str();
          if (!pf[i].defined) continue;
          ++checked;
          if (pf[i].value + pnf[i].value != 1) {
            comp.passed = false;
            comp.detail = "sum " + q(pf[i].value + pnf[i].value) + at;
          }
          if (!pkk[i].defined || pkk[i].value != 1) {
            refl.passed = false;
            refl.detail = "Pr(KB|KB) = " + pkk[i].str() + at;
          }
          if (por[i].value < pf[i].value) {
            weak.passed = false;
            weak.detail = "Pr(phi or theta) < Pr(phi)" + at;
          }
          mpq_class rhs = 0;
          if (pft[i].defined) rhs += pft[i].value * pt[i].value;
          if (pfnt[i].defined) rhs += pfnt[i].value * (1 - pt[i].value);
          if (rhs != pf[i].value) {
            cond.passed = false;
            cond.detail = q(pf[i].value) + " != " + q(rhs) + at;
          }
        }
      } catch (const BudgetExceeded&) {
        break;
      }
    }
    for (auto* p : {&cond, &comp, &refl, &weak}) {
      if (checked == 0) {
        p->passed = false;
        p->detail = "no defined grid cell";
      } else if (p->passed) {
        p->detail = std::to_string(checked) + " defined cells";
      }
      rep.checks.push_back(*p);
    }
  }
}

PropertyCheck maxent_check(const std::string& name, const CorpusCase& c, const Formula& kb, const std::string& phi,
                           Verdict want, const Thresholds& th) {
  PropertyCheck out{name, false, ""};
  try {
    Formula f = parse_formula(phi, c.kb.vocab);
    MaxentVerdict v = maxent_entails(c.kb.vocab, kb, f, std::nullopt, default_maxent_taus(), {}, th);
    out.passed = v.verdict == want;
    std::ostringstream os;
    os << "verdict " << verdict_name(v.verdict);
    if (v.limit.value) os << ", value " << *v.limit.value;
    out.detail = os.str();
  } catch (const Error& e) {
    out.detail = e.what();
  }
  return out;
}

Formula with(const CorpusCase& c, const Formula& base, const std::string& extra) {
  return Formula::conjunction(base, parse_formula(extra, c.kb.vocab));
}

void limit_properties(const std::string& dir, const Thresholds& th, SuiteReport& rep) {
  // Broken arm: the KB without the disjunctive fact about Eric.
  CorpusCase arm = load_case(dir, "broken_arm");
  std::vector<Formula> general;
  for (const auto& s : arm.kb.statements)
    if (constants_of(s).empty()) general.push_back(s);
  Formula base = Formula::all_of(general);
  const std::string weak = "not LeftUsable(Eric) or not RightUsable(Eric)";
  const std::string some = "LeftUsable(Eric) or RightUsable(Eric)";
  Formula left = with(arm, base, "LeftBroken(Eric)");
  Formula right = with(arm, base, "RightBroken(Eric)");
  Formula either = with(arm, base, "LeftBroken(Eric) or RightBroken(Eric)");
  rep.checks.push_back(maxent_check("broken arm: left broken |~ left unusable", arm, left, "not LeftUsable(Eric)",
                                    Verdict::Yes, th));
  rep.checks.push_back(maxent_check("right weakening: left broken |~ some arm unusable", arm, left, weak,
                                    Verdict::Yes, th));
  rep.checks.push_back(maxent_check("right weakening: right broken |~ some arm unusable", arm, right, weak,
                                    Verdict::Yes, th));
  rep.checks.push_back(maxent_check("or: left or right broken |~ some arm unusable", arm, either, weak,
                                    Verdict::Yes, th));
  rep.checks.push_back(maxent_check("broken arm |~ some arm usable", arm, either, some, Verdict::Yes, th));
  rep.checks.push_back(maxent_check("and: broken arm |~ exactly one arm usable", arm, either,
                                    "(" + weak + ") and (" + some + ")", Verdict::Yes, th));
  rep.checks.push_back(maxent_check("broken arm draws no conclusion about the left arm", arm, either,
                                    "LeftUsable(Eric)", Verdict::No, th));

  // Penguins.
  CorpusCase tw = load_case(dir, "tweety");
  const Formula& kb = tw.kb.formula;
  rep.checks.push_back(maxent_check("penguin |~ not flying", tw, kb, "not Fly(Tweety)", Verdict::Yes, th));
  rep.checks.push_back(maxent_check("reflexivity: penguin |~ penguin", tw, kb, "Penguin(Tweety)", Verdict::Yes, th));
  rep.checks.push_back(maxent_check("cut: penguin |~ bird", tw, kb, "Bird(Tweety)", Verdict::Yes, th));
  rep.checks.push_back(maxent_check("cautious monotonicity: penguin and bird |~ not flying", tw,
                                    with(tw, kb, "Bird(Tweety)"), "not Fly(Tweety)", Verdict::Yes, th));
  rep.checks.push_back(maxent_check("right weakening: penguin |~ not flying or bird", tw, kb,
                                    "not Fly(Tweety) or Bird(Tweety)", Verdict::Yes, th));
  rep.checks.push_back(maxent_check("left logical equivalence: rewritten penguin KB |~ not flying", tw,
                                    with(tw, kb, "Fly(Tweety) or not Fly(Tweety)"), "not Fly(Tweety)",
                                    Verdict::Yes, th));
}

void corpus_suite(const std::string& dir, const CountOptions& opts, const Thresholds& th, SuiteReport& rep) {
  for (const auto& c : load_corpus(dir)) {
    CaseResult r = run_case(c, opts, th);
    rep.checks.push_back({c.name, r.passed, r.outcome + (r.detail.empty() ? "" : ": " + r.detail)});
  }
}

}  // namespace

SuiteReport run_property_suite(const std::string& suite, const SuiteConfig& config) {
  SuiteReport rep;
  rep.suite = suite;
  if (suite == "klm") {
    exact_identities(config.corpus_dir, config.count, rep);
    limit_properties(config.corpus_dir, config.thresholds, rep);
  } else if (suite == "corpus") {
    corpus_suite(config.corpus_dir, config.count, config.thresholds, rep);
  } else {
    throw Error("unknown suite '" + suite + "' (expected klm or corpus)");
  }
  return rep;
}

}  // namespace rw
