// rwi: random-worlds inference from the command line.
//
// Exit codes: 0 converged (or success), 1 error, 2 nonrobust, 3 undefined,
// 4 unconverged, 5 budget-limited. `check` exits 0 when every case passes
// and 6 otherwise.

#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "rw/corpus.hpp"
#include "rw/defaults.hpp"
#include "rw/errors.hpp"
#include "rw/limits.hpp"
#include "rw/maxent.hpp"
#include "rw/parser.hpp"
#include "rw/printer.hpp"
#include "rw/report.hpp"

using namespace rw;

namespace {

struct Options {
  std::string kb;
  std::string query;
  std::string context;
  std::string method = "auto";
  std::string sizes;
  std::vector<std::string> taus;
  std::vector<std::string> stages;
  std::string delta_n = "1/20";
  std::string delta_eps = "1/20";
  std::string budget;
  std::string keep;
  std::string suite = "corpus";
  std::string corpus = "corpus";
  unsigned n = 0;
  unsigned threads = 0;
  unsigned seed = 0;
  bool json = false;
};

int exit_code(Status s) {
  switch (s) {
    case Status::Converged: return 0;
    case Status::Nonrobust: return 2;
    case Status::Undefined: return 3;
    case Status::Unconverged: return 4;
    case Status::BudgetLimited: return 5;
  }
  return 1;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// "2..8" or "2,3,5".
std::vector<unsigned> parse_sizes(const std::string& text) {
  std::vector<unsigned> out;
  auto dots = text.find("..");
  try {
    if (dots != std::string::npos) {
      unsigned lo = static_cast<unsigned>(std::stoul(text.substr(0, dots)));
      unsigned hi = static_cast<unsigned>(std::stoul(text.substr(dots + 2)));
      for (unsigned n = lo; n <= hi; ++n) out.push_back(n);
    } else {
      std::stringstream ss(text);
      std::string item;
      while (std::getline(ss, item, ',')) out.push_back(static_cast<unsigned>(std::stoul(item)));
    }
  } catch (const std::exception&) {
    throw Error("--n expects a range such as 2..8 or a list such as 2,3,5; got '" + text + "'");
  }
  return out;
}

// "1:1/4,2:1/16"
ToleranceVector parse_stage(const std::string& text) {
  ToleranceVector tol;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto colon = item.find(':');
    if (colon == std::string::npos) throw Error("--stage expects index:tau pairs, got '" + item + "'");
    tol.set(static_cast<unsigned>(std::stoul(item.substr(0, colon))), Rational::parse(item.substr(colon + 1)));
  }
  return tol;
}

CountOptions count_options(const Options& o) {
  CountOptions c;
  c.budget = o.budget.empty() ? budget_from_env() : parse_budget(o.budget);
  c.threads = o.threads ? o.threads : std::max(1u, std::thread::hardware_concurrency());
  if (o.method == "auto")
    c.method = Method::Auto;
  else if (o.method == "exact")
    c.method = Method::Naive;
  else if (o.method == "unary")
    c.method = Method::Unary;
  else if (o.method != "maxent")
    throw Error("--method must be auto, exact, unary or maxent");
  return c;
}

Schedule schedule_from(const Options& o, const KnowledgeBase& kb, const Formula& query) {
  Schedule s = default_schedule(kb.vocab, kb.formula, query);
  if (!o.sizes.empty()) s.sizes = parse_sizes(o.sizes);
  std::set<unsigned> idx = tolerance_indices(kb.formula);
  auto qi = tolerance_indices(query);
  idx.insert(qi.begin(), qi.end());
  if (!o.taus.empty()) {
    std::vector<Rational> taus;
    for (const auto& t : o.taus) taus.push_back(Rational::parse(t));
    s = Schedule::uniform(s.sizes, taus, idx);
  }
  if (!o.stages.empty()) {
    s.stages.clear();
    for (const auto& st : o.stages) s.stages.push_back(parse_stage(st));
  }
  s.validate();
  return s;
}

void emit(const Options& o, const Json& j, const std::string& text) {
  if (o.json)
    std::cout << j.dump(2) << "\n";
  else
    std::cout << text;
}

int run_maxent(const Options& o, const KnowledgeBase& kb, const Formula& query) {
  std::optional<Formula> context;
  if (!o.context.empty()) context = parse_formula(o.context, kb.vocab);
  std::optional<ToleranceVector> keep;
  if (!o.keep.empty()) keep = ToleranceVector::uniform(tolerance_indices(kb.formula), Rational::parse(o.keep));
  MaxentAnswer ans = maxent_degree(kb.vocab, kb.formula, query, context, keep);
  emit(o, maxent_json(kb.vocab, o.query, ans), maxent_text(kb.vocab, o.query, ans));
  return 0;
}

int cmd_eval(const Options& o) {
  KnowledgeBase kb = parse_kb(read_file(o.kb));
  Formula query = parse_formula(o.query, kb.vocab);
  if (o.method == "maxent") return run_maxent(o, kb, query);
  CountOptions opts = count_options(o);
  Schedule s = schedule_from(o, kb, query);
  Thresholds th{Rational::parse(o.delta_n), Rational::parse(o.delta_eps)};
  BeliefEstimate est = degree_of_belief(kb.vocab, query, kb.formula, s, th, opts);
  emit(o, estimate_json(o.query, o.kb, s, est, opts.method), estimate_text(o.query, s, est));
  return exit_code(est.status);
}

int cmd_count(const Options& o) {
  KnowledgeBase kb = parse_kb(read_file(o.kb));
  Formula f = kb.formula;
  if (!o.query.empty()) f = Formula::conjunction(f, parse_formula(o.query, kb.vocab));
  CountOptions opts = count_options(o);
  ToleranceVector tol;
  if (!o.stages.empty()) {
    tol = parse_stage(o.stages.front());
  } else {
    Rational tau = o.taus.empty() ? Rational(1, 4) : Rational::parse(o.taus.front());
    tol = ToleranceVector::uniform(tolerance_indices(f), tau);
  }
  if (o.n == 0) throw Error("count needs --n");
  WorldCount wc = opts.method == Method::Unary ? unary_count(kb.vocab, o.n, tol, f, opts)
                                               : count_worlds(kb.vocab, o.n, tol, f, opts);
  std::ostringstream text;
  text << "count: " << wc.count.get_str() << "\ntotal: " << wc.total.get_str() << "\n";
  emit(o, count_json(o.n, tol, wc, opts.method), text.str());
  return 0;
}

int cmd_maxent(const Options& o) {
  KnowledgeBase kb = parse_kb(read_file(o.kb));
  return run_maxent(o, kb, parse_formula(o.query, kb.vocab));
}

int cmd_check(const Options& o) {
  SuiteConfig cfg;
  cfg.corpus_dir = o.corpus;
  cfg.count = count_options(o);
  cfg.thresholds = {Rational::parse(o.delta_n), Rational::parse(o.delta_eps)};
  SuiteReport rep = run_property_suite(o.suite, cfg);
  emit(o, suite_json(rep), suite_text(rep));
  return rep.passed() ? 0 : 6;
}

void common(CLI::App* sub, Options& o) {
  sub->add_option("--method", o.method, "auto, exact, unary or maxent")->capture_default_str();
  sub->add_option("--budget", o.budget, "evaluation cap (integer or 2^k); overrides RW_BUDGET");
  sub->add_option("--threads", o.threads, "worker threads (default: all cores)");
  sub->add_option("--seed", o.seed, "seed for sampled checks")->capture_default_str();
  sub->add_option("--delta-n", o.delta_n, "max spread inside a stage")->capture_default_str();
  sub->add_option("--delta-eps", o.delta_eps, "max drift between stages and across probes")->capture_default_str();
  sub->add_flag("--json", o.json, "machine-readable output");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Degrees of belief by counting random worlds"};
  app.require_subcommand(1);
  Options o;

  auto* eval = app.add_subcommand("eval", "estimate Pr(query | KB) over a grid of N and tolerances");
  eval->add_option("--kb", o.kb, "knowledge base file (.rwkb)")->required();
  eval->add_option("--query", o.query, "closed query formula")->required();
  eval->add_option("--n", o.sizes, "domain sizes, e.g. 2..8 or 2,4,6");
  eval->add_option("--tau", o.taus, "uniform tolerance stages, e.g. --tau 1/4 --tau 1/8");
  eval->add_option("--stage", o.stages, "per-index stage, e.g. --stage 1:1/4,2:1/8 (repeatable)");
  eval->add_option("--context", o.context, "context for --method maxent");
  eval->add_option("--keep-tau", o.keep, "keep tolerance tau in maxent constraints");
  common(eval, o);

  auto* count = app.add_subcommand("count", "count the worlds of size N satisfying the KB");
  count->add_option("--kb", o.kb, "knowledge base file (.rwkb)")->required();
  count->add_option("--n", o.n, "domain size")->required();
  count->add_option("--query", o.query, "optional extra conjunct");
  count->add_option("--tau", o.taus, "uniform tolerance (default 1/4)");
  count->add_option("--stage", o.stages, "per-index tolerances, e.g. 1:1/4,2:1/8");
  common(count, o);

  auto* maxent = app.add_subcommand("maxent", "maximum-entropy answer for a unary KB");
  maxent->add_option("--kb", o.kb, "knowledge base file (.rwkb)")->required();
  maxent->add_option("--query", o.query, "query about one constant")->required();
  maxent->add_option("--context", o.context, "context about the same constant (default: KB facts)");
  maxent->add_option("--keep-tau", o.keep, "keep this tolerance instead of dropping it");
  common(maxent, o);

  auto* check = app.add_subcommand("check", "run a property suite");
  check->add_option("--suite", o.suite, "klm or corpus")->capture_default_str();
  check->add_option("--corpus", o.corpus, "corpus directory")->capture_default_str();
  common(check, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (*eval) return cmd_eval(o);
    if (*count) return cmd_count(o);
    if (*maxent) return cmd_maxent(o);
    if (*check) return cmd_check(o);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const BudgetExceeded& e) {
    std::cerr << "error: " << e.what() << " (required " << e.required() << ", cap " << e.cap() << ")\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
