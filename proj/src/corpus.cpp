#include "rw/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "rw/errors.hpp"

namespace rw {

namespace {

using json = nlohmann::json;

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw Error("cannot read " + p.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

mpq_class number(const json& j, const std::string& where) {
  if (j.is_string()) return Rational::parse(j.get<std::string>()).to_mpq();
  if (j.is_number_integer()) return mpq_class(j.get<long>());
  throw Error(where + ": rationals are written as strings such as \"4/5\"");
}

std::vector<Rational> taus_of(const json& j, const std::string& where) {
  std::vector<Rational> out;
  for (const auto& t : j) out.push_back(Rational::from_mpq(number(t, where)));
  return out;
}

}  // namespace

CorpusCase load_case(const std::filesystem::path& dir, const std::string& name) {
  CorpusCase c;
  c.name = name;
  c.kb_path = dir / (name + ".rwkb");
  c.kb_text = read_file(c.kb_path);
  c.kb = parse_kb(c.kb_text);
  auto expect_path = dir / (name + ".expect.json");
  json j;
  try {
    j = json::parse(read_file(expect_path));
  } catch (const json::exception& e) {
    throw Error(expect_path.string() + ": " + e.what());
  }
  const std::string where = expect_path.string();
  c.query_text = j.at("query").get<std::string>();
  c.query = parse_formula(c.query_text, c.kb.vocab);
  c.method = j.value("method", "count");
  static const std::vector<std::string> methods = {"count", "entails", "maxent", "maxent-limit", "consistency"};
  if (std::find(methods.begin(), methods.end(), c.method) == methods.end())
    throw Error(where + ": unknown method '" + c.method + "'");
  if (j.contains("context")) {
    c.context_text = j["context"].get<std::string>();
    c.context = parse_formula(*c.context_text, c.kb.vocab);
  }
  c.note = j.value("note", "");
  if (j.contains("schedule")) {
    const auto& s = j["schedule"];
    std::set<unsigned> idx = tolerance_indices(c.kb.formula);
    auto qi = tolerance_indices(c.query);
    idx.insert(qi.begin(), qi.end());
    Schedule sch = default_schedule(c.kb.vocab, c.kb.formula, c.query);
    if (s.contains("sizes")) sch.sizes = s["sizes"].get<std::vector<unsigned>>();
    if (s.contains("taus")) sch = Schedule::uniform(sch.sizes, taus_of(s["taus"], where), idx);
    sch.validate();
    c.schedule = sch;
  }
  if (j.contains("taus")) c.taus = taus_of(j["taus"], where);
  if (c.taus.empty()) c.taus = default_maxent_taus();
  if (j.contains("probes")) {
    for (const auto& p : j["probes"]) {
      std::map<unsigned, unsigned> powers;
      for (auto it = p.begin(); it != p.end(); ++it) powers[static_cast<unsigned>(std::stoul(it.key()))] = it.value();
      c.probes.push_back(powers);
    }
  }
  const json& e = j.at("expected");
  if (e.contains("value")) c.expected.value = number(e["value"], where);
  if (e.contains("tolerance")) c.expected.tolerance = number(e["tolerance"], where);
  if (e.contains("interval"))
    c.expected.interval = std::make_pair(number(e["interval"].at(0), where), number(e["interval"].at(1), where));
  if (e.contains("below")) c.expected.below = number(e["below"], where);
  if (e.contains("status")) c.expected.status = e["status"].get<std::string>();
  if (e.contains("verdict")) c.expected.verdict = e["verdict"].get<std::string>();
  if (e.contains("consistency")) c.expected.consistency = e["consistency"].get<std::string>();
  return c;
}

std::vector<CorpusCase> load_corpus(const std::filesystem::path& dir) {
  std::vector<std::string> names;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() != ".rwkb") continue;
    auto expect = entry.path();
    expect.replace_extension(".expect.json");
    if (std::filesystem::exists(expect)) names.push_back(entry.path().stem().string());
  }
  std::sort(names.begin(), names.end());
  std::vector<CorpusCase> out;
  for (const auto& n : names) out.push_back(load_case(dir, n));
  return out;
}

Schedule schedule_for(const CorpusCase& c) {
  return c.schedule ? *c.schedule : default_schedule(c.kb.vocab, c.kb.formula, c.query);
}

namespace {

// Value checks shared by exact and floating estimates; `slack` absorbs
// solver rounding for floating values and is 0 for exact ones.
void check_value(const Expectation& e, const mpq_class& v, CaseResult& r, const mpq_class& slack = 0) {
  std::vector<std::string> bad;
  if (e.value && abs(v - *e.value) > e.tolerance + slack)
    bad.push_back("expected " + mpq_str(*e.value) + " +- " + mpq_str(e.tolerance));
  if (e.below && v >= *e.below) bad.push_back("expected below " + mpq_str(*e.below));
  if (e.interval && (v < e.interval->first - slack || v > e.interval->second + slack))
    bad.push_back("expected within [" + mpq_str(e.interval->first) + ", " + mpq_str(e.interval->second) + "]");
  for (const auto& b : bad) r.detail += (r.detail.empty() ? "" : "; ") + b;
  if (!bad.empty()) r.passed = false;
}

bool has_value_check(const Expectation& e) { return e.value || e.interval || e.below; }

const mpq_class kSolverSlack(1, 1000000000);

}  // namespace

CaseResult run_case(const CorpusCase& c, const CountOptions& opts, const Thresholds& thresholds) {
  CaseResult r;
  r.name = c.name;
  r.method = c.method;
  r.passed = true;
  const Expectation& e = c.expected;
  try {
    if (c.method == "count" || c.method == "entails") {
      Schedule s = schedule_for(c);
      BeliefEstimate est;
      if (c.method == "entails") {
        EntailmentVerdict v = default_entails(c.kb.vocab, c.kb.formula, c.query, s, thresholds, opts);
        est = v.estimate;
        r.outcome = verdict_name(v.verdict);
        if (e.verdict && *e.verdict != r.outcome) {
          r.passed = false;
          r.detail = "expected verdict " + *e.verdict;
        }
      } else {
        est = degree_of_belief(c.kb.vocab, c.query, c.kb.formula, s, thresholds, opts);
        r.outcome = status_name(est.status);
        if (e.status && *e.status != r.outcome) {
          r.passed = false;
          r.detail = "expected status " + *e.status;
        }
      }
      r.value = est.value;
      if (has_value_check(e)) {
        if (!est.value) {
          r.passed = false;
          r.detail += (r.detail.empty() ? "" : "; ") + std::string("no estimate");
        } else {
          check_value(e, *est.value, r);
        }
      }
      if (!r.passed && !est.diagnostics.empty()) r.detail += " [" + est.diagnostics.front() + "]";
    } else if (c.method == "maxent") {
      MaxentAnswer a = maxent_degree(c.kb.vocab, c.kb.formula, c.query, c.context);
      r.real_value = a.value;
      r.outcome = "value";
      check_value(e, mpq_class(a.value), r, kSolverSlack);
    } else if (c.method == "maxent-limit") {
      MaxentVerdict v = maxent_entails(c.kb.vocab, c.kb.formula, c.query, c.context, c.taus, c.probes, thresholds);
      r.real_value = v.limit.value;
      r.outcome = verdict_name(v.verdict);
      if (e.verdict && *e.verdict != r.outcome) {
        r.passed = false;
        r.detail = "expected verdict " + *e.verdict;
      }
      if (has_value_check(e)) {
        if (!v.limit.value) {
          r.passed = false;
          r.detail += (r.detail.empty() ? "" : "; ") + std::string("no value");
        } else {
          check_value(e, mpq_class(*v.limit.value), r, kSolverSlack);
        }
      }
      if (!r.passed && !v.diagnostics.empty()) r.detail += " [" + v.diagnostics.front() + "]";
    } else {
      ConsistencyReport rep = eventually_consistent(c.kb.vocab, c.kb.formula, schedule_for(c), opts);
      r.outcome = consistency_name(rep.verdict);
      if (e.consistency && *e.consistency != r.outcome) {
        r.passed = false;
        r.detail = "expected " + *e.consistency;
      }
    }
  } catch (const Error& ex) {
    r.passed = false;
    r.outcome = "error";
    r.detail = ex.what();
  }
  return r;
}

}  // namespace rw
