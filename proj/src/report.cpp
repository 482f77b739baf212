#include "rw/report.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>

#include "rw/printer.hpp"

namespace rw {

namespace {

Json tolerance_json(const ToleranceVector& tol) {
  Json out = Json::object();
  for (const auto& [i, tau] : tol.values()) out[std::to_string(i)] = tau.str();
  return out;
}

// Rounded to 12 significant digits so tiny solver noise does not leak into
// the bytes of the report.
double tidy(double v) {
  if (v == 0 || !std::isfinite(v)) return v;
  std::ostringstream os;
  os << std::setprecision(12) << v;
  return std::stod(os.str());
}

}  // namespace

Json rational_json(const mpq_class& q) {
  Json out;
  out["value"] = mpq_str(q);
  out["decimal"] = decimal(q, 6);
  return out;
}

Json estimate_json(const std::string& query, const std::string& kb_file, const Schedule& schedule,
                   const BeliefEstimate& est, Method method) {
  Json out;
  out["query"] = query;
  out["kb_file"] = kb_file;
  out["method"] = method_name(method);
  Json sched;
  sched["sizes"] = schedule.sizes;
  sched["stages"] = Json::array();
  for (const auto& s : schedule.stages) sched["stages"].push_back(tolerance_json(s));
  out["schedule"] = sched;
  out["grid"] = Json::array();
  for (const auto& c : est.grid) {
    Json g;
    g["N"] = c.n;
    g["stage"] = c.stage;
    g["defined"] = !c.budget_limited && c.p.defined;
    g["value"] = (!c.budget_limited && c.p.defined) ? Json(mpq_str(c.p.value)) : Json(nullptr);
    g["budget_limited"] = c.budget_limited;
    if (!c.budget_limited) {
      g["kb_count"] = c.p.kb_count.get_str();
      g["joint_count"] = c.p.joint_count.get_str();
    }
    out["grid"].push_back(g);
  }
  out["stages"] = Json::array();
  for (std::size_t i = 0; i < est.stages.size(); ++i) {
    const auto& s = est.stages[i];
    Json j;
    j["stage"] = i;
    j["defined"] = s.defined;
    if (s.defined) {
      j["min"] = mpq_str(s.min);
      j["max"] = mpq_str(s.max);
      j["representative"] = mpq_str(s.representative);
      j["representative_N"] = s.representative_n;
    }
    out["stages"].push_back(j);
  }
  out["probes"] = Json::array();
  for (const auto& p : est.probes) {
    Json j;
    j["label"] = p.label;
    j["tolerances"] = tolerance_json(p.tol);
    j["defined"] = p.defined;
    j["value"] = p.defined ? Json(mpq_str(p.representative)) : Json(nullptr);
    if (p.defined) j["N"] = p.representative_n;
    out["probes"].push_back(j);
  }
  Json e;
  e["status"] = status_name(est.status);
  e["value"] = est.value ? Json(mpq_str(*est.value)) : Json(nullptr);
  e["decimal"] = est.value ? Json(decimal(*est.value, 6)) : Json(nullptr);
  out["estimate"] = e;
  out["diagnostics"] = est.diagnostics;
  return out;
}

Json count_json(unsigned n, const ToleranceVector& tol, const WorldCount& wc, Method method) {
  Json out;
  out["N"] = n;
  out["tolerances"] = tolerance_json(tol);
  out["method"] = method_name(method);
  out["count"] = wc.count.get_str();
  out["total"] = wc.total.get_str();
  out["defined"] = wc.count > 0;
  return out;
}

Json maxent_json(const Vocabulary& vocab, const std::string& query, const MaxentAnswer& ans) {
  Json out;
  out["atoms"] = Json::array();
  for (const auto& a : atoms(vocab)) {
    Json j;
    j["index"] = a.index + 1;
    j["label"] = a.label(vocab);
    out["atoms"].push_back(j);
  }
  out["constraints"] = Json::array();
  for (const auto& r : ans.constraints.rows) out["constraints"].push_back(ans.constraints.describe(r));
  out["point"] = Json::array();
  for (double v : ans.point.p) out["point"].push_back(tidy(v));
  out["forced_zero"] = ans.point.forced_zero;
  out["entropy"] = tidy(ans.point.entropy);
  out["query"] = query;
  out["constant"] = ans.constant;
  out["context"] = print_formula(ans.context);
  out["context_mass"] = tidy(ans.context_mass);
  out["query_answer"] = tidy(ans.value);
  Json kkt;
  kkt["stationarity"] = tidy(ans.point.stationarity);
  kkt["feasibility"] = tidy(ans.point.feasibility);
  kkt["complementarity"] = tidy(ans.point.complementarity);
  kkt["unique"] = ans.point.unique;
  out["kkt"] = kkt;
  return out;
}

Json suite_json(const SuiteReport& rep) {
  Json out;
  out["suite"] = rep.suite;
  out["passed"] = rep.passed();
  out["checks"] = Json::array();
  for (const auto& c : rep.checks) {
    Json j;
    j["name"] = c.name;
    j["passed"] = c.passed;
    j["detail"] = c.detail;
    out["checks"].push_back(j);
  }
  return out;
}

std::string estimate_text(const std::string& query, const Schedule& schedule, const BeliefEstimate& est) {
  std::ostringstream os;
  os << "query: " << query << "\n";
  for (std::size_t s = 0; s < schedule.stages.size(); ++s) {
    os << "stage " << s << " [" << schedule.stages[s].str() << "]:";
    for (const auto& c : est.grid) {
      if (c.stage != s) continue;
      os << "  N=" << c.n << " ";
      if (c.budget_limited)
        os << "budget";
      else if (!c.p.defined)
        os << "undef";
      else
        os << mpq_str(c.p.value);
    }
    os << "\n";
  }
  for (const auto& p : est.probes)
    os << "probe " << p.label << ": " << (p.defined ? mpq_str(p.representative) : std::string("undefined")) << "\n";
  os << "status: " << status_name(est.status) << "\n";
  if (est.value) os << "estimate: " << mpq_str(*est.value) << " (" << decimal(*est.value, 6) << ")\n";
  for (const auto& d : est.diagnostics) os << "note: " << d << "\n";
  return os.str();
}

std::string maxent_text(const Vocabulary& vocab, const std::string& query, const MaxentAnswer& ans) {
  std::ostringstream os;
  auto as = atoms(vocab);
  os << "constraints:\n";
  for (const auto& r : ans.constraints.rows) os << "  " << ans.constraints.describe(r) << "\n";
  os << "maximum-entropy point:\n";
  for (std::size_t j = 0; j < as.size(); ++j)
    os << "  p" << j + 1 << " = " << std::setprecision(9) << ans.point.p[j] << "  (" << as[j].label(vocab) << ")\n";
  os << "entropy: " << ans.point.entropy << "\n";
  os << "Pr(" << query << " | " << print_formula(ans.context) << ") = " << ans.value << "\n";
  return os.str();
}

std::string suite_text(const SuiteReport& rep) {
  std::ostringstream os;
  std::size_t ok = 0;
  for (const auto& c : rep.checks) {
    os << (c.passed ? "PASS " : "FAIL ") << c.name;
    if (!c.detail.empty()) os << " (" << c.detail << ")";
    os << "\n";
    ok += c.passed;
  }
  os << rep.suite << ": " << ok << "/" << rep.checks.size() << " passed\n";
  return os.str();
}

}  // namespace rw
