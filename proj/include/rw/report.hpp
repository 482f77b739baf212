#pragma once

// JSON renderings for the CLI. Rationals are "p/q" strings with a decimal
// string alongside; key order is fixed so equal inputs give equal bytes.

#include <string>

#include "json.hpp"
#include "rw/counting.hpp"
#include "rw/defaults.hpp"
#include "rw/limits.hpp"
#include "rw/maxent.hpp"

namespace rw {

using Json = nlohmann::ordered_json;

Json rational_json(const mpq_class& q);

Json estimate_json(const std::string& query, const std::string& kb_file, const Schedule& schedule,
                   const BeliefEstimate& est, Method method);

Json count_json(unsigned n, const ToleranceVector& tol, const WorldCount& wc, Method method);

Json maxent_json(const Vocabulary& vocab, const std::string& query, const MaxentAnswer& ans);

Json suite_json(const SuiteReport& rep);

/// Plain-text forms of the same reports.
std::string estimate_text(const std::string& query, const Schedule& schedule, const BeliefEstimate& est);
std::string maxent_text(const Vocabulary& vocab, const std::string& query, const MaxentAnswer& ans);
std::string suite_text(const SuiteReport& rep);

}  // namespace rw
