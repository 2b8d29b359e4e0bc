#pragma once

#include <string>
#include <vector>

#include "cps/scalar.hpp"
#include "cps/tensor.hpp"

namespace cps {

enum class CheckStatus { Pass, Fail, Skipped };

// One verified identity: a human-readable statement, a stable identity id
// used by reports and tooling, and the outcome.  Failing checks carry the
// maximal total degree appearing in the residual.
struct CheckResult {
  std::string name;
  std::string tag;
  CheckStatus status = CheckStatus::Pass;
  int residual_degree = -1;
  std::string note;
};

struct CheckReport {
  std::vector<CheckResult> checks;

  void add(CheckResult r) { checks.push_back(std::move(r)); }
  void append(const CheckReport& other) {
    checks.insert(checks.end(), other.checks.begin(), other.checks.end());
  }
  bool all_passed() const;
};

// Record an identity whose residual must vanish identically.  A canonically
// nonzero residual is confirmed by rational evaluation at random points
// before being reported as a failure (an engine bug throws InternalError
// instead of producing a bogus verdict).
void record_residual(CheckReport& rep, const std::string& name, const std::string& tag,
                     const Tensor& residual, Rng& rng);
void record_residual(CheckReport& rep, const std::string& name, const std::string& tag,
                     const Scalar& residual, Rng& rng);

// Record a plain boolean fact.
void record_flag(CheckReport& rep, const std::string& name, const std::string& tag, bool ok);

// Mark an identity as not applicable, with the reason.
void record_skip(CheckReport& rep, const std::string& name, const std::string& tag,
                 const std::string& reason);

// Deterministic text rendering: one line per check,
//   "PASS|FAIL|SKIP <tag>: <name>[ [residual degree <d>]][ -- <note>]".
std::string render_report(const CheckReport& rep);

}  // namespace cps
