#include "cps/report.hpp"

#include <sstream>

namespace cps {

bool CheckReport::all_passed() const {
  for (const CheckResult& c : checks) {
    if (c.status == CheckStatus::Fail) return false;
  }
  return true;
}

namespace {

// Confirm that a canonically nonzero scalar really is nonzero by evaluation,
// then produce the failing record.
CheckResult fail_record(const std::string& name, const std::string& tag, const Scalar& witness,
                        int degree, Rng& rng) {
  eval_cross_check_nonzero(witness, rng);
  CheckResult r;
  r.name = name;
  r.tag = tag;
  r.status = CheckStatus::Fail;
  r.residual_degree = degree;
  return r;
}

}  // namespace

void record_residual(CheckReport& rep, const std::string& name, const std::string& tag,
                     const Tensor& residual, Rng& rng) {
  std::vector<int> idx(residual.rank(), 0);
  do {
    const Scalar& s = residual.at(idx);
    if (!s.is_zero()) {
      rep.add(fail_record(name, tag, s, residual.max_degree(), rng));
      return;
    }
  } while (residual.next_index(idx));
  rep.add(CheckResult{name, tag, CheckStatus::Pass, -1, ""});
}

void record_residual(CheckReport& rep, const std::string& name, const std::string& tag,
                     const Scalar& residual, Rng& rng) {
  if (residual.is_zero()) {
    rep.add(CheckResult{name, tag, CheckStatus::Pass, -1, ""});
    return;
  }
  rep.add(fail_record(name, tag, residual, residual.max_degree(), rng));
}

void record_flag(CheckReport& rep, const std::string& name, const std::string& tag, bool ok) {
  CheckResult r;
  r.name = name;
  r.tag = tag;
  r.status = ok ? CheckStatus::Pass : CheckStatus::Fail;
  rep.add(std::move(r));
}

void record_skip(CheckReport& rep, const std::string& name, const std::string& tag,
                 const std::string& reason) {
  CheckResult r;
  r.name = name;
  r.tag = tag;
  r.status = CheckStatus::Skipped;
  r.note = reason;
  rep.add(std::move(r));
}

std::string render_report(const CheckReport& rep) {
  std::ostringstream out;
  for (const CheckResult& c : rep.checks) {
    switch (c.status) {
      case CheckStatus::Pass: out << "PASS"; break;
      case CheckStatus::Fail: out << "FAIL"; break;
      case CheckStatus::Skipped: out << "SKIP"; break;
    }
    out << ' ' << c.tag << ": " << c.name;
    if (c.status == CheckStatus::Fail && c.residual_degree >= 0) {
      out << " [residual degree " << c.residual_degree << "]";
    }
    if (!c.note.empty()) out << " -- " << c.note;
    out << '\n';
  }
  return out.str();
}

}  // namespace cps
