#ifndef HSLYAP_VERIFY_HPP
#define HSLYAP_VERIFY_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace hslyap {

struct CheckResult {
  std::string name;
  bool pass = false;
  bool warning_only = false;  // informational line, never fails the suite
  double value = 0.0;         // measured residual / deviation
  double tol = 0.0;
  std::string note;
};

enum class VerifyLevel { Quick, Full };

// Algebraic and statistical verification suites behind `verify`.
std::vector<CheckResult> run_verification(VerifyLevel level, std::uint64_t seed);

bool all_passed(const std::vector<CheckResult>& results);

}  // namespace hslyap

#endif
