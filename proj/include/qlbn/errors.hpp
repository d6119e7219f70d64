#ifndef QLBN_ERRORS_HPP_
#define QLBN_ERRORS_HPP_

#include <stdexcept>
#include <string>
#include <vector>

namespace qlbn {

// One broken invariant found by validate(). `subject` names the variable or
// table involved, `rule` is a short stable tag ("row-sum", "cycle", ...).
struct Violation {
  std::string subject;
  std::string rule;
  std::string message;

  bool operator==(const Violation &) const = default;
};

using ValidationReport = std::vector<Violation>;

std::string format_report(const ValidationReport &report);

// Thrown when an operation needs a valid network and gets an invalid one.
class InvalidNetworkError : public std::runtime_error {
 public:
  explicit InvalidNetworkError(ValidationReport report);
  const ValidationReport &report() const noexcept { return report_; }

 private:
  ValidationReport report_;
};

// Evidence whose consistent basis states all carry zero probability.
class ImpossibleEvidenceError : public std::runtime_error {
 public:
  ImpossibleEvidenceError() : std::runtime_error("impossible evidence") {}
};

// Every outcome of a query family interferes fully destructively, so the
// normalization factor is undefined.
class DegenerateInterferenceError : public std::runtime_error {
 public:
  DegenerateInterferenceError()
      : std::runtime_error("degenerate interference") {}
};

class NoClassicalSupportError : public std::runtime_error {
 public:
  explicit NoClassicalSupportError(const std::string &action)
      : std::runtime_error("action has no classical support: " + action) {}
};

// Raised by phase fitting when the target lies outside [min, max], the range
// of probabilities reachable by any shared angle.
class UnreachableTargetError : public std::runtime_error {
 public:
  UnreachableTargetError(double target, double min, double max);
  double min() const noexcept { return min_; }
  double max() const noexcept { return max_; }

 private:
  double min_;
  double max_;
};

}  // namespace qlbn

#endif  // QLBN_ERRORS_HPP_
