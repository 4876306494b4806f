#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace omega_spectra {

using Nat = std::uint64_t;

/// Failure categories raised by the library. The CLI maps them onto exit codes.
enum class ErrorKind {
  InputError,              // malformed spec, bad parameters
  NotClosedWithinBound,    // block closure escaped the scan bound
  SearchBudgetExceeded,    // interleave / occurrence search ran out of window
  UnsatisfiableWithinWindow,
  FreshSupplierExhausted,
  WitnessWindowExceeded,
  InconclusiveAtWindow,
  NotStabilized,
  PrefixExhausted,
  OracleBudgetExceeded,
  ConditionViolated,
  WitnessMissing,
  BranchFailure,
  PolicyViolation,
  BudgetExceeded,
  InternalInvariantViolation,
  AuditFailure,
};

inline const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::InputError: return "input-error";
    case ErrorKind::NotClosedWithinBound: return "not-closed-within-bound";
    case ErrorKind::SearchBudgetExceeded: return "search-budget-exceeded";
    case ErrorKind::UnsatisfiableWithinWindow: return "unsatisfiable-within-window";
    case ErrorKind::FreshSupplierExhausted: return "fresh-supplier-exhausted";
    case ErrorKind::WitnessWindowExceeded: return "witness-window-exceeded";
    case ErrorKind::InconclusiveAtWindow: return "inconclusive-at-window";
    case ErrorKind::NotStabilized: return "not-stabilized";
    case ErrorKind::PrefixExhausted: return "prefix-exhausted";
    case ErrorKind::OracleBudgetExceeded: return "oracle-budget-exceeded";
    case ErrorKind::ConditionViolated: return "condition-violated";
    case ErrorKind::WitnessMissing: return "witness-missing";
    case ErrorKind::BranchFailure: return "branch-failure";
    case ErrorKind::PolicyViolation: return "policy-violation";
    case ErrorKind::BudgetExceeded: return "budget-exceeded";
    case ErrorKind::InternalInvariantViolation: return "internal-invariant-violation";
    case ErrorKind::AuditFailure: return "audit-failure";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace omega_spectra
