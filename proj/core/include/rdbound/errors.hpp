#ifndef RDBOUND_ERRORS_HPP
#define RDBOUND_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace rdbound {

/// A system definition violates a structural requirement (n < 2, negative
/// initial data, nonpositive gamma or d, ...).
struct InvalidSystemError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Difference-operator index outside its valid range.
struct IndexError : std::out_of_range {
  using std::out_of_range::out_of_range;
};

/// A right-hand-side evaluation produced a non-finite value. Carries the
/// compartment index (0-based) at which it happened.
struct NumericOverflowError : std::runtime_error {
  NumericOverflowError(const std::string& what, int compartment_index)
      : std::runtime_error(what), compartment(compartment_index) {}
  int compartment;
};

/// A ledger field was requested (or needed) before its prerequisites were
/// computed.
struct PipelineOrderError : std::logic_error {
  using std::logic_error::logic_error;
};

/// A ledger value became non-finite. Carries the chain step at which the
/// overflow happened (-1 when not applicable).
struct LedgerOverflowError : std::runtime_error {
  LedgerOverflowError(const std::string& what, int step_index)
      : std::runtime_error(what), step(step_index) {}
  int step;
};

/// The symmetric two-compartment reduction was requested for a system that
/// does not satisfy its hypotheses.
struct ReductionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

}  // namespace rdbound

#endif  // RDBOUND_ERRORS_HPP
