#pragma once

#include <stdexcept>
#include <string>

namespace dynagree {

/// Argument outside its stated domain (process id out of range, size
/// mismatch, parameter below a structural minimum).
struct DomainError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// A numeric invariant failed validation (row sums, weight ranges,
/// missing self-loops).
struct ValidationError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// An enumeration or problem size exceeded its hard cap; the operation
/// refuses to continue rather than silently sampling.
struct BudgetError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// An iterative solver did not reach its tolerance within its iteration cap.
struct IterationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Bad scenario, rule, or file configuration. Messages carry the field path
/// or round number that triggered the failure.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Two evaluation paths that must agree produced different results.
struct EquivalenceError : std::logic_error {
    using std::logic_error::logic_error;
};

}  // namespace dynagree
