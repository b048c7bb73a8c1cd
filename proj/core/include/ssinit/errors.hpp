#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace ssinit {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical or physical domain of a function.
class DomainError : public Error {
public:
    using Error::Error;
};

/// A residual could not be evaluated or produced a non-finite value.
class EvaluationError : public Error {
public:
    EvaluationError(const std::string& what, std::string equation = {})
        : Error(what), equation_(std::move(equation)) {}
    const std::string& equation() const noexcept { return equation_; }

private:
    std::string equation_;
};

/// The incidence structure admits no perfect matching, or the system is not square.
class StructuralSingularity : public Error {
public:
    StructuralSingularity(const std::string& what,
                          std::vector<std::string> unmatched_equations,
                          std::vector<std::string> unmatched_variables)
        : Error(what),
          unmatched_equations_(std::move(unmatched_equations)),
          unmatched_variables_(std::move(unmatched_variables)) {}

    const std::vector<std::string>& unmatched_equations() const noexcept { return unmatched_equations_; }
    const std::vector<std::string>& unmatched_variables() const noexcept { return unmatched_variables_; }

private:
    std::vector<std::string> unmatched_equations_;
    std::vector<std::string> unmatched_variables_;
};

/// Newton iteration did not converge.
class ConvergenceFailure : public Error {
public:
    ConvergenceFailure(const std::string& what,
                       std::vector<double> best_iterate,
                       std::vector<double> residual_history)
        : Error(what),
          best_iterate_(std::move(best_iterate)),
          residual_history_(std::move(residual_history)) {}

    const std::vector<double>& best_iterate() const noexcept { return best_iterate_; }
    const std::vector<double>& residual_history() const noexcept { return residual_history_; }

private:
    std::vector<double> best_iterate_;
    std::vector<double> residual_history_;
};

/// Inconsistent model definition (dangling ports, unpaired blocks, bad parameters).
class ModelError : public Error {
public:
    using Error::Error;
};

/// Boundary-block set would produce a non-square initialization problem.
class BalanceError : public ModelError {
public:
    using ModelError::ModelError;
};

/// Warm-start variable mapping failed.
class MappingError : public Error {
public:
    MappingError(const std::string& what, std::vector<std::string> orphans)
        : Error(what), orphans_(std::move(orphans)) {}
    const std::vector<std::string>& orphans() const noexcept { return orphans_; }

private:
    std::vector<std::string> orphans_;
};

/// Steady-state verification could not integrate the model.
class VerificationError : public Error {
public:
    using Error::Error;
};

/// Configuration file unreadable or invalid.
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace ssinit
