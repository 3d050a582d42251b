#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace flmc {

/// Invalid configuration value or inconsistent sizes supplied by the caller.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A documented precondition of an operation was violated (e.g. unclipped analog input).
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Argument outside the mathematical domain of a function.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// No admissible solution exists for the requested target.
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Division by a zero channel or power gain.
class SingularGainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A Markov chain produced a non-finite state.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(std::size_t round, const std::string& what)
      : std::runtime_error(what), round_(round) {}

  std::size_t round() const noexcept { return round_; }

 private:
  std::size_t round_;
};

}  // namespace flmc
