#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace photoauth {

/// Invalid argument or parameter outside the model's domain.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// The requested range or grid is unusable (empty, reversed, over the budget cap).
class RangeError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Eve's walk has no negative drift (N = 1), so no finite S+ bounds p_fp.
class DegenerateError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Alice's per-round success is not above 1/2; the walk cannot authenticate her.
class DriftError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Exact enumeration requested beyond the size it is meant for.
class SizeError : public DomainError {
 public:
  using DomainError::DomainError;
};

class InsufficientSpotsError : public DomainError {
 public:
  InsufficientSpotsError(std::size_t high, std::size_t low, std::size_t needed)
      : DomainError("insufficient spots: high=" + std::to_string(high) +
                    " low=" + std::to_string(low) +
                    " needed=" + std::to_string(needed) + " per class"),
        high_(high), low_(low), needed_(needed) {}

  std::size_t high() const noexcept { return high_; }
  std::size_t low() const noexcept { return low_; }
  std::size_t needed() const noexcept { return needed_; }

 private:
  std::size_t high_;
  std::size_t low_;
  std::size_t needed_;
};

/// A loaded object parsed fine but violates a data invariant (e.g. alpha > 1).
class InvariantError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Session hit the round cap without touching either barrier.
class NonAbsorptionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A scripted subject ran out of responses.
class ScriptExhaustedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed text input; carries the 1-based line number.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace photoauth
