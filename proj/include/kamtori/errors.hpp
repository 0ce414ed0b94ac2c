#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace kamtori {

/// Base class for every error raised by the library.
class KamError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public KamError {
 public:
  using KamError::KamError;
};

/// A point fell outside the validity box of a cutoff-extended or smoothed model.
class DomainError : public KamError {
 public:
  using KamError::KamError;
};

/// A retained Fourier mode sits on (or numerically at) a resonance k.omega = 0.
class ResonanceError : public KamError {
 public:
  ResonanceError(std::vector<int> k, double divisor);
  const std::vector<int>& wavevector() const { return k_; }
  double divisor() const { return divisor_; }

 private:
  std::vector<int> k_;
  double divisor_;
};

/// DK^T DK or <S> failed to be invertible.
class NondegeneracyError : public KamError {
 public:
  NondegeneracyError(const std::string& what, double smallest_singular_value)
      : KamError(what), smallest_sv_(smallest_singular_value) {}
  double smallest_singular_value() const { return smallest_sv_; }

 private:
  double smallest_sv_;
};

class DivergenceError : public KamError {
 public:
  using KamError::KamError;
};

class SmoothingError : public KamError {
 public:
  using KamError::KamError;
};

/// Configuration failed validation; carries every violation found.
class ConfigError : public KamError {
 public:
  explicit ConfigError(std::vector<std::string> violations);
  const std::vector<std::string>& violations() const { return violations_; }

 private:
  std::vector<std::string> violations_;
};

}  // namespace kamtori
