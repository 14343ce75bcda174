#pragma once

#include <stdexcept>
#include <string>

namespace odeq {

/// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Operands act on different qubit counts / incompatible shapes.
struct DimensionError : Error {
  using Error::Error;
};

/// Requested dense (or statevector) object exceeds the configured size cap.
struct CapacityError : Error {
  using Error::Error;
};

/// Input violates a construction contract (non-Hermitian Hamiltonian,
/// negative time, zero-norm initial state, ...).
struct ValidationError : Error {
  using Error::Error;
};

/// A measurement or projection was requested on a zero-norm state.
struct DegenerateStateError : Error {
  using Error::Error;
};

/// Step-count selection is impossible (vanishing solution-norm bound).
struct UnsolvableTargetError : Error {
  using Error::Error;
};

/// Survival probability fell below the representable floor.
struct UnderflowError : Error {
  using Error::Error;
};

/// Malformed experiment configuration.
struct ConfigError : Error {
  using Error::Error;
};

/// The Hermitian part of the generator has a positive eigenvalue, so no
/// factorization V = -L^dag L exists. Carries the offending eigenvalue and
/// the uniform spectral shift that would restore the dissipative condition.
class DissipativeConditionError : public Error {
 public:
  DissipativeConditionError(double max_eigenvalue, double suggested_shift)
      : Error("dissipative condition violated: max eigenvalue " +
              std::to_string(max_eigenvalue) + " > 0; subtracting " +
              std::to_string(suggested_shift) +
              " * I from the generator would fix it"),
        max_eigenvalue_(max_eigenvalue),
        suggested_shift_(suggested_shift) {}

  double max_eigenvalue() const noexcept { return max_eigenvalue_; }
  double suggested_shift() const noexcept { return suggested_shift_; }

 private:
  double max_eigenvalue_;
  double suggested_shift_;
};

}  // namespace odeq
