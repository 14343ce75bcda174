#pragma once

#include <compare>
#include <complex>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "odeq/dense.hpp"

namespace odeq {

/// Phase-free tensor product of single-qubit Pauli operators.
///
/// Character k of the axes string acts on qubit k, and qubit 0 is the most
/// significant bit of a basis-state index. Phases always live in the
/// coefficients of the enclosing sum, never in the string, so every
/// PauliString is Hermitian by construction.
class PauliString {
 public:
  explicit PauliString(std::string axes);

  static PauliString identity(std::size_t n);

  std::size_t num_qubits() const { return axes_.size(); }
  char axis(std::size_t qubit) const { return axes_[qubit]; }
  const std::string& axes() const { return axes_; }

  /// Number of non-identity factors.
  std::size_t weight() const;
  bool is_identity() const;

  friend auto operator<=>(const PauliString&, const PauliString&) = default;

 private:
  std::string axes_;
};

struct PauliTerm {
  Complex coeff;
  PauliString string;
};

/// Exact product P*Q = phase * R with phase in {1, -1, i, -i}.
std::pair<Complex, PauliString> multiply(const PauliString& p,
                                         const PauliString& q);

/// True iff PQ = -QP (odd number of qubit-wise conflicts).
bool anticommute(const PauliString& p, const PauliString& q);

/// Complex-weighted sum of Pauli strings in canonical form: terms sorted
/// lexicographically by axes, duplicates merged, magnitudes below the drop
/// tolerance removed.
class PauliSum {
 public:
  static constexpr double kDropTolerance = 1e-14;

  /// Empty (zero) operator on n qubits.
  explicit PauliSum(std::size_t n);
  PauliSum(std::size_t n, std::vector<PauliTerm> terms,
           double drop_tol = kDropTolerance);

  std::size_t num_qubits() const { return n_; }
  const std::vector<PauliTerm>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  /// Hermitian iff every canonical coefficient is real (within tol).
  bool is_hermitian(double tol = 1e-12) const;

  /// Largest string weight; 0 for the zero operator.
  std::size_t max_weight() const;

  PauliSum& operator+=(const PauliSum& other);
  PauliSum& operator-=(const PauliSum& other);
  PauliSum& operator*=(Complex scalar);

 private:
  std::size_t n_;
  std::vector<PauliTerm> terms_;

  void canonicalize(double drop_tol);
};

PauliSum operator+(PauliSum lhs, const PauliSum& rhs);
PauliSum operator-(PauliSum lhs, const PauliSum& rhs);
PauliSum operator*(Complex scalar, PauliSum s);
PauliSum operator*(PauliSum s, Complex scalar);

/// Full operator product with exact Pauli phases.
PauliSum operator*(const PauliSum& lhs, const PauliSum& rhs);

/// Conjugates coefficients (strings are self-adjoint).
PauliSum adjoint(const PauliSum& s);

/// ST - TS, simplified exactly (no truncation beyond the drop tolerance).
PauliSum commutator(const PauliSum& s, const PauliSum& t);

/// Same operator acting on `count` extra leading qubits as the identity.
PauliSum prepend_identities(const PauliSum& s, std::size_t count);

/// 2^n x 2^n matrix of the sum; subject to the dense cap.
DenseMatrix to_dense(const PauliSum& s);

/// Inverse of to_dense: coeff(P) = trace(P * m) / 2^n for every string P,
/// with coefficients below drop_tol discarded.
PauliSum pauli_decompose_dense(const DenseMatrix& m, std::size_t n,
                               double drop_tol = PauliSum::kDropTolerance);

}  // namespace odeq
