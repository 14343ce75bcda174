#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "odeq/dense.hpp"
#include "odeq/pauli.hpp"
#include "odeq/state_vector.hpp"

namespace odeq {

/// Hermitian dilation of a jump operator L: the block operator
///
///     G = [ 0   L^dag ]
///         [ L   0     ]
///
/// on one ancilla plus the system register. In Pauli form, a term lambda*P
/// of L contributes Re(lambda) X(x)P + Im(lambda) Y(x)P, with the ancilla
/// factor on qubit 0, so G is one weight heavier than L and no more.
struct Dilation {
  std::size_t jump_index = 0;
  PauliSum g_pauli;                    // over 1 + n qubits
  std::optional<DenseMatrix> g_dense;  // built when 1 + n fits the dense cap

  /// Rotation angle realizing a dissipative step of duration tau.
  static double angle(double tau) { return std::sqrt(2.0 * tau); }
};

Dilation build_dilation(const PauliSum& l, std::size_t jump_index = 0);

/// Linear-in-the-state dissipative step identity behind the dilation: for
/// any unit psi and tau in (0, 1],
///   || (<0| (x) I) e^{i sqrt(2 tau) G} |0>psi - (I - tau L^dag L) psi ||
///     <= (2 tau^2 / 3) || (L^dag L)^2 psi ||.
/// Exposed for tests; evaluates both sides densely.
struct DilationResidual {
  double residual;
  double bound;
};
DilationResidual dilation_remainder(const DenseMatrix& l_dense,
                                    const DenseVector& psi, double tau);

struct CoefficientSplit {
  DenseMatrix h;  // (A - A^dag) / (2i), Hermitian
  DenseMatrix v;  // (A + A^dag) / 2, Hermitian
};

/// Splits a square matrix as A = V + iH with both parts Hermitian.
CoefficientSplit split_coefficient(const DenseMatrix& a);

/// Principal square root of -V via Hermitian eigendecomposition.
/// Eigenvalues of -V in (-tol, 0) are clipped to zero; an eigenvalue of V
/// above +tol raises DissipativeConditionError with the shift that fixes it.
DenseMatrix factorize_dissipator(const DenseMatrix& v, double tol);

/// Validated instance of d psi / dt = (-iH - sum_j L_j^dag L_j) psi.
///
/// H must be Hermitian; the jump operators are arbitrary Pauli sums over the
/// same register. psi0 may be unnormalized (its norm is first-class data).
/// Below the dense cap the generator A and all dilations also carry dense
/// shadows for oracle use.
class OdeProblem {
 public:
  OdeProblem(PauliSum h, std::vector<PauliSum> jumps, StateVector psi0,
             double final_time, double norm_shift = 0.0);

  std::size_t num_qubits() const { return n_; }
  const PauliSum& hamiltonian() const { return h_; }
  const std::vector<PauliSum>& jumps() const { return jumps_; }
  const std::vector<Dilation>& dilations() const { return dilations_; }
  const StateVector& psi0() const { return psi0_; }
  double final_time() const { return final_time_; }

  /// Uniform spectral shift that was subtracted from the original generator
  /// to enforce the dissipative condition; multiply the final state by
  /// e^{norm_shift * T} to undo it. Zero unless a builder recorded one.
  double norm_shift() const { return norm_shift_; }

  bool dense_available() const { return generator_.has_value(); }
  /// A = -iH - sum_j L_j^dag L_j. CapacityError above the dense cap.
  const DenseMatrix& dense_generator() const;
  DenseVector psi0_dense() const;

 private:
  std::size_t n_;
  PauliSum h_;
  std::vector<PauliSum> jumps_;
  std::vector<Dilation> dilations_;
  StateVector psi0_;
  double final_time_;
  double norm_shift_;
  std::optional<DenseMatrix> generator_;
};

/// Builds a problem from a dense generator: splits A = V + iH, factorizes
/// V = -L^dag L with a single Hermitian jump, and lifts both parts to Pauli
/// form. psd_tol scales with the norm of V (default 1e-10 * ||V||).
OdeProblem problem_from_dense(const DenseMatrix& a, StateVector psi0,
                              double final_time, double psd_tol_scale = 1e-10);

/// s <- e^{i sqrt(2 tau) G} s. The default path rotates term by term through
/// G's Pauli form (first-order product formula); exact_dense uses the dense
/// block operator instead and requires it to be present.
void apply_dilated_jump(StateVector& s, const Dilation& d, double tau,
                        bool exact_dense = false);

}  // namespace odeq
