#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "odeq/pauli.hpp"
#include "odeq/rng.hpp"

namespace odeq {

/// Complex statevector over n qubits with a maintained squared norm.
///
/// Unnormalized states are first-class: projections shrink norm_sq and
/// nothing ever renormalizes implicitly. When a register contains an
/// ancilla it sits at qubit 0, the most significant bit of the amplitude
/// index, so the ancilla-|0> half is the first half of the array.
class StateVector {
 public:
  /// |0...0> on n qubits.
  explicit StateVector(std::size_t n_qubits);

  static StateVector basis(std::size_t n_qubits, std::uint64_t index);
  static StateVector uniform(std::size_t n_qubits);
  static StateVector from_amplitudes(std::size_t n_qubits,
                                     std::vector<Complex> amps);

  /// |0> (x) system: embeds a system state under a fresh ancilla qubit.
  static StateVector with_ancilla_zero(const StateVector& system);

  std::size_t num_qubits() const { return n_qubits_; }
  std::uint64_t dim() const { return std::uint64_t{1} << n_qubits_; }

  std::span<const Complex> amplitudes() const { return amps_; }
  Complex amplitude(std::uint64_t index) const { return amps_[index]; }

  double norm_sq() const { return norm_sq_; }
  /// Recomputes the cached squared norm from the amplitudes.
  double refresh_norm_sq();

  /// Engine plumbing: in-place kernels mutate through these.
  std::span<Complex> mutable_amplitudes() { return amps_; }
  void set_norm_sq(double value) { norm_sq_ = value; }

  /// Count of elementary (non-identity) Pauli rotations applied so far.
  std::uint64_t rotations_applied() const { return rotations_; }
  void count_rotation() { ++rotations_; }

 private:
  std::size_t n_qubits_;
  std::vector<Complex> amps_;
  double norm_sq_;
  std::uint64_t rotations_ = 0;
};

/// s <- e^{-i theta P} s, computed exactly as cos(theta) s - i sin(theta) P s.
void apply_pauli_exp(StateVector& s, const PauliString& p, double theta);

/// First-order product formula for e^{-i tau H}: applies e^{-i h_a tau P_a}
/// in canonical term order. H must be Hermitian. When H has fewer qubits
/// than the state, it acts on the trailing (least significant) qubits.
void apply_trotter_step(StateVector& s, const PauliSum& h, double tau);

/// First-order product formula for e^{-i theta G} over the terms of G.
void apply_pauli_sum_exp(StateVector& s, const PauliSum& g, double theta);

/// Applies |0><0| (x) I without renormalizing; returns the projection
/// probability (projected mass over previous mass).
double project_ancilla_zero(StateVector& s);

/// Born-rule measurement of the ancilla; collapses and renormalizes.
int sample_ancilla(StateVector& s, RngStream& rng);

/// sample_ancilla, then force the ancilla back to |0> (trace-out step).
void reset_ancilla(StateVector& s, RngStream& rng);

/// <s|O|s>, optionally divided by norm_sq. O must be Hermitian; when it has
/// one qubit fewer than the state it is padded with an identity on the
/// ancilla.
double expectation(const StateVector& s, const PauliSum& obs,
                   bool normalized = false);

}  // namespace odeq
