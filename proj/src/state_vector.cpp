#include "odeq/state_vector.hpp"

#include <bit>
#include <cmath>

#include "odeq/errors.hpp"

namespace odeq {

namespace {

constexpr std::size_t kMaxQubits = 26;

// Bit masks describing a string's action on amplitude indices: indices flip
// under xflip (X and Y factors); the per-index phase is
// i^{y_count} * (-1)^{popcount(index & phase_mask)} with phase_mask covering
// the Y and Z factors.
struct StringMasks {
  std::uint64_t xflip = 0;
  std::uint64_t phase_mask = 0;
  int y_count = 0;
};

StringMasks masks_for(const PauliString& p, std::size_t n_qubits) {
  StringMasks m;
  for (std::size_t q = 0; q < n_qubits; ++q) {
    const std::uint64_t bit = std::uint64_t{1} << (n_qubits - 1 - q);
    switch (p.axis(q)) {
      case 'X': m.xflip |= bit; break;
      case 'Y':
        m.xflip |= bit;
        m.phase_mask |= bit;
        ++m.y_count;
        break;
      case 'Z': m.phase_mask |= bit; break;
      default: break;
    }
  }
  return m;
}

Complex i_to(int exponent) {
  switch (((exponent % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

// Phase of P acting on basis state |index>: P|index> = phase |index ^ xflip>.
inline Complex string_phase(const StringMasks& m, std::uint64_t index) {
  Complex phase = i_to(m.y_count);
  if (std::popcount(index & m.phase_mask) & 1) phase = -phase;
  return phase;
}

}  // namespace

StateVector::StateVector(std::size_t n_qubits)
    : n_qubits_(n_qubits), norm_sq_(1.0) {
  if (n_qubits > kMaxQubits) {
    throw CapacityError("statevector over " + std::to_string(n_qubits) +
                        " qubits exceeds the register cap");
  }
  amps_.assign(std::size_t{1} << n_qubits, Complex{0.0, 0.0});
  amps_[0] = 1.0;
}

StateVector StateVector::basis(std::size_t n_qubits, std::uint64_t index) {
  StateVector s(n_qubits);
  if (index >= s.dim()) throw ValidationError("basis index out of range");
  s.amps_[0] = 0.0;
  s.amps_[index] = 1.0;
  return s;
}

StateVector StateVector::uniform(std::size_t n_qubits) {
  StateVector s(n_qubits);
  const double amp = 1.0 / std::sqrt(static_cast<double>(s.dim()));
  std::fill(s.amps_.begin(), s.amps_.end(), Complex{amp, 0.0});
  return s;
}

StateVector StateVector::from_amplitudes(std::size_t n_qubits,
                                         std::vector<Complex> amps) {
  StateVector s(n_qubits);
  if (amps.size() != s.dim()) {
    throw DimensionError("amplitude count does not match qubit count");
  }
  s.amps_ = std::move(amps);
  s.refresh_norm_sq();
  if (!std::isfinite(s.norm_sq_)) {
    throw ValidationError("non-finite amplitudes");
  }
  return s;
}

StateVector StateVector::with_ancilla_zero(const StateVector& system) {
  StateVector s(system.num_qubits() + 1);
  s.amps_.assign(s.dim(), Complex{0.0, 0.0});
  std::copy(system.amps_.begin(), system.amps_.end(), s.amps_.begin());
  s.norm_sq_ = system.norm_sq_;
  return s;
}

double StateVector::refresh_norm_sq() {
  double total = 0.0;
  for (const Complex& a : amps_) total += std::norm(a);
  norm_sq_ = total;
  return total;
}

void apply_pauli_exp(StateVector& s, const PauliString& p, double theta) {
  if (p.num_qubits() != s.num_qubits()) {
    throw DimensionError("apply_pauli_exp: string size differs from register");
  }
  auto amps = s.mutable_amplitudes();
  const auto m = masks_for(p, s.num_qubits());

  if (p.is_identity()) {
    // Pure global phase; not an elementary rotation.
    const Complex factor{std::cos(theta), -std::sin(theta)};
    for (auto& a : amps) a *= factor;
    return;
  }
  s.count_rotation();

  const double c = std::cos(theta);
  const double sn = std::sin(theta);
  if (m.xflip == 0) {
    // Diagonal string: amplitude-wise phase e^{-i theta (+-1)}.
    const Complex plus{c, -sn};
    const Complex minus{c, sn};
    for (std::uint64_t idx = 0; idx < amps.size(); ++idx) {
      amps[idx] *= (std::popcount(idx & m.phase_mask) & 1) ? minus : plus;
    }
    return;
  }

  const Complex mi_sin{0.0, -sn};  // -i sin(theta)
  for (std::uint64_t idx = 0; idx < amps.size(); ++idx) {
    const std::uint64_t partner = idx ^ m.xflip;
    if (partner < idx) continue;
    const Complex a = amps[idx];
    const Complex b = amps[partner];
    // (P s)[idx] = phase(partner) * s[partner] and vice versa.
    amps[idx] = c * a + mi_sin * string_phase(m, partner) * b;
    amps[partner] = c * b + mi_sin * string_phase(m, idx) * a;
  }
}

void apply_trotter_step(StateVector& s, const PauliSum& h, double tau) {
  if (!h.is_hermitian()) {
    throw ValidationError("apply_trotter_step: Hamiltonian must be Hermitian");
  }
  const PauliSum& embedded =
      h.num_qubits() == s.num_qubits()
          ? h
          : prepend_identities(h, s.num_qubits() - h.num_qubits());
  for (const auto& term : embedded.terms()) {
    apply_pauli_exp(s, term.string, tau * term.coeff.real());
  }
}

void apply_pauli_sum_exp(StateVector& s, const PauliSum& g, double theta) {
  if (!g.is_hermitian()) {
    throw ValidationError("apply_pauli_sum_exp: generator must be Hermitian");
  }
  for (const auto& term : g.terms()) {
    apply_pauli_exp(s, term.string, theta * term.coeff.real());
  }
}

double project_ancilla_zero(StateVector& s) {
  const double before = s.norm_sq();
  if (before <= 0.0) {
    throw DegenerateStateError("project_ancilla_zero: zero-norm state");
  }
  auto amps = s.mutable_amplitudes();
  const std::uint64_t half = s.dim() / 2;
  double kept = 0.0;
  for (std::uint64_t idx = 0; idx < half; ++idx) kept += std::norm(amps[idx]);
  for (std::uint64_t idx = half; idx < s.dim(); ++idx) amps[idx] = 0.0;
  s.set_norm_sq(kept);
  return kept / before;
}

int sample_ancilla(StateVector& s, RngStream& rng) {
  auto amps = s.mutable_amplitudes();
  const std::uint64_t half = s.dim() / 2;
  double mass_zero = 0.0;
  double mass_one = 0.0;
  for (std::uint64_t idx = 0; idx < half; ++idx) {
    mass_zero += std::norm(amps[idx]);
    mass_one += std::norm(amps[half + idx]);
  }
  const double total = mass_zero + mass_one;
  if (total <= 0.0) {
    throw DegenerateStateError("sample_ancilla: zero-norm state");
  }
  // p = 0 and p = 1 are exact here, so the drawn branch always has mass.
  const double p_zero = mass_zero / total;
  const int outcome = rng.uniform() < p_zero ? 0 : 1;

  const std::uint64_t keep_begin = outcome == 0 ? 0 : half;
  const std::uint64_t zero_begin = outcome == 0 ? half : 0;
  const double kept = outcome == 0 ? mass_zero : mass_one;
  const double inv = 1.0 / std::sqrt(kept);
  for (std::uint64_t k = 0; k < half; ++k) {
    amps[zero_begin + k] = 0.0;
    amps[keep_begin + k] *= inv;
  }
  s.set_norm_sq(1.0);
  return outcome;
}

void reset_ancilla(StateVector& s, RngStream& rng) {
  const int outcome = sample_ancilla(s, rng);
  if (outcome == 1) {
    auto amps = s.mutable_amplitudes();
    const std::uint64_t half = s.dim() / 2;
    for (std::uint64_t k = 0; k < half; ++k) {
      amps[k] = amps[half + k];
      amps[half + k] = 0.0;
    }
  }
}

double expectation(const StateVector& s, const PauliSum& obs, bool normalized) {
  if (!obs.is_hermitian()) {
    throw ValidationError("expectation: observable must be Hermitian");
  }
  const PauliSum& op = obs.num_qubits() == s.num_qubits()
                           ? obs
                           : prepend_identities(obs, s.num_qubits() -
                                                         obs.num_qubits());
  if (op.num_qubits() != s.num_qubits()) {
    throw DimensionError("expectation: observable size differs from register");
  }
  const auto amps = s.amplitudes();
  double value = 0.0;
  for (const auto& term : op.terms()) {
    const auto m = masks_for(term.string, s.num_qubits());
    Complex acc{0.0, 0.0};
    for (std::uint64_t idx = 0; idx < amps.size(); ++idx) {
      acc += std::conj(amps[idx]) * string_phase(m, idx ^ m.xflip) *
             amps[idx ^ m.xflip];
    }
    value += (term.coeff * acc).real();
  }
  if (normalized) {
    const double nsq = s.norm_sq();
    if (nsq <= 0.0) throw DegenerateStateError("expectation: zero-norm state");
    value /= nsq;
  }
  return value;
}

}  // namespace odeq
