#include "odeq/pauli.hpp"

#include <algorithm>
#include <cmath>

#include "odeq/errors.hpp"

namespace odeq {

namespace {

bool valid_axis(char c) { return c == 'I' || c == 'X' || c == 'Y' || c == 'Z'; }

// Single-qubit products: X*Y = iZ and cyclic, reversed order flips the sign.
// Returns the resulting axis and the power of i picked up.
std::pair<char, int> axis_product(char a, char b) {
  if (a == 'I') return {b, 0};
  if (b == 'I') return {a, 0};
  if (a == b) return {'I', 0};
  static constexpr char kThird[3][3] = {
      // a\b   X    Y    Z
      /*X*/ {'\0', 'Z', 'Y'},
      /*Y*/ {'Z', '\0', 'X'},
      /*Z*/ {'Y', 'X', '\0'},
  };
  const int ia = a == 'X' ? 0 : (a == 'Y' ? 1 : 2);
  const int ib = b == 'X' ? 0 : (b == 'Y' ? 1 : 2);
  // Cyclic (X->Y->Z->X) gives +i, anti-cyclic gives -i (power 3).
  const bool cyclic = (ib - ia + 3) % 3 == 1;
  return {kThird[ia][ib], cyclic ? 1 : 3};
}

Complex i_power(int exponent) {
  switch (((exponent % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

}  // namespace

PauliString::PauliString(std::string axes) : axes_(std::move(axes)) {
  for (char c : axes_) {
    if (!valid_axis(c)) {
      throw ValidationError(std::string("invalid Pauli axis '") + c + "'");
    }
  }
}

PauliString PauliString::identity(std::size_t n) {
  return PauliString(std::string(n, 'I'));
}

std::size_t PauliString::weight() const {
  return static_cast<std::size_t>(
      std::count_if(axes_.begin(), axes_.end(), [](char c) { return c != 'I'; }));
}

bool PauliString::is_identity() const { return weight() == 0; }

std::pair<Complex, PauliString> multiply(const PauliString& p,
                                         const PauliString& q) {
  if (p.num_qubits() != q.num_qubits()) {
    throw DimensionError("Pauli product: operand sizes differ");
  }
  std::string axes(p.num_qubits(), 'I');
  int phase_exp = 0;
  for (std::size_t k = 0; k < axes.size(); ++k) {
    const auto [axis, exp] = axis_product(p.axis(k), q.axis(k));
    axes[k] = axis;
    phase_exp += exp;
  }
  return {i_power(phase_exp), PauliString(std::move(axes))};
}

bool anticommute(const PauliString& p, const PauliString& q) {
  if (p.num_qubits() != q.num_qubits()) {
    throw DimensionError("anticommute: operand sizes differ");
  }
  std::size_t conflicts = 0;
  for (std::size_t k = 0; k < p.num_qubits(); ++k) {
    const char a = p.axis(k);
    const char b = q.axis(k);
    if (a != 'I' && b != 'I' && a != b) ++conflicts;
  }
  return conflicts % 2 == 1;
}

PauliSum::PauliSum(std::size_t n) : n_(n) {}

PauliSum::PauliSum(std::size_t n, std::vector<PauliTerm> terms, double drop_tol)
    : n_(n), terms_(std::move(terms)) {
  for (const auto& term : terms_) {
    if (term.string.num_qubits() != n_) {
      throw DimensionError("PauliSum: term size differs from qubit count");
    }
    if (!std::isfinite(term.coeff.real()) || !std::isfinite(term.coeff.imag())) {
      throw ValidationError("PauliSum: non-finite coefficient");
    }
  }
  canonicalize(drop_tol);
}

void PauliSum::canonicalize(double drop_tol) {
  std::sort(terms_.begin(), terms_.end(),
            [](const PauliTerm& a, const PauliTerm& b) {
              return a.string < b.string;
            });
  std::vector<PauliTerm> merged;
  merged.reserve(terms_.size());
  for (auto& term : terms_) {
    if (!merged.empty() && merged.back().string == term.string) {
      merged.back().coeff += term.coeff;
    } else {
      merged.push_back(std::move(term));
    }
  }
  std::erase_if(merged, [drop_tol](const PauliTerm& t) {
    return std::abs(t.coeff) < drop_tol;
  });
  terms_ = std::move(merged);
}

bool PauliSum::is_hermitian(double tol) const {
  return std::all_of(terms_.begin(), terms_.end(), [tol](const PauliTerm& t) {
    return std::abs(t.coeff.imag()) <= tol;
  });
}

std::size_t PauliSum::max_weight() const {
  std::size_t w = 0;
  for (const auto& term : terms_) w = std::max(w, term.string.weight());
  return w;
}

PauliSum& PauliSum::operator+=(const PauliSum& other) {
  if (other.n_ != n_) throw DimensionError("PauliSum +=: size mismatch");
  terms_.insert(terms_.end(), other.terms_.begin(), other.terms_.end());
  canonicalize(kDropTolerance);
  return *this;
}

PauliSum& PauliSum::operator-=(const PauliSum& other) {
  return *this += Complex(-1.0, 0.0) * other;
}

PauliSum& PauliSum::operator*=(Complex scalar) {
  for (auto& term : terms_) term.coeff *= scalar;
  canonicalize(kDropTolerance);
  return *this;
}

PauliSum operator+(PauliSum lhs, const PauliSum& rhs) { return lhs += rhs; }
PauliSum operator-(PauliSum lhs, const PauliSum& rhs) { return lhs -= rhs; }
PauliSum operator*(Complex scalar, PauliSum s) { return s *= scalar; }
PauliSum operator*(PauliSum s, Complex scalar) { return s *= scalar; }

PauliSum operator*(const PauliSum& lhs, const PauliSum& rhs) {
  if (lhs.num_qubits() != rhs.num_qubits()) {
    throw DimensionError("PauliSum *: size mismatch");
  }
  std::vector<PauliTerm> terms;
  terms.reserve(lhs.size() * rhs.size());
  for (const auto& a : lhs.terms()) {
    for (const auto& b : rhs.terms()) {
      auto [phase, string] = multiply(a.string, b.string);
      terms.push_back({a.coeff * b.coeff * phase, std::move(string)});
    }
  }
  return PauliSum(lhs.num_qubits(), std::move(terms));
}

PauliSum adjoint(const PauliSum& s) {
  std::vector<PauliTerm> terms = s.terms();
  for (auto& term : terms) term.coeff = std::conj(term.coeff);
  return PauliSum(s.num_qubits(), std::move(terms));
}

PauliSum commutator(const PauliSum& s, const PauliSum& t) {
  return s * t - t * s;
}

PauliSum prepend_identities(const PauliSum& s, std::size_t count) {
  std::vector<PauliTerm> terms;
  terms.reserve(s.size());
  const std::string pad(count, 'I');
  for (const auto& term : s.terms()) {
    terms.push_back({term.coeff, PauliString(pad + term.string.axes())});
  }
  return PauliSum(s.num_qubits() + count, std::move(terms));
}

DenseMatrix to_dense(const PauliSum& s) {
  const std::size_t n = s.num_qubits();
  require_dense_capacity(n, "to_dense");
  const Eigen::Index dim = Eigen::Index{1} << n;
  DenseMatrix m = DenseMatrix::Zero(dim, dim);
  for (const auto& term : s.terms()) {
    for (Eigen::Index col = 0; col < dim; ++col) {
      // P|col> = phase |row>, accumulated axis by axis.
      Eigen::Index row = col;
      Complex phase = 1.0;
      for (std::size_t q = 0; q < n; ++q) {
        const Eigen::Index bit_pos = static_cast<Eigen::Index>(n - 1 - q);
        const bool bit = (col >> bit_pos) & 1;
        switch (term.string.axis(q)) {
          case 'X': row ^= (Eigen::Index{1} << bit_pos); break;
          case 'Y':
            row ^= (Eigen::Index{1} << bit_pos);
            phase *= bit ? Complex(0, -1) : Complex(0, 1);
            break;
          case 'Z':
            if (bit) phase = -phase;
            break;
          default: break;
        }
      }
      m(row, col) += term.coeff * phase;
    }
  }
  return m;
}

namespace {

// Recursive qubit-by-qubit block decomposition: writing the matrix in the
// leading qubit's 2x2 block form [[A, B], [C, D]],
//   M = I (x) (A+D)/2 + Z (x) (A-D)/2 + X (x) (B+C)/2 + Y (x) i(B-C)/2.
// Subblocks whose Frobenius norm cannot produce a coefficient above the
// tolerance are pruned.
void decompose_block(const DenseMatrix& m, std::string& prefix,
                     double drop_tol, std::vector<PauliTerm>& out) {
  const Eigen::Index dim = m.rows();
  if (dim == 1) {
    if (std::abs(m(0, 0)) >= drop_tol) {
      out.push_back({m(0, 0), PauliString(prefix)});
    }
    return;
  }
  const Eigen::Index h = dim / 2;
  const auto a = m.topLeftCorner(h, h);
  const auto b = m.topRightCorner(h, h);
  const auto c = m.bottomLeftCorner(h, h);
  const auto d = m.bottomRightCorner(h, h);

  const DenseMatrix comp_i = (a + d) / 2.0;
  const DenseMatrix comp_z = (a - d) / 2.0;
  const DenseMatrix comp_x = (b + c) / 2.0;
  const DenseMatrix comp_y = Complex(0, 1) * (b - c) / 2.0;

  const std::pair<char, const DenseMatrix*> parts[] = {
      {'I', &comp_i}, {'X', &comp_x}, {'Y', &comp_y}, {'Z', &comp_z}};
  for (const auto& [axis, block] : parts) {
    if (block->norm() < drop_tol * 0.5) continue;
    prefix.push_back(axis);
    decompose_block(*block, prefix, drop_tol, out);
    prefix.pop_back();
  }
}

}  // namespace

PauliSum pauli_decompose_dense(const DenseMatrix& m, std::size_t n,
                               double drop_tol) {
  require_dense_capacity(n, "pauli_decompose_dense");
  const Eigen::Index dim = Eigen::Index{1} << n;
  if (m.rows() != m.cols() || m.rows() != dim) {
    throw DimensionError("pauli_decompose_dense: expected a " +
                         std::to_string(dim) + "x" + std::to_string(dim) +
                         " matrix");
  }
  std::vector<PauliTerm> terms;
  std::string prefix;
  prefix.reserve(n);
  decompose_block(m, prefix, drop_tol, terms);
  return PauliSum(n, std::move(terms), drop_tol);
}

}  // namespace odeq
