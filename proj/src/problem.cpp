#include "odeq/problem.hpp"

#include <cmath>
#include <string>

#include "odeq/errors.hpp"

namespace odeq {

Dilation build_dilation(const PauliSum& l, std::size_t jump_index) {
  const std::size_t n = l.num_qubits();
  std::vector<PauliTerm> g_terms;
  g_terms.reserve(2 * l.size());
  for (const auto& term : l.terms()) {
    const std::string& axes = term.string.axes();
    if (term.coeff.real() != 0.0) {
      g_terms.push_back({term.coeff.real(), PauliString('X' + axes)});
    }
    if (term.coeff.imag() != 0.0) {
      g_terms.push_back({term.coeff.imag(), PauliString('Y' + axes)});
    }
  }
  Dilation d;
  d.jump_index = jump_index;
  d.g_pauli = PauliSum(n + 1, std::move(g_terms));
  if (n + 1 <= dense_qubit_cap()) {
    const DenseMatrix l_dense = to_dense(l);
    const Eigen::Index dim = l_dense.rows();
    DenseMatrix g = DenseMatrix::Zero(2 * dim, 2 * dim);
    g.topRightCorner(dim, dim) = l_dense.adjoint();
    g.bottomLeftCorner(dim, dim) = l_dense;
    d.g_dense = std::move(g);
  }
  return d;
}

DilationResidual dilation_remainder(const DenseMatrix& l_dense,
                                    const DenseVector& psi, double tau) {
  const Eigen::Index dim = l_dense.rows();
  if (l_dense.cols() != dim || psi.size() != dim) {
    throw DimensionError("dilation_remainder: incompatible shapes");
  }
  DenseMatrix g = DenseMatrix::Zero(2 * dim, 2 * dim);
  g.topRightCorner(dim, dim) = l_dense.adjoint();
  g.bottomLeftCorner(dim, dim) = l_dense;

  DenseVector embedded = DenseVector::Zero(2 * dim);
  embedded.head(dim) = psi;
  const DenseVector evolved =
      expm_multiply(Complex(0, 1) * g, embedded, Dilation::angle(tau));

  const DenseMatrix ldl = l_dense.adjoint() * l_dense;
  const DenseVector first_order = psi - tau * (ldl * psi);

  DilationResidual r;
  r.residual = (evolved.head(dim) - first_order).norm();
  r.bound = (2.0 * tau * tau / 3.0) * (ldl * (ldl * psi)).norm();
  return r;
}

CoefficientSplit split_coefficient(const DenseMatrix& a) {
  if (a.rows() != a.cols()) {
    throw DimensionError("split_coefficient: matrix must be square");
  }
  CoefficientSplit split;
  split.v = (a + a.adjoint()) / 2.0;
  split.h = (a - a.adjoint()) / Complex(0, 2);
  return split;
}

DenseMatrix factorize_dissipator(const DenseMatrix& v, double tol) {
  if (v.rows() != v.cols()) {
    throw DimensionError("factorize_dissipator: matrix must be square");
  }
  if (!approx_hermitian(v, 1e-12 * std::max(1.0, v.norm()))) {
    throw ValidationError("factorize_dissipator: input is not Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<DenseMatrix> solver(v);
  const Eigen::VectorXd evals = solver.eigenvalues();
  const double max_eval = evals.maxCoeff();
  if (max_eval > tol) {
    throw DissipativeConditionError(max_eval, max_eval);
  }
  Eigen::VectorXd roots(evals.size());
  for (Eigen::Index i = 0; i < evals.size(); ++i) {
    roots[i] = std::sqrt(std::max(0.0, -evals[i]));
  }
  const DenseMatrix& u = solver.eigenvectors();
  return u * roots.asDiagonal() * u.adjoint();
}

OdeProblem::OdeProblem(PauliSum h, std::vector<PauliSum> jumps,
                       StateVector psi0, double final_time, double norm_shift)
    : n_(h.num_qubits()),
      h_(std::move(h)),
      jumps_(std::move(jumps)),
      psi0_(std::move(psi0)),
      final_time_(final_time),
      norm_shift_(norm_shift) {
  if (!h_.is_hermitian()) {
    throw ValidationError("OdeProblem: Hamiltonian must be Hermitian");
  }
  for (const auto& jump : jumps_) {
    if (jump.num_qubits() != n_) {
      throw DimensionError("OdeProblem: jump operator size differs");
    }
  }
  if (psi0_.num_qubits() != n_) {
    throw DimensionError("OdeProblem: initial state size differs");
  }
  if (!(final_time_ >= 0.0)) {
    throw ValidationError("OdeProblem: final time must be >= 0");
  }
  const double nsq = psi0_.norm_sq();
  if (!(nsq > 0.0) || !std::isfinite(nsq)) {
    throw ValidationError("OdeProblem: initial state must have finite norm > 0");
  }

  dilations_.reserve(jumps_.size());
  for (std::size_t j = 0; j < jumps_.size(); ++j) {
    dilations_.push_back(build_dilation(jumps_[j], j));
  }

  if (n_ <= dense_qubit_cap()) {
    const Eigen::Index dim = Eigen::Index{1} << n_;
    DenseMatrix a = Complex(0, -1) * to_dense(h_);
    DenseMatrix dissipator = DenseMatrix::Zero(dim, dim);
    for (const auto& jump : jumps_) {
      const DenseMatrix l = to_dense(jump);
      dissipator += l.adjoint() * l;
    }
    if (!jumps_.empty()) {
      Eigen::SelfAdjointEigenSolver<DenseMatrix> solver(dissipator,
                                                        Eigen::EigenvaluesOnly);
      if (solver.eigenvalues().minCoeff() < -1e-10) {
        throw ValidationError(
            "OdeProblem: dissipator lost positive semidefiniteness");
      }
    }
    a -= dissipator;
    generator_ = std::move(a);
  }
}

const DenseMatrix& OdeProblem::dense_generator() const {
  if (!generator_) {
    throw CapacityError("dense generator unavailable above the dense cap");
  }
  return *generator_;
}

DenseVector OdeProblem::psi0_dense() const {
  const auto amps = psi0_.amplitudes();
  DenseVector v(static_cast<Eigen::Index>(amps.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = amps[i];
  return v;
}

OdeProblem problem_from_dense(const DenseMatrix& a, StateVector psi0,
                              double final_time, double psd_tol_scale) {
  const std::size_t n = qubit_count_for_dim(a.rows());
  if (a.rows() != a.cols()) {
    throw DimensionError("problem_from_dense: matrix must be square");
  }
  const auto split = split_coefficient(a);
  // A = V + iH_split and the generator convention is A = -iH - L^dag L,
  // so the problem Hamiltonian is -H_split.
  const PauliSum h = pauli_decompose_dense(-split.h, n);
  std::vector<PauliSum> jumps;
  const double tol = psd_tol_scale * std::max(1.0, spectral_norm(split.v));
  const DenseMatrix l = factorize_dissipator(split.v, tol);
  if (l.norm() > PauliSum::kDropTolerance) {
    jumps.push_back(pauli_decompose_dense(l, n));
  }
  return OdeProblem(h, std::move(jumps), std::move(psi0), final_time);
}

void apply_dilated_jump(StateVector& s, const Dilation& d, double tau,
                        bool exact_dense) {
  if (tau < 0.0) {
    throw ValidationError("apply_dilated_jump: negative step duration");
  }
  const double theta = Dilation::angle(tau);
  if (!exact_dense) {
    // e^{+i theta G} term by term; apply_pauli_exp realizes e^{-i angle P}.
    for (const auto& term : d.g_pauli.terms()) {
      apply_pauli_exp(s, term.string, -theta * term.coeff.real());
    }
    return;
  }
  if (!d.g_dense) {
    throw CapacityError("apply_dilated_jump: dense dilation unavailable");
  }
  const auto amps = s.amplitudes();
  DenseVector v(static_cast<Eigen::Index>(amps.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = amps[i];
  const DenseVector evolved = expm_multiply(Complex(0, 1) * (*d.g_dense), v, theta);
  auto out = s.mutable_amplitudes();
  for (Eigen::Index i = 0; i < evolved.size(); ++i) out[i] = evolved[i];
}

}  // namespace odeq
