#include "odeq/dense.hpp"

#include <cmath>
#include <cstdlib>
#include <string>

#include "odeq/errors.hpp"

namespace odeq {

std::size_t dense_qubit_cap() {
  static const std::size_t cap = [] {
    if (const char* env = std::getenv("ODEQ_DENSE_CAP")) {
      const long v = std::strtol(env, nullptr, 10);
      if (v >= 1 && v <= 30) return static_cast<std::size_t>(v);
    }
    return std::size_t{12};
  }();
  return cap;
}

void require_dense_capacity(std::size_t n_qubits, const char* what) {
  if (n_qubits > dense_qubit_cap()) {
    throw CapacityError(std::string(what) + ": " + std::to_string(n_qubits) +
                        " qubits exceeds the dense cap of " +
                        std::to_string(dense_qubit_cap()));
  }
}

bool is_power_of_two(Eigen::Index dim) {
  return dim > 0 && (dim & (dim - 1)) == 0;
}

std::size_t qubit_count_for_dim(Eigen::Index dim) {
  if (!is_power_of_two(dim)) {
    throw DimensionError("matrix dimension " + std::to_string(dim) +
                         " is not a power of two");
  }
  std::size_t n = 0;
  while ((Eigen::Index{1} << n) < dim) ++n;
  return n;
}

bool approx_hermitian(const DenseMatrix& m, double tol) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

double spectral_norm(const DenseMatrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<DenseMatrix> solver(m.adjoint() * m,
                                                    Eigen::EigenvaluesOnly);
  const double top = solver.eigenvalues().maxCoeff();
  return std::sqrt(std::max(0.0, top));
}

DenseMatrix kron(const DenseMatrix& a, const DenseMatrix& b) {
  DenseMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

const DenseMatrix& pauli_matrix(char axis) {
  static const DenseMatrix id = DenseMatrix::Identity(2, 2);
  static const DenseMatrix x = [] {
    DenseMatrix m(2, 2);
    m << 0, 1, 1, 0;
    return m;
  }();
  static const DenseMatrix y = [] {
    DenseMatrix m(2, 2);
    m << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0);
    return m;
  }();
  static const DenseMatrix z = [] {
    DenseMatrix m(2, 2);
    m << 1, 0, 0, -1;
    return m;
  }();
  switch (axis) {
    case 'I': return id;
    case 'X': return x;
    case 'Y': return y;
    case 'Z': return z;
    default: throw ValidationError(std::string("unknown Pauli axis '") + axis + "'");
  }
}

namespace {

// One truncated-series application of e^{(t/steps) A}; terms are added until
// they stop contributing relative to the running result.
DenseVector taylor_apply(const DenseMatrix& a, const DenseVector& v,
                         double t_step) {
  DenseVector result = v;
  DenseVector term = v;
  const double base = std::max(v.norm(), 1e-300);
  for (int order = 1; order <= 120; ++order) {
    term = (t_step / order) * (a * term).eval();
    result += term;
    if (term.norm() <= 1e-18 * base) break;
  }
  return result;
}

DenseVector expm_pass(const DenseMatrix& a, const DenseVector& v, double t,
                      long steps) {
  DenseVector w = v;
  for (long k = 0; k < steps; ++k) w = taylor_apply(a, w, t / steps);
  return w;
}

}  // namespace

DenseVector expm_multiply(const DenseMatrix& a, const DenseVector& v, double t,
                          double rtol) {
  if (a.rows() != a.cols() || a.rows() != v.size()) {
    throw DimensionError("expm_multiply: incompatible shapes");
  }
  if (t == 0.0 || v.norm() == 0.0) return v;

  const double scale = a.cwiseAbs().rowwise().sum().maxCoeff();  // ||A||_inf
  long steps = std::max<long>(1, static_cast<long>(std::ceil(scale * std::abs(t))));
  DenseVector coarse = expm_pass(a, v, t, steps);
  for (int iter = 0; iter < 24; ++iter) {
    steps *= 2;
    DenseVector fine = expm_pass(a, v, t, steps);
    const double ref = std::max(fine.norm(), 1e-300);
    if ((fine - coarse).norm() <= rtol * ref) return fine;
    coarse = std::move(fine);
  }
  return coarse;
}

double fit_loglog_slope(const std::vector<double>& x,
                        const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw ValidationError("fit_loglog_slope: need >= 2 matched samples");
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) {
      throw ValidationError("fit_loglog_slope: samples must be positive");
    }
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw ValidationError("fit_loglog_slope: degenerate x");
  return (n * sxy - sx * sy) / denom;
}

}  // namespace odeq
