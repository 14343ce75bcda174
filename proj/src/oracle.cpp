#include "odeq/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "odeq/errors.hpp"

namespace odeq {

DenseVector expm_apply(const DenseMatrix& a, const DenseVector& v, double t) {
  if (a.rows() != a.cols() || a.rows() != v.size()) {
    throw DimensionError("expm_apply: incompatible shapes");
  }
  qubit_count_for_dim(a.rows());
  require_dense_capacity(qubit_count_for_dim(a.rows()), "expm_apply");
  if (!(t >= 0.0)) throw ValidationError("expm_apply: t must be >= 0");
  if (!a.allFinite() || !v.allFinite()) {
    throw ValidationError("expm_apply: non-finite entries");
  }
  return expm_multiply(a, v, t);
}

DenseVector solution_at(const OdeProblem& problem, double t) {
  return expm_apply(problem.dense_generator(), problem.psi0_dense(), t);
}

DenseMatrix exact_step_dense(const OdeProblem& problem, double tau) {
  require_dense_capacity(problem.num_qubits() + 1, "exact_step_dense");
  const Eigen::Index dim = Eigen::Index{1} << problem.num_qubits();
  const DenseMatrix h = to_dense(problem.hamiltonian());
  const double theta = Dilation::angle(tau);

  DenseMatrix step(dim, dim);
  for (Eigen::Index col = 0; col < dim; ++col) {
    DenseVector sys = DenseVector::Zero(dim);
    sys[col] = 1.0;
    sys = expm_multiply(Complex(0, -1) * h, sys, tau);
    DenseVector full = DenseVector::Zero(2 * dim);
    full.head(dim) = sys;
    for (const auto& dilation : problem.dilations()) {
      full = expm_multiply(Complex(0, 1) * (*dilation.g_dense), full, theta);
      full.tail(dim).setZero();
    }
    step.col(col) = full.head(dim);
  }
  return step;
}

namespace {

DenseMatrix lindblad_rhs(const DenseMatrix& a,
                         const std::vector<DenseMatrix>& jumps,
                         const DenseMatrix& rho) {
  DenseMatrix out = a * rho + rho * a.adjoint();
  for (const auto& l : jumps) {
    out += 2.0 * (l * rho * l.adjoint());
  }
  return out;
}

DenseMatrix rk4_step(const DenseMatrix& a, const std::vector<DenseMatrix>& jumps,
                     const DenseMatrix& rho, double h) {
  const DenseMatrix k1 = lindblad_rhs(a, jumps, rho);
  const DenseMatrix k2 = lindblad_rhs(a, jumps, rho + (h / 2) * k1);
  const DenseMatrix k3 = lindblad_rhs(a, jumps, rho + (h / 2) * k2);
  const DenseMatrix k4 = lindblad_rhs(a, jumps, rho + h * k3);
  return rho + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4);
}

std::vector<DenseMatrix> lindblad_pass(const DenseMatrix& a,
                                       const std::vector<DenseMatrix>& jumps,
                                       const DenseMatrix& rho0,
                                       const std::vector<double>& t_grid,
                                       long substeps_per_unit) {
  std::vector<DenseMatrix> out;
  out.reserve(t_grid.size());
  DenseMatrix rho = rho0;
  double t = 0.0;
  for (double target : t_grid) {
    const double span = target - t;
    if (span < 0.0) {
      throw ValidationError("lindblad_rk4: time grid must be non-decreasing");
    }
    if (span > 0.0) {
      const long steps = std::max<long>(
          1, static_cast<long>(std::ceil(span * substeps_per_unit)));
      const double h = span / steps;
      for (long k = 0; k < steps; ++k) rho = rk4_step(a, jumps, rho, h);
      t = target;
    }
    out.push_back(rho);
  }
  return out;
}

}  // namespace

std::vector<DenseMatrix> lindblad_rk4(const OdeProblem& problem,
                                      const std::vector<double>& t_grid) {
  require_dense_capacity(problem.num_qubits(), "lindblad_rk4");
  const DenseMatrix& a = problem.dense_generator();
  std::vector<DenseMatrix> jumps;
  jumps.reserve(problem.jumps().size());
  for (const auto& jump : problem.jumps()) jumps.push_back(to_dense(jump));

  const DenseVector psi0 = problem.psi0_dense();
  DenseMatrix rho0 = psi0 * psi0.adjoint();
  rho0 /= rho0.trace().real();

  long density = 64;
  auto coarse = lindblad_pass(a, jumps, rho0, t_grid, density);
  for (int iter = 0; iter < 16; ++iter) {
    density *= 2;
    auto fine = lindblad_pass(a, jumps, rho0, t_grid, density);
    double diff = 0.0;
    double trace_dev = 0.0;
    for (std::size_t k = 0; k < t_grid.size(); ++k) {
      diff = std::max(diff, (fine[k] - coarse[k]).norm());
      trace_dev = std::max(trace_dev, std::abs(fine[k].trace().real() - 1.0));
    }
    if (diff <= 1e-8 && trace_dev <= 1e-8) return fine;
    coarse = std::move(fine);
  }
  throw ValidationError("lindblad_rk4: integration failed to converge");
}

BoundQuantities compute_bound_quantities(const OdeProblem& problem,
                                         int grid_points) {
  require_dense_capacity(problem.num_qubits(), "compute_bound_quantities");
  if (grid_points < 2) {
    throw ValidationError("compute_bound_quantities: need >= 2 grid points");
  }
  BoundQuantities q;

  // Trotter commutator sum over the generator splitting A_0 = -iH,
  // A_j = -L_j^dag L_j, evaluated exactly in Pauli algebra.
  const std::size_t n = problem.num_qubits();
  std::vector<PauliSum> parts;
  parts.push_back(Complex(0, -1) * problem.hamiltonian());
  for (const auto& jump : problem.jumps()) {
    parts.push_back(Complex(-1, 0) * (adjoint(jump) * jump));
  }
  PauliSum prefix(n);
  for (const auto& part : parts) {
    const PauliSum comm = commutator(prefix, part);
    if (!comm.empty()) q.commutator_sum += spectral_norm(to_dense(comm));
    prefix += part;
  }

  // Squared jump generators for the dissipative branch.
  std::vector<DenseMatrix> ldl_sq;
  for (const auto& jump : problem.jumps()) {
    const DenseMatrix l = to_dense(jump);
    const DenseMatrix ldl = l.adjoint() * l;
    ldl_sq.push_back(ldl * ldl);
  }

  const DenseMatrix& a = problem.dense_generator();
  const DenseVector psi0 = problem.psi0_dense();
  const double total_time = problem.final_time();

  const auto suprema_on_grid = [&](int points) {
    std::pair<double, std::vector<double>> result{0.0,
                                                  std::vector<double>(ldl_sq.size(), 0.0)};
    for (int k = 0; k < points; ++k) {
      const double t = total_time * k / (points - 1);
      const DenseVector psi = expm_multiply(a, psi0, t);
      result.first = std::max(result.first, psi.norm());
      for (std::size_t j = 0; j < ldl_sq.size(); ++j) {
        result.second[j] = std::max(result.second[j], (ldl_sq[j] * psi).norm());
      }
    }
    return result;
  };

  auto coarse = suprema_on_grid(grid_points);
  int points = grid_points;
  for (int iter = 0; iter < 5; ++iter) {
    points *= 2;
    auto fine = suprema_on_grid(points);
    const double ref = std::max({fine.first, 1e-300});
    bool stable = std::abs(fine.first - coarse.first) <= 0.01 * ref;
    for (std::size_t j = 0; stable && j < ldl_sq.size(); ++j) {
      stable = std::abs(fine.second[j] - coarse.second[j]) <=
               0.01 * std::max(fine.second[j], 1e-300);
    }
    coarse = std::move(fine);
    if (stable) break;
  }

  q.sup_psi = coarse.first;
  for (double v : coarse.second) q.sup_L4 += v;
  q.final_norm = expm_multiply(a, psi0, total_time).norm();
  return q;
}

double cumulative_error_bound(const BoundQuantities& bounds, double total_time,
                              int steps) {
  const double t2_over_r = total_time * total_time / steps;
  return 0.5 * bounds.commutator_sum * bounds.sup_psi * t2_over_r +
         (2.0 / 3.0) * bounds.sup_L4 * t2_over_r;
}

double trace_distance(const DenseMatrix& a, const DenseMatrix& b) {
  Eigen::JacobiSVD<DenseMatrix> svd(a - b);
  return 0.5 * svd.singularValues().sum();
}

}  // namespace odeq
