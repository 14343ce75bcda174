#pragma once

#include <vector>

#include "odeq/dense.hpp"
#include "odeq/problem.hpp"

namespace odeq {

/// Numeric surrogates for the quantities entering the step-count rule.
///
/// commutator_sum = sum_j || [ sum_{k<j} A_k, A_j ] ||   (spectral norms,
///   with A_0 = -iH and A_j = -L_j^dag L_j),
/// sup_psi  = sup_t ||psi(t)||,
/// sup_L4   = sum_j sup_t || (L_j^dag L_j)^2 psi(t) ||,
/// final_norm = ||psi(T)||,
/// all suprema taken over a uniform time grid refined until stable.
struct BoundQuantities {
  double commutator_sum = 0.0;
  double sup_psi = 0.0;
  double sup_L4 = 0.0;
  double final_norm = 0.0;
};

/// e^{tA} v with capacity and finiteness checks; t >= 0.
DenseVector expm_apply(const DenseMatrix& a, const DenseVector& v, double t);

/// e^{At} psi0 for the problem's generator.
DenseVector solution_at(const OdeProblem& problem, double t);

/// Dense matrix of the effective one-step map on the system register:
/// embed under |0>, apply the exact e^{-i tau H}, then for each jump the
/// exact e^{i sqrt(2 tau) G_j} followed by the ancilla-|0> projection, and
/// read back the top block. Matches the solver step in dense substep mode
/// column by column.
DenseMatrix exact_step_dense(const OdeProblem& problem, double tau);

/// Classic fourth-order integration of the trace-preserving master equation
///
///   d rho / dt = A rho + rho A^dag + 2 sum_j L_j rho L_j^dag,
///
/// the equation realized exactly by unitary dilation with angle sqrt(2 tau)
/// followed by an ancilla reset. Returns rho at the requested times, with
/// the step halved until self-consistent to 1e-8; the initial state is
/// psi0 psi0^dag normalized to unit trace.
std::vector<DenseMatrix> lindblad_rk4(const OdeProblem& problem,
                                      const std::vector<double>& t_grid);

/// Evaluates BoundQuantities densely. Suprema use a uniform grid with
/// grid_points samples, doubled until the result is stable to 1%.
BoundQuantities compute_bound_quantities(const OdeProblem& problem,
                                         int grid_points = 64);

/// Cumulative first-order error bound after `steps` steps of length T/steps:
///   (1/2) commutator_sum * sup_psi * T^2/steps + (2/3) sup_L4 * T^2/steps.
double cumulative_error_bound(const BoundQuantities& bounds, double total_time,
                              int steps);

/// (1/2) || a - b ||_1 (sum of singular values of the difference).
double trace_distance(const DenseMatrix& a, const DenseMatrix& b);

}  // namespace odeq
