#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstddef>
#include <vector>

namespace odeq {

using Complex = std::complex<double>;
using DenseMatrix = Eigen::MatrixXcd;
using DenseVector = Eigen::VectorXcd;

/// Largest qubit count for which dense shadows are constructed.
/// Default 12 (4096-dimensional); override with the ODEQ_DENSE_CAP env var.
std::size_t dense_qubit_cap();

/// Throws CapacityError when n_qubits exceeds the dense cap.
void require_dense_capacity(std::size_t n_qubits, const char* what);

bool is_power_of_two(Eigen::Index dim);

/// Number of qubits for a 2^n dimension; throws DimensionError otherwise.
std::size_t qubit_count_for_dim(Eigen::Index dim);

bool approx_hermitian(const DenseMatrix& m, double tol);

/// Operator 2-norm, computed from the Hermitian eigenproblem of M^dag M.
double spectral_norm(const DenseMatrix& m);

DenseMatrix kron(const DenseMatrix& a, const DenseMatrix& b);

/// 2x2 matrix for axis in {'I','X','Y','Z'}.
const DenseMatrix& pauli_matrix(char axis);

/// e^{tA} v via scaled truncated-series application. The step count is
/// doubled until halving it changes the result by less than rtol in relative
/// norm, so the output carries a built-in self-consistency certificate.
DenseVector expm_multiply(const DenseMatrix& a, const DenseVector& v, double t,
                          double rtol = 1e-12);

/// Least-squares slope of log(y) against log(x); x and y must be positive.
double fit_loglog_slope(const std::vector<double>& x,
                        const std::vector<double>& y);

}  // namespace odeq
