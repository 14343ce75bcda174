#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "odeq/problem.hpp"
#include "odeq/solver.hpp"

namespace odeq {

/// Interacting Hatano-Nelson chain: spinless fermions with symmetric hopping
/// `coupling`, asymmetric hopping `gamma >= 0`, and density-density
/// interactions V_ij, on an open chain of `sites` >= 2 sites mapped to
/// qubits by the Jordan-Wigner transform (site j -> qubit j-1).
struct HNParams {
  int sites = 2;
  double coupling = 1.0;  // symmetric hopping strength
  double gamma = 0.0;     // asymmetric (non-Hermitian) hopping strength
  /// sites x sites real matrix; only the strictly upper triangle is read.
  Eigen::MatrixXd interactions;
  double final_time = 1.0;
};

/// Nearest-neighbor interaction matrix V_{i,i+1} = v0.
Eigen::MatrixXd nearest_neighbor_interactions(int sites, double v0);

/// Hermitian part after the Jordan-Wigner transform:
///   sum_bonds (J/2)(Y_j Y_{j+1} + X_j X_{j+1})
///   + (1/4) sum_{i<j} V_ij (I - Z_i)(I - Z_j).
PauliSum hn_hamiltonian(const HNParams& params);

/// Closed-form jump pair for one bond (0-based bond index over sites-1
/// bonds). K_j = (gamma/2)(Y_j X_{j+1} - X_j Y_{j+1}) + gamma I is the
/// shifted anti-Hermitian bond generator, and
///   L_j = (sqrt(gamma)/2) [ (1 - 1/sqrt2) Z_j Z_{j+1}
///                           + (1/sqrt2)(Y_j X_{j+1} - X_j Y_{j+1})
///                           + (1 + 1/sqrt2) I ]
/// is its Hermitian principal square root, L_j^2 = K_j.
struct HNJump {
  PauliSum l;
  PauliSum k;
};
HNJump hn_jump_operator(int bond, double gamma, int sites);

/// Assembles the dissipative problem. The recorded norm shift is
/// (sites - 1) * gamma: the simulated generator is the original
/// non-Hermitian one minus that multiple of the identity.
OdeProblem build_hn_problem(const HNParams& params, StateVector psi0);

/// Site occupations n_i = (I - Z_i)/2, named "n1".."nN".
std::vector<NamedObservable> site_density_observables(int sites);

/// Structural self-checks of the closed-form factorization, evaluated
/// densely per bond: (a) L^2 = K, (b) K is PSD with minimum eigenvalue 0,
/// (c) the dilation of L equals X_ancilla * L, (d) every dilated string has
/// weight <= 3.
struct HNVerification {
  bool passed = true;
  std::vector<std::string> failures;
  double max_factorization_residual = 0.0;  // max_j ||L_j^2 - K_j||_F
  double min_k_eigenvalue = 0.0;
  double max_dilation_residual = 0.0;  // max_j ||G_j - X0 L_j||_F
  std::size_t max_dilated_weight = 0;
};
HNVerification verify_hn_factorization(const HNParams& params);

}  // namespace odeq
