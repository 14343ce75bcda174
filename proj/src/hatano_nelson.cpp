#include "odeq/hatano_nelson.hpp"

#include <cmath>
#include <string>

#include "odeq/errors.hpp"

namespace odeq {

namespace {

// Axes string with the given single-character factors placed at qubits.
std::string place(int sites, std::initializer_list<std::pair<int, char>> ops) {
  std::string axes(sites, 'I');
  for (const auto& [qubit, axis] : ops) axes[qubit] = axis;
  return axes;
}

void validate(const HNParams& params) {
  if (params.sites < 2) throw ValidationError("HN chain needs >= 2 sites");
  if (params.gamma < 0.0) throw ValidationError("HN gamma must be >= 0");
  if (params.interactions.size() != 0 &&
      (params.interactions.rows() != params.sites ||
       params.interactions.cols() != params.sites)) {
    throw DimensionError("HN interaction matrix must be sites x sites");
  }
}

}  // namespace

Eigen::MatrixXd nearest_neighbor_interactions(int sites, double v0) {
  Eigen::MatrixXd v = Eigen::MatrixXd::Zero(sites, sites);
  for (int i = 0; i + 1 < sites; ++i) v(i, i + 1) = v0;
  return v;
}

PauliSum hn_hamiltonian(const HNParams& params) {
  validate(params);
  const int n = params.sites;
  std::vector<PauliTerm> terms;

  const double hop = params.coupling / 2.0;
  for (int j = 0; j + 1 < n; ++j) {
    terms.push_back({hop, PauliString(place(n, {{j, 'Y'}, {j + 1, 'Y'}}))});
    terms.push_back({hop, PauliString(place(n, {{j, 'X'}, {j + 1, 'X'}}))});
  }

  if (params.interactions.size() != 0) {
    // V_ij n_i n_j = (V_ij/4)(I - Z_i - Z_j + Z_i Z_j)
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        const double v = params.interactions(i, j);
        if (v == 0.0) continue;
        const double quarter = v / 4.0;
        terms.push_back({quarter, PauliString::identity(n)});
        terms.push_back({-quarter, PauliString(place(n, {{i, 'Z'}}))});
        terms.push_back({-quarter, PauliString(place(n, {{j, 'Z'}}))});
        terms.push_back({quarter, PauliString(place(n, {{i, 'Z'}, {j, 'Z'}}))});
      }
    }
  }
  return PauliSum(n, std::move(terms));
}

HNJump hn_jump_operator(int bond, double gamma, int sites) {
  if (gamma < 0.0) throw ValidationError("HN gamma must be >= 0");
  if (bond < 0 || bond + 1 >= sites) {
    throw ValidationError("HN bond index out of range");
  }
  const int j = bond;
  const std::string yx = place(sites, {{j, 'Y'}, {j + 1, 'X'}});
  const std::string xy = place(sites, {{j, 'X'}, {j + 1, 'Y'}});
  const std::string zz = place(sites, {{j, 'Z'}, {j + 1, 'Z'}});

  HNJump out{PauliSum(sites), PauliSum(sites)};
  if (gamma == 0.0) return out;

  const double half_gamma = gamma / 2.0;
  out.k = PauliSum(sites, {{half_gamma, PauliString(yx)},
                           {-half_gamma, PauliString(xy)},
                           {gamma, PauliString::identity(sites)}});

  const double s = 1.0 / std::sqrt(2.0);
  const double root = std::sqrt(gamma) / 2.0;
  out.l = PauliSum(sites, {{root * (1.0 - s), PauliString(zz)},
                           {root * s, PauliString(yx)},
                           {-root * s, PauliString(xy)},
                           {root * (1.0 + s), PauliString::identity(sites)}});
  return out;
}

OdeProblem build_hn_problem(const HNParams& params, StateVector psi0) {
  validate(params);
  const PauliSum h = hn_hamiltonian(params);
  std::vector<PauliSum> jumps;
  jumps.reserve(params.sites - 1);
  for (int bond = 0; bond + 1 < params.sites; ++bond) {
    jumps.push_back(hn_jump_operator(bond, params.gamma, params.sites).l);
  }
  const double shift = (params.sites - 1) * params.gamma;
  return OdeProblem(h, std::move(jumps), std::move(psi0), params.final_time,
                    shift);
}

std::vector<NamedObservable> site_density_observables(int sites) {
  std::vector<NamedObservable> out;
  out.reserve(sites);
  for (int i = 0; i < sites; ++i) {
    PauliSum density(sites, {{0.5, PauliString::identity(sites)},
                             {-0.5, PauliString(place(sites, {{i, 'Z'}}))}});
    out.push_back({"n" + std::to_string(i + 1), std::move(density)});
  }
  return out;
}

HNVerification verify_hn_factorization(const HNParams& params) {
  validate(params);
  require_dense_capacity(params.sites + 1, "verify_hn_factorization");
  HNVerification report;
  const auto fail = [&report](std::string message) {
    report.passed = false;
    report.failures.push_back(std::move(message));
  };

  const DenseMatrix x0 = pauli_matrix('X');
  double min_k_eig = 0.0;
  bool have_eig = false;

  for (int bond = 0; bond + 1 < params.sites; ++bond) {
    const auto [l, k] = hn_jump_operator(bond, params.gamma, params.sites);
    const DenseMatrix l_dense = to_dense(l);
    const DenseMatrix k_dense = to_dense(k);

    const double factor_residual = (l_dense * l_dense - k_dense).norm();
    report.max_factorization_residual =
        std::max(report.max_factorization_residual, factor_residual);
    if (factor_residual > 1e-12) {
      fail("bond " + std::to_string(bond) + ": L^2 - K residual " +
           std::to_string(factor_residual));
    }

    Eigen::SelfAdjointEigenSolver<DenseMatrix> solver(k_dense,
                                                      Eigen::EigenvaluesOnly);
    const double min_eig = solver.eigenvalues().minCoeff();
    min_k_eig = have_eig ? std::min(min_k_eig, min_eig) : min_eig;
    have_eig = true;
    if (std::abs(min_eig) > 1e-12) {
      fail("bond " + std::to_string(bond) + ": min eigenvalue of K is " +
           std::to_string(min_eig) + ", expected 0");
    }

    const Dilation d = build_dilation(l, bond);
    const DenseMatrix expected = kron(x0, l_dense);
    const double dilation_residual = (*d.g_dense - expected).norm();
    report.max_dilation_residual =
        std::max(report.max_dilation_residual, dilation_residual);
    if (dilation_residual > 1e-12) {
      fail("bond " + std::to_string(bond) + ": dilation differs from X0 * L");
    }

    report.max_dilated_weight =
        std::max(report.max_dilated_weight, d.g_pauli.max_weight());
    if (l.max_weight() <= 2 && d.g_pauli.max_weight() > 3) {
      fail("bond " + std::to_string(bond) + ": dilated string weight " +
           std::to_string(d.g_pauli.max_weight()) + " breaks locality");
    }
  }
  report.min_k_eigenvalue = min_k_eig;
  return report;
}

}  // namespace odeq
