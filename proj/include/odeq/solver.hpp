#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "odeq/oracle.hpp"
#include "odeq/problem.hpp"
#include "odeq/state_vector.hpp"

namespace odeq {

/// How the per-step exponentials are realized.
///  pauli: first-order product of elementary Pauli rotations (the algorithm
///         as it would run on hardware);
///  dense: exact dense e^{-i tau H} and e^{i sqrt(2 tau) G_j} (validation
///         path, available below the dense cap).
enum class SubstepMode { pauli, dense };

/// Time discretization of a run. Each step applies e^{-i tau H} first and
/// then the dilated jumps G_1..G_J in order, each followed by an ancilla
/// projection or measurement.
struct StepPlan {
  int steps = 1;
  double tau = 0.0;
  SubstepMode substeps = SubstepMode::pauli;
  /// Which branch of the step-count rule fixed `steps` ("commutator",
  /// "dissipative", or "floor"); empty when the plan was given explicitly.
  std::string dominated_by;

  double total_time() const { return tau * steps; }
  double dissipative_angle() const { return std::sqrt(2.0 * tau); }

  static StepPlan with_steps(double total_time, int steps,
                             SubstepMode mode = SubstepMode::pauli);
};

/// Fixed operator order within one step, echoed into results.
inline constexpr const char* kOpOrder = "hamiltonian-then-jumps";

struct NamedObservable {
  std::string name;
  PauliSum op;
};

struct ObservableEstimate {
  std::string name;
  double mean = 0.0;
  double std_error = 0.0;
};

/// Per-step records accumulated during a run: series[k][obs] layout is
/// per_observable[obs][k]; alive[k] counts trajectories surviving step k.
struct SeriesData {
  std::vector<std::uint64_t> alive;
  std::vector<std::vector<double>> per_observable;
};

struct RunResult {
  StateVector final_state;      // unnormalized, ancilla |0>
  double success_prob = 1.0;    // final norm_sq / initial norm_sq
  std::vector<double> norm_trace;  // squared norms; entry 0 is the input
  StepPlan plan;
  std::string op_order = kOpOrder;
  std::uint64_t rotation_count = 0;
  std::optional<SeriesData> series;
};

struct TrajectoryStats {
  std::uint64_t shots = 0;
  std::uint64_t successes = 0;
  std::uint64_t seed = 0;
  /// False when no shot survived; estimates are then meaningless.
  bool estimates_available = false;
  /// Mean over surviving shots of the final-state expectation, with the
  /// sample standard error.
  std::vector<ObservableEstimate> estimates;
  std::optional<SeriesData> series;
  std::uint64_t rotation_count = 0;
};

struct LindbladResult {
  std::uint64_t shots = 0;
  std::uint64_t seed = 0;
  /// Trajectory-averaged density matrix (below the dense cap only).
  std::optional<DenseMatrix> density;
  std::vector<ObservableEstimate> estimates;
  std::optional<SeriesData> series;
  /// (step index, averaged rho) pairs when density_series_stride > 0.
  std::vector<std::pair<int, DenseMatrix>> density_series;
};

struct TrajectoryOptions {
  std::vector<NamedObservable> observables;
  int threads = 1;
  bool record_series = false;
  bool build_density = true;  // lindblad mode, subject to the dense cap
  /// When > 0, lindblad mode also averages rho every this many steps
  /// (step 0 and the final step are always included).
  int density_series_stride = 0;
};

/// One deterministic step: e^{-i tau H}, then e^{i sqrt(2 tau) G_j} and an
/// unnormalized ancilla-|0> projection for each jump. Returns the product of
/// the projection probabilities. Expects the ancilla of s in |0>.
double step(StateVector& s, const OdeProblem& problem, const StepPlan& plan);

/// Deterministic post-selected run: plan.steps applications of the one-step
/// map to |0> (x) psi0, keeping the unnormalized projected state throughout.
/// Aborts with UnderflowError if the survival probability falls below
/// 1e-300. Observables, when given, are recorded per step (normalized).
RunResult run_postselect(const OdeProblem& problem, const StepPlan& plan,
                         const std::vector<NamedObservable>& observables = {});

/// Shot-sampled variant: ancilla measurements replace projections and any
/// non-zero outcome discards the shot. successes/shots estimates the
/// post-selected success probability without bias.
TrajectoryStats run_trajectories(const OdeProblem& problem,
                                 const StepPlan& plan, std::uint64_t shots,
                                 std::uint64_t seed,
                                 const TrajectoryOptions& options = {});

/// Trace-out variant: the ancilla is measured and reset instead of
/// post-selected, so every shot survives and the shot average approximates
/// the Lindblad solution (bias O(tau), noise O(1/sqrt(shots))).
LindbladResult run_lindblad(const OdeProblem& problem, const StepPlan& plan,
                            std::uint64_t shots, std::uint64_t seed,
                            const TrajectoryOptions& options = {});

/// Step count for a relative error target epsilon in (0,1):
///   R = max(1, ceil(max{ commutator_sum * sup_psi * T^2 / (final_norm eps),
///                        sup_L4 * T^2 / (final_norm eps) })).
/// The returned plan records which branch dominated.
StepPlan choose_step_count(const OdeProblem& problem, double epsilon,
                           const BoundQuantities& bounds,
                           SubstepMode mode = SubstepMode::pauli);

/// State ratio q = ||psi0|| / ||psi(T)|| given the reference solution at T.
double state_ratio(const OdeProblem& problem, const DenseVector& solution);

/// Normalized distance || a/||a|| - b/||b|| ||.
double normalized_error(const DenseVector& a, const DenseVector& b);

/// Engine-facing view of a run's final state as a dense system-register
/// vector (ancilla-|0> block).
DenseVector system_block(const StateVector& s);

}  // namespace odeq
