#include "odeq/solver.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <thread>

#include "odeq/errors.hpp"
#include "odeq/rng.hpp"

namespace odeq {

namespace {

constexpr double kSurvivalFloor = 1e-300;

struct Prepared {
  const OdeProblem* problem;
  StepPlan plan;
  PauliSum h_embedded;                  // over 1 + n qubits
  std::optional<DenseMatrix> minus_i_h; // dense mode, system register
  std::vector<DenseMatrix> i_g;         // dense mode, dilated register

  Prepared(const OdeProblem& prob, const StepPlan& p)
      : problem(&prob), plan(p), h_embedded(prepend_identities(prob.hamiltonian(), 1)) {
    if (plan.steps < 1) throw ValidationError("step plan needs >= 1 steps");
    if (plan.tau < 0.0) throw ValidationError("step plan has negative tau");
    if (plan.substeps == SubstepMode::dense) {
      require_dense_capacity(prob.num_qubits() + 1, "dense substep mode");
      minus_i_h = (Complex(0, -1) * to_dense(prob.hamiltonian())).eval();
      for (const auto& d : prob.dilations()) {
        i_g.push_back((Complex(0, 1) * (*d.g_dense)).eval());
      }
    }
  }
};

void apply_block_dense(StateVector& s, const DenseMatrix& generator,
                       double time, std::uint64_t offset, std::uint64_t size) {
  auto amps = s.mutable_amplitudes();
  bool any = false;
  for (std::uint64_t k = 0; k < size && !any; ++k) {
    any = amps[offset + k] != Complex{0.0, 0.0};
  }
  if (!any) return;
  DenseVector v(static_cast<Eigen::Index>(size));
  for (std::uint64_t k = 0; k < size; ++k) v[k] = amps[offset + k];
  v = expm_multiply(generator, v, time);
  for (std::uint64_t k = 0; k < size; ++k) amps[offset + k] = v[k];
}

void apply_hamiltonian(StateVector& s, const Prepared& prep) {
  const double tau = prep.plan.tau;
  if (prep.plan.substeps == SubstepMode::pauli) {
    apply_trotter_step(s, prep.h_embedded, tau);
    return;
  }
  // e^{-i tau H} acts block-diagonally on the two ancilla sectors.
  const std::uint64_t half = s.dim() / 2;
  apply_block_dense(s, *prep.minus_i_h, tau, 0, half);
  apply_block_dense(s, *prep.minus_i_h, tau, half, half);
}

void apply_jump_unitary(StateVector& s, const Prepared& prep, std::size_t j) {
  if (prep.plan.substeps == SubstepMode::pauli) {
    apply_dilated_jump(s, prep.problem->dilations()[j], prep.plan.tau);
    return;
  }
  apply_block_dense(s, prep.i_g[j], prep.plan.dissipative_angle(), 0, s.dim());
}

// Deterministic projected step; returns the product of projection
// probabilities.
double step_project(StateVector& s, const Prepared& prep) {
  apply_hamiltonian(s, prep);
  double p_step = 1.0;
  const std::size_t jump_count = prep.problem->dilations().size();
  for (std::size_t j = 0; j < jump_count; ++j) {
    apply_jump_unitary(s, prep, j);
    p_step *= project_ancilla_zero(s);
  }
  if (jump_count == 0) s.refresh_norm_sq();
  return p_step;
}

// Shot-sampled step; false when the shot is discarded.
bool step_sampled(StateVector& s, const Prepared& prep, std::uint64_t seed,
                  std::uint64_t shot, std::uint64_t step_index) {
  apply_hamiltonian(s, prep);
  const std::size_t jump_count = prep.problem->dilations().size();
  for (std::size_t j = 0; j < jump_count; ++j) {
    apply_jump_unitary(s, prep, j);
    RngStream rng(seed, shot, step_index, j);
    if (sample_ancilla(s, rng) != 0) return false;
  }
  return true;
}

// Trace-out step: measure-and-reset instead of post-selecting.
void step_reset(StateVector& s, const Prepared& prep, std::uint64_t seed,
                std::uint64_t shot, std::uint64_t step_index) {
  apply_hamiltonian(s, prep);
  const std::size_t jump_count = prep.problem->dilations().size();
  for (std::size_t j = 0; j < jump_count; ++j) {
    apply_jump_unitary(s, prep, j);
    RngStream rng(seed, shot, step_index, j);
    reset_ancilla(s, rng);
  }
}

std::vector<double> record_observables(const StateVector& s,
                                       const std::vector<NamedObservable>& obs) {
  std::vector<double> values;
  values.reserve(obs.size());
  for (const auto& o : obs) values.push_back(expectation(s, o.op, true));
  return values;
}

// Fixed work partition: chunk boundaries depend only on the shot count, so
// results are bit-identical for any worker count.
struct ChunkRange {
  std::uint64_t begin;
  std::uint64_t end;
};

std::vector<ChunkRange> make_chunks(std::uint64_t shots, std::uint64_t chunks) {
  chunks = std::max<std::uint64_t>(1, std::min(shots, chunks));
  std::vector<ChunkRange> out(chunks);
  for (std::uint64_t c = 0; c < chunks; ++c) {
    out[c] = {shots * c / chunks, shots * (c + 1) / chunks};
  }
  return out;
}

void run_workers(int threads, std::size_t chunk_count,
                 const std::function<void(std::size_t)>& work) {
  threads = std::max(1, threads);
  if (threads == 1) {
    for (std::size_t c = 0; c < chunk_count; ++c) work(c);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t c = next.fetch_add(1); c < chunk_count;
           c = next.fetch_add(1)) {
        work(c);
      }
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace

StepPlan StepPlan::with_steps(double total_time, int steps, SubstepMode mode) {
  if (steps < 1) throw ValidationError("StepPlan: steps must be >= 1");
  if (!(total_time >= 0.0)) throw ValidationError("StepPlan: negative time");
  StepPlan plan;
  plan.steps = steps;
  plan.tau = total_time / steps;
  plan.substeps = mode;
  return plan;
}

double step(StateVector& s, const OdeProblem& problem, const StepPlan& plan) {
  Prepared prep(problem, plan);
  return step_project(s, prep);
}

RunResult run_postselect(const OdeProblem& problem, const StepPlan& plan,
                         const std::vector<NamedObservable>& observables) {
  Prepared prep(problem, plan);
  StateVector s = StateVector::with_ancilla_zero(problem.psi0());
  const double initial = s.norm_sq();

  RunResult result{.final_state = s, .plan = plan};
  result.norm_trace.reserve(plan.steps + 1);
  result.norm_trace.push_back(initial);
  if (!observables.empty()) {
    SeriesData series;
    series.alive.assign(plan.steps + 1, 1);
    series.per_observable.assign(observables.size(),
                                 std::vector<double>(plan.steps + 1, 0.0));
    const auto first = record_observables(s, observables);
    for (std::size_t o = 0; o < observables.size(); ++o) {
      series.per_observable[o][0] = first[o];
    }
    result.series = std::move(series);
  }

  for (int k = 0; k < plan.steps; ++k) {
    step_project(s, prep);
    result.norm_trace.push_back(s.norm_sq());
    if (s.norm_sq() < kSurvivalFloor * initial) {
      throw UnderflowError(
          "run_postselect: survival probability underflowed at step " +
          std::to_string(k + 1) + " of " + std::to_string(plan.steps) +
          " (norm ratio below 1e-300); the instance is too strongly "
          "dissipative for this horizon");
    }
    if (result.series) {
      const auto values = record_observables(s, observables);
      for (std::size_t o = 0; o < observables.size(); ++o) {
        result.series->per_observable[o][k + 1] = values[o];
      }
    }
  }

  result.success_prob = s.norm_sq() / initial;
  result.rotation_count = s.rotations_applied();
  result.final_state = std::move(s);
  return result;
}

TrajectoryStats run_trajectories(const OdeProblem& problem,
                                 const StepPlan& plan, std::uint64_t shots,
                                 std::uint64_t seed,
                                 const TrajectoryOptions& options) {
  if (shots < 1) throw ValidationError("run_trajectories: shots must be >= 1");
  Prepared prep(problem, plan);

  StateVector initial = StateVector::with_ancilla_zero(problem.psi0());
  {
    const double inv = 1.0 / std::sqrt(initial.norm_sq());
    for (auto& a : initial.mutable_amplitudes()) a *= inv;
    initial.set_norm_sq(1.0);
  }
  const std::size_t n_obs = options.observables.size();
  const std::size_t n_rec = static_cast<std::size_t>(plan.steps) + 1;

  struct Chunk {
    std::uint64_t successes = 0;
    std::uint64_t rotations = 0;
    std::vector<double> sum;    // per observable, surviving shots
    std::vector<double> sumsq;
    std::vector<std::uint64_t> alive;          // per step
    std::vector<std::vector<double>> obs_sum;  // [obs][step]
  };
  const auto ranges = make_chunks(shots, 128);
  std::vector<Chunk> chunks(ranges.size());

  run_workers(options.threads, ranges.size(), [&](std::size_t c) {
    Chunk& acc = chunks[c];
    acc.sum.assign(n_obs, 0.0);
    acc.sumsq.assign(n_obs, 0.0);
    if (options.record_series) {
      acc.alive.assign(n_rec, 0);
      acc.obs_sum.assign(n_obs, std::vector<double>(n_rec, 0.0));
    }
    for (std::uint64_t shot = ranges[c].begin; shot < ranges[c].end; ++shot) {
      StateVector s = initial;
      bool alive = true;
      if (options.record_series) {
        ++acc.alive[0];
        const auto values = record_observables(s, options.observables);
        for (std::size_t o = 0; o < n_obs; ++o) acc.obs_sum[o][0] += values[o];
      }
      for (int k = 0; alive && k < plan.steps; ++k) {
        alive = step_sampled(s, prep, seed, shot, k);
        if (alive && options.record_series) {
          ++acc.alive[k + 1];
          const auto values = record_observables(s, options.observables);
          for (std::size_t o = 0; o < n_obs; ++o) {
            acc.obs_sum[o][k + 1] += values[o];
          }
        }
      }
      acc.rotations += s.rotations_applied();
      if (alive) {
        ++acc.successes;
        const auto values = record_observables(s, options.observables);
        for (std::size_t o = 0; o < n_obs; ++o) {
          acc.sum[o] += values[o];
          acc.sumsq[o] += values[o] * values[o];
        }
      }
    }
  });

  TrajectoryStats stats;
  stats.shots = shots;
  stats.seed = seed;
  std::vector<double> sum(n_obs, 0.0);
  std::vector<double> sumsq(n_obs, 0.0);
  SeriesData series;
  if (options.record_series) {
    series.alive.assign(n_rec, 0);
    series.per_observable.assign(n_obs, std::vector<double>(n_rec, 0.0));
  }
  for (const Chunk& acc : chunks) {  // fixed chunk order
    stats.successes += acc.successes;
    stats.rotation_count += acc.rotations;
    for (std::size_t o = 0; o < n_obs; ++o) {
      sum[o] += acc.sum[o];
      sumsq[o] += acc.sumsq[o];
    }
    if (options.record_series) {
      for (std::size_t k = 0; k < n_rec; ++k) series.alive[k] += acc.alive[k];
      for (std::size_t o = 0; o < n_obs; ++o) {
        for (std::size_t k = 0; k < n_rec; ++k) {
          series.per_observable[o][k] += acc.obs_sum[o][k];
        }
      }
    }
  }
  stats.estimates_available = stats.successes > 0;
  const double m = static_cast<double>(stats.successes);
  for (std::size_t o = 0; o < n_obs; ++o) {
    ObservableEstimate est;
    est.name = options.observables[o].name;
    if (stats.successes > 0) {
      est.mean = sum[o] / m;
      if (stats.successes > 1) {
        const double var = std::max(0.0, (sumsq[o] - sum[o] * sum[o] / m) / (m - 1.0));
        est.std_error = std::sqrt(var / m);
      }
    }
    stats.estimates.push_back(std::move(est));
  }
  if (options.record_series) {
    // Per-step means over trajectories still alive at that step.
    for (std::size_t o = 0; o < n_obs; ++o) {
      for (std::size_t k = 0; k < n_rec; ++k) {
        if (series.alive[k] > 0) {
          series.per_observable[o][k] /= static_cast<double>(series.alive[k]);
        }
      }
    }
    stats.series = std::move(series);
  }
  return stats;
}

LindbladResult run_lindblad(const OdeProblem& problem, const StepPlan& plan,
                            std::uint64_t shots, std::uint64_t seed,
                            const TrajectoryOptions& options) {
  if (shots < 1) throw ValidationError("run_lindblad: shots must be >= 1");
  Prepared prep(problem, plan);

  StateVector initial = StateVector::with_ancilla_zero(problem.psi0());
  {
    const double inv = 1.0 / std::sqrt(initial.norm_sq());
    for (auto& a : initial.mutable_amplitudes()) a *= inv;
    initial.set_norm_sq(1.0);
  }
  const std::size_t n_obs = options.observables.size();
  const std::size_t n_rec = static_cast<std::size_t>(plan.steps) + 1;
  const bool build_density =
      options.build_density && problem.num_qubits() <= dense_qubit_cap();
  const Eigen::Index sys_dim = Eigen::Index{1} << problem.num_qubits();

  std::vector<int> record_steps;
  if (build_density && options.density_series_stride > 0) {
    for (int k = 0; k < plan.steps; k += options.density_series_stride) {
      record_steps.push_back(k);
    }
    record_steps.push_back(plan.steps);
  }
  // record_index[k] = position of step k in record_steps, or -1.
  std::vector<int> record_index(static_cast<std::size_t>(plan.steps) + 1, -1);
  for (std::size_t i = 0; i < record_steps.size(); ++i) {
    record_index[record_steps[i]] = static_cast<int>(i);
  }

  struct Chunk {
    std::vector<double> sum, sumsq;
    std::vector<std::vector<double>> obs_sum;  // [obs][step]
    DenseMatrix density;
    std::vector<DenseMatrix> density_series;
  };
  // Fewer chunks when accumulating dense partials keeps memory modest
  // without affecting determinism (the split depends only on the request).
  const auto ranges = make_chunks(shots, build_density ? 32 : 128);
  std::vector<Chunk> chunks(ranges.size());

  run_workers(options.threads, ranges.size(), [&](std::size_t c) {
    Chunk& acc = chunks[c];
    acc.sum.assign(n_obs, 0.0);
    acc.sumsq.assign(n_obs, 0.0);
    if (options.record_series) {
      acc.obs_sum.assign(n_obs, std::vector<double>(n_rec, 0.0));
    }
    if (build_density) acc.density = DenseMatrix::Zero(sys_dim, sys_dim);
    acc.density_series.assign(record_steps.size(),
                              DenseMatrix::Zero(sys_dim, sys_dim));
    const auto snapshot_density = [&](const StateVector& s, int step_index) {
      const int slot = record_index[step_index];
      if (slot < 0) return;
      const auto amps = s.amplitudes();
      DenseVector v(sys_dim);
      for (Eigen::Index i = 0; i < sys_dim; ++i) v[i] = amps[i];
      acc.density_series[slot] += v * v.adjoint();
    };
    for (std::uint64_t shot = ranges[c].begin; shot < ranges[c].end; ++shot) {
      StateVector s = initial;
      if (options.record_series) {
        const auto values = record_observables(s, options.observables);
        for (std::size_t o = 0; o < n_obs; ++o) acc.obs_sum[o][0] += values[o];
      }
      if (!record_steps.empty()) snapshot_density(s, 0);
      for (int k = 0; k < plan.steps; ++k) {
        step_reset(s, prep, seed, shot, k);
        if (options.record_series) {
          const auto values = record_observables(s, options.observables);
          for (std::size_t o = 0; o < n_obs; ++o) {
            acc.obs_sum[o][k + 1] += values[o];
          }
        }
        if (!record_steps.empty()) snapshot_density(s, k + 1);
      }
      const auto values = record_observables(s, options.observables);
      for (std::size_t o = 0; o < n_obs; ++o) {
        acc.sum[o] += values[o];
        acc.sumsq[o] += values[o] * values[o];
      }
      if (build_density) {
        // Ancilla is |0> after the final reset, so the system state is the
        // top block.
        const auto amps = s.amplitudes();
        DenseVector v(sys_dim);
        for (Eigen::Index i = 0; i < sys_dim; ++i) v[i] = amps[i];
        acc.density += v * v.adjoint();
      }
    }
  });

  LindbladResult result;
  result.shots = shots;
  result.seed = seed;
  std::vector<double> sum(n_obs, 0.0), sumsq(n_obs, 0.0);
  SeriesData series;
  if (options.record_series) {
    series.alive.assign(n_rec, shots);
    series.per_observable.assign(n_obs, std::vector<double>(n_rec, 0.0));
  }
  DenseMatrix density;
  if (build_density) density = DenseMatrix::Zero(sys_dim, sys_dim);
  std::vector<DenseMatrix> density_series(record_steps.size(),
                                          DenseMatrix::Zero(sys_dim, sys_dim));
  for (const Chunk& acc : chunks) {
    for (std::size_t o = 0; o < n_obs; ++o) {
      sum[o] += acc.sum[o];
      sumsq[o] += acc.sumsq[o];
    }
    if (options.record_series) {
      for (std::size_t o = 0; o < n_obs; ++o) {
        for (std::size_t k = 0; k < n_rec; ++k) {
          series.per_observable[o][k] += acc.obs_sum[o][k];
        }
      }
    }
    if (build_density) density += acc.density;
    for (std::size_t i = 0; i < record_steps.size(); ++i) {
      density_series[i] += acc.density_series[i];
    }
  }
  const double m = static_cast<double>(shots);
  for (std::size_t o = 0; o < n_obs; ++o) {
    ObservableEstimate est;
    est.name = options.observables[o].name;
    est.mean = sum[o] / m;
    if (shots > 1) {
      const double var = std::max(0.0, (sumsq[o] - sum[o] * sum[o] / m) / (m - 1.0));
      est.std_error = std::sqrt(var / m);
    }
    result.estimates.push_back(std::move(est));
  }
  if (options.record_series) {
    for (auto& row : series.per_observable) {
      for (auto& v : row) v /= m;
    }
    result.series = std::move(series);
  }
  if (build_density) result.density = density / m;
  for (std::size_t i = 0; i < record_steps.size(); ++i) {
    result.density_series.emplace_back(record_steps[i], density_series[i] / m);
  }
  return result;
}

StepPlan choose_step_count(const OdeProblem& problem, double epsilon,
                           const BoundQuantities& bounds, SubstepMode mode) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw ValidationError("choose_step_count: epsilon must be in (0, 1)");
  }
  if (!std::isfinite(bounds.commutator_sum) || !std::isfinite(bounds.sup_psi) ||
      !std::isfinite(bounds.sup_L4) || !std::isfinite(bounds.final_norm)) {
    throw ValidationError("choose_step_count: bounds must be finite");
  }
  if (!(bounds.final_norm > 0.0)) {
    throw UnsolvableTargetError(
        "choose_step_count: the solution-norm bound is zero");
  }
  const double t2 = problem.final_time() * problem.final_time();
  const double denom = bounds.final_norm * epsilon;
  const double commutator_branch =
      bounds.commutator_sum * bounds.sup_psi * t2 / denom;
  const double dissipative_branch = bounds.sup_L4 * t2 / denom;
  const double raw = std::max(commutator_branch, dissipative_branch);
  if (raw > 1e9) {
    throw CapacityError("choose_step_count: required step count " +
                        std::to_string(raw) + " is impractically large");
  }

  StepPlan plan = StepPlan::with_steps(
      problem.final_time(), std::max(1, static_cast<int>(std::ceil(raw))), mode);
  plan.dominated_by = raw < 1.0 ? "floor"
                      : commutator_branch >= dissipative_branch ? "commutator"
                                                                : "dissipative";
  return plan;
}

double state_ratio(const OdeProblem& problem, const DenseVector& solution) {
  const double final_norm = solution.norm();
  if (!(final_norm > 0.0)) {
    throw ValidationError("state_ratio: final state has zero norm");
  }
  return std::sqrt(problem.psi0().norm_sq()) / final_norm;
}

double normalized_error(const DenseVector& a, const DenseVector& b) {
  const double na = a.norm();
  const double nb = b.norm();
  if (!(na > 0.0) || !(nb > 0.0)) {
    throw DegenerateStateError("normalized_error: zero-norm operand");
  }
  return (a / na - b / nb).norm();
}

DenseVector system_block(const StateVector& s) {
  const auto amps = s.amplitudes();
  const std::uint64_t half = s.dim() / 2;
  DenseVector v(static_cast<Eigen::Index>(half));
  for (std::uint64_t i = 0; i < half; ++i) v[i] = amps[i];
  return v;
}

}  // namespace odeq
