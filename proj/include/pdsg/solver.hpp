#pragma once

// Switching proximal subgradient method (primal) and Lagrangian proximal dual
// averaging (dual). Both advance a SolverState one iteration at a time.
//
// Weights are stored relative to exp(log_scale) so that exponentially growing
// schedules never overflow; every certificate quantity is a ratio of these
// scaled sums and so does not depend on the scale.

#include <pdsg/problem.hpp>
#include <pdsg/quadratic_model.hpp>
#include <pdsg/schedules.hpp>

#include <cstdint>
#include <optional>
#include <string>

namespace pdsg {

enum class Method { primal, dual };

std::string to_string(Method m);

struct SolverOptions {
  /// Primal method only: co-update the aggregate model (dual always does).
  bool track_model = true;
  /// Keep every model term for explicit re-evaluation (debug, small runs).
  bool retain_terms = false;
  std::uint64_t seed = 0;
  /// Abort threshold on ||x_k||.
  double divergence_limit = 1e300;
};

/// What happened at the step just taken from x_k to x_{k+1}.
struct StepInfo {
  std::size_t k = 0;
  Index s = 0;
  double f_value = 0.0;   // f_s(x_k)
  Vector g;               // subgradient used (with noise)
  double alpha = 0.0;
  double weight = 0.0;    // scaled lambda_k
  double log_lambda = 0.0;
  Vector x_prev;          // x_k
  Vector n;               // subgradient of r at x_{k+1} folded into the model
  /// Dual method: literal stationarity recovery of n; primal method: same as n.
  Vector n_alt;
};

struct SolverState {
  explicit SolverState(ScheduleCursor c) : cursor(std::move(c)) {}

  std::size_t k = 0;
  Vector x;
  Vector y0;
  ScheduleCursor cursor;
  double mu = 0.0;
  double beta_bar = 0.0;
  double log_scale = 0.0;

  // Scaled sums over i < k.
  double weight_total = 0.0;
  double weight_alpha = 0.0;
  Vector weight_by_index;  // [0] feasible steps, [s] steps on constraint s
  double sum_f0_feasible = 0.0;
  double sum_objective_feasible = 0.0;  // f0 + r, may be +inf for indicators
  Vector sum_x_feasible;
  QuadraticModel model;
  bool model_valid = false;

  std::uint64_t seed = 0;
  std::optional<StepInfo> last;
  bool diverged = false;
  std::optional<std::size_t> nonfinite_at;
  std::string divergence_message;

  double weight_feasible() const { return weight_by_index.size() ? weight_by_index[0] : 0.0; }
  /// Sum of absolute weights (may overflow to inf).
  double absolute(double scaled) const;
  /// x_bar = sum_feas lambda x / sum_feas lambda; throws UndefinedError before a feasible step.
  Vector averaged_iterate() const;
  /// Multiplies every scaled quantity by exp(old_scale - new_scale).
  void set_scale(double new_log_scale);
};

SolverState init_state(const ProblemInstance& instance, const Schedule& schedule, Method method,
                       const SolverOptions& options = {});

void primal_step(SolverState& state, const ProblemInstance& instance, const SolverOptions& options = {});
void dual_step(SolverState& state, const ProblemInstance& instance, const SolverOptions& options = {});
void step(SolverState& state, const ProblemInstance& instance, Method method, const SolverOptions& options = {});

}  // namespace pdsg
