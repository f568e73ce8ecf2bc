#pragma once

// Run loop: steps a solver, evaluates certificates on a cadence, records
// first-hit times of stopping criteria and checks the per-step inequalities
// of the convergence theory along the way.

#include <pdsg/certificates.hpp>
#include <pdsg/solver.hpp>

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace pdsg {

enum class RunMode { primal, dual, both };

std::string to_string(RunMode m);
RunMode parse_run_mode(const std::string& name);

struct ModelSnapshot {
  double min_value = 0.0;
  double curvature = 0.0;
  Vector center;
  double total_weight = 0.0;
  double total_weight_feasible = 0.0;
  double log_scale = 0.0;
};

struct RunRecord {
  CertificateReport report;
  double x_norm = 0.0;
  ModelSnapshot model;
};

struct RunOptions {
  RunMode mode = RunMode::primal;
  std::size_t T = 1000;
  /// Stop as soon as this rule fires.
  std::optional<StoppingRule> stop;
  /// Rules whose first firing time is recorded; with stop_when_all_hit the
  /// run ends once every one has fired.
  std::vector<StoppingRule> first_hits;
  bool stop_when_all_hit = false;
  Cadence cadence;
  bool record_reports = true;
  bool record_iterates = false;
  bool record_model_center = false;
  /// Per-step checks against x_opt / x_sl (needs references and constants).
  bool monitors = true;
  SolverOptions solver;
  std::function<void(const SolverState&, const CertificateReport&)> observer;
};

/// Counts and worst normalized excess for one family of inequality checks.
/// excess = (lhs - rhs) / scale, violation when excess > tolerance.
struct CheckStats {
  std::size_t checked = 0;
  std::size_t violations = 0;
  double worst_excess = -std::numeric_limits<double>::infinity();
  std::optional<std::size_t> first_violation;

  void record(std::size_t t, double lhs, double rhs, double scale, double tol);
  bool ok() const { return violations == 0; }
};

struct MonitorStats {
  CheckStats dual_validity;     // dual_lower_bound <= p*
  CheckStats sandwich;          // p, pbar, delta >= 0
  CheckStats theorem2;          // aggregate <= theorem2_rhs
  CheckStats prop1;             // feasible fraction >= prop1_rhs where positive
  CheckStats prop2;             // |delta_k(y)| <= L1 ||x_k - y||^2 + L0^2/L1
  CheckStats prop2_envelope;    // ||x_T - y||^2 <= exp(envelope)
  CheckStats assumption_c;      // ||g + n_y||^2 <= L0^2 + L1 delta_k(y)
  CheckStats distance_recursion;
  CheckStats dual_recursion;
  CheckStats recovery;          // primal vs dual recovered subgradient (both mode)
  std::optional<std::size_t> eq26_first_flag;
};

struct RunResult {
  std::string instance;
  std::string schedule;
  RunMode mode = RunMode::primal;
  std::size_t steps = 0;
  std::vector<RunRecord> records;
  /// ||x_k|| for k = 0..steps.
  std::vector<double> iterate_norms;
  /// f_{s(x_k)}(x_k) and s(x_k) for k < steps.
  std::vector<double> step_values;
  std::vector<Index> step_index;
  std::vector<Vector> iterates;
  std::vector<double> delta_opt;
  std::vector<double> delta_sl;

  std::optional<std::size_t> T0;
  LogValue C0;  // partial sum over steps taken so far
  bool stopped = false;
  std::optional<std::size_t> stop_time;
  std::map<Criterion, std::size_t> first_hit;
  bool diverged = false;
  std::string divergence_message;
  double max_deviation = 0.0;  // both mode
  MonitorStats monitors;

  std::optional<SolverState> state;
  std::optional<SolverState> dual_state;  // both mode
  std::optional<CertificateReport> final_report;
};

RunResult run(const ProblemInstance& instance, const Schedule& schedule, const RunOptions& options = {});

ModelSnapshot snapshot(const SolverState& state, bool with_center);

}  // namespace pdsg
