#pragma once

// Primal upper bounds, dual lower bounds, gaps, stopping rules, multipliers,
// divergence constants (T0, C0) and the right-hand sides of the convergence
// bounds, all evaluated from a SolverState.

#include <pdsg/log_value.hpp>
#include <pdsg/problem.hpp>
#include <pdsg/schedules.hpp>
#include <pdsg/solver.hpp>

#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace pdsg {

inline constexpr double kUndefined = std::numeric_limits<double>::quiet_NaN();

/// Inputs for the theoretical bounds. Missing constants leave the matching
/// report fields undefined.
struct BoundInputs {
  std::optional<double> L0_sq;
  std::optional<double> L1;
  std::optional<double> tau_sl;
  std::optional<double> h_sl_gap;
  /// Divergence mass accumulated so far, in absolute units.
  LogValue C0;
  /// Checkable-bound data: G^2 >= L0^2, ||g_{s(x0)}(x0)||^2, alpha_1, log lambda_0.
  std::optional<double> G_sq;
  std::optional<double> g0_norm_sq;
  std::optional<double> alpha1;
  double log_lambda0 = 0.0;

  static BoundInputs from_instance(const ProblemInstance& instance);
};

struct CertificateReport {
  std::size_t t = 0;
  double feasible_fraction = kUndefined;
  bool defined = false;  // at least one feasible iterate so far

  // Computable without references.
  double dual_lower_bound = kUndefined;   // inf M / sum_feas lambda
  double primal_avg_value = kUndefined;   // sum_feas lambda (f0 + r)(x_i) / sum_feas lambda
  double avg_iterate_value = kUndefined;  // (f0 + r)(x_bar)
  double last_iterate_value = kUndefined; // (f0 + r)(x_t) when x_t is feasible
  double gap_p_d = kUndefined;            // primal_avg_value - dual_lower_bound
  double gap_pbar_d = kUndefined;
  double gap_delta_d = kUndefined;
  std::vector<double> multipliers;
  std::vector<double> complementary_slackness;  // u_s f_s(x_bar)

  // Against p*.
  double p = kUndefined;
  double pbar = kUndefined;
  double delta = kUndefined;
  double d = kUndefined;

  // Against x_opt.
  double dist2 = kUndefined;  // (mu/2) ||x_t - x_opt||^2

  // Theory.
  double theorem2_lhs = kUndefined;
  double theorem2_rhs = kUndefined;
  double prop1_rhs = kUndefined;
  double eq26_lhs = kUndefined;
  double eq26_rhs = kUndefined;
  bool eq26_violated = false;
};

CertificateReport gaps(const SolverState& state, const ProblemInstance& instance,
                       const BoundInputs& bounds = {});

/// Lagrange multipliers u_s = sum_{s(x_k)=s} lambda_k / sum_{s(x_k)=0} lambda_k.
std::vector<double> multipliers(const SolverState& state);

enum class Criterion { pbar_d, delta_d, p_d, d, p, pbar, delta };

Criterion parse_criterion(const std::string& name);
std::string to_string(Criterion c);
std::vector<Criterion> all_criteria();
/// Criterion value from a report; NaN when undefined.
double criterion_value(Criterion c, const CertificateReport& r);

struct StoppingRule {
  Criterion criterion = Criterion::p_d;
  double epsilon = 0.05;
  /// True when the criterion value is <= epsilon. epsilon = inf always fires.
  bool fires(const CertificateReport& r) const;
};

StoppingRule stopping(const std::string& criterion, double epsilon);

/// Gap evaluation schedule: every iteration below dense_until, then every
/// sparse_every iterations.
struct Cadence {
  std::size_t dense_until = 10000;
  std::size_t sparse_every = 100;
  bool due(std::size_t t) const { return t < dense_until || t % sparse_every == 0; }
};

/// delta_k(y): f0(x) - f0(y) + <n_y, x - y> when s = 0, else f_s(x) - f_s(y).
double delta_k(const Vector& x, const Vector& y, const ProblemInstance& instance, Index s,
               const Vector* n_y = nullptr);

/// sup{k : L1 alpha_k > 1}; nullopt when never satisfied. Throws DegenerateError
/// when the scan hits max_scan without alpha_k settling below 1/L1.
std::optional<std::size_t> divergence_horizon(const Schedule& schedule, double L1,
                                              std::size_t max_scan = 100000000);

struct DivergenceConstants {
  std::optional<std::size_t> T0;
  LogValue C0;
  /// False when the history ends before T0 (C0 is then a partial sum).
  bool complete = true;
  /// Standard error of C0 across replicates (absolute units, log-space).
  LogValue C0_se;
};

/// C0 = sum_{k<=T0} lambda_k max(L1 alpha_k - 1, 0) max_delta[k].
DivergenceConstants divergence_constants(const Schedule& schedule, double L1,
                                         std::span<const double> max_delta_history);

/// Replicate version: histories[r][k] for delta(x_opt) and delta(x_sl). The
/// expectation is replaced by the replicate mean; C0_se is the standard error
/// of the per-replicate plug-in values.
DivergenceConstants divergence_constants(const Schedule& schedule, double L1,
                                         const std::vector<std::vector<double>>& delta_opt,
                                         const std::vector<std::vector<double>>& delta_sl);

/// One term lambda_k max(L1 alpha_k - 1, 0) max_delta, in log space.
LogValue c0_term(double log_lambda, double alpha, double L1, double max_delta);

/// (L0^2 sum lambda alpha + C0) / sum lambda from scaled sums.
double theorem2_rhs(double weight_alpha, double weight_total, double log_scale, double L0_sq,
                    const LogValue& C0);

/// tau / (2 h_gap + tau) (1 - rate / tau).
double prop1_rhs(double tau_sl, double h_sl_gap, double rate);

/// L1 ||x - y||^2 + L0^2 / L1.
double prop2_delta_bound(double L0_sq, double L1, double dist_sq);

/// log of (1 + c L1/mu)^T (||x0 - y||^2 + L0^2/L1^2 + L0^2/(mu c L1)), c = max(2, L1/mu - 2).
double prop2_log_envelope(double L0_sq, double L1, double mu, std::size_t T, double dist0_sq);

/// Right side of the one-step distance recursion R_{k+1}(y) <= R_k(y) - ...
double distance_recursion_rhs(double R_k, double lambda, double alpha, double L0_sq, double L1, double delta);

/// Right side of the dual-gap recursion D_{k+1} <= D_k - ...; f_s_opt = f_s(x_opt)
/// on infeasible steps and 0 otherwise.
double dual_gap_recursion_rhs(double D_k, double lambda, double alpha, double L0_sq, double L1, double delta_opt,
                  bool feasible, double f_s_opt);

/// R_k(y) = (mu/2) (sum_{i<k} lambda_i) ||x_k - y||^2 in scaled units.
double distance_potential(const SolverState& state, const Vector& y);

/// D_k = (sum_{i<k, feas} lambda_i) p* - inf M^(k-1) in scaled units.
double dual_potential(const SolverState& state, double p_star);

}  // namespace pdsg
