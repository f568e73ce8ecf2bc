#pragma once

// Stepsize / dual-weight algebra.
//
// A primal stepsize sequence alpha_k and a dual weight sequence lambda_k
// describe the same method whenever
//
//     alpha_k = lambda_k / (mu * sum_{i<=k} lambda_i + beta_bar).
//
// Schedules here always emit pairs satisfying that identity.

#include <pdsg/types.hpp>

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace pdsg {

/// lambda_{k+1} = alpha_{k+1}/(1 - mu alpha_{k+1}) * lambda_k/alpha_k.
/// Requires alpha_0 = lambda0/(mu lambda0 + beta_bar) and mu alpha_k < 1 for k >= 1.
std::vector<double> lambda_from_alpha(std::span<const double> alphas, double lambda0,
                                      double beta_bar, double mu);

/// alpha_k = lambda_k / (mu * sum_{i<=k} lambda_i + beta_bar). mu = 0 is allowed
/// when beta_bar > 0.
std::vector<double> alpha_from_lambda(std::span<const double> lambdas, double beta_bar, double mu);

struct WeightStep {
  double lambda;
  double alpha;
};

/// Next weight minimizing sum(lambda alpha)/sum(lambda) one step ahead, given
/// a prefix of length T >= 1. Throws DegenerateError on a nonpositive normalizer.
WeightStep optimized_next_weight(std::span<const double> lambdas, std::span<const double> alphas,
                                 double mu, double beta_bar = 0.0);

/// (L0^2 * sum_{k<T} lambda_k alpha_k + C0) / sum_{k<T} lambda_k over the given prefix.
double rate_bound(std::span<const double> lambdas, std::span<const double> alphas, double L0_sq,
                  double C0);

enum class ScheduleKind { uniform, linear, poly, optimized, smooth, explicit_alpha, capped };

std::string to_string(ScheduleKind kind);
ScheduleKind parse_schedule_kind(const std::string& name);

/// Plain description of a schedule, as read from a config file.
struct ScheduleSpec {
  ScheduleKind kind = ScheduleKind::linear;
  double mu = 1.0;
  double beta_bar = 0.0;
  double lambda0 = 1.0;
  double p = 1.0;               // poly exponent
  double L1 = 0.0;              // smooth and capped
  std::vector<double> alphas;   // explicit
};

struct ScheduleTerm {
  double alpha;
  double lambda;
  double log_lambda;
};

class Schedule;

/// Forward iterator over (alpha_k, lambda_k). Value type; copying a cursor
/// forks the sequence.
///
/// Weights are held as lambda_k * exp(-shift) in extended precision together
/// with the running sums, so exponentially growing schedules never overflow;
/// the normalized quantities (alpha, lambda/sum) are shift-free.
class ScheduleCursor {
 public:
  std::size_t index() const { return k_; }
  double alpha() const { return alpha_; }
  double log_lambda() const;
  /// lambda_k in absolute units; +inf when it exceeds the double range.
  double lambda() const;
  /// lambda_k / sum_{i<=k} lambda_i.
  double weight_ratio() const;
  double log_sum_lambda() const;
  /// Absolute running sums including index k. May saturate to inf.
  long double sum_lambda() const;
  long double sum_lambda_alpha() const;
  ScheduleTerm term() const { return {alpha(), lambda(), log_lambda()}; }

  void advance();

 private:
  friend class Schedule;
  explicit ScheduleCursor(std::shared_ptr<const ScheduleSpec> spec);

  void set_from_lambda(long double lambda_scaled);
  void renormalize();
  double alpha_rule(std::size_t k) const;

  std::shared_ptr<const ScheduleSpec> spec_;
  std::size_t k_ = 0;
  double alpha_ = 0.0;
  long double lambda_ = 0.0L;       // scaled by exp(-shift_)
  long double sum_ = 0.0L;          // scaled
  long double sum_la_ = 0.0L;       // scaled
  double shift_ = 0.0;
};

/// Immutable schedule description; safe to share across runs.
class Schedule {
 public:
  explicit Schedule(ScheduleSpec spec);

  static Schedule uniform(double mu, double beta_bar = 0.0);
  static Schedule linear(double mu, double beta_bar = 0.0);
  static Schedule poly(double p, double mu, double beta_bar = 0.0);
  static Schedule optimized(double mu, double beta_bar = 0.0, double lambda0 = 1.0);
  /// alpha_0 = 1/mu, alpha_k = 1/L1 afterwards; requires L1 > mu.
  static Schedule smooth(double mu, double L1);
  /// alpha_0 = 1/mu, alpha_k = min(1/L1, 2/(mu (k+2))) afterwards.
  static Schedule capped(double mu, double L1);
  static Schedule explicit_alphas(std::vector<double> alphas, double mu, double beta_bar = 0.0,
                                  double lambda0 = 1.0);

  const ScheduleSpec& spec() const { return *spec_; }
  ScheduleKind kind() const { return spec_->kind; }
  double mu() const { return spec_->mu; }
  double beta_bar() const { return spec_->beta_bar; }
  /// Short label such as "linear" or "poly3".
  std::string name() const;

  ScheduleCursor cursor() const { return ScheduleCursor(spec_); }
  std::vector<ScheduleTerm> prefix(std::size_t T) const;

 private:
  std::shared_ptr<const ScheduleSpec> spec_;
};

/// rate_bound evaluated on the first T terms of a schedule.
double rate_bound(const Schedule& schedule, std::size_t T, double L0_sq, double C0);

}  // namespace pdsg
