#pragma once

// Aggregate lower-bound model kept in normal form
//
//     M(y) = min_value + (curvature / 2) ||y - center||^2.
//
// Sums of quadratics and affine terms stay in this form, so the model costs
// O(n) memory no matter how many terms have been folded in.

#include <pdsg/regularizer.hpp>
#include <pdsg/types.hpp>

#include <vector>

namespace pdsg {

class QuadraticModel {
 public:
  QuadraticModel() = default;
  explicit QuadraticModel(Index n) : center_(Vector::Zero(n)) {}

  /// Zero curvature: the model is the constant min_value and has no center.
  bool empty() const { return curvature_ == 0.0; }
  double min_value() const { return a_; }
  double curvature() const { return curvature_; }
  const Vector& center() const { return center_; }
  double total_weight() const { return weight_; }
  double total_weight_feasible() const { return weight_feasible_; }
  Index dim() const { return center_.size(); }

  double evaluate(const Vector& y) const;
  /// Gradient b (y - z); zero for an empty model.
  Vector gradient(const Vector& y) const;

  /// Adds a2 + (b2/2)||y - z2||^2.
  void add_quadratic(double a2, double b2, const Vector& z2);
  /// Adds c + <d, y>. Throws DegenerateError on an empty model.
  void add_linear(double c, const Vector& d);
  void add_weight(double lambda, bool feasible);
  /// Multiplies the whole model (and its weights) by factor > 0.
  void rescale(double factor);

  /// Debug mode: keep every constituent term so evaluate_terms can recompute
  /// the sum explicitly.
  void retain_terms(bool on);
  bool retaining_terms() const { return retain_; }
  double evaluate_terms(const Vector& y) const;
  std::size_t term_count() const { return terms_.size(); }

 private:
  struct Term {
    bool quadratic;
    double a;   // a2 or c
    double b;   // b2 (quadratic only)
    Vector v;   // z2 or d
  };

  double a_ = 0.0;
  double curvature_ = 0.0;
  Vector center_;
  double weight_ = 0.0;
  double weight_feasible_ = 0.0;
  bool retain_ = false;
  std::vector<Term> terms_;
};

QuadraticModel add_quadratic(QuadraticModel model, double a2, double b2, const Vector& z2);
QuadraticModel add_linear(QuadraticModel model, double c, const Vector& d);

/// Data for one lower bound lambda (f + <g, y - anchor> + mu/2 ||y - anchor||^2).
struct LowerBoundTerm {
  double lambda = 0.0;
  double f_value = 0.0;
  Vector g;
  Vector anchor;
  double mu = 0.0;
};

struct ProxMinimizer {
  Vector y;              // y_{k+1}
  Vector n;              // (b_tot/lambda)(z_tot - y_{k+1})
  Vector n_stationarity; // -(grad M(y+) + lambda (g + mu (y+ - anchor)) + beta_bar (y+ - y0)) / lambda
  double b_tot = 0.0;
  Vector z_tot;
};

/// Minimizes model + new term + beta_bar/2 ||y - y0||^2 (+ lambda r when
/// with_r). Without r the minimizer is z_tot and both recovered
/// subgradients are reported as zero.
ProxMinimizer minimize_with_prox(const QuadraticModel& model, const LowerBoundTerm& term,
                                 const Regularizer& r, double beta_bar, const Vector& y0,
                                 bool with_r = true);

/// Folds the new lower bound into the model, and on feasible steps also the
/// affine minorant lambda (r(y_next) + <n_next, y - y_next>).
void append_model_term(QuadraticModel& model, bool feasible, const LowerBoundTerm& term,
                       double r_next = 0.0, const Vector* n_next = nullptr,
                       const Vector* y_next = nullptr);

}  // namespace pdsg
