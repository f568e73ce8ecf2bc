#pragma once

// The simple term r in min f0(x) + r(x): nothing, a scaled l1 norm, or the
// indicator of a Euclidean ball. Each variant exposes its prox in closed form.

#include <pdsg/types.hpp>

namespace pdsg {

class Regularizer {
 public:
  enum class Kind { none, l1, ball };

  Regularizer() = default;
  static Regularizer none() { return {}; }
  static Regularizer l1(double tau);
  static Regularizer ball(Vector center, double radius);

  Kind kind() const { return kind_; }
  bool is_zero() const { return kind_ == Kind::none; }
  double tau() const { return tau_; }
  double radius() const { return radius_; }
  const Vector& center() const { return center_; }

  /// r(x); +inf outside the ball. Points within a relative 1e-12 of the
  /// sphere count as inside, so prox outputs always evaluate finite.
  double value(const Vector& x) const;

  /// argmin_u r(u) + ||u - z||^2 / (2 step).
  Vector prox(double step, const Vector& z) const;

  /// True when r is differentiable at x (the zero subgradient is then the
  /// only choice for the l1 and ball variants).
  bool smooth_at(const Vector& x) const;

  /// Residual of the containment n in dr(x): zero when n is a valid
  /// subgradient, otherwise a positive violation measure.
  double subgradient_residual(const Vector& x, const Vector& n) const;

 private:
  Kind kind_ = Kind::none;
  double tau_ = 0.0;
  double radius_ = 0.0;
  Vector center_;
};

/// Componentwise soft-thresholding sign(z) max(|z| - t, 0).
Vector soft_threshold(const Vector& z, double t);

}  // namespace pdsg
