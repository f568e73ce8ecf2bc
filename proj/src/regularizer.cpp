#include <pdsg/regularizer.hpp>

#include <cmath>
#include <limits>
#include <stdexcept>

namespace pdsg {

namespace {
constexpr double kBallSlack = 1e-12;
}

Regularizer Regularizer::l1(double tau) {
  if (!(tau >= 0.0)) throw std::invalid_argument("l1 regularizer: tau must be nonnegative");
  Regularizer r;
  r.kind_ = Kind::l1;
  r.tau_ = tau;
  return r;
}

Regularizer Regularizer::ball(Vector center, double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("ball regularizer: radius must be positive");
  Regularizer r;
  r.kind_ = Kind::ball;
  r.center_ = std::move(center);
  r.radius_ = radius;
  return r;
}

Vector soft_threshold(const Vector& z, double t) {
  Vector out(z.size());
  for (Index i = 0; i < z.size(); ++i) {
    const double a = std::abs(z[i]) - t;
    out[i] = a > 0.0 ? std::copysign(a, z[i]) : 0.0;
  }
  return out;
}

double Regularizer::value(const Vector& x) const {
  switch (kind_) {
    case Kind::none:
      return 0.0;
    case Kind::l1:
      return tau_ * x.lpNorm<1>();
    case Kind::ball:
      return (x - center_).norm() <= radius_ * (1.0 + kBallSlack)
                 ? 0.0
                 : std::numeric_limits<double>::infinity();
  }
  return 0.0;
}

Vector Regularizer::prox(double step, const Vector& z) const {
  if (!(step > 0.0)) throw std::invalid_argument("prox: step must be positive");
  switch (kind_) {
    case Kind::none:
      return z;
    case Kind::l1:
      return soft_threshold(z, step * tau_);
    case Kind::ball: {
      const Vector v = z - center_;
      const double nv = v.norm();
      if (nv <= radius_) return z;
      return center_ + (radius_ / nv) * v;
    }
  }
  return z;
}

bool Regularizer::smooth_at(const Vector& x) const {
  switch (kind_) {
    case Kind::none:
      return true;
    case Kind::l1:
      return tau_ == 0.0 || (x.array() != 0.0).all();
    case Kind::ball:
      return (x - center_).norm() < radius_;
  }
  return true;
}

double Regularizer::subgradient_residual(const Vector& x, const Vector& n) const {
  switch (kind_) {
    case Kind::none:
      return n.norm();
    case Kind::l1: {
      double worst = 0.0;
      for (Index i = 0; i < x.size(); ++i) {
        const double target = x[i] > 0.0 ? tau_ : (x[i] < 0.0 ? -tau_ : 0.0);
        const double err = x[i] != 0.0 ? std::abs(n[i] - target)
                                        : std::max(std::abs(n[i]) - tau_, 0.0);
        worst = std::max(worst, err);
      }
      return worst;
    }
    case Kind::ball: {
      // Normal cone: zero inside, nonnegative multiples of (x - c) on the sphere.
      const Vector v = x - center_;
      const double nv = v.norm();
      if (nv < radius_ * (1.0 - 1e-9)) return n.norm();
      const Vector dir = v / nv;
      const double along = n.dot(dir);
      return (n - along * dir).norm() + std::max(-along, 0.0);
    }
  }
  return 0.0;
}

}  // namespace pdsg
