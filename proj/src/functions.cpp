#include <pdsg/functions.hpp>

#include <stdexcept>

namespace pdsg {

Vector sign0(const Vector& v) {
  return v.unaryExpr([](double t) { return t > 0.0 ? 1.0 : (t < 0.0 ? -1.0 : 0.0); });
}

QuadraticFunction::QuadraticFunction(Matrix H, Vector c, double offset)
    : H_(std::move(H)), c_(std::move(c)), offset_(offset) {
  if (H_.rows() != H_.cols() || H_.rows() != c_.size()) {
    throw std::invalid_argument("QuadraticFunction: dimension mismatch");
  }
}

double QuadraticFunction::value(const Vector& x) const {
  const Vector e = x - c_;
  return 0.5 * e.dot(H_ * e) + offset_;
}

Vector QuadraticFunction::subgradient(const Vector& x) const { return H_ * (x - c_); }

double QuadraticFunction::value_and_subgradient(const Vector& x, Vector& g) const {
  const Vector e = x - c_;
  g.noalias() = H_ * e;
  return 0.5 * e.dot(g) + offset_;
}

L1LeastSquares::L1LeastSquares(Matrix A, Vector b, Matrix C, Vector d)
    : A_(std::move(A)), C_(std::move(C)), b_(std::move(b)), d_(std::move(d)) {
  if (A_.cols() != C_.cols() || A_.rows() != b_.size() || C_.rows() != d_.size()) {
    throw std::invalid_argument("L1LeastSquares: dimension mismatch");
  }
}

double L1LeastSquares::value(const Vector& x) const {
  return (A_ * x - b_).lpNorm<1>() + 0.5 * (C_ * x - d_).squaredNorm();
}

Vector L1LeastSquares::subgradient(const Vector& x) const {
  Vector g;
  value_and_subgradient(x, g);
  return g;
}

double L1LeastSquares::value_and_subgradient(const Vector& x, Vector& g) const {
  const Vector ra = A_ * x - b_;
  const Vector rc = C_ * x - d_;
  g.noalias() = A_.transpose() * sign0(ra);
  g.noalias() += C_.transpose() * rc;
  return ra.lpNorm<1>() + 0.5 * rc.squaredNorm();
}

Vector L1Norm::subgradient(const Vector& x) const { return tau_ * sign0(x); }

double ProximallyPerturbed::value(const Vector& x) const {
  return base_->value(x) + 0.5 * kappa_ * (x - x0_).squaredNorm();
}

Vector ProximallyPerturbed::subgradient(const Vector& x) const {
  return base_->subgradient(x) + kappa_ * (x - x0_);
}

}  // namespace pdsg
