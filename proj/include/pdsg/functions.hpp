#pragma once

// Deterministic convex oracles: value plus one subgradient.

#include <pdsg/types.hpp>

#include <memory>
#include <string>

namespace pdsg {

class ConvexFunction {
 public:
  virtual ~ConvexFunction() = default;
  virtual Index dim() const = 0;
  virtual double value(const Vector& x) const = 0;
  virtual Vector subgradient(const Vector& x) const = 0;
  virtual double value_and_subgradient(const Vector& x, Vector& g) const {
    g = subgradient(x);
    return value(x);
  }
  virtual std::string type() const = 0;
};

using FunctionPtr = std::shared_ptr<const ConvexFunction>;

/// 0.5 (x - c)^T H (x - c) + offset with H symmetric PSD.
class QuadraticFunction final : public ConvexFunction {
 public:
  QuadraticFunction(Matrix H, Vector c, double offset = 0.0);
  Index dim() const override { return c_.size(); }
  double value(const Vector& x) const override;
  Vector subgradient(const Vector& x) const override;
  double value_and_subgradient(const Vector& x, Vector& g) const override;
  std::string type() const override { return "quadratic"; }
  const Matrix& H() const { return H_; }
  const Vector& c() const { return c_; }
  double offset() const { return offset_; }

 private:
  Matrix H_;
  Vector c_;
  double offset_;
};

/// ||A x - b||_1 + 0.5 ||C x - d||^2 with subgradient A^T sign(Ax - b) + C^T (Cx - d),
/// sign(0) = 0.
class L1LeastSquares final : public ConvexFunction {
 public:
  L1LeastSquares(Matrix A, Vector b, Matrix C, Vector d);
  Index dim() const override { return C_.cols(); }
  double value(const Vector& x) const override;
  Vector subgradient(const Vector& x) const override;
  double value_and_subgradient(const Vector& x, Vector& g) const override;
  std::string type() const override { return "l1_least_squares"; }
  const Matrix& A() const { return A_; }
  const Vector& b() const { return b_; }
  const Matrix& C() const { return C_; }
  const Vector& d() const { return d_; }

 private:
  Matrix A_, C_;
  Vector b_, d_;
};

/// 0.5 ||x - a||^2 - rho.
class BallConstraint final : public ConvexFunction {
 public:
  BallConstraint(Vector a, double rho) : a_(std::move(a)), rho_(rho) {}
  Index dim() const override { return a_.size(); }
  double value(const Vector& x) const override { return 0.5 * (x - a_).squaredNorm() - rho_; }
  Vector subgradient(const Vector& x) const override { return x - a_; }
  std::string type() const override { return "ball"; }
  const Vector& a() const { return a_; }
  double rho() const { return rho_; }

 private:
  Vector a_;
  double rho_;
};

/// tau ||x||_1 (sign(0) = 0).
class L1Norm final : public ConvexFunction {
 public:
  L1Norm(Index n, double tau) : n_(n), tau_(tau) {}
  Index dim() const override { return n_; }
  double value(const Vector& x) const override { return tau_ * x.lpNorm<1>(); }
  Vector subgradient(const Vector& x) const override;
  std::string type() const override { return "l1_norm"; }
  double tau() const { return tau_; }

 private:
  Index n_;
  double tau_;
};

/// base(x) + (kappa / 2) ||x - x0||^2.
class ProximallyPerturbed final : public ConvexFunction {
 public:
  ProximallyPerturbed(FunctionPtr base, double kappa, Vector x0)
      : base_(std::move(base)), kappa_(kappa), x0_(std::move(x0)) {}
  Index dim() const override { return base_->dim(); }
  double value(const Vector& x) const override;
  Vector subgradient(const Vector& x) const override;
  std::string type() const override { return "perturbed"; }
  const FunctionPtr& base() const { return base_; }
  double kappa() const { return kappa_; }
  const Vector& x0() const { return x0_; }

 private:
  FunctionPtr base_;
  double kappa_;
  Vector x0_;
};

Vector sign0(const Vector& v);

}  // namespace pdsg
