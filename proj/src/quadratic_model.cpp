#include <pdsg/quadratic_model.hpp>

#include <stdexcept>

namespace pdsg {

double QuadraticModel::evaluate(const Vector& y) const {
  if (empty()) return a_;
  return a_ + 0.5 * curvature_ * (y - center_).squaredNorm();
}

Vector QuadraticModel::gradient(const Vector& y) const {
  if (empty()) return Vector::Zero(y.size());
  return curvature_ * (y - center_);
}

void QuadraticModel::add_quadratic(double a2, double b2, const Vector& z2) {
  if (!(b2 >= 0.0)) throw std::invalid_argument("add_quadratic: curvature must be nonnegative");
  if (retain_) terms_.push_back({true, a2, b2, z2});
  if (b2 == 0.0) {
    a_ += a2;
    return;
  }
  if (empty()) {
    a_ += a2;
    curvature_ = b2;
    center_ = z2;
    return;
  }
  const double b1 = curvature_;
  const double bs = b1 + b2;
  a_ += a2 + (b1 * b2 / (2.0 * bs)) * (center_ - z2).squaredNorm();
  center_ = (b1 / bs) * center_ + (b2 / bs) * z2;
  curvature_ = bs;
}

void QuadraticModel::add_linear(double c, const Vector& d) {
  if (empty()) throw DegenerateError("add_linear: affine term on a zero-curvature model");
  if (retain_) terms_.push_back({false, c, 0.0, d});
  a_ += c + d.dot(center_) - d.squaredNorm() / (2.0 * curvature_);
  center_ -= d / curvature_;
}

void QuadraticModel::add_weight(double lambda, bool feasible) {
  weight_ += lambda;
  if (feasible) weight_feasible_ += lambda;
}

void QuadraticModel::rescale(double factor) {
  if (!(factor > 0.0)) throw std::invalid_argument("rescale: factor must be positive");
  a_ *= factor;
  curvature_ *= factor;
  weight_ *= factor;
  weight_feasible_ *= factor;
  for (auto& t : terms_) {
    t.a *= factor;
    if (t.quadratic) {
      t.b *= factor;
    } else {
      t.v *= factor;
    }
  }
}

void QuadraticModel::retain_terms(bool on) {
  retain_ = on;
  if (!on) terms_.clear();
}

double QuadraticModel::evaluate_terms(const Vector& y) const {
  if (!retain_) throw std::logic_error("evaluate_terms: model does not retain terms");
  double s = 0.0;
  for (const auto& t : terms_) {
    s += t.quadratic ? t.a + 0.5 * t.b * (y - t.v).squaredNorm() : t.a + t.v.dot(y);
  }
  return s;
}

QuadraticModel add_quadratic(QuadraticModel model, double a2, double b2, const Vector& z2) {
  model.add_quadratic(a2, b2, z2);
  return model;
}

QuadraticModel add_linear(QuadraticModel model, double c, const Vector& d) {
  model.add_linear(c, d);
  return model;
}

ProxMinimizer minimize_with_prox(const QuadraticModel& model, const LowerBoundTerm& term,
                                 const Regularizer& r, double beta_bar, const Vector& y0,
                                 bool with_r) {
  const double lam = term.lambda;
  const double bq = lam * term.mu;
  const double b_tot = model.curvature() + bq + beta_bar;
  if (!(b_tot > 0.0)) throw DegenerateError("minimize_with_prox: total curvature must be positive");
  if (!(lam > 0.0)) throw std::invalid_argument("minimize_with_prox: weight must be positive");

  // Center of model + lambda(mu/2)||y - (anchor - g/mu)||^2 + beta_bar/2 ||y - y0||^2;
  // the linear part is written as lambda <g, y> to stay valid when mu = 0.
  Vector z = bq * term.anchor - lam * term.g;
  if (!model.empty()) z += model.curvature() * model.center();
  if (beta_bar > 0.0) z += beta_bar * y0;
  z /= b_tot;

  ProxMinimizer out;
  out.b_tot = b_tot;
  out.y = with_r ? r.prox(lam / b_tot, z) : z;
  if (with_r) {
    out.n = (b_tot / lam) * (z - out.y);
    Vector grad = model.gradient(out.y) + lam * (term.g + term.mu * (out.y - term.anchor));
    if (beta_bar > 0.0) grad += beta_bar * (out.y - y0);
    out.n_stationarity = -grad / lam;
  } else {
    out.n = Vector::Zero(z.size());
    out.n_stationarity = Vector::Zero(z.size());
  }
  out.z_tot = std::move(z);
  return out;
}

void append_model_term(QuadraticModel& model, bool feasible, const LowerBoundTerm& term,
                       double r_next, const Vector* n_next, const Vector* y_next) {
  const double lam = term.lambda;
  if (term.mu > 0.0) {
    model.add_quadratic(lam * (term.f_value - term.g.squaredNorm() / (2.0 * term.mu)),
                        lam * term.mu, term.anchor - term.g / term.mu);
  } else {
    model.add_linear(lam * (term.f_value - term.g.dot(term.anchor)), lam * term.g);
  }
  if (feasible && n_next != nullptr && y_next != nullptr) {
    model.add_linear(lam * (r_next - n_next->dot(*y_next)), lam * *n_next);
  } else if (feasible && r_next != 0.0) {
    model.add_quadratic(lam * r_next, 0.0, term.anchor);
  }
  model.add_weight(lam, feasible);
}

}  // namespace pdsg
