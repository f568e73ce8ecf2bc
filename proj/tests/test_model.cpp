#include <pdsg/quadratic_model.hpp>
#include <pdsg/regularizer.hpp>

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

using namespace pdsg;

namespace {

Vector randn(Index n, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> N(0.0, scale);
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = N(rng);
  return v;
}

Vector e1(Index n, double v = 1.0) {
  Vector x = Vector::Zero(n);
  x[0] = v;
  return x;
}

}  // namespace

TEST_CASE("add_quadratic: two unit quadratics") {
  const Index n = 4;
  QuadraticModel m(n);
  m.add_quadratic(0.0, 1.0, Vector::Zero(n));
  m.add_quadratic(0.0, 1.0, e1(n, 2.0));
  CHECK(m.min_value() == doctest::Approx(1.0));
  CHECK(m.curvature() == 2.0);
  CHECK((m.center() - e1(n)).norm() < 1e-15);

  std::mt19937_64 rng(1);
  for (int i = 0; i < 5; ++i) {
    const Vector y = randn(n, rng);
    const double direct = 0.5 * y.squaredNorm() + 0.5 * (y - e1(n, 2.0)).squaredNorm();
    CHECK(m.evaluate(y) == doctest::Approx(direct).epsilon(1e-14));
  }
}

TEST_CASE("add_quadratic: zero curvature term and identical terms") {
  std::mt19937_64 rng(2);
  const Vector v = randn(3, rng);
  QuadraticModel m(3);
  m.add_quadratic(3.0, 2.0, v);
  m.add_quadratic(0.0, 0.0, randn(3, rng));
  CHECK(m.min_value() == 3.0);
  CHECK(m.curvature() == 2.0);
  CHECK((m.center() - v).norm() == 0.0);

  QuadraticModel k(3);
  for (int i = 0; i < 7; ++i) k.add_quadratic(0.0, 1.0, v);
  CHECK(k.min_value() == doctest::Approx(0.0));
  CHECK(k.curvature() == 7.0);
  CHECK((k.center() - v).norm() < 1e-14);

  CHECK_THROWS(k.add_quadratic(0.0, -1.0, v));
}

TEST_CASE("add_linear completes the square") {
  const Index n = 3;
  QuadraticModel m(n);
  m.add_quadratic(0.0, 1.0, Vector::Zero(n));
  m.add_linear(0.0, e1(n));
  CHECK((m.center() - e1(n, -1.0)).norm() < 1e-15);
  CHECK(m.min_value() == doctest::Approx(-0.5));

  std::mt19937_64 rng(3);
  for (int i = 0; i < 5; ++i) {
    const Vector y = randn(n, rng);
    CHECK(m.evaluate(y) == doctest::Approx(0.5 * y.squaredNorm() + y[0]).epsilon(1e-14));
  }

  const Vector c0 = m.center();
  const double a0 = m.min_value();
  m.add_linear(5.0, Vector::Zero(n));
  CHECK(m.min_value() == doctest::Approx(a0 + 5.0));
  CHECK((m.center() - c0).norm() == 0.0);
}

TEST_CASE("add_linear then its negation restores the model") {
  std::mt19937_64 rng(4);
  const Index n = 6;
  QuadraticModel m(n);
  m.add_quadratic(1.5, 3.0, randn(n, rng));
  const QuadraticModel orig = m;
  const Vector d = randn(n, rng, 10.0);
  m.add_linear(2.0, d);
  // Rounding is relative to the largest intermediate value, not to the restored one.
  const double scale = std::max(std::abs(orig.min_value()), std::abs(m.min_value()));
  m.add_linear(-2.0, -d);
  CHECK(std::abs(m.min_value() - orig.min_value()) <= 1e-14 * scale);
  CHECK((m.center() - orig.center()).norm() <= 1e-14 * (1.0 + orig.center().norm()));

  // Free-function forms agree with the members.
  const auto a = add_linear(add_quadratic(QuadraticModel(n), 0.0, 1.0, Vector::Zero(n)), 0.0, e1(n));
  CHECK(a.min_value() == doctest::Approx(-0.5));
}

TEST_CASE("add_linear on an empty model is rejected") {
  QuadraticModel m(2);
  CHECK(m.empty());
  CHECK_THROWS_AS(m.add_linear(1.0, Vector::Ones(2)), DegenerateError);
}

TEST_CASE("minimize_with_prox: r = 0 returns the quadratic center") {
  const Index n = 3;
  std::mt19937_64 rng(5);
  QuadraticModel m(n);
  m.add_quadratic(0.0, 2.0, randn(n, rng));
  LowerBoundTerm t{1.5, 0.7, randn(n, rng), randn(n, rng), 1.0};
  const Vector y0 = randn(n, rng);
  const auto res = minimize_with_prox(m, t, Regularizer::none(), 0.5, y0);
  const double b_tot = 2.0 + 1.5 * 1.0 + 0.5;
  CHECK(res.b_tot == doctest::Approx(b_tot));
  const Vector z = (2.0 * m.center() + 1.5 * (t.anchor - t.g) + 0.5 * y0) / b_tot;
  CHECK((res.y - z).norm() < 1e-14);
  CHECK(res.n.norm() < 1e-13);
}

TEST_CASE("minimize_with_prox: unit ball projection and normal cone") {
  const Index n = 3;
  QuadraticModel m(n);
  LowerBoundTerm t{1.0, 0.0, Vector::Zero(n), Vector::Constant(n, 2.0), 1.0};
  const auto r = Regularizer::ball(Vector::Zero(n), 1.0);
  const auto res = minimize_with_prox(m, t, r, 0.0, Vector::Zero(n));
  const Vector z = Vector::Constant(n, 2.0);
  CHECK((res.y - z / z.norm()).norm() < 1e-14);
  // n must lie in the normal cone at the boundary point: a nonnegative multiple of y.
  CHECK(r.subgradient_residual(res.y, res.n) < 1e-12);
  CHECK(res.n.dot(res.y) > 0.0);
  CHECK((res.n - res.n.dot(res.y) * res.y).norm() < 1e-12);
}

TEST_CASE("minimize_with_prox: l1 soft threshold") {
  // lambda / b_tot = 0.5 and z_tot = (1.2, -0.3).
  const Index n = 2;
  Vector z(2);
  z << 1.2, -0.3;
  QuadraticModel m(n);
  LowerBoundTerm t{1.0, 0.0, Vector::Zero(n), z, 1.0};
  const auto res = minimize_with_prox(m, t, Regularizer::l1(1.0), 1.0, z);
  CHECK(res.b_tot == 2.0);
  CHECK((res.z_tot - z).norm() < 1e-15);
  CHECK(res.y[0] == doctest::Approx(0.7));
  CHECK(res.y[1] == 0.0);
  // Componentwise: n_1 = sign(y_1), |n_2| <= 1.
  CHECK(res.n[0] == doctest::Approx(1.0));
  CHECK(std::abs(res.n[1]) <= 1.0);
  CHECK((res.n - res.n_stationarity).norm() < 1e-12);
}

TEST_CASE("append_model_term: one feasible step on half the squared norm") {
  Vector x0(2);
  x0 << 2.0, 0.0;
  QuadraticModel m(2);
  LowerBoundTerm t{1.0, 0.5 * x0.squaredNorm(), x0, x0, 1.0};
  append_model_term(m, true, t);
  CHECK(m.min_value() == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(m.curvature() == 1.0);
  CHECK(m.center().norm() < 1e-15);
  CHECK(m.total_weight() == 1.0);
  CHECK(m.total_weight_feasible() == 1.0);

  append_model_term(m, false, t);
  CHECK(m.total_weight() == 2.0);
  CHECK(m.total_weight_feasible() == 1.0);
}

TEST_CASE("folded model matches the explicit term sum after 200 appends") {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> U(0.1, 3.0);
  const Index n = 10;
  QuadraticModel m(n);
  m.retain_terms(true);
  double total = 0.0;
  for (int k = 0; k < 200; ++k) {
    LowerBoundTerm t{U(rng), U(rng) - 1.0, randn(n, rng), randn(n, rng), 0.5};
    const Vector y = randn(n, rng);
    const Vector nn = randn(n, rng);
    const bool feas = k % 3 != 0;
    append_model_term(m, feas, t, U(rng), &nn, &y);
    total += t.lambda;
  }
  CHECK(m.term_count() > 200);
  CHECK(m.total_weight() == doctest::Approx(total).epsilon(1e-14));
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const Vector y = randn(n, rng, 3.0);
    const double a = m.evaluate(y), b = m.evaluate_terms(y);
    worst = std::max(worst, std::abs(a - b) / std::max(1.0, std::abs(b)));
  }
  CHECK(worst <= 1e-10);
}

TEST_CASE("model is a valid lower bound for a strongly convex function") {
  // f(y) = 0.5 ||y - c||^2 + ||y||_1 is 1-strongly convex; every term is a lower bound.
  std::mt19937_64 rng(8);
  const Index n = 5;
  const Vector c = randn(n, rng);
  auto f = [&](const Vector& y) { return 0.5 * (y - c).squaredNorm() + y.lpNorm<1>(); };
  auto g = [&](const Vector& y) {
    Vector s = y - c;
    for (Index i = 0; i < n; ++i) s[i] += (y[i] > 0) - (y[i] < 0);
    return s;
  };
  QuadraticModel m(n);
  double total = 0.0;
  for (int k = 0; k < 50; ++k) {
    const Vector x = randn(n, rng, 2.0);
    LowerBoundTerm t{k + 1.0, f(x), g(x), x, 1.0};
    append_model_term(m, true, t);
    total += t.lambda;
    for (int i = 0; i < 20; ++i) {
      const Vector y = randn(n, rng, 2.0);
      CHECK(m.evaluate(y) <= total * f(y) + 1e-9 * total);
      CHECK(m.min_value() <= m.evaluate(y) + 1e-12 * std::abs(m.evaluate(y)));
    }
  }
}

TEST_CASE("rescale multiplies every component") {
  QuadraticModel m(2);
  m.add_quadratic(2.0, 4.0, Vector::Ones(2));
  m.add_weight(3.0, true);
  m.rescale(0.5);
  CHECK(m.min_value() == 1.0);
  CHECK(m.curvature() == 2.0);
  CHECK(m.total_weight() == 1.5);
  CHECK((m.center() - Vector::Ones(2)).norm() == 0.0);
  CHECK_THROWS(m.rescale(0.0));
}

TEST_CASE("regularizer prox and subgradient residuals") {
  Vector z(3);
  z << 2.0, -0.5, 0.1;
  const Vector s = soft_threshold(z, 0.3);
  CHECK(s[0] == doctest::Approx(1.7));
  CHECK(s[1] == doctest::Approx(-0.2));
  CHECK(s[2] == 0.0);

  const auto l1 = Regularizer::l1(2.0);
  CHECK(l1.value(z) == doctest::Approx(2.0 * 2.6));
  CHECK((l1.prox(0.15, z) - s).norm() < 1e-15);
  Vector good(3);
  good << 2.0, -2.0, 2.0;
  CHECK(l1.subgradient_residual(z, good) == 0.0);
  Vector bad(3);
  bad << 1.0, -2.0, 0.0;
  CHECK(l1.subgradient_residual(z, bad) > 0.0);

  const auto ball = Regularizer::ball(Vector::Zero(3), 1.0);
  CHECK(std::isinf(ball.value(z)));
  CHECK(ball.value(ball.prox(1.0, z)) == 0.0);
  CHECK(ball.smooth_at(Vector::Zero(3)));
}
