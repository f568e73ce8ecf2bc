#include <pdsg/problems.hpp>
#include <pdsg/runner.hpp>

#include "oracles/jacobi.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace pdsg;

namespace {

Matrix randn(Index r, Index c, std::mt19937_64& rng) {
  std::normal_distribution<double> N;
  Matrix M(r, c);
  for (Index i = 0; i < r; ++i)
    for (Index j = 0; j < c; ++j) M(i, j) = N(rng);
  return M;
}

}  // namespace

TEST_CASE("eigen_extremes basics") {
  auto e = eigen_extremes(Matrix::Identity(5, 5));
  CHECK(e.min == doctest::Approx(1.0));
  CHECK(e.max == doctest::Approx(1.0));
  Vector d = Vector::Ones(6);
  d[5] = 9.0;
  e = eigen_extremes(d.asDiagonal().toDenseMatrix());
  CHECK(e.min == doctest::Approx(1.0));
  CHECK(e.max == doctest::Approx(9.0));
}

TEST_CASE("eigen_extremes agrees with a Jacobi eigensolver") {
  std::mt19937_64 rng(11);
  for (Index n : {30, 80}) {
    const Matrix C = Matrix::Identity(n, n) + 0.02 * randn(n, n, rng);
    const Matrix S = C.transpose() * C;
    const auto e = eigen_extremes(S);
    const auto ref = oracle::jacobi_eigenvalues(S);
    CHECK(e.min == doctest::Approx(ref.front()).epsilon(1e-8));
    CHECK(e.max == doctest::Approx(ref.back()).epsilon(1e-8));
  }
}

TEST_CASE("eigen_extremes by power iteration beyond n = 200") {
  std::mt19937_64 rng(12);
  const Index n = 230;
  const Matrix C = Matrix::Identity(n, n) + 0.05 * randn(n, n, rng);
  const Matrix S = C.transpose() * C;
  const auto e = eigen_extremes(S);
  const auto ref = oracle::jacobi_eigenvalues(S, 1e-15);
  CHECK(e.min == doctest::Approx(ref.front()).epsilon(1e-8));
  CHECK(e.max == doctest::Approx(ref.back()).epsilon(1e-8));
}

TEST_CASE("l1 least squares generator") {
  const auto a = gen_l1_ls(100, 100, 0.0, 1);
  CHECK(*a.constants.mu == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(*a.constants.L1 == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(a.objective->value(a.x_opt()) == doctest::Approx(0.0));
  CHECK(*a.refs.p_star == 0.0);
  CHECK(a.x0.norm() == 0.0);

  const auto b = gen_l1_ls(100, 100, 0.05, 1);
  const double cond = *b.constants.L1 / *b.constants.mu;
  CHECK(cond > 20.0);
  CHECK(cond < 400.0);

  // Same draws across sigma: x_opt is shared.
  CHECK((a.x_opt() - b.x_opt()).norm() == 0.0);
  // Smooth variant.
  const auto s = gen_l1_ls(10, 10, 0.02, 3, 0.0);
  CHECK(s.objective->value(s.x0) == doctest::Approx(0.5 * s.x_opt().squaredNorm() * 1.0).epsilon(0.2));
}

TEST_CASE("l1 least squares in one dimension") {
  // |a x - a x*| + 0.5 (x - x*)^2 with C = 1: subgradient a sign(x - x*) + (x - x*).
  const auto inst = gen_l1_ls(1, 1, 0.0, 9);
  const auto& f = dynamic_cast<const L1LeastSquares&>(*inst.objective);
  const double a = f.A()(0, 0), xs = inst.x_opt()[0];
  for (double x : {-3.0, -0.1, 0.4, 2.5}) {
    Vector v(1);
    v << x;
    CHECK(f.value(v) == doctest::Approx(std::abs(a * (x - xs)) + 0.5 * (x - xs) * (x - xs)));
    const double s = (a * (x - xs) > 0) - (a * (x - xs) < 0);
    CHECK(f.subgradient(v)[0] == doctest::Approx(a * s + (x - xs)));
  }
}

TEST_CASE("l1 least squares: strong convexity and the subgradient growth condition at random points") {
  std::mt19937_64 rng(13);
  const auto inst = gen_l1_ls(15, 12, 0.05, 4);
  const double mu = *inst.constants.mu, L0 = *inst.constants.L0_sq, L1 = *inst.constants.L1;
  const auto& f = *inst.objective;
  std::normal_distribution<double> N(0.0, 3.0);
  for (int i = 0; i < 200; ++i) {
    Vector x(12), y(12);
    for (Index j = 0; j < 12; ++j) {
      x[j] = N(rng);
      y[j] = N(rng);
    }
    const Vector g = f.subgradient(x);
    CHECK(f.value(y) >= f.value(x) + g.dot(y - x) + 0.5 * mu * (y - x).squaredNorm() - 1e-9);
    CHECK(g.squaredNorm() <= L0 + L1 * (f.value(x) - f.value(inst.x_opt())) + 1e-9);
  }
}

TEST_CASE("subgradient is piecewise affine on each sign pattern") {
  // Between two points with the same sign pattern, g changes exactly by C^T C (y - x).
  std::mt19937_64 rng(14);
  const auto inst = gen_l1_ls(8, 8, 0.05, 5);
  const auto& f = dynamic_cast<const L1LeastSquares&>(*inst.objective);
  const Matrix CtC = f.C().transpose() * f.C();
  std::normal_distribution<double> N;
  int tested = 0;
  for (int i = 0; i < 200 && tested < 20; ++i) {
    Vector x(8), dx(8);
    for (Index j = 0; j < 8; ++j) {
      x[j] = 3.0 * N(rng);
      dx[j] = 1e-4 * N(rng);
    }
    const Vector y = x + dx;
    if (sign0(f.A() * x - f.b()) != sign0(f.A() * y - f.b())) continue;
    ++tested;
    CHECK((f.subgradient(y) - f.subgradient(x) - CtC * dx).norm() < 1e-10);
  }
  CHECK(tested >= 10);
}

TEST_CASE("toy quadratic") {
  const auto t = toy_divergent();
  CHECK(*t.constants.mu == 1.0);
  CHECK(*t.constants.L0_sq == 0.0);
  CHECK(*t.constants.L1 == 200.0);
  CHECK(t.x0 == (Vector(2) << 1.0, 0.0).finished());
  CHECK(t.objective->subgradient(t.x0) == (Vector(2) << 100.0, 0.0).finished());
  CHECK(t.objective->value(t.x_opt()) == 0.0);
  CHECK(t.x_opt().norm() == 0.0);
}

TEST_CASE("assumption_c_constants") {
  auto c = assumption_c_constants(2.0, 0.0, 0.0, 0.0);
  CHECK(c.L0_sq == 24.0);
  CHECK(c.L1 == 0.0);
  c = assumption_c_constants(0.0, 0.0, 4.0, 0.0);
  CHECK(c.L0_sq == 4.0);
  CHECK(c.L1 == 0.0);
  c = assumption_c_constants(1.0, 2.0, 3.0, 0.5);
  CHECK(c.L0_sq == doctest::Approx(6.0 + 3.0 + 6.0));
  CHECK(c.L1 == 12.0);
}

TEST_CASE("strongly_convexify") {
  // f0 = |x| in one dimension, eps / D^2 = 1, x0 = 2: minimizer at soft(2, 1) = 1.
  ProblemInstance base;
  base.name = "abs";
  base.x0 = Vector::Constant(1, 2.0);
  base.objective = std::make_shared<L1Norm>(1, 1.0);
  base.refs.x_opt = Vector::Zero(1);
  base.refs.p_star = 0.0;
  base.constants.M = 1.0;
  base.constants.L = 0.0;
  const auto s = strongly_convexify(base, 4.0, 2.0, base.x0);
  CHECK(*s.constants.mu == doctest::Approx(1.0));
  CHECK(s.refs.p_star_interval);
  CHECK(s.refs.p_star_interval->first == 0.0);
  CHECK(s.refs.p_star_interval->second == doctest::Approx(0.5 * 4.0));
  CHECK(*s.constants.L0_sq == doctest::Approx(6.0));

  RunOptions opt;
  opt.T = 20000;
  opt.monitors = false;
  opt.record_reports = false;
  const auto r = run(s, Schedule::linear(1.0), opt);
  CHECK(r.state->x[0] == doctest::Approx(1.0).epsilon(1e-3));

  // The added term's subgradient is exactly kappa (x - x0), and eps -> 0 recovers f0.
  const Vector x = Vector::Constant(1, -0.7);
  CHECK(s.objective->subgradient(x)[0] == doctest::Approx(-1.0 + (-0.7 - 2.0)));
  const auto tiny = strongly_convexify(base, 1e-14, 1.0, base.x0);
  for (double v : {-3.0, 0.2, 5.0}) {
    const Vector p = Vector::Constant(1, v);
    CHECK(tiny.objective->value(p) == doctest::Approx(std::abs(v)).epsilon(1e-12));
  }
}

TEST_CASE("ball KKT: inactive and single active constraint") {
  Vector c(3), a(3);
  c << 1.0, 2.0, -1.0;
  a << 0.0, 0.0, 0.0;
  auto k = solve_ball_kkt(c, {a}, {10.0});
  CHECK((k.x - c).norm() < 1e-12);
  CHECK(k.u[0] == 0.0);

  // rho = 0.5: radius 1 around a; projection of c onto the sphere.
  k = solve_ball_kkt(c, {a}, {0.5});
  const Vector proj = a + (c - a) / (c - a).norm();
  CHECK((k.x - proj).norm() < 1e-10);
  CHECK(k.u[0] == doctest::Approx((c - proj).norm() / (proj - a).norm()).epsilon(1e-9));
}

TEST_CASE("ball KKT: two discs in the plane against a grid search") {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> N;
  for (int trial = 0; trial < 4; ++trial) {
    Vector c(2), a1(2), a2(2);
    c << 3.0 * N(rng), 3.0 * N(rng);
    a1 << N(rng), N(rng);
    a2 << N(rng), N(rng);
    const double r1 = 0.5 * (a1 - a2).norm() + 0.6, r2 = 0.5 * (a1 - a2).norm() + 0.4;
    const std::vector<double> rho{0.5 * r1 * r1, 0.5 * r2 * r2};
    const auto k = solve_ball_kkt(c, {a1, a2}, rho);

    // Oracle: the minimizer is c itself, a point on one of the two arcs, or a lens corner.
    // Each arc is scanned by angle and then refined around the best sample.
    auto feasible = [&](const Vector& p) {
      return (p - a1).norm() <= r1 * (1 + 1e-12) && (p - a2).norm() <= r2 * (1 + 1e-12);
    };
    auto value = [&](const Vector& p) { return 0.5 * (p - c).squaredNorm(); };
    double best = std::numeric_limits<double>::infinity();
    Vector bp = c;
    auto consider = [&](const Vector& p) {
      if (feasible(p) && value(p) < best) {
        best = value(p);
        bp = p;
      }
    };
    consider(c);
    const double d = (a2 - a1).norm();
    const double along = (d * d + r1 * r1 - r2 * r2) / (2.0 * d), half = std::sqrt(r1 * r1 - along * along);
    const Vector e = (a2 - a1) / d, perp = (Vector(2) << -e[1], e[0]).finished();
    consider(a1 + along * e + half * perp);
    consider(a1 + along * e - half * perp);
    for (const auto& [a, r] : {std::pair{a1, r1}, std::pair{a2, r2}}) {
      auto on_arc = [&](double th) { return (a + r * (Vector(2) << std::cos(th), std::sin(th)).finished()).eval(); };
      double th0 = 0.0, step = 2.0 * M_PI / 4000.0, local = std::numeric_limits<double>::infinity();
      for (int i = 0; i < 4000; ++i) {
        const Vector p = on_arc(i * step);
        if (feasible(p) && value(p) < local) {
          local = value(p);
          th0 = i * step;
        }
      }
      if (!std::isfinite(local)) continue;
      for (int level = 0; level < 12; ++level) {
        double next = th0;
        for (int i = -20; i <= 20; ++i) {
          const Vector p = on_arc(th0 + i * step / 10.0);
          if (feasible(p) && value(p) < local) {
            local = value(p);
            next = th0 + i * step / 10.0;
          }
        }
        th0 = next;
        step /= 10.0;
      }
      consider(on_arc(th0));
    }
    CAPTURE(trial);
    CHECK(k.value == doctest::Approx(best).epsilon(1e-10));
    CHECK((k.x - bp).norm() < 1e-6);
    // Duality: stationarity, complementary slackness, u >= 0.
    Vector grad = k.x - c;
    grad += k.u[0] * (k.x - a1) + k.u[1] * (k.x - a2);
    CHECK(grad.norm() < 1e-9);
    CHECK(k.u.minCoeff() >= 0.0);
    CHECK(std::abs(k.u[0] * (0.5 * (k.x - a1).squaredNorm() - rho[0])) < 1e-9);
    CHECK(std::abs(k.u[1] * (0.5 * (k.x - a2).squaredNorm() - rho[1])) < 1e-9);
  }
}

TEST_CASE("constrained generator") {
  for (std::uint64_t seed : {1, 2, 3}) {
    const auto inst = gen_constrained(5, 3, seed);
    CHECK(inst.m() == 3);
    CHECK(*inst.constants.tau_sl >= 0.1 - 1e-12);
    for (Index s = 1; s <= inst.m(); ++s) CHECK(component_value(inst, s, inst.x_sl()) <= -0.1 + 1e-12);
    // x_opt sits on the boundary of the active balls, up to rounding.
    for (Index s = 1; s <= inst.m(); ++s) CHECK(component_value(inst, s, inst.x_opt()) <= 1e-9);
    // Slater point value gap is the objective at x_SL when p* is measured against h.
    CHECK(inst.refs.kkt_multipliers->size() == 3);

    RunOptions opt;
    opt.T = 2000;
    opt.record_reports = false;
    const auto r = run(inst, Schedule::linear(1.0), opt);
    CHECK(r.monitors.assumption_c.checked > 0);
    CHECK(r.monitors.assumption_c.ok());
    CHECK(r.monitors.prop2.ok());
  }
}

TEST_CASE("quadratic generator") {
  const auto q = gen_quadratic(12, 7.0, 4);
  const auto& f = dynamic_cast<const QuadraticFunction&>(*q.objective);
  const auto ev = oracle::jacobi_eigenvalues(f.H());
  CHECK(ev.front() == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(ev.back() == doctest::Approx(7.0).epsilon(1e-10));
  CHECK(q.objective->value(q.x_opt()) == doctest::Approx(0.0));
  CHECK(q.objective->subgradient(q.x_opt()).norm() < 1e-12);
}
