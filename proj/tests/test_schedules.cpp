#include <pdsg/schedules.hpp>

#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

using namespace pdsg;

namespace {

// One-step-ahead objective of the optimized weights, written out directly:
// phi(l) = (Q + l * alpha(l)) / (S + l) with alpha(l) = l / (mu (S + l) + beta).
double lookahead(double l, double S, double Q, double mu, double beta) {
  return (Q + l * l / (mu * (S + l) + beta)) / (S + l);
}

// Golden-section minimizer of lookahead over (0, hi]. phi is unimodal in l.
double golden_min(double S, double Q, double mu, double beta) {
  double a = 1e-12, b = 1e3 * (S + 1.0);
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - g * (b - a), d = a + g * (b - a);
  for (int it = 0; it < 400 && b - a > 1e-14 * b; ++it) {
    if (lookahead(c, S, Q, mu, beta) < lookahead(d, S, Q, mu, beta)) {
      b = d;
    } else {
      a = c;
    }
    c = b - g * (b - a);
    d = a + g * (b - a);
  }
  return 0.5 * (a + b);
}

}  // namespace

TEST_CASE("lambda_from_alpha reproduces the canonical pairs") {
  std::vector<double> a(11);
  for (std::size_t k = 0; k < a.size(); ++k) a[k] = 2.0 / (k + 2.0);
  auto l = lambda_from_alpha(a, 1.0, 0.0, 1.0);
  for (std::size_t k = 0; k < l.size(); ++k) CHECK(l[k] == doctest::Approx(k + 1.0).epsilon(1e-13));

  for (std::size_t k = 0; k < a.size(); ++k) a[k] = 1.0 / (k + 1.0);
  l = lambda_from_alpha(a, 1.0, 0.0, 1.0);
  for (double v : l) CHECK(v == doctest::Approx(1.0).epsilon(1e-13));

  // alpha_0 = 1, then 1/4: lambda_k = (1/4)(3/4)^{-k}.
  std::vector<double> s(8, 0.25);
  s[0] = 1.0;
  l = lambda_from_alpha(s, 1.0, 0.0, 1.0);
  CHECK(l[0] == 1.0);
  for (std::size_t k = 1; k < l.size(); ++k)
    CHECK(l[k] == doctest::Approx(0.25 * std::pow(0.75, -double(k))).epsilon(1e-13));
}

TEST_CASE("lambda_from_alpha rejects inconsistent input") {
  std::vector<double> a{0.5, 0.25};
  CHECK_THROWS(lambda_from_alpha(a, 1.0, 0.0, 1.0));  // alpha_0 should be 1
  std::vector<double> b{1.0, 1.0};
  CHECK_THROWS(lambda_from_alpha(b, 1.0, 0.0, 1.0));  // mu alpha_1 = 1
  CHECK_THROWS(lambda_from_alpha(std::vector<double>{}, 1.0, 0.0, 1.0));
}

TEST_CASE("alpha_from_lambda examples") {
  std::vector<double> l(10);
  for (std::size_t k = 0; k < l.size(); ++k) l[k] = k + 1.0;
  auto a = alpha_from_lambda(l, 0.0, 1.0);
  for (std::size_t k = 0; k < a.size(); ++k) CHECK(a[k] == doctest::Approx(2.0 / (k + 2.0)).epsilon(1e-14));

  std::vector<double> ones(10, 1.0);
  a = alpha_from_lambda(ones, 0.0, 1.0);
  for (std::size_t k = 0; k < a.size(); ++k) CHECK(a[k] == doctest::Approx(1.0 / (k + 1.0)).epsilon(1e-14));

  a = alpha_from_lambda(std::vector<double>{1.0}, 2.0, 0.0);
  CHECK(a[0] == 0.5);
}

TEST_CASE("lambda -> alpha -> lambda round trip over 1000 terms") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.1, 10.0);
  for (double beta : {0.0, 1.0, 10.0}) {
    for (double mu : {0.5, 1.0, 3.0}) {
      std::vector<double> l(1000);
      for (auto& v : l) v = u(rng);
      const auto a = alpha_from_lambda(l, beta, mu);
      const auto back = lambda_from_alpha(a, l[0], beta, mu);
      double worst = 0.0;
      for (std::size_t k = 0; k < l.size(); ++k) worst = std::max(worst, std::abs(back[k] - l[k]) / l[k]);
      CHECK(worst <= 1e-9);
    }
  }
}

TEST_CASE("canned schedules satisfy the alpha/lambda identity") {
  const double mu = 2.0;
  for (double beta : {0.0, 1.0, 10.0}) {
    for (const Schedule& s : {Schedule::uniform(mu, beta), Schedule::linear(mu, beta), Schedule::poly(2, mu, beta),
                              Schedule::poly(3, mu, beta), Schedule::optimized(mu, beta)}) {
      auto c = s.cursor();
      long double sum = 0;
      double worst = 0;
      for (int k = 0; k < 500; ++k) {
        sum += c.lambda();
        const double expect = c.lambda() / (mu * static_cast<double>(sum) + beta);
        worst = std::max(worst, std::abs(c.alpha() - expect) / expect);
        c.advance();
      }
      CAPTURE(s.name());
      CHECK(worst <= 1e-12);
    }
  }
}

TEST_CASE("poly weights and names") {
  auto p = Schedule::poly(2, 1.0).prefix(5);
  for (std::size_t k = 0; k < p.size(); ++k) CHECK(p[k].lambda == doctest::Approx((k + 1.0) * (k + 1.0)));
  CHECK(Schedule::poly(3, 1.0).name() == "poly3");
  CHECK(Schedule::linear(1.0).name() == "linear");
  CHECK(Schedule::uniform(1.0).name() == "uniform");
}

TEST_CASE("exponential weights do not overflow") {
  // Smooth schedule with L1/mu = 1.5 grows like 3^k: far past 1e308 by k = 1000.
  auto c = Schedule::smooth(1.0, 1.5).cursor();
  for (int k = 0; k < 1000; ++k) c.advance();
  CHECK(std::isfinite(c.log_lambda()));
  CHECK(c.alpha() == doctest::Approx(1.0 / 1.5));
  CHECK(c.weight_ratio() == doctest::Approx(1.0 / 1.5 * 1.0).epsilon(1e-9));  // mu alpha
  CHECK(std::isinf(c.lambda()));
}

TEST_CASE("optimized weights: first steps") {
  const double mu = 1.0;
  auto w1 = optimized_next_weight(std::vector<double>{1.0}, std::vector<double>{1.0}, mu);
  CHECK(w1.lambda == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(w1.alpha == doctest::Approx(0.5).epsilon(1e-12));

  auto p = Schedule::optimized(mu).prefix(9);
  CHECK(p[2].lambda == doctest::Approx(1.2).epsilon(1e-12));
  CHECK(1.0 / p[2].alpha == doctest::Approx(2.6666).epsilon(5e-5));
  CHECK(std::abs(p[5].lambda - 1.8005) <= 5e-5);
}

TEST_CASE("optimized weights match a golden-section oracle and are stationary") {
  for (double mu : {1.0, 0.3}) {
    // The closed form is the one-step optimum only without the beta_bar term.
    for (double beta : {0.0}) {
      auto p = Schedule::optimized(mu, beta).prefix(40);
      double S = 0, Q = 0;
      for (std::size_t k = 0; k + 1 < p.size(); ++k) {
        S += p[k].lambda;
        Q += p[k].lambda * p[k].alpha;
        const double l = p[k + 1].lambda;
        const double ref = golden_min(S, Q, mu, beta);
        CAPTURE(k);
        CHECK(l == doctest::Approx(ref).epsilon(1e-6));
        const double f = lookahead(l, S, Q, mu, beta);
        CHECK(f <= lookahead(l * (1 + 1e-6), S, Q, mu, beta) + 1e-15);
        CHECK(f <= lookahead(l * (1 - 1e-6), S, Q, mu, beta) + 1e-15);
      }
    }
  }
}

TEST_CASE("optimized_next_weight rejects a nonpositive normalizer") {
  // Q/S >= 1/mu makes the normalizer vanish.
  CHECK_THROWS_AS(optimized_next_weight(std::vector<double>{1.0}, std::vector<double>{2.0}, 1.0), DegenerateError);
}

TEST_CASE("rate_bound examples") {
  const auto lin = Schedule::linear(1.0);
  for (std::size_t T : {1, 2, 5, 10, 100, 1000, 10000, 100000}) {
    CAPTURE(T);
    CHECK(rate_bound(lin, T, 1.0, 0.0) <= 4.0 / (T + 1.0));
  }
  CHECK(1.0 / rate_bound(Schedule::optimized(1.0), 5, 1.0, 0.0) == doctest::Approx(2.2230).epsilon(5e-5 / 2.2230));
  CHECK(rate_bound(Schedule::linear(3.0), 1, 2.0, 0.0) == doctest::Approx(2.0 / 3.0));
  // With C0 the bound adds C0 / sum lambda.
  CHECK(rate_bound(lin, 3, 0.0, 6.0) == doctest::Approx(1.0));
}

TEST_CASE("smooth schedule") {
  auto p = Schedule::smooth(1.0, 4.0).prefix(3);
  CHECK(p[0].alpha == 1.0);
  CHECK(p[1].alpha == 0.25);
  CHECK(p[1].lambda == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(p[0].lambda + p[1].lambda + p[2].lambda == doctest::Approx(16.0 / 9.0).epsilon(1e-14));
  CHECK_THROWS(Schedule::smooth(1.0, 1.0));
  CHECK_THROWS(Schedule::smooth(1.0, 0.5));
  // lambda_1 blows up as L1 approaches mu.
  CHECK(Schedule::smooth(1.0, 1.0 + 1e-6).prefix(2)[1].lambda > 1e5);
}

TEST_CASE("capped schedule") {
  auto p = Schedule::capped(1.0, 10.0).prefix(40);
  CHECK(p[0].alpha == 1.0);
  for (std::size_t k = 1; k < p.size(); ++k) CHECK(p[k].alpha == doctest::Approx(std::min(0.1, 2.0 / (k + 2.0))));
}

TEST_CASE("schedule kind names round trip") {
  for (auto k : {ScheduleKind::uniform, ScheduleKind::linear, ScheduleKind::poly, ScheduleKind::optimized,
                 ScheduleKind::smooth, ScheduleKind::explicit_alpha, ScheduleKind::capped})
    CHECK(parse_schedule_kind(to_string(k)) == k);
  CHECK_THROWS(parse_schedule_kind("bogus"));
}
