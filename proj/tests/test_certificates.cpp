#include <pdsg/problems.hpp>
#include <pdsg/runner.hpp>

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace pdsg;

TEST_CASE("delta_k") {
  const auto inst = gen_quadratic(4, 3.0, 2);
  const Vector y = inst.x_opt();
  CHECK(delta_k(y, y, inst, 0) == 0.0);
  const Vector x = y + Vector::Ones(4);
  CHECK(delta_k(x, y, inst, 0) ==
        doctest::Approx(inst.objective->value(x) - inst.objective->value(y)).epsilon(1e-14));

  // r != 0 needs n_y; with it, delta adds <n_y, x - y>.
  ProblemInstance reg = inst;
  reg.regularizer = Regularizer::l1(1.0);
  CHECK_THROWS(delta_k(x, y, reg, 0));
  const Vector n = Vector::Constant(4, 0.5);
  CHECK(delta_k(x, y, reg, 0, &n) == doctest::Approx(delta_k(x, y, inst, 0) + 0.5 * 4).epsilon(1e-14));
}

TEST_CASE("delta_k on infeasible iterates is bounded below by the Slater slack") {
  const auto inst = gen_constrained(5, 3, 4);
  RunOptions opt;
  opt.T = 3000;
  opt.record_reports = false;
  const auto r = run(inst, Schedule::linear(1.0), opt);
  const double tau = *inst.constants.tau_sl;
  std::size_t infeasible = 0;
  for (std::size_t k = 0; k < r.steps; ++k) {
    CHECK(r.delta_opt[k] >= -1e-9);
    if (r.step_index[k] != 0) {
      ++infeasible;
      CHECK(r.delta_sl[k] >= tau - 1e-12);
    }
  }
  CHECK(infeasible > 0);
}

TEST_CASE("divergence horizon of 2/(mu(k+2)) steps") {
  CHECK(divergence_horizon(Schedule::linear(1.0), 200.0) == std::optional<std::size_t>(397));
  // Closed form: the last k with k < 2 L1/mu - 2.
  for (double mu : {0.5, 1.0, 2.0}) {
    for (double L1 : {3.3, 10.0, 57.25, 1000.0}) {
      const double bound = 2.0 * L1 / mu - 2.0;
      auto T0 = divergence_horizon(Schedule::linear(mu), L1);
      if (bound <= 0.0) {
        CHECK(!T0);
        continue;
      }
      REQUIRE(T0);
      const double expect = std::ceil(bound) - 1.0;
      CAPTURE(mu);
      CAPTURE(L1);
      CHECK(double(*T0) == expect);
    }
  }
}

TEST_CASE("no divergence phase: T0 none and C0 = 0") {
  const auto s = Schedule::linear(1.0);
  CHECK(!divergence_horizon(s, 0.5));
  std::vector<double> hist(10, 3.0);
  const auto dc = divergence_constants(s, 0.5, hist);
  CHECK(!dc.T0);
  CHECK(dc.C0.is_zero());
  CHECK(dc.complete);
}

TEST_CASE("smooth schedule: T0 = 0 and C0 = (L1/mu - 1) delta_0") {
  const double mu = 2.0, L1 = 9.0, d0 = 1.7;
  const auto s = Schedule::smooth(mu, L1);
  CHECK(divergence_horizon(s, L1) == std::optional<std::size_t>(0));
  std::vector<double> hist{d0, 5.0, 5.0};
  const auto dc = divergence_constants(s, L1, hist);
  CHECK(dc.C0.value() == doctest::Approx((L1 / mu - 1.0) * d0).epsilon(1e-14));
}

TEST_CASE("C0 from a short history is flagged partial") {
  const auto dc = divergence_constants(Schedule::linear(1.0), 200.0, std::vector<double>(10, 1.0));
  CHECK(dc.T0 == std::optional<std::size_t>(397));
  CHECK(!dc.complete);
}

TEST_CASE("replicate C0 uses the mean and reports a standard error") {
  const auto s = Schedule::smooth(1.0, 4.0);
  std::vector<std::vector<double>> opt{{1.0}, {3.0}}, sl{{0.0}, {0.0}};
  const auto dc = divergence_constants(s, 4.0, opt, sl);
  CHECK(dc.C0.value() == doctest::Approx(3.0 * 2.0));
  // per-replicate plug-ins 3 and 9: se = sd / sqrt(2) = 3.
  CHECK(dc.C0_se.value() == doctest::Approx(3.0));
}

TEST_CASE("toy divergence constants") {
  RunOptions opt;
  opt.T = 400;
  opt.record_reports = false;
  const auto r = run(toy_divergent(), Schedule::linear(1.0), opt);
  CHECK(r.T0 == std::optional<std::size_t>(397));
  CHECK(r.C0.sign() == 1);
  CHECK(r.C0.log10_abs() > 112.0);
  CHECK(r.monitors.prop2_envelope.checked >= 397);
  CHECK(r.monitors.prop2_envelope.ok());
  CHECK(r.monitors.prop2.ok());
  CHECK(r.monitors.assumption_c.ok());
}

TEST_CASE("LogValue arithmetic") {
  const auto a = LogValue::from_double(3.0), b = LogValue::from_double(-5.0);
  CHECK((a + b).value() == doctest::Approx(-2.0));
  CHECK((a * b).value() == doctest::Approx(-15.0));
  CHECK((a + LogValue::from_double(-3.0)).is_zero());
  CHECK(LogValue{}.value() == 0.0);
  const auto big = LogValue::from_log(1000.0);
  CHECK((big + big).log_abs() == doctest::Approx(1000.0 + std::log(2.0)));
  CHECK(std::isinf(big.value()));
  CHECK(c0_term(0.0, 0.5, 1.0, 2.0).is_zero());  // L1 alpha <= 1 contributes nothing
  CHECK(c0_term(std::log(2.0), 1.0, 4.0, 0.5).value() == doctest::Approx(2.0 * 3.0 * 0.5));
}

TEST_CASE("stopping rules") {
  CertificateReport undefined;
  CHECK(stopping("p+d", std::numeric_limits<double>::infinity()).fires(undefined));
  CHECK(!stopping("p+d", 1.0).fires(undefined));
  CHECK_THROWS(stopping("q+d", 0.1));
  CHECK_THROWS(stopping("p+d", 0.0));
  CHECK_THROWS(stopping("p+d", -1.0));
  for (auto c : all_criteria()) CHECK(parse_criterion(to_string(c)) == c);

  CertificateReport r;
  r.gap_p_d = 0.04;
  CHECK(stopping("p+d", 0.05).fires(r));
  r.gap_p_d = 0.06;
  CHECK(!stopping("p+d", 0.05).fires(r));

  RunOptions opt;
  opt.T = 50;
  opt.stop = stopping("d", std::numeric_limits<double>::infinity());
  const auto run_inf = run(gen_l1_ls(5, 5, 0.0, 1), Schedule::linear(1.0), opt);
  CHECK(run_inf.stopped);
  CHECK(run_inf.stop_time == std::optional<std::size_t>(1));
}

TEST_CASE("p + d needs no p*") {
  ProblemInstance inst = gen_l1_ls(10, 10, 0.0, 3);
  inst.refs = {};
  RunOptions opt;
  opt.T = 20000;
  opt.stop = stopping("p+d", 0.05);
  const auto r = run(inst, Schedule::linear(1.0), opt);
  CHECK(r.stopped);
  CHECK(std::isnan(r.final_report->p));
  CHECK(r.final_report->gap_p_d <= 0.05);
}

TEST_CASE("multipliers") {
  ProblemInstance inst = gen_l1_ls(5, 5, 0.0, 1);
  auto st = init_state(inst, Schedule::linear(1.0), Method::primal);
  CHECK_THROWS_AS(multipliers(st), UndefinedError);
  primal_step(st, inst);
  CHECK(multipliers(st).empty());

  // One ball that contains every iterate: u = 0.
  inst.constraints.push_back(std::make_shared<BallConstraint>(Vector::Zero(5), 1e12));
  RunOptions opt;
  opt.T = 100;
  const auto r = run(inst, Schedule::linear(1.0), opt);
  REQUIRE(r.final_report);
  REQUIRE(r.final_report->multipliers.size() == 1);
  CHECK(r.final_report->multipliers[0] == 0.0);
}

TEST_CASE("theorem2_rhs formula") {
  // Linear weights, m = 0: rhs <= 4 L0^2/(mu (T+1)) + 2 C0/(T (T+1)).
  const double mu = 1.0, L0 = 3.0;
  const auto C0 = LogValue::from_double(7.0);
  auto c = Schedule::linear(mu).cursor();
  double wt = 0, wa = 0;
  for (std::size_t T = 1; T <= 2000; ++T) {
    wt += c.lambda();
    wa += c.lambda() * c.alpha();
    c.advance();
    const double rhs = theorem2_rhs(wa, wt, 0.0, L0, C0);
    CHECK(rhs <= 4.0 * L0 / (mu * (T + 1.0)) + 2.0 * 7.0 / (T * (T + 1.0)) + 1e-15);
    // Scaling weights by exp(-s) with a matching log_scale gives the same value.
    CHECK(theorem2_rhs(wa * 1e-3, wt * 1e-3, std::log(1e3), L0, C0) == doctest::Approx(rhs).epsilon(1e-12));
  }
  CHECK_THROWS(theorem2_rhs(0.0, 0.0, 0.0, 1.0, C0));
}

TEST_CASE("prop1_rhs is vacuous once the rate exceeds tau") {
  CHECK(prop1_rhs(0.5, 1.0, 0.0) == doctest::Approx(0.5 / 2.5));
  CHECK(prop1_rhs(0.5, 1.0, 0.5) == doctest::Approx(0.0));
  CHECK(prop1_rhs(0.5, 1.0, 0.7) < 0.0);
}

TEST_CASE("delta_k growth bound and distance envelope") {
  CHECK(prop2_delta_bound(4.0, 2.0, 3.0) == doctest::Approx(8.0));
  CHECK_THROWS(prop2_delta_bound(1.0, 0.0, 1.0));
  // c = max(2, L1/mu - 2): toy has L1/mu = 200, c = 198.
  const double e = prop2_log_envelope(0.0, 200.0, 1.0, 10, 1.0);
  CHECK(e == doctest::Approx(10.0 * std::log(1.0 + 198.0 * 200.0)));
}

TEST_CASE("theory monitors on a deterministic unconstrained run") {
  const auto inst = gen_l1_ls(20, 20, 0.02, 5);
  RunOptions opt;
  opt.T = 3000;
  const auto r = run(inst, Schedule::linear(*inst.constants.mu), opt);
  const auto& m = r.monitors;
  for (const auto* c : {&m.dual_validity, &m.sandwich, &m.theorem2, &m.prop2, &m.distance_recursion,
                        &m.dual_recursion, &m.assumption_c}) {
    CHECK(c->checked > 0);
    CHECK(c->ok());
  }
  for (const auto& rec : r.records) CHECK(rec.report.d >= -1e-9);
}

TEST_CASE("theory monitors on a switching run") {
  const auto inst = gen_constrained(5, 2, 3);
  RunOptions opt;
  opt.T = 5000;
  const auto r = run(inst, Schedule::poly(2, 1.0), opt);
  const auto& m = r.monitors;
  for (const auto* c : {&m.dual_validity, &m.sandwich, &m.theorem2, &m.prop2, &m.distance_recursion,
                        &m.dual_recursion, &m.prop1}) {
    CHECK(c->ok());
  }
  CHECK(m.dual_recursion.checked > 0);
}

TEST_CASE("subgradient-bound aggregate with a measured M") {
  // m = 0, r = 0, beta_bar = 0: the aggregate of primal gap, dual gap and distance
  // is at most M^2 sum(lambda alpha)/sum(lambda) when ||g_k|| <= M along the run.
  const auto inst = gen_l1_ls(15, 15, 0.02, 7);
  for (const auto& sched : {Schedule::linear(*inst.constants.mu), Schedule::uniform(*inst.constants.mu),
                            Schedule::optimized(*inst.constants.mu)}) {
    double M2 = 0.0;
    std::size_t checked = 0, bad = 0;
    RunOptions opt;
    opt.T = 2000;
    opt.record_reports = false;
    opt.observer = [&](const SolverState& st, const CertificateReport& rep) {
      M2 = std::max(M2, st.last->g.squaredNorm());
      const double rhs = M2 * st.weight_alpha / st.weight_total;
      ++checked;
      if (rep.theorem2_lhs > rhs * (1.0 + 1e-9)) ++bad;
    };
    run(inst, sched, opt);
    CAPTURE(sched.name());
    CHECK(checked == 2000);
    CHECK(bad == 0);
  }
}
