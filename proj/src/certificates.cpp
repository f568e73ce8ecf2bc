#include <pdsg/certificates.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pdsg {

BoundInputs BoundInputs::from_instance(const ProblemInstance& instance) {
  BoundInputs b;
  b.L0_sq = instance.constants.L0_sq;
  b.L1 = instance.constants.L1;
  b.tau_sl = instance.constants.tau_sl;
  b.h_sl_gap = instance.constants.h_sl_gap;
  b.G_sq = instance.constants.L0_sq;
  return b;
}

std::vector<double> multipliers(const SolverState& state) {
  const double wf = state.weight_feasible();
  if (!(wf > 0.0)) throw UndefinedError("multipliers before the first feasible step");
  std::vector<double> u;
  for (Index s = 1; s < state.weight_by_index.size(); ++s) u.push_back(state.weight_by_index[s] / wf);
  return u;
}

CertificateReport gaps(const SolverState& st, const ProblemInstance& inst, const BoundInputs& b) {
  CertificateReport r;
  r.t = st.k;
  const double wt = st.weight_total;
  const double wf = st.weight_feasible();
  if (wt > 0.0) r.feasible_fraction = wf / wt;
  r.defined = wf > 0.0;

  if (inst.feasible(st.x)) r.last_iterate_value = inst.objective_value(st.x);

  Vector xbar;
  if (r.defined) {
    if (st.model_valid) r.dual_lower_bound = st.model.min_value() / wf;
    r.primal_avg_value = st.sum_objective_feasible / wf;
    xbar = st.averaged_iterate();
    if (inst.feasible(xbar)) r.avg_iterate_value = inst.objective_value(xbar);
    r.multipliers = multipliers(st);
    for (Index s = 1; s <= inst.m(); ++s) {
      r.complementary_slackness.push_back(r.multipliers[static_cast<std::size_t>(s - 1)] *
                                          component_value(inst, s, xbar));
    }
    r.gap_p_d = r.primal_avg_value - r.dual_lower_bound;
    r.gap_pbar_d = r.avg_iterate_value - r.dual_lower_bound;
    r.gap_delta_d = r.last_iterate_value - r.dual_lower_bound;
  }

  if (inst.refs.p_star) {
    const double ps = *inst.refs.p_star;
    r.p = r.primal_avg_value - ps;
    r.pbar = r.avg_iterate_value - ps;
    r.delta = r.last_iterate_value - ps;
    r.d = ps - r.dual_lower_bound;
  }

  const bool theory = st.beta_bar == 0.0 && wt > 0.0;
  if (inst.refs.x_opt) {
    const Vector& xo = *inst.refs.x_opt;
    r.dist2 = 0.5 * st.mu * (st.x - xo).squaredNorm();
    if (theory && st.model_valid) {
      double hsum = st.sum_f0_feasible;
      if (!inst.regularizer.is_zero()) {
        const Vector n = inst.reference_subgradient(true);
        hsum += wf * (inst.regularizer.value(xo) - n.dot(xo)) + n.dot(st.sum_x_feasible);
      }
      r.theorem2_lhs = (hsum - st.model.min_value()) / wt + r.dist2;
    }
  }

  if (theory && b.L0_sq) {
    r.theorem2_rhs = theorem2_rhs(st.weight_alpha, wt, st.log_scale, *b.L0_sq, b.C0);
    if (b.tau_sl && b.h_sl_gap) r.prop1_rhs = prop1_rhs(*b.tau_sl, *b.h_sl_gap, r.theorem2_rhs);
  }

  if (theory && st.model_valid && b.G_sq && b.g0_norm_sq && b.alpha1 && inst.regularizer.is_zero() &&
      !inst.stochastic()) {
    r.eq26_lhs = (st.sum_f0_feasible - st.model.min_value()) / wt;
    const double lam0 = std::exp(b.log_lambda0 - st.log_scale);
    const double c0_bound = lam0 * (1.0 / (*b.alpha1 * st.mu) - 1.0) * *b.g0_norm_sq / (2.0 * st.mu);
    r.eq26_rhs = (*b.G_sq * st.weight_alpha + c0_bound) / wt;
    r.eq26_violated = r.eq26_lhs > r.eq26_rhs + 1e-9 * (1.0 + std::abs(r.eq26_rhs));
  }
  return r;
}

Criterion parse_criterion(const std::string& name) {
  if (name == "pbar+d") return Criterion::pbar_d;
  if (name == "delta+d") return Criterion::delta_d;
  if (name == "p+d") return Criterion::p_d;
  if (name == "d" || name == "d-only") return Criterion::d;
  if (name == "p" || name == "p-only") return Criterion::p;
  if (name == "pbar" || name == "pbar-only") return Criterion::pbar;
  if (name == "delta" || name == "delta-only") return Criterion::delta;
  throw std::invalid_argument("unknown stopping criterion: " + name);
}

std::string to_string(Criterion c) {
  switch (c) {
    case Criterion::pbar_d: return "pbar+d";
    case Criterion::delta_d: return "delta+d";
    case Criterion::p_d: return "p+d";
    case Criterion::d: return "d";
    case Criterion::p: return "p";
    case Criterion::pbar: return "pbar";
    case Criterion::delta: return "delta";
  }
  return "?";
}

std::vector<Criterion> all_criteria() {
  return {Criterion::pbar, Criterion::pbar_d, Criterion::delta, Criterion::delta_d,
          Criterion::p,    Criterion::p_d,    Criterion::d};
}

double criterion_value(Criterion c, const CertificateReport& r) {
  switch (c) {
    case Criterion::pbar_d: return r.gap_pbar_d;
    case Criterion::delta_d: return r.gap_delta_d;
    case Criterion::p_d: return r.gap_p_d;
    case Criterion::d: return r.d;
    case Criterion::p: return r.p;
    case Criterion::pbar: return r.pbar;
    case Criterion::delta: return r.delta;
  }
  return kUndefined;
}

bool StoppingRule::fires(const CertificateReport& r) const {
  if (std::isinf(epsilon) && epsilon > 0.0) return true;
  const double v = criterion_value(criterion, r);
  return v <= epsilon;  // NaN never fires
}

StoppingRule stopping(const std::string& criterion, double epsilon) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("stopping: epsilon must be positive");
  return {parse_criterion(criterion), epsilon};
}

double delta_k(const Vector& x, const Vector& y, const ProblemInstance& inst, Index s, const Vector* n_y) {
  if (s != 0) return component_value(inst, s, x) - component_value(inst, s, y);
  double v = inst.objective->value(x) - inst.objective->value(y);
  if (!inst.regularizer.is_zero()) {
    if (n_y == nullptr) throw std::invalid_argument("delta_k: reference subgradient n_y required when r != 0");
    v += n_y->dot(x - y);
  }
  return v;
}

std::optional<std::size_t> divergence_horizon(const Schedule& schedule, double L1, std::size_t max_scan) {
  if (!(L1 > 0.0)) return std::nullopt;
  const bool finite_list = schedule.kind() == ScheduleKind::explicit_alpha;
  std::optional<std::size_t> last;
  auto c = schedule.cursor();
  for (std::size_t k = 0; k < max_scan; ++k) {
    if (k > 0) {
      if (finite_list && k >= schedule.spec().alphas.size()) return last;
      c.advance();
    }
    if (L1 * c.alpha() > 1.0) {
      last = k;
    } else if (k > 0 && !finite_list) {
      // Canned schedules have nonincreasing alpha_k for k >= 1.
      return last;
    }
  }
  throw DegenerateError("divergence_horizon: stepsizes did not settle below 1/L1");
}

LogValue c0_term(double log_lambda, double alpha, double L1, double max_delta) {
  const double excess = L1 * alpha - 1.0;
  if (!(excess > 0.0) || !(max_delta > 0.0)) return {};
  return LogValue::from_log(log_lambda + std::log(excess) + std::log(max_delta));
}

DivergenceConstants divergence_constants(const Schedule& schedule, double L1,
                                         std::span<const double> max_delta_history) {
  DivergenceConstants out;
  out.T0 = divergence_horizon(schedule, L1);
  if (!out.T0) return out;
  auto c = schedule.cursor();
  for (std::size_t k = 0; k <= *out.T0; ++k) {
    if (k > 0) c.advance();
    if (k >= max_delta_history.size()) {
      out.complete = false;
      break;
    }
    out.C0 += c0_term(c.log_lambda(), c.alpha(), L1, max_delta_history[k]);
  }
  return out;
}

DivergenceConstants divergence_constants(const Schedule& schedule, double L1,
                                         const std::vector<std::vector<double>>& delta_opt,
                                         const std::vector<std::vector<double>>& delta_sl) {
  if (delta_opt.empty() || delta_opt.size() != delta_sl.size()) {
    throw std::invalid_argument("divergence_constants: need matching nonempty replicate sets");
  }
  const std::size_t R = delta_opt.size();
  std::size_t len = std::numeric_limits<std::size_t>::max();
  for (std::size_t r = 0; r < R; ++r) len = std::min({len, delta_opt[r].size(), delta_sl[r].size()});

  std::vector<double> mean_max(len);
  for (std::size_t k = 0; k < len; ++k) {
    double mo = 0.0, ms = 0.0;
    for (std::size_t r = 0; r < R; ++r) {
      mo += delta_opt[r][k];
      ms += delta_sl[r][k];
    }
    mean_max[k] = std::max(mo, ms) / static_cast<double>(R);
  }
  DivergenceConstants out = divergence_constants(schedule, L1, mean_max);
  if (!out.T0 || R < 2) return out;

  // Standard error of the per-replicate plug-in values, computed relative to
  // the largest one to stay in range.
  std::vector<LogValue> per(R);
  auto c = schedule.cursor();
  for (std::size_t k = 0; k <= *out.T0 && k < len; ++k) {
    if (k > 0) c.advance();
    for (std::size_t r = 0; r < R; ++r) {
      per[r] += c0_term(c.log_lambda(), c.alpha(), L1, std::max(delta_opt[r][k], delta_sl[r][k]));
    }
  }
  double top = -std::numeric_limits<double>::infinity();
  for (const auto& v : per) top = std::max(top, v.log_abs());
  if (!std::isfinite(top)) return out;
  double mean = 0.0;
  std::vector<double> vals(R);
  for (std::size_t r = 0; r < R; ++r) {
    vals[r] = per[r].is_zero() ? 0.0 : per[r].sign() * std::exp(per[r].log_abs() - top);
    mean += vals[r];
  }
  mean /= static_cast<double>(R);
  double var = 0.0;
  for (double v : vals) var += (v - mean) * (v - mean);
  var /= static_cast<double>(R - 1);
  const double se = std::sqrt(var / static_cast<double>(R));
  if (se > 0.0) out.C0_se = LogValue::from_log(std::log(se) + top);
  return out;
}

double theorem2_rhs(double weight_alpha, double weight_total, double log_scale, double L0_sq,
                    const LogValue& C0) {
  if (!(weight_total > 0.0)) throw std::invalid_argument("theorem2_rhs: empty weight sum");
  double v = L0_sq * (weight_alpha / weight_total);
  if (!C0.is_zero()) v += C0.sign() * std::exp(C0.log_abs() - std::log(weight_total) - log_scale);
  return v;
}

double prop1_rhs(double tau_sl, double h_sl_gap, double rate) {
  return tau_sl / (2.0 * h_sl_gap + tau_sl) * (1.0 - rate / tau_sl);
}

double prop2_delta_bound(double L0_sq, double L1, double dist_sq) {
  if (!(L1 > 0.0)) throw std::invalid_argument("prop2_delta_bound: L1 must be positive");
  return L1 * dist_sq + L0_sq / L1;
}

double prop2_log_envelope(double L0_sq, double L1, double mu, std::size_t T, double dist0_sq) {
  if (!(L1 > 0.0 && mu > 0.0)) throw std::invalid_argument("prop2_log_envelope: L1 and mu must be positive");
  const double c = std::max(2.0, L1 / mu - 2.0);
  const double base = dist0_sq + L0_sq / (L1 * L1) + L0_sq / (mu * c * L1);
  return static_cast<double>(T) * std::log1p(c * L1 / mu) + std::log(base);
}

double distance_recursion_rhs(double R_k, double lambda, double alpha, double L0_sq, double L1, double delta) {
  return R_k - 0.5 * lambda * ((2.0 - L1 * alpha) * delta - L0_sq * alpha);
}

double dual_gap_recursion_rhs(double D_k, double lambda, double alpha, double L0_sq, double L1, double delta_opt,
                  bool feasible, double f_s_opt) {
  const double extra = feasible ? 0.0 : 2.0 * f_s_opt;
  return D_k - 0.5 * lambda * ((2.0 - L1 * alpha) * delta_opt + extra - L0_sq * alpha);
}

double distance_potential(const SolverState& st, const Vector& y) {
  return 0.5 * st.mu * st.weight_total * (st.x - y).squaredNorm();
}

double dual_potential(const SolverState& st, double p_star) {
  if (!st.model_valid) throw std::logic_error("dual_potential: model is not tracked");
  return st.weight_feasible() * p_star - st.model.min_value();
}

}  // namespace pdsg
