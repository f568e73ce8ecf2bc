#include <pdsg/runner.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pdsg {

std::string to_string(RunMode m) {
  switch (m) {
    case RunMode::primal: return "primal";
    case RunMode::dual: return "dual";
    case RunMode::both: return "both";
  }
  return "?";
}

RunMode parse_run_mode(const std::string& name) {
  if (name == "primal") return RunMode::primal;
  if (name == "dual") return RunMode::dual;
  if (name == "both") return RunMode::both;
  throw std::invalid_argument("unknown run mode: " + name);
}

void CheckStats::record(std::size_t t, double lhs, double rhs, double scale, double tol) {
  if (std::isnan(lhs) || std::isnan(rhs)) return;
  ++checked;
  const double excess = (lhs - rhs) / std::max(scale, 1e-300);
  if (std::isnan(excess)) return;
  worst_excess = std::max(worst_excess, excess);
  if (excess > tol) {
    ++violations;
    if (!first_violation) first_violation = t;
  }
}

ModelSnapshot snapshot(const SolverState& st, bool with_center) {
  ModelSnapshot s;
  s.log_scale = st.log_scale;
  if (!st.model_valid) return s;
  s.min_value = st.model.min_value();
  s.curvature = st.model.curvature();
  if (with_center) s.center = st.model.center();
  s.total_weight = st.model.total_weight();
  s.total_weight_feasible = st.model.total_weight_feasible();
  return s;
}

namespace {

struct Reference {
  Vector y;
  std::optional<Vector> n;  // n_y, missing when r is nonsmooth there and nothing was supplied
  double dist0_sq = 0.0;
};

std::optional<Vector> try_reference_subgradient(const ProblemInstance& inst, bool opt) {
  try {
    return inst.reference_subgradient(opt);
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

}  // namespace

RunResult run(const ProblemInstance& inst, const Schedule& schedule, const RunOptions& opt) {
  RunResult res;
  res.instance = inst.name;
  res.schedule = schedule.name();
  res.mode = opt.mode;

  const Method primary = opt.mode == RunMode::dual ? Method::dual : Method::primal;
  SolverState st = init_state(inst, schedule, primary, opt.solver);
  std::optional<SolverState> ds;
  if (opt.mode == RunMode::both) ds = init_state(inst, schedule, Method::dual, opt.solver);

  BoundInputs bounds = BoundInputs::from_instance(inst);
  const auto& C = inst.constants;
  const bool det = !inst.stochastic();
  const bool theory = schedule.beta_bar() == 0.0;
  const bool have_L = C.L0_sq && C.L1 && *C.L1 > 0.0;

  if (C.L1 && *C.L1 > 0.0) {
    try {
      res.T0 = divergence_horizon(schedule, *C.L1);
    } catch (const DegenerateError&) {
      res.T0.reset();
    }
  }

  std::vector<Reference> refs;
  if (opt.monitors && inst.refs.x_opt) {
    refs.push_back({inst.x_opt(), try_reference_subgradient(inst, true), 0.0});
    refs.push_back({inst.x_sl(), try_reference_subgradient(inst, false), 0.0});
    for (auto& r : refs) r.dist0_sq = (inst.x0 - r.y).squaredNorm();
  }
  std::vector<double> fs_opt(static_cast<std::size_t>(inst.m()) + 1, 0.0);
  if (inst.refs.x_opt) {
    for (Index s = 1; s <= inst.m(); ++s) fs_opt[s] = component_value(inst, s, inst.x_opt());
  }

  res.iterate_norms.push_back(st.x.norm());
  if (opt.record_iterates) res.iterates.push_back(st.x);

  auto& mon = res.monitors;
  for (std::size_t t = 0; t < opt.T; ++t) {
    // Potentials at x_k, before the step.
    const double scale0 = st.log_scale;
    std::vector<double> R_before;
    double D_before = kUndefined;
    if (!refs.empty() && det && theory) {
      for (const auto& r : refs) R_before.push_back(distance_potential(st, r.y));
      if (inst.refs.p_star && st.model_valid) D_before = dual_potential(st, *inst.refs.p_star);
    }

    step(st, inst, primary, opt.solver);
    const StepInfo& info = *st.last;
    if (ds) {
      step(*ds, inst, Method::dual, opt.solver);
      if (st.x.allFinite() && ds->x.allFinite()) {
        res.max_deviation = std::max(res.max_deviation, (st.x - ds->x).norm() / (1.0 + st.x.norm()));
      } else {
        res.max_deviation = std::numeric_limits<double>::infinity();
      }
      if (info.s == 0) {
        const StepInfo& di = *ds->last;
        mon.recovery.record(info.k, (info.n - di.n_alt).norm(), 0.0, 1.0 + info.n.norm(), 1e-9);
      }
    }
    res.step_values.push_back(info.f_value);
    res.step_index.push_back(info.s);
    if (t == 0) {
      bounds.g0_norm_sq = info.g.squaredNorm();
      bounds.log_lambda0 = info.log_lambda;
      bounds.alpha1 = st.cursor.alpha();
    }

    if (!refs.empty()) {
      std::vector<double> deltas;
      for (const auto& r : refs) {
        if (info.s == 0 && !inst.regularizer.is_zero() && !r.n) {
          deltas.push_back(kUndefined);
          continue;
        }
        deltas.push_back(delta_k(info.x_prev, r.y, inst, info.s, r.n ? &*r.n : nullptr));
      }
      res.delta_opt.push_back(deltas[0]);
      res.delta_sl.push_back(deltas[1]);

      if (res.T0 && info.k <= *res.T0) {
        const double dmax = std::max(deltas[0], deltas[1]);
        if (!std::isnan(dmax)) bounds.C0 += c0_term(info.log_lambda, info.alpha, *C.L1, dmax);
      }

      if (have_L) {
        const double L0 = *C.L0_sq, L1 = *C.L1;
        for (std::size_t i = 0; i < refs.size(); ++i) {
          const double d2 = (info.x_prev - refs[i].y).squaredNorm();
          const double rhs = prop2_delta_bound(L0, L1, d2);
          mon.prop2.record(info.k, std::abs(deltas[i]), rhs, 1.0 + rhs, 1e-9);
        }
        if (det) {
          for (std::size_t i = 0; i < refs.size(); ++i) {
            if (std::isnan(deltas[i])) continue;
            Vector gn = info.g;
            if (info.s == 0 && refs[i].n) gn += *refs[i].n;
            const double rhs = L0 + L1 * deltas[i];
            mon.assumption_c.record(info.k, gn.squaredNorm(), rhs, 1.0 + std::abs(rhs), 1e-6);
          }
          if (C.mu && *C.mu > 0.0) {
            for (const auto& r : refs) {
              const double env = prop2_log_envelope(L0, L1, *C.mu, info.k + 1, r.dist0_sq);
              const double d2 = (st.x - r.y).squaredNorm();
              mon.prop2_envelope.record(info.k + 1, d2 > 0.0 ? std::log(d2) : -1e300, env, 1.0, 1e-9);
            }
          }
          if (theory && !R_before.empty()) {
            const double f = std::exp(scale0 - st.log_scale);
            const double lam = info.weight;
            for (std::size_t i = 0; i < refs.size(); ++i) {
              if (std::isnan(deltas[i])) continue;
              const double Rk = R_before[i] * f;
              const double rhs = distance_recursion_rhs(Rk, lam, info.alpha, L0, L1, deltas[i]);
              const double scale = 1.0 + std::abs(Rk) + lam * (std::abs(deltas[i]) * (2.0 + L1 * info.alpha) + L0 * info.alpha);
              mon.distance_recursion.record(info.k, distance_potential(st, refs[i].y), rhs, scale, 1e-9);
            }
            if (!std::isnan(D_before) && !std::isnan(deltas[0])) {
              const double Dk = D_before * f;
              const double fso = info.s == 0 ? 0.0 : fs_opt[info.s];
              const double rhs = dual_gap_recursion_rhs(Dk, lam, info.alpha, L0, L1, deltas[0], info.s == 0, fso);
              const double scale = 1.0 + std::abs(Dk) +
                                   lam * (std::abs(deltas[0]) * (2.0 + L1 * info.alpha) + 2.0 * std::abs(fso) + L0 * info.alpha);
              mon.dual_recursion.record(info.k, dual_potential(st, *inst.refs.p_star), rhs, scale, 1e-9);
            }
          }
        }
      }
    }
    res.C0 = bounds.C0;
    res.steps = st.k;
    res.iterate_norms.push_back(st.x.allFinite() ? st.x.norm() : std::numeric_limits<double>::infinity());
    if (opt.record_iterates) res.iterates.push_back(st.x);

    if (st.diverged || (ds && ds->diverged)) {
      res.diverged = true;
      res.divergence_message = st.diverged ? st.divergence_message : "dual: " + ds->divergence_message;
      break;
    }

    const std::size_t tt = st.k;
    const bool need_hits = !opt.first_hits.empty() && res.first_hit.size() < opt.first_hits.size();
    if (!(opt.cadence.due(tt) || tt == opt.T)) continue;
    if (!(need_hits || opt.stop || opt.record_reports || opt.observer || opt.monitors || tt == opt.T)) continue;

    const CertificateReport rep = gaps(st, inst, bounds);
    if (inst.refs.p_star && rep.defined) {
      const double ps = *inst.refs.p_star;
      mon.dual_validity.record(tt, rep.dual_lower_bound, ps, 1.0, 1e-9);
      for (double v : {rep.p, rep.pbar, rep.delta}) {
        if (std::isfinite(v)) mon.sandwich.record(tt, -v, 0.0, 1.0 + std::abs(ps), 1e-9);
      }
    }
    if (det) {
      if (std::isfinite(rep.theorem2_lhs) && std::isfinite(rep.theorem2_rhs)) {
        mon.theorem2.record(tt, rep.theorem2_lhs, rep.theorem2_rhs, std::abs(rep.theorem2_rhs), 1e-9);
      }
      if (inst.m() > 0 && rep.prop1_rhs > 0.0) {
        mon.prop1.record(tt, rep.prop1_rhs, rep.feasible_fraction, 1.0, 1e-12);
      }
      if (rep.eq26_violated && !mon.eq26_first_flag) mon.eq26_first_flag = tt;
    }
    for (const auto& rule : opt.first_hits) {
      if (!res.first_hit.count(rule.criterion) && rule.fires(rep)) res.first_hit[rule.criterion] = tt;
    }
    if (opt.record_reports) res.records.push_back({rep, st.x.norm(), snapshot(st, opt.record_model_center)});
    if (opt.observer) opt.observer(st, rep);
    if (opt.stop && opt.stop->fires(rep)) {
      res.stopped = true;
      res.stop_time = tt;
      break;
    }
    if (opt.stop_when_all_hit && !opt.first_hits.empty() && res.first_hit.size() >= opt.first_hits.size()) break;
  }

  if (res.steps > 0 && !res.diverged) res.final_report = gaps(st, inst, bounds);
  res.state.emplace(std::move(st));
  if (ds) res.dual_state.emplace(std::move(*ds));
  return res;
}

}  // namespace pdsg
