#include <pdsg/solver.hpp>

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace pdsg {

namespace {

// Rescale once a scaled weight would exceed ~1e100.
constexpr double kMaxLogWeight = 230.0;

double prepare_weight(SolverState& st) {
  const double ll = st.cursor.log_lambda();
  if (ll - st.log_scale > kMaxLogWeight) st.set_scale(ll);
  return std::exp(ll - st.log_scale);
}

void accumulate(SolverState& st, const ProblemInstance& inst, Index s, double w, double alpha,
                double f_value) {
  st.weight_total += w;
  st.weight_alpha += w * alpha;
  st.weight_by_index[s] += w;
  if (s == 0) {
    st.sum_f0_feasible += w * f_value;
    st.sum_objective_feasible += w * (f_value + inst.regularizer.value(st.x));
    st.sum_x_feasible += w * st.x;
  }
}

void finish_step(SolverState& st, Vector x_next, StepInfo info, const SolverOptions& opt) {
  st.x = std::move(x_next);
  st.last = std::move(info);
  ++st.k;
  st.cursor.advance();
  if (!st.x.allFinite()) {
    st.diverged = true;
    st.nonfinite_at = st.k;
    std::ostringstream os;
    os << "nonfinite iterate at k=" << st.k;
    st.divergence_message = os.str();
  } else if (st.x.norm() > opt.divergence_limit) {
    st.diverged = true;
    std::ostringstream os;
    os << "iterate norm exceeded " << opt.divergence_limit << " at k=" << st.k;
    st.divergence_message = os.str();
  }
}

}  // namespace

std::string to_string(Method m) { return m == Method::primal ? "primal" : "dual"; }

double SolverState::absolute(double scaled) const { return scaled * std::exp(log_scale); }

Vector SolverState::averaged_iterate() const {
  if (!(weight_feasible() > 0.0)) throw UndefinedError("averaged iterate before the first feasible step");
  return sum_x_feasible / weight_feasible();
}

void SolverState::set_scale(double new_log_scale) {
  const double f = std::exp(log_scale - new_log_scale);
  weight_total *= f;
  weight_alpha *= f;
  weight_by_index *= f;
  sum_f0_feasible *= f;
  sum_objective_feasible *= f;
  sum_x_feasible *= f;
  if (model_valid) model.rescale(f);
  log_scale = new_log_scale;
}

SolverState init_state(const ProblemInstance& instance, const Schedule& schedule, Method method,
                       const SolverOptions& options) {
  if (instance.x0.size() == 0) throw std::invalid_argument("init_state: empty starting point");
  SolverState st(schedule.cursor());
  st.x = instance.x0;
  st.y0 = instance.x0;
  st.mu = schedule.mu();
  st.beta_bar = schedule.beta_bar();
  st.weight_by_index = Vector::Zero(instance.m() + 1);
  st.sum_x_feasible = Vector::Zero(instance.n());
  st.model = QuadraticModel(instance.n());
  st.model_valid = method == Method::dual || options.track_model;
  st.model.retain_terms(options.retain_terms && st.model_valid);
  st.seed = options.seed;
  return st;
}

void primal_step(SolverState& st, const ProblemInstance& inst, const SolverOptions& opt) {
  if (st.diverged) throw std::logic_error("primal_step: state has diverged");
  const double w = prepare_weight(st);
  const double alpha = st.cursor.alpha();
  if (!(alpha > 0.0)) throw std::invalid_argument("primal_step: stepsize must be positive");

  const Index s = switching_select(st.x, inst);
  Vector g;
  const double fv = oracle(inst, s, st.x, st.seed, st.k, g);

  Vector x_next;
  Vector n;
  if (s == 0) {
    const Vector z = st.x - alpha * g;
    x_next = inst.regularizer.prox(alpha, z);
    n = (z - x_next) / alpha;
  } else {
    x_next = st.x - alpha * g;
    n = Vector::Zero(st.x.size());
  }

  accumulate(st, inst, s, w, alpha, fv);
  if (st.model_valid) {
    const LowerBoundTerm term{w, fv, g, st.x, st.mu};
    append_model_term(st.model, s == 0, term, s == 0 ? inst.regularizer.value(x_next) : 0.0,
                      s == 0 ? &n : nullptr, s == 0 ? &x_next : nullptr);
  }

  StepInfo info{st.k, s, fv, std::move(g), alpha, w, st.cursor.log_lambda(), st.x, n, n};
  finish_step(st, std::move(x_next), std::move(info), opt);
}

void dual_step(SolverState& st, const ProblemInstance& inst, const SolverOptions& opt) {
  if (st.diverged) throw std::logic_error("dual_step: state has diverged");
  const double w = prepare_weight(st);
  const double alpha = st.cursor.alpha();

  const Index s = switching_select(st.x, inst);
  Vector g;
  const double fv = oracle(inst, s, st.x, st.seed, st.k, g);

  const LowerBoundTerm term{w, fv, g, st.x, st.mu};
  const double beta = st.beta_bar * std::exp(-st.log_scale);
  ProxMinimizer res = minimize_with_prox(st.model, term, inst.regularizer, beta, st.y0, s == 0);

  accumulate(st, inst, s, w, alpha, fv);
  append_model_term(st.model, s == 0, term, s == 0 ? inst.regularizer.value(res.y) : 0.0,
                    s == 0 ? &res.n : nullptr, s == 0 ? &res.y : nullptr);

  StepInfo info{st.k, s, fv, g, alpha, w, st.cursor.log_lambda(), st.x, res.n, res.n_stationarity};
  finish_step(st, std::move(res.y), std::move(info), opt);
}

void step(SolverState& state, const ProblemInstance& instance, Method method, const SolverOptions& options) {
  if (method == Method::primal) {
    primal_step(state, instance, options);
  } else {
    dual_step(state, instance, options);
  }
}

}  // namespace pdsg
