#include <pdsg/serialization.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace pdsg {

namespace {

json number(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

double number_from(const json& j) {
  if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
  return j.get<double>();
}

template <class T>
void put_opt(json& j, const char* key, const std::optional<T>& v) {
  if (v) j[key] = *v;
}

void put_opt_vec(json& j, const char* key, const std::optional<Vector>& v) {
  if (v) j[key] = vector_to_json(*v);
}

std::optional<double> get_opt(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

std::optional<Vector> get_opt_vec(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return vector_from_json(j.at(key));
}

json regularizer_to_json(const Regularizer& r) {
  switch (r.kind()) {
    case Regularizer::Kind::none: return {{"kind", "none"}};
    case Regularizer::Kind::l1: return {{"kind", "l1"}, {"tau", r.tau()}};
    case Regularizer::Kind::ball:
      return {{"kind", "ball"}, {"center", vector_to_json(r.center())}, {"radius", r.radius()}};
  }
  return {{"kind", "none"}};
}

Regularizer regularizer_from_json(const json& j) {
  const std::string kind = j.value("kind", "none");
  if (kind == "none") return Regularizer::none();
  if (kind == "l1") return Regularizer::l1(j.at("tau").get<double>());
  if (kind == "ball") return Regularizer::ball(vector_from_json(j.at("center")), j.at("radius").get<double>());
  throw std::invalid_argument("unknown regularizer kind: " + kind);
}

}  // namespace

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

json vector_to_json(const Vector& v) {
  json a = json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(number(v[i]));
  return a;
}

Vector vector_from_json(const json& j) {
  Vector v(static_cast<Index>(j.size()));
  for (Index i = 0; i < v.size(); ++i) v[i] = number_from(j.at(static_cast<std::size_t>(i)));
  return v;
}

json matrix_to_json(const Matrix& M) {
  json rows = json::array();
  for (Index i = 0; i < M.rows(); ++i) rows.push_back(vector_to_json(M.row(i).transpose()));
  return rows;
}

Matrix matrix_from_json(const json& j) {
  const Index r = static_cast<Index>(j.size());
  const Index c = r > 0 ? static_cast<Index>(j.at(0).size()) : 0;
  Matrix M(r, c);
  for (Index i = 0; i < r; ++i) {
    const json& row = j.at(static_cast<std::size_t>(i));
    if (static_cast<Index>(row.size()) != c) throw std::invalid_argument("matrix_from_json: ragged rows");
    for (Index k = 0; k < c; ++k) M(i, k) = number_from(row.at(static_cast<std::size_t>(k)));
  }
  return M;
}

json function_to_json(const ConvexFunction& f) {
  if (auto q = dynamic_cast<const QuadraticFunction*>(&f)) {
    return {{"type", "quadratic"}, {"H", matrix_to_json(q->H())}, {"c", vector_to_json(q->c())}, {"offset", q->offset()}};
  }
  if (auto l = dynamic_cast<const L1LeastSquares*>(&f)) {
    return {{"type", "l1_least_squares"},
            {"A", matrix_to_json(l->A())},
            {"b", vector_to_json(l->b())},
            {"C", matrix_to_json(l->C())},
            {"d", vector_to_json(l->d())}};
  }
  if (auto b = dynamic_cast<const BallConstraint*>(&f)) {
    return {{"type", "ball"}, {"a", vector_to_json(b->a())}, {"rho", b->rho()}};
  }
  if (auto n = dynamic_cast<const L1Norm*>(&f)) {
    return {{"type", "l1_norm"}, {"n", n->dim()}, {"tau", n->tau()}};
  }
  if (auto p = dynamic_cast<const ProximallyPerturbed*>(&f)) {
    return {{"type", "perturbed"}, {"base", function_to_json(*p->base())}, {"kappa", p->kappa()}, {"x0", vector_to_json(p->x0())}};
  }
  throw std::invalid_argument("function_to_json: unsupported function type " + f.type());
}

FunctionPtr function_from_json(const json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "quadratic") {
    return std::make_shared<QuadraticFunction>(matrix_from_json(j.at("H")), vector_from_json(j.at("c")),
                                               j.value("offset", 0.0));
  }
  if (type == "l1_least_squares") {
    return std::make_shared<L1LeastSquares>(matrix_from_json(j.at("A")), vector_from_json(j.at("b")),
                                            matrix_from_json(j.at("C")), vector_from_json(j.at("d")));
  }
  if (type == "ball") return std::make_shared<BallConstraint>(vector_from_json(j.at("a")), j.at("rho").get<double>());
  if (type == "l1_norm") return std::make_shared<L1Norm>(j.at("n").get<Index>(), j.at("tau").get<double>());
  if (type == "perturbed") {
    return std::make_shared<ProximallyPerturbed>(function_from_json(j.at("base")), j.at("kappa").get<double>(),
                                                 vector_from_json(j.at("x0")));
  }
  throw std::invalid_argument("function_from_json: unknown type " + type);
}

json instance_to_json(const ProblemInstance& inst) {
  json j;
  j["format"] = "pdsg-instance";
  j["version"] = 1;
  j["name"] = inst.name;
  j["x0"] = vector_to_json(inst.x0);
  j["objective"] = function_to_json(*inst.objective);
  j["constraints"] = json::array();
  for (const auto& c : inst.constraints) j["constraints"].push_back(function_to_json(*c));
  j["regularizer"] = regularizer_to_json(inst.regularizer);
  j["noise_sigma_sq"] = inst.noise_sigma_sq;

  json refs = json::object();
  put_opt_vec(refs, "x_opt", inst.refs.x_opt);
  put_opt_vec(refs, "x_sl", inst.refs.x_sl);
  put_opt_vec(refs, "n_xopt", inst.refs.n_xopt);
  put_opt_vec(refs, "n_xsl", inst.refs.n_xsl);
  put_opt(refs, "p_star", inst.refs.p_star);
  if (inst.refs.p_star_interval) {
    refs["p_star_interval"] = {inst.refs.p_star_interval->first, inst.refs.p_star_interval->second};
  }
  put_opt_vec(refs, "kkt_multipliers", inst.refs.kkt_multipliers);
  j["references"] = refs;

  json c = json::object();
  const auto& k = inst.constants;
  put_opt(c, "mu", k.mu);
  put_opt(c, "L0_sq", k.L0_sq);
  put_opt(c, "L1", k.L1);
  put_opt(c, "M", k.M);
  put_opt(c, "L", k.L);
  put_opt(c, "sigma_sq", k.sigma_sq);
  put_opt(c, "tau_sl", k.tau_sl);
  put_opt(c, "h_sl_gap", k.h_sl_gap);
  j["constants"] = c;
  j["params"] = inst.params;
  return j;
}

ProblemInstance instance_from_json(const json& j) {
  if (j.value("format", "") != "pdsg-instance") throw std::invalid_argument("not a pdsg instance bundle");
  ProblemInstance inst;
  inst.name = j.value("name", "");
  inst.x0 = vector_from_json(j.at("x0"));
  inst.objective = function_from_json(j.at("objective"));
  for (const auto& c : j.value("constraints", json::array())) inst.constraints.push_back(function_from_json(c));
  if (j.contains("regularizer")) inst.regularizer = regularizer_from_json(j.at("regularizer"));
  inst.noise_sigma_sq = j.value("noise_sigma_sq", 0.0);

  const json refs = j.value("references", json::object());
  inst.refs.x_opt = get_opt_vec(refs, "x_opt");
  inst.refs.x_sl = get_opt_vec(refs, "x_sl");
  inst.refs.n_xopt = get_opt_vec(refs, "n_xopt");
  inst.refs.n_xsl = get_opt_vec(refs, "n_xsl");
  inst.refs.p_star = get_opt(refs, "p_star");
  if (refs.contains("p_star_interval")) {
    const auto& iv = refs.at("p_star_interval");
    inst.refs.p_star_interval = std::make_pair(iv.at(0).get<double>(), iv.at(1).get<double>());
  }
  inst.refs.kkt_multipliers = get_opt_vec(refs, "kkt_multipliers");

  const json c = j.value("constants", json::object());
  auto& k = inst.constants;
  k.mu = get_opt(c, "mu");
  k.L0_sq = get_opt(c, "L0_sq");
  k.L1 = get_opt(c, "L1");
  k.M = get_opt(c, "M");
  k.L = get_opt(c, "L");
  k.sigma_sq = get_opt(c, "sigma_sq");
  k.tau_sl = get_opt(c, "tau_sl");
  k.h_sl_gap = get_opt(c, "h_sl_gap");
  if (j.contains("params")) inst.params = j.at("params").get<std::map<std::string, double>>();

  if (inst.objective->dim() != inst.n()) throw std::invalid_argument("instance: objective dimension mismatch");
  for (const auto& f : inst.constraints) {
    if (f->dim() != inst.n()) throw std::invalid_argument("instance: constraint dimension mismatch");
  }
  return inst;
}

void save_instance(const std::string& path, const ProblemInstance& inst) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << instance_to_json(inst).dump(1) << '\n';
}

ProblemInstance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  return instance_from_json(json::parse(in));
}

json schedule_to_json(const Schedule& s) {
  const auto& sp = s.spec();
  json j;
  j["kind"] = to_string(sp.kind);
  j["params"] = {{"p", sp.p}, {"mu", sp.mu}, {"L1", sp.L1}, {"beta_bar", sp.beta_bar}, {"lambda0", sp.lambda0}};
  if (sp.kind == ScheduleKind::explicit_alpha) j["alphas"] = sp.alphas;
  return j;
}

Schedule schedule_from_json(const json& j, std::optional<double> default_mu) {
  ScheduleSpec sp;
  sp.kind = parse_schedule_kind(j.at("kind").get<std::string>());
  const json p = j.value("params", json::object());
  if (p.contains("mu")) {
    sp.mu = p.at("mu").get<double>();
  } else if (default_mu) {
    sp.mu = *default_mu;
  }
  sp.p = p.value("p", sp.p);
  sp.L1 = p.value("L1", sp.L1);
  sp.beta_bar = p.value("beta_bar", sp.beta_bar);
  sp.lambda0 = p.value("lambda0", sp.lambda0);
  if (j.contains("alphas")) sp.alphas = j.at("alphas").get<std::vector<double>>();
  return Schedule(std::move(sp));
}

json report_to_json(const CertificateReport& r) {
  json j;
  j["t"] = r.t;
  j["defined"] = r.defined;
  j["feasible_frac"] = number(r.feasible_fraction);
  j["dual_lower_bound"] = number(r.dual_lower_bound);
  j["primal_avg_value"] = number(r.primal_avg_value);
  j["avg_iterate_value"] = number(r.avg_iterate_value);
  j["last_iterate_value"] = number(r.last_iterate_value);
  j["gap_p_d"] = number(r.gap_p_d);
  j["gap_pbar_d"] = number(r.gap_pbar_d);
  j["gap_delta_d"] = number(r.gap_delta_d);
  j["p"] = number(r.p);
  j["pbar"] = number(r.pbar);
  j["delta"] = number(r.delta);
  j["d"] = number(r.d);
  j["dist2"] = number(r.dist2);
  j["multipliers"] = json::array();
  for (double u : r.multipliers) j["multipliers"].push_back(number(u));
  j["complementary_slackness"] = json::array();
  for (double c : r.complementary_slackness) j["complementary_slackness"].push_back(number(c));
  j["theorem2_lhs"] = number(r.theorem2_lhs);
  j["theorem2_rhs"] = number(r.theorem2_rhs);
  j["prop1_rhs"] = number(r.prop1_rhs);
  j["eq26_lhs"] = number(r.eq26_lhs);
  j["eq26_rhs"] = number(r.eq26_rhs);
  j["eq26_violated"] = r.eq26_violated;
  return j;
}

json snapshot_to_json(const ModelSnapshot& s) {
  json j{{"min_value", number(s.min_value)},
         {"curvature", number(s.curvature)},
         {"total_weight", number(s.total_weight)},
         {"total_weight_feasible", number(s.total_weight_feasible)},
         {"log_scale", s.log_scale}};
  if (s.center.size() > 0) j["center"] = vector_to_json(s.center);
  return j;
}

json record_to_json(const RunRecord& r) {
  json j = report_to_json(r.report);
  j["x_norm"] = number(r.x_norm);
  j["model"] = snapshot_to_json(r.model);
  return j;
}

namespace {

json check_to_json(const CheckStats& c) {
  json j{{"checked", c.checked}, {"violations", c.violations}, {"worst_excess", number(c.worst_excess)}};
  if (c.first_violation) j["first_violation"] = *c.first_violation;
  return j;
}

}  // namespace

json run_summary_to_json(const RunResult& r) {
  json j;
  j["instance"] = r.instance;
  j["schedule"] = r.schedule;
  j["mode"] = to_string(r.mode);
  j["steps"] = r.steps;
  j["T0"] = r.T0 ? json(*r.T0) : json(nullptr);
  j["log10_C0"] = r.C0.is_zero() ? json(nullptr) : number(r.C0.log10_abs());
  j["stopped"] = r.stopped;
  if (r.stop_time) j["stop_time"] = *r.stop_time;
  json hits = json::object();
  for (const auto& [c, t] : r.first_hit) hits[to_string(c)] = t;
  j["first_hit"] = hits;
  j["diverged"] = r.diverged;
  if (r.diverged) j["divergence_message"] = r.divergence_message;
  if (r.mode == RunMode::both) j["max_deviation"] = number(r.max_deviation);
  const auto& m = r.monitors;
  j["monitors"] = {{"dual_validity", check_to_json(m.dual_validity)},
                   {"sandwich", check_to_json(m.sandwich)},
                   {"theorem2", check_to_json(m.theorem2)},
                   {"prop1", check_to_json(m.prop1)},
                   {"prop2", check_to_json(m.prop2)},
                   {"prop2_envelope", check_to_json(m.prop2_envelope)},
                   {"assumption_c", check_to_json(m.assumption_c)},
                   {"distance_recursion", check_to_json(m.distance_recursion)},
                   {"dual_recursion", check_to_json(m.dual_recursion)},
                   {"recovery", check_to_json(m.recovery)}};
  if (m.eq26_first_flag) j["monitors"]["eq26_first_flag"] = *m.eq26_first_flag;
  if (r.final_report) j["final"] = report_to_json(*r.final_report);
  if (r.state) j["model"] = snapshot_to_json(snapshot(*r.state, r.state->x.size() <= 20));
  return j;
}

void write_run_log(std::ostream& out, const RunResult& r) {
  for (const auto& rec : r.records) out << record_to_json(rec).dump() << '\n';
}

std::string report_csv_header(Index m) {
  std::ostringstream os;
  os << "t,p,pbar,delta,d,dist2";
  for (Index s = 1; s <= m; ++s) os << ",u_" << s;
  os << ",thm2_rhs,feasible_frac,prop1_rhs";
  return os.str();
}

std::string report_csv_row(const CertificateReport& r, Index m) {
  std::ostringstream os;
  os << r.t << ',' << format_number(r.p) << ',' << format_number(r.pbar) << ',' << format_number(r.delta) << ','
     << format_number(r.d) << ',' << format_number(r.dist2);
  for (Index s = 0; s < m; ++s) {
    const double u = static_cast<std::size_t>(s) < r.multipliers.size() ? r.multipliers[static_cast<std::size_t>(s)]
                                                                         : std::numeric_limits<double>::quiet_NaN();
    os << ',' << format_number(u);
  }
  os << ',' << format_number(r.theorem2_rhs) << ',' << format_number(r.feasible_fraction) << ','
     << format_number(r.prop1_rhs);
  return os.str();
}

void write_report_csv(std::ostream& out, const RunResult& r, Index m) {
  out << report_csv_header(m) << '\n';
  for (const auto& rec : r.records) out << report_csv_row(rec.report, m) << '\n';
}

}  // namespace pdsg
