#include <pdsg/experiments.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <thread>

namespace pdsg {

namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) { return splitmix(master ^ splitmix(stream)); }

unsigned resolve_threads(unsigned t) { return t > 0 ? t : default_threads(); }

std::vector<std::string> or_default(const std::vector<std::string>& v, std::vector<std::string> d) {
  return v.empty() ? d : v;
}

}  // namespace

unsigned default_threads() {
  if (const char* env = std::getenv("PDSG_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(count)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

Schedule make_schedule(const std::string& name, double mu, double L1, double beta_bar) {
  if (name == "uniform") return Schedule::uniform(mu, beta_bar);
  if (name == "linear") return Schedule::linear(mu, beta_bar);
  if (name == "optimized") return Schedule::optimized(mu, beta_bar);
  if (name == "smooth") return Schedule::smooth(mu, L1);
  if (name == "capped") return Schedule::capped(mu, L1);
  if (name.rfind("poly", 0) == 0 && name.size() > 4) return Schedule::poly(std::stod(name.substr(4)), mu, beta_bar);
  throw std::invalid_argument("unknown schedule name: " + name);
}

// ---------------------------------------------------------------------------

Fig1Result fig1(const ExperimentConfig& cfg) {
  Fig1Result res;
  res.schedules = or_default(cfg.schedules, {"uniform", "linear", "poly2", "poly3", "poly4", "optimized"});
  const std::size_t T = cfg.T ? cfg.T : 10000;
  const ProblemInstance inst = gen_l1_ls(cfg.m, cfg.n, cfg.sigma, cfg.seed);
  const double mu = *inst.constants.mu;

  std::vector<std::vector<Fig1Row>> per(res.schedules.size());
  std::vector<bool> ok(res.schedules.size(), true);
  parallel_for(res.schedules.size(), resolve_threads(cfg.threads), [&](std::size_t i) {
    RunOptions opt;
    opt.T = T;
    opt.cadence.dense_until = T + 1;
    const RunResult r = run(inst, make_schedule(res.schedules[i], mu, *inst.constants.L1), opt);
    for (const auto& rec : r.records) {
      const auto& rep = rec.report;
      per[i].push_back({res.schedules[i], rep.t, rep.theorem2_lhs, rep.p, rep.d, rep.dist2, rep.theorem2_rhs});
    }
    ok[i] = r.monitors.theorem2.ok();
  });

  for (std::size_t i = 0; i < per.size(); ++i) {
    res.bounds_hold = res.bounds_hold && ok[i];
    res.rows.insert(res.rows.end(), per[i].begin(), per[i].end());
  }

  const auto opt_it = std::find(res.schedules.begin(), res.schedules.end(), "optimized");
  if (opt_it != res.schedules.end()) {
    const std::size_t oi = static_cast<std::size_t>(opt_it - res.schedules.begin());
    for (std::size_t k = 0; k < per[oi].size(); ++k) {
      const double o = per[oi][k].thm2_rhs;
      for (std::size_t i = 0; i < per.size(); ++i) {
        if (i == oi || k >= per[i].size()) continue;
        if (o > per[i][k].thm2_rhs * (1.0 + 1e-9)) {
          res.optimized_smallest_rhs = false;
          if (!res.optimized_not_smallest_at) res.optimized_not_smallest_at = per[oi][k].t;
        }
      }
    }
  }
  double worst = -1.0;
  for (const auto& rows : per) {
    if (!rows.empty() && rows.back().primal_gap > worst) {
      worst = rows.back().primal_gap;
      res.slowest_final = rows.back().schedule;
    }
  }
  return res;
}

void write_fig1_csv(std::ostream& out, const Fig1Result& r, std::size_t max_rows) {
  out << "schedule,t,aggregate,primal_gap,dual_gap,dist2,thm2_rhs\n";
  std::map<std::string, std::size_t> last_t;
  std::map<std::string, std::size_t> count;
  for (const auto& row : r.rows) ++count[row.schedule];
  for (const auto& row : r.rows) {
    if (max_rows > 0 && count[row.schedule] > max_rows) {
      // Keep a logarithmic grid plus the final row.
      const double ratio = std::pow(static_cast<double>(count[row.schedule]), 1.0 / static_cast<double>(max_rows));
      const auto it = last_t.find(row.schedule);
      const bool final_row = row.t == count[row.schedule];
      if (it != last_t.end() && !final_row && static_cast<double>(row.t) < static_cast<double>(it->second) * ratio) continue;
    }
    last_t[row.schedule] = row.t;
    out << row.schedule << ',' << row.t << ',' << format_number(row.aggregate) << ',' << format_number(row.primal_gap)
        << ',' << format_number(row.dual_gap) << ',' << format_number(row.dist2) << ',' << format_number(row.thm2_rhs)
        << '\n';
  }
}

// ---------------------------------------------------------------------------

Table1Result table1(const ExperimentConfig& cfg) {
  Table1Result res;
  res.schedules = or_default(cfg.schedules, {"uniform", "linear", "poly2", "poly3", "poly4", "optimized"});
  res.criteria = all_criteria();
  res.cap = cfg.T ? cfg.T : 20000000;
  const ProblemInstance inst = gen_l1_ls(cfg.m, cfg.n, cfg.sigma, cfg.seed);
  const double mu = *inst.constants.mu;

  std::vector<std::map<Criterion, std::size_t>> hits(res.schedules.size());
  parallel_for(res.schedules.size(), resolve_threads(cfg.threads), [&](std::size_t i) {
    RunOptions opt;
    opt.T = res.cap;
    opt.cadence.dense_until = std::numeric_limits<std::size_t>::max();
    opt.record_reports = false;
    opt.monitors = false;
    for (auto c : res.criteria) opt.first_hits.push_back({c, cfg.eps});
    opt.stop_when_all_hit = true;
    hits[i] = run(inst, make_schedule(res.schedules[i], mu, *inst.constants.L1), opt).first_hit;
  });

  for (std::size_t i = 0; i < res.schedules.size(); ++i) {
    const std::string& s = res.schedules[i];
    auto get = [&](Criterion c) -> std::optional<std::size_t> {
      auto it = hits[i].find(c);
      return it == hits[i].end() ? std::nullopt : std::optional<std::size_t>(it->second);
    };
    for (auto c : res.criteria) res.hits[s][c] = get(c);

    const auto delta = get(Criterion::delta), delta_d = get(Criterion::delta_d);
    const auto p = get(Criterion::p), p_d = get(Criterion::p_d);
    const auto pbar = get(Criterion::pbar), pbar_d = get(Criterion::pbar_d);
    res.delta_d_within_two = res.delta_d_within_two && delta && delta_d && *delta_d <= *delta + 2;
    res.p_d_within_two = res.p_d_within_two && p && p_d && *p_d <= *p + 2;
    if (s != "uniform") {
      if (pbar && pbar_d) {
        const double ratio = static_cast<double>(*pbar_d) / static_cast<double>(*pbar);
        res.worst_pbar_d_ratio = std::max(res.worst_pbar_d_ratio, ratio);
        res.pbar_d_ratio_ok = res.pbar_d_ratio_ok && ratio <= 1.25;
      } else {
        res.pbar_d_ratio_ok = false;
      }
    }
    if (s == "linear") {
      const auto d = get(Criterion::d);
      if (p && d) res.linear_p_over_d = static_cast<double>(*p) / static_cast<double>(*d);
    }
  }
  return res;
}

json table1_reference() {
  const std::vector<std::string> names{"uniform", "linear", "poly2", "poly3", "poly4", "optimized"};
  const std::vector<std::vector<double>> rows{
      {1204821, 1204821, 237426, 237428, 4713468, 4713468, 263},
      {1940, 2000, 443222, 443223, 886456, 886456, 470},
      {997, 1223, 664834, 664835, 997251, 997252, 705},
      {1331, 1630, 886445, 886446, 1181927, 1181928, 941},
      {1664, 2038, 1108056, 1108058, 1385070, 1385071, 1176},
      {4122, 4156, 533876, 533876, 1067789, 1067790, 509},
  };
  const std::vector<std::string> crit{"pbar", "pbar+d", "delta", "delta+d", "p", "p+d", "d"};
  json j;
  for (std::size_t i = 0; i < names.size(); ++i) {
    for (std::size_t c = 0; c < crit.size(); ++c) j[names[i]][crit[c]] = rows[i][c];
  }
  return j;
}

json table1_to_json(const Table1Result& r) {
  json j;
  j["cap"] = r.cap;
  json hits;
  for (const auto& s : r.schedules) {
    for (auto c : r.criteria) {
      const auto& v = r.hits.at(s).at(c);
      hits[s][to_string(c)] = v ? json(*v) : json("censored");
    }
  }
  j["first_hit"] = hits;
  j["checks"] = {{"delta_d_within_two", r.delta_d_within_two},
                 {"p_d_within_two", r.p_d_within_two},
                 {"pbar_d_ratio_ok", r.pbar_d_ratio_ok},
                 {"worst_pbar_d_ratio", r.worst_pbar_d_ratio},
                 {"linear_p_over_d", r.linear_p_over_d}};
  j["reference_100x100"] = table1_reference();
  return j;
}

// ---------------------------------------------------------------------------

DivergenceResult divergence(const ExperimentConfig& cfg) {
  DivergenceResult res;
  const std::vector<double> sigmas =
      cfg.sigmas.empty() ? std::vector<double>{0.0, 1e-4, 1e-3, 1e-2, 2e-2, 5e-2} : cfg.sigmas;
  const std::size_t T_default = cfg.T ? cfg.T : 2000;
  const std::size_t R = std::max<std::size_t>(1, cfg.replicates);

  std::vector<DivergenceRow> rows(sigmas.size());
  std::vector<std::vector<DivergenceResult::Point>> traj(sigmas.size());
  parallel_for(sigmas.size(), resolve_threads(cfg.threads), [&](std::size_t i) {
    ProblemInstance inst = gen_l1_ls(cfg.m, cfg.n, sigmas[i], cfg.seed);
    inst.noise_sigma_sq = cfg.noise_sigma_sq;
    DivergenceRow& row = rows[i];
    row.sigma = sigmas[i];
    row.mu = *inst.constants.mu;
    row.L1 = *inst.constants.L1;
    row.start_distance = (inst.x0 - inst.x_opt()).norm();

    const Schedule lin = Schedule::linear(row.mu);
    const Schedule cap = Schedule::capped(row.mu, row.L1);
    row.T0 = divergence_horizon(lin, row.L1);
    const std::size_t T = std::max(T_default, row.T0 ? *row.T0 + 2 : 0);

    RunOptions opt;
    opt.T = T;
    opt.record_reports = false;
    opt.cadence.dense_until = 0;
    opt.cadence.sparse_every = T;

    std::vector<std::vector<double>> d_opt, d_sl;
    for (std::size_t r = 0; r < R; ++r) {
      opt.solver.seed = derive_seed(cfg.seed, r);
      const RunResult u = run(inst, lin, opt);
      d_opt.push_back(u.delta_opt);
      d_sl.push_back(u.delta_sl);
      if (r == 0) {
        row.uncapped_diverged = u.diverged;
        for (std::size_t k = 0; k < u.iterate_norms.size(); ++k) {
          row.peak_norm = std::max(row.peak_norm, u.iterate_norms[k]);
          const double dk = k < u.delta_opt.size() ? u.delta_opt[k] : kUndefined;
          if (dk > row.peak_delta) {
            row.peak_delta = dk;
            row.peak_at = k;
          }
          traj[i].push_back({row.sigma, "linear", k, u.iterate_norms[k], dk});
        }
      }
    }
    const DivergenceConstants dc = divergence_constants(lin, row.L1, d_opt, d_sl);
    row.C0 = dc.C0;
    row.C0_se = dc.C0_se;
    row.C0_complete = dc.complete;

    opt.solver.seed = derive_seed(cfg.seed, 0);
    const RunResult c = run(inst, cap, opt);
    row.capped_T0 = c.T0;
    row.capped_C0 = c.C0;
    for (std::size_t k = 0; k < c.iterate_norms.size(); ++k) {
      row.capped_peak_norm = std::max(row.capped_peak_norm, c.iterate_norms[k]);
      const double dk = k < c.delta_opt.size() ? c.delta_opt[k] : kUndefined;
      if (dk > row.capped_peak_delta) row.capped_peak_delta = dk;
      traj[i].push_back({row.sigma, "capped", k, c.iterate_norms[k], dk});
    }
  });
  res.rows = std::move(rows);
  for (auto& t : traj) res.trajectory.insert(res.trajectory.end(), t.begin(), t.end());
  return res;
}

json table2_reference() {
  return {{"sigma", {0.0, 1e-4, 1e-3, 1e-2, 2e-2, 5e-2}},
          {"L1_over_mu", {4.0, 4.022, 4.224, 6.911, 12.107, 81.179}},
          {"T0", {6, 7, 7, 12, 23, 161}},
          {"C0", {1.472e5, 1.497e5, 1.735e5, 6.985e5, 3.770e6, 2.663e23}}};
}

json divergence_to_json(const DivergenceResult& r) {
  json rows = json::array();
  auto log10_or_null = [](const LogValue& v) { return v.is_zero() ? json(nullptr) : json(v.log10_abs()); };
  for (const auto& row : r.rows) {
    rows.push_back({{"sigma", row.sigma},
                    {"mu", row.mu},
                    {"L1", row.L1},
                    {"L1_over_mu", row.L1 / row.mu},
                    {"T0", row.T0 ? json(*row.T0) : json(nullptr)},
                    {"log10_C0", log10_or_null(row.C0)},
                    {"log10_C0_se", log10_or_null(row.C0_se)},
                    {"C0_complete", row.C0_complete},
                    {"peak_norm", row.peak_norm},
                    {"peak_delta", row.peak_delta},
                    {"peak_at", row.peak_at},
                    {"uncapped_diverged", row.uncapped_diverged},
                    {"capped_T0", row.capped_T0 ? json(*row.capped_T0) : json(nullptr)},
                    {"capped_log10_C0", log10_or_null(row.capped_C0)},
                    {"capped_peak_norm", row.capped_peak_norm},
                    {"capped_peak_delta", row.capped_peak_delta},
                    {"start_distance", row.start_distance}});
  }
  return {{"rows", rows}, {"reference_100x100", table2_reference()}};
}

void write_trajectory_csv(std::ostream& out, const DivergenceResult& r) {
  out << "sigma,schedule,k,norm,delta\n";
  for (const auto& p : r.trajectory) {
    out << format_number(p.sigma) << ',' << p.schedule << ',' << p.k << ',' << format_number(p.norm) << ','
        << format_number(p.delta) << '\n';
  }
}

// ---------------------------------------------------------------------------

ToyResult toy(const ExperimentConfig& cfg) {
  ToyResult res;
  const ProblemInstance inst = toy_divergent();
  RunOptions opt;
  opt.T = cfg.T ? cfg.T : 1000;
  opt.record_reports = false;
  const RunResult r = run(inst, Schedule::linear(1.0), opt);
  res.norms = r.iterate_norms;
  res.f_values.reserve(res.norms.size());
  if (r.state) {
    // f along the trajectory, including the final iterate.
    res.f_values = r.step_values;
    res.f_values.push_back(inst.objective->value(r.state->x));
  }
  res.norm100 = res.norms.size() > 100 ? res.norms[100] : kUndefined;
  res.peak_at = static_cast<std::size_t>(std::max_element(res.norms.begin(), res.norms.end()) - res.norms.begin());
  // At k = 98 the contraction factor 1 - 100 alpha_k is exactly -1, so the
  // peak is a two-point plateau; decrease is required from its far end.
  while (res.peak_at + 1 < res.norms.size() && res.norms[res.peak_at + 1] == res.norms[res.peak_at]) ++res.peak_at;
  for (std::size_t k = res.peak_at; k + 1 < res.f_values.size(); ++k) {
    // At k = 198 the factor is exactly 0 and the iterate lands on the minimizer.
    const bool at_min = res.f_values[k] <= *inst.refs.p_star && res.f_values[k + 1] == res.f_values[k];
    if (!(res.f_values[k + 1] < res.f_values[k]) && !at_min) res.monotone_after_peak = false;
  }
  res.T0 = r.T0;
  res.C0 = r.C0;  // partial when T <= T0
  res.envelope_holds = r.monitors.prop2_envelope.ok();
  res.recursions_hold = r.monitors.distance_recursion.ok() && r.monitors.dual_recursion.ok();
  return res;
}

void write_toy_csv(std::ostream& out, const ToyResult& r) {
  out << "k,norm,f\n";
  for (std::size_t k = 0; k < r.norms.size(); ++k) {
    out << k << ',' << format_number(r.norms[k]) << ','
        << format_number(k < r.f_values.size() ? r.f_values[k] : kUndefined) << '\n';
  }
}

// ---------------------------------------------------------------------------

std::vector<std::string> equivalence_families() { return {"quadratic", "l1ls", "l1ls_prox", "constrained"}; }

ProblemInstance equivalence_instance(const std::string& family, std::uint64_t seed) {
  if (family == "quadratic") return gen_quadratic(20, 10.0, seed);
  if (family == "l1ls") return gen_l1_ls(20, 20, 0.02, seed);
  if (family == "l1ls_prox") {
    ProblemInstance inst = gen_l1_ls(20, 20, 0.02, seed);
    inst.name = "l1ls_prox";
    inst.regularizer = Regularizer::l1(1.0);
    // The references belong to the unregularized problem.
    inst.refs = References{};
    return inst;
  }
  if (family == "constrained") return gen_constrained(5, 2, seed);
  throw std::invalid_argument("unknown equivalence family: " + family);
}

EquivalenceResult equivalence(const ExperimentConfig& cfg) {
  struct Cell {
    std::string family;
    std::string schedule;
    double beta_bar;
  };
  const auto schedules = or_default(cfg.schedules, {"uniform", "linear", "poly2", "poly3", "optimized"});
  std::vector<Cell> cells;
  for (const auto& f : equivalence_families()) {
    for (double bb : {0.0, 1.0, 10.0}) {
      for (const auto& s : schedules) cells.push_back({f, s, bb});
    }
    cells.push_back({f, "smooth", 0.0});
  }
  std::map<std::string, ProblemInstance> instances;
  for (const auto& f : equivalence_families()) instances.emplace(f, equivalence_instance(f, cfg.seed));

  const std::size_t T = cfg.T ? cfg.T : 1000;
  std::vector<EquivalenceCase> out(cells.size());
  parallel_for(cells.size(), resolve_threads(cfg.threads), [&](std::size_t i) {
    const auto& cell = cells[i];
    const ProblemInstance& inst = instances.at(cell.family);
    const double mu = *inst.constants.mu;
    RunOptions opt;
    opt.mode = RunMode::both;
    opt.T = T;
    opt.record_reports = false;
    opt.monitors = false;
    opt.cadence.dense_until = 0;
    opt.cadence.sparse_every = T;
    opt.solver.seed = cfg.seed;
    const RunResult r = run(inst, make_schedule(cell.schedule, mu, *inst.constants.L1, cell.beta_bar), opt);
    const auto& rec = r.monitors.recovery;
    out[i] = {cell.family, cell.schedule, cell.beta_bar, r.steps, r.max_deviation,
              rec.checked ? std::max(0.0, rec.worst_excess) : 0.0};
  });
  EquivalenceResult res;
  res.cases = std::move(out);
  for (const auto& c : res.cases) res.worst = std::max(res.worst, std::isnan(c.max_deviation) ? INFINITY : c.max_deviation);
  return res;
}

json equivalence_to_json(const EquivalenceResult& r) {
  json cases = json::array();
  for (const auto& c : r.cases) {
    cases.push_back({{"family", c.family},
                     {"schedule", c.schedule},
                     {"beta_bar", c.beta_bar},
                     {"steps", c.steps},
                     {"max_deviation", c.max_deviation},
                     {"max_recovery", c.max_recovery}});
  }
  return {{"cases", cases}, {"worst", r.worst}};
}

}  // namespace pdsg
