// pdsg: experiment harness.
//
//   pdsg fig1 | table1 | table2 | toy | equivalence | run [options]
//
// Results go to --out (a directory); a short summary is printed to stdout.

#include <pdsg/experiments.hpp>

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>

namespace fs = std::filesystem;
using namespace pdsg;

namespace {

struct Flags {
  std::string config;
  std::uint64_t seed = 1;
  double eps = 0.05;
  std::size_t T = 0;
  std::vector<double> sigma;
  std::vector<std::string> schedule;
  std::string out = "pdsg_out";
  bool small = false;
  std::size_t replicates = 1;
  double noise = 0.0;
  unsigned threads = 0;

  // run only
  std::string problem = "l1ls";
  long n = -1;
  long m = -1;
  std::string method = "primal";
  std::string criterion;
  std::string load_instance;
  std::string dump_instance;
};

json read_config(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config " + path);
  return json::parse(in);
}

// Config values first, then any flag given explicitly on the command line.
ExperimentConfig make_config(const Flags& f, const json& cfg, const CLI::App& sub) {
  ExperimentConfig c;
  if (cfg.value("small", false)) c.make_small();
  c.seed = cfg.value("seed", c.seed);
  c.eps = cfg.value("eps", c.eps);
  c.T = cfg.value("T", c.T);
  c.replicates = cfg.value("replicates", c.replicates);
  c.noise_sigma_sq = cfg.value("noise_sigma_sq", c.noise_sigma_sq);
  c.m = cfg.value("m", c.m);
  c.n = cfg.value("n", c.n);
  if (cfg.contains("sigma")) {
    if (cfg["sigma"].is_array()) {
      c.sigmas = cfg["sigma"].get<std::vector<double>>();
    } else {
      c.sigma = cfg["sigma"].get<double>();
    }
  }
  if (cfg.contains("schedules")) c.schedules = cfg["schedules"].get<std::vector<std::string>>();
  c.out_dir = cfg.value("out", f.out);

  auto given = [&](const char* name) { return sub.count(name) > 0; };
  if (given("--small") && f.small) c.make_small();
  if (given("--seed")) c.seed = f.seed;
  if (given("--eps")) c.eps = f.eps;
  if (given("--T")) c.T = f.T;
  if (given("--replicates")) c.replicates = f.replicates;
  if (given("--noise")) c.noise_sigma_sq = f.noise;
  if (given("--sigma")) {
    c.sigmas = f.sigma;
    c.sigma = f.sigma.front();
  }
  if (given("--schedule")) c.schedules = f.schedule;
  if (given("--out")) c.out_dir = f.out;
  c.threads = f.threads;
  return c;
}

std::ofstream open_out(const ExperimentConfig& c, const std::string& name) {
  fs::create_directories(c.out_dir);
  const fs::path p = fs::path(c.out_dir) / name;
  std::ofstream out(p);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  return out;
}

void write_json(const ExperimentConfig& c, const std::string& name, const json& j) {
  open_out(c, name) << j.dump(2) << '\n';
}

std::string hit_str(const std::optional<std::size_t>& v) { return v ? std::to_string(*v) : "censored"; }

int cmd_fig1(const ExperimentConfig& c) {
  const Fig1Result r = fig1(c);
  auto csv = open_out(c, "fig1.csv");
  write_fig1_csv(csv, r);
  write_json(c, "fig1.json",
             {{"bounds_hold", r.bounds_hold},
              {"optimized_smallest_rhs", r.optimized_smallest_rhs},
              {"optimized_not_smallest_at", r.optimized_not_smallest_at ? json(*r.optimized_not_smallest_at) : json(nullptr)},
              {"slowest_final", r.slowest_final}});
  std::cout << "fig1: aggregate <= thm2_rhs everywhere: " << (r.bounds_hold ? "yes" : "no") << '\n'
            << "fig1: optimized has the smallest thm2_rhs at every t: " << (r.optimized_smallest_rhs ? "yes" : "no")
            << '\n'
            << "fig1: largest final primal gap: " << r.slowest_final << '\n';
  return 0;
}

int cmd_table1(const ExperimentConfig& c) {
  const Table1Result r = table1(c);
  write_json(c, "table1.json", table1_to_json(r));
  const json ref = table1_reference();
  std::cout << std::left << std::setw(10) << "criterion";
  for (const auto& s : r.schedules) std::cout << std::setw(22) << s;
  std::cout << "\n";
  for (auto crit : r.criteria) {
    std::cout << std::setw(10) << to_string(crit);
    for (const auto& s : r.schedules) {
      std::string cell = hit_str(r.hits.at(s).at(crit));
      if (ref.contains(s)) cell += " (" + std::to_string(ref[s][to_string(crit)].get<long>()) + ")";
      std::cout << std::setw(22) << cell;
    }
    std::cout << "\n";
  }
  std::cout << "published 100x100 values in parentheses\n"
            << "delta+d within 2 of delta: " << r.delta_d_within_two << "\n"
            << "p+d within 2 of p: " << r.p_d_within_two << "\n"
            << "pbar+d / pbar <= 1.25 (non-uniform): " << r.pbar_d_ratio_ok << " (worst " << r.worst_pbar_d_ratio << ")\n"
            << "linear p / d: " << r.linear_p_over_d << "\n";
  return 0;
}

int cmd_table2(const ExperimentConfig& c) {
  const DivergenceResult r = divergence(c);
  write_json(c, "table2.json", divergence_to_json(r));
  auto csv = open_out(c, "table2_trajectory.csv");
  write_trajectory_csv(csv, r);
  std::cout << std::left << std::setw(9) << "sigma" << std::setw(11) << "L1/mu" << std::setw(6) << "T0" << std::setw(12)
            << "log10 C0" << std::setw(13) << "peak |x|" << std::setw(13) << "peak delta" << std::setw(13)
            << "capped T0" << std::setw(13) << "capped |x|" << "\n";
  for (const auto& row : r.rows) {
    std::cout << std::setw(9) << row.sigma << std::setw(11) << row.L1 / row.mu << std::setw(6)
              << (row.T0 ? std::to_string(*row.T0) : "none") << std::setw(12)
              << (row.C0.is_zero() ? std::string("-inf") : std::to_string(row.C0.log10_abs())) << std::setw(13)
              << row.peak_norm << std::setw(13) << row.peak_delta << std::setw(13)
              << (row.capped_T0 ? std::to_string(*row.capped_T0) : "none") << std::setw(13) << row.capped_peak_norm
              << "\n";
  }
  return 0;
}

int cmd_toy(const ExperimentConfig& c) {
  const ToyResult r = toy(c);
  auto csv = open_out(c, "toy.csv");
  write_toy_csv(csv, r);
  write_json(c, "toy.json",
             {{"norm100", r.norm100},
              {"peak_at", r.peak_at},
              {"monotone_after_peak", r.monotone_after_peak},
              {"T0", r.T0 ? json(*r.T0) : json(nullptr)},
              {"log10_C0", r.C0.is_zero() ? json(nullptr) : json(r.C0.log10_abs())},
              {"envelope_holds", r.envelope_holds},
              {"recursions_hold", r.recursions_hold}});
  std::cout << "toy: ||x_100|| = " << r.norm100 << ", peak at k = " << r.peak_at
            << ", T0 = " << (r.T0 ? std::to_string(*r.T0) : "none") << ", log10 C0 = " << r.C0.log10_abs()
            << ", f monotone after peak: " << (r.monotone_after_peak ? "yes" : "no") << '\n';
  return 0;
}

int cmd_equivalence(const ExperimentConfig& c) {
  const EquivalenceResult r = equivalence(c);
  write_json(c, "equivalence.json", equivalence_to_json(r));
  std::cout << "equivalence: " << r.cases.size() << " cases, worst max_k ||x_k - y_k||/(1+||x_k||) = " << r.worst
            << '\n';
  return 0;
}

ProblemInstance build_instance(const Flags& f, const json& cfg, const ExperimentConfig& c, const CLI::App& sub) {
  if (sub.count("--load-instance")) return load_instance(f.load_instance);
  if (cfg.contains("instance_file")) return load_instance(cfg["instance_file"].get<std::string>());
  if (cfg.contains("instance")) return instance_from_json(cfg["instance"]);
  const json p = cfg.value("problem", json::object());
  std::string gen = p.value("generator", f.problem);
  if (sub.count("--problem")) gen = f.problem;
  const Index n = sub.count("--n") ? f.n : p.value("n", c.n);
  const Index m = sub.count("--m") ? f.m : p.value("m", gen == "constrained" ? Index{2} : c.m);
  if (gen == "l1ls") return gen_l1_ls(m, n, c.sigma, c.seed, p.value("a_scale", 1.0));
  if (gen == "toy") return toy_divergent();
  if (gen == "constrained") return gen_constrained(sub.count("--n") || p.contains("n") ? n : 5, m, c.seed);
  if (gen == "quadratic") return gen_quadratic(n, p.value("cond", 10.0), c.seed);
  throw std::invalid_argument("unknown problem generator: " + gen);
}

int cmd_run(const Flags& f, const json& cfg, const ExperimentConfig& c, const CLI::App& sub) {
  ProblemInstance inst = build_instance(f, cfg, c, sub);
  if (c.noise_sigma_sq > 0.0) inst.noise_sigma_sq = c.noise_sigma_sq;
  if (sub.count("--dump-instance")) save_instance(f.dump_instance, inst);

  const double mu = inst.constants.mu.value_or(1.0);
  const double L1 = inst.constants.L1.value_or(0.0);
  Schedule schedule = c.schedules.empty() ? Schedule::linear(mu) : make_schedule(c.schedules.front(), mu, L1);
  if (cfg.contains("schedule") && !sub.count("--schedule")) schedule = schedule_from_json(cfg["schedule"], mu);

  RunOptions opt;
  opt.mode = parse_run_mode(sub.count("--method") ? f.method : cfg.value("method", f.method));
  opt.T = c.T ? c.T : 1000;
  opt.solver.seed = c.seed;
  std::string crit = f.criterion;
  if (!sub.count("--criterion") && cfg.contains("stop")) crit = cfg["stop"].value("criterion", "");
  if (!crit.empty()) opt.stop = stopping(crit, c.eps);
  for (auto k : all_criteria()) opt.first_hits.push_back({k, c.eps});
  opt.record_model_center = inst.n() <= 20;

  const RunResult r = run(inst, schedule, opt);
  auto csv = open_out(c, "run.csv");
  write_report_csv(csv, r, inst.m());
  auto log = open_out(c, "run.jsonl");
  write_run_log(log, r);
  json summary = run_summary_to_json(r);
  summary["schedule_config"] = schedule_to_json(schedule);
  summary["seed"] = c.seed;
  write_json(c, "summary.json", summary);

  std::cout << "run: " << r.steps << " steps of " << to_string(opt.mode) << " on " << inst.name << " with "
            << schedule.name();
  if (r.stopped) std::cout << ", stopped at t = " << *r.stop_time;
  if (r.diverged) std::cout << ", " << r.divergence_message;
  std::cout << '\n';
  if (r.final_report) {
    const auto& fr = *r.final_report;
    std::cout << "  dual lower bound " << format_number(fr.dual_lower_bound) << ", primal average "
              << format_number(fr.primal_avg_value) << ", gap " << format_number(fr.gap_p_d) << '\n';
  }
  return 0;
}

void add_common(CLI::App* sub, Flags& f) {
  sub->add_option("--seed", f.seed, "Master seed");
  sub->add_option("--eps", f.eps, "Stopping tolerance");
  sub->add_option("--T", f.T, "Iteration horizon or cap (0: experiment default)");
  sub->add_option("--sigma", f.sigma, "Perturbation scale of C (list for table2)");
  sub->add_option("--schedule", f.schedule, "Schedule name(s): uniform linear polyP optimized smooth capped");
  sub->add_option("--out", f.out, "Output directory");
  sub->add_flag("--small", f.small, "n = m = 20");
  sub->add_option("--replicates", f.replicates, "Replicates for expectation estimates");
  sub->add_option("--noise", f.noise, "Variance of the objective-subgradient noise");
  sub->add_option("--threads", f.threads, "Worker threads (default: PDSG_THREADS or all cores)");
  sub->add_option("--config", f.config, "JSON config file");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Primal-dual subgradient experiments"};
  app.require_subcommand(1);
  Flags f;

  auto* s_fig1 = app.add_subcommand("fig1", "Bounds and observed gaps for several weight schedules");
  auto* s_table1 = app.add_subcommand("table1", "First-hit times of the stopping criteria");
  auto* s_table2 = app.add_subcommand("table2", "Divergence constants T0 and C0 across sigma");
  s_table2->alias("divergence");
  auto* s_toy = app.add_subcommand("toy", "Divergent toy quadratic");
  auto* s_eq = app.add_subcommand("equivalence", "Primal and dual iterates side by side");
  auto* s_run = app.add_subcommand("run", "Single run with certificate logging");
  for (auto* s : {s_fig1, s_table1, s_table2, s_toy, s_eq, s_run}) add_common(s, f);
  s_run->add_option("--problem", f.problem, "l1ls | toy | constrained | quadratic");
  s_run->add_option("--n", f.n, "Dimension");
  s_run->add_option("--m", f.m, "Rows of A and C, or number of constraints");
  s_run->add_option("--method", f.method, "primal | dual | both");
  s_run->add_option("--criterion", f.criterion, "Stop rule: pbar+d, delta+d, p+d, d, p, pbar, delta");
  s_run->add_option("--load-instance", f.load_instance, "Instance bundle to load");
  s_run->add_option("--dump-instance", f.dump_instance, "Write the instance bundle here");

  CLI11_PARSE(app, argc, argv);

  try {
    const json cfg = read_config(f.config);
    for (auto* s : {s_fig1, s_table1, s_table2, s_toy, s_eq, s_run}) {
      if (!s->parsed()) continue;
      const ExperimentConfig c = make_config(f, cfg, *s);
      if (s == s_fig1) return cmd_fig1(c);
      if (s == s_table1) return cmd_table1(c);
      if (s == s_table2) return cmd_table2(c);
      if (s == s_toy) return cmd_toy(c);
      if (s == s_eq) return cmd_equivalence(c);
      return cmd_run(f, cfg, c, *s);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
