#pragma once

// Desk-scale experiment drivers. Every driver is a pure function of its
// config: cells run concurrently but results are assembled in a fixed order,
// so reruns produce identical output.

#include <pdsg/problems.hpp>
#include <pdsg/runner.hpp>
#include <pdsg/serialization.hpp>

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace pdsg {

struct ExperimentConfig {
  std::uint64_t seed = 1;
  Index m = 100;
  Index n = 100;
  double sigma = 0.0;
  double eps = 0.05;
  /// 0 selects the experiment's default horizon.
  std::size_t T = 0;
  std::size_t replicates = 1;
  /// Objective-subgradient noise variance for replicate experiments.
  double noise_sigma_sq = 0.0;
  std::vector<std::string> schedules;
  std::vector<double> sigmas;
  std::string out_dir;
  unsigned threads = 0;  // 0: PDSG_THREADS or hardware concurrency

  /// n = m = 20.
  void make_small() { m = n = 20; }
};

/// PDSG_THREADS when set, else std::thread::hardware_concurrency().
unsigned default_threads();

/// Runs fn(0..count-1) on up to `threads` workers.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn);

/// uniform, linear, poly<p>, optimized, smooth, capped.
Schedule make_schedule(const std::string& name, double mu, double L1 = 0.0, double beta_bar = 0.0);

// ---------------------------------------------------------------------------

struct Fig1Row {
  std::string schedule;
  std::size_t t = 0;
  double aggregate = 0.0;  // feasible-fraction (primal + dual gap) + mu/2 dist^2
  double primal_gap = 0.0;
  double dual_gap = 0.0;
  double dist2 = 0.0;
  double thm2_rhs = 0.0;
};

struct Fig1Result {
  std::vector<std::string> schedules;
  std::vector<Fig1Row> rows;        // every iteration
  bool bounds_hold = true;          // aggregate <= thm2_rhs everywhere
  bool optimized_smallest_rhs = true;
  std::optional<std::size_t> optimized_not_smallest_at;
  /// Schedule with the largest primal gap at the final iteration.
  std::string slowest_final;
};

Fig1Result fig1(const ExperimentConfig& cfg);
void write_fig1_csv(std::ostream& out, const Fig1Result& r, std::size_t max_rows_per_schedule = 0);

// ---------------------------------------------------------------------------

struct Table1Result {
  std::vector<std::string> schedules;
  std::vector<Criterion> criteria;
  /// hits[schedule][criterion]; nullopt when censored at cap.
  std::map<std::string, std::map<Criterion, std::optional<std::size_t>>> hits;
  std::size_t cap = 0;

  bool delta_d_within_two = true;
  bool p_d_within_two = true;
  bool pbar_d_ratio_ok = true;   // schedules other than uniform
  double worst_pbar_d_ratio = 0.0;
  double linear_p_over_d = 0.0;
};

Table1Result table1(const ExperimentConfig& cfg);
json table1_to_json(const Table1Result& r);
/// Stopping times for the 100x100 instance at eps = 0.05 as published, for side-by-side output.
json table1_reference();

// ---------------------------------------------------------------------------

struct DivergenceRow {
  double sigma = 0.0;
  double mu = 0.0;
  double L1 = 0.0;
  std::optional<std::size_t> T0;
  LogValue C0;
  LogValue C0_se;
  bool C0_complete = true;
  double peak_norm = 0.0;
  double peak_delta = 0.0;
  std::size_t peak_at = 0;
  std::optional<std::size_t> capped_T0;
  LogValue capped_C0;
  double capped_peak_norm = 0.0;
  double capped_peak_delta = 0.0;
  double start_distance = 0.0;  // ||x0 - x_opt||
  bool uncapped_diverged = false;
};

struct DivergenceResult {
  std::vector<DivergenceRow> rows;
  /// (sigma, schedule, k, norm, delta_opt) for every iteration of every run.
  struct Point {
    double sigma;
    std::string schedule;
    std::size_t k;
    double norm;
    double delta;
  };
  std::vector<Point> trajectory;
};

DivergenceResult divergence(const ExperimentConfig& cfg);
json divergence_to_json(const DivergenceResult& r);
json table2_reference();
void write_trajectory_csv(std::ostream& out, const DivergenceResult& r);

// ---------------------------------------------------------------------------

struct ToyResult {
  std::vector<double> norms;
  std::vector<double> f_values;
  double norm100 = 0.0;
  std::size_t peak_at = 0;  // last index attaining the maximal norm
  bool monotone_after_peak = true;
  std::optional<std::size_t> T0;
  LogValue C0;
  bool envelope_holds = true;
  bool recursions_hold = true;
};

ToyResult toy(const ExperimentConfig& cfg);
void write_toy_csv(std::ostream& out, const ToyResult& r);

// ---------------------------------------------------------------------------

struct EquivalenceCase {
  std::string family;
  std::string schedule;
  double beta_bar = 0.0;
  std::size_t steps = 0;
  double max_deviation = 0.0;
  double max_recovery = 0.0;  // worst normalized gap between the two recovered subgradients
};

struct EquivalenceResult {
  std::vector<EquivalenceCase> cases;
  double worst = 0.0;
};

/// Families: quadratic, l1ls (r = 0), l1ls_prox (r = ||.||_1), constrained (m = 2).
std::vector<std::string> equivalence_families();
ProblemInstance equivalence_instance(const std::string& family, std::uint64_t seed);
EquivalenceResult equivalence(const ExperimentConfig& cfg);
json equivalence_to_json(const EquivalenceResult& r);

}  // namespace pdsg
