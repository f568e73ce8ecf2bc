#pragma once

#include <pdsg/functions.hpp>
#include <pdsg/regularizer.hpp>
#include <pdsg/types.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace pdsg {

/// Ground truth for benchmark metrics; every field is optional.
struct References {
  std::optional<Vector> x_opt;
  std::optional<Vector> x_sl;
  std::optional<Vector> n_xopt;  // subgradient of r at x_opt
  std::optional<Vector> n_xsl;   // subgradient of r at x_sl
  std::optional<double> p_star;
  /// Set instead of p_star when only an enclosing interval is known.
  std::optional<std::pair<double, double>> p_star_interval;
  std::optional<Vector> kkt_multipliers;
};

struct Constants {
  std::optional<double> mu;
  std::optional<double> L0_sq;
  std::optional<double> L1;
  std::optional<double> M;
  std::optional<double> L;
  std::optional<double> sigma_sq;
  std::optional<double> tau_sl;
  /// h_{x_SL}(x_SL) - inf h_{x_SL}.
  std::optional<double> h_sl_gap;
};

struct ProblemInstance {
  std::string name;
  Vector x0;
  FunctionPtr objective;
  std::vector<FunctionPtr> constraints;
  Regularizer regularizer;
  /// Total variance of the additive Gaussian noise on the objective subgradient.
  double noise_sigma_sq = 0.0;
  References refs;
  Constants constants;
  /// Generator parameters kept for serialization (seed, sigma, m, ...).
  std::map<std::string, double> params;

  Index n() const { return x0.size(); }
  Index m() const { return static_cast<Index>(constraints.size()); }
  bool stochastic() const { return noise_sigma_sq > 0.0; }

  /// f0(x) + r(x).
  double objective_value(const Vector& x) const;
  /// max_s f_s(x) <= 0 (always true for m = 0).
  bool feasible(const Vector& x) const;

  /// Reference subgradient n_y for y in {x_opt, x_sl}; zero when r is smooth
  /// there. Throws when r is nonsmooth at y and nothing was supplied.
  Vector reference_subgradient(bool opt) const;
  const Vector& x_opt() const;
  /// x_SL, falling back to x_opt when m = 0.
  const Vector& x_sl() const;
};

/// 0 when every f_s(x) <= 0, else the smallest violated index (1-based).
Index switching_select(const Vector& x, const ProblemInstance& instance);

/// Evaluates f_s at x (s = 0 is the objective without r).
double component_value(const ProblemInstance& instance, Index s, const Vector& x);

/// Counter-based noise: the draw for iteration k depends only on (seed, k),
/// so independent runs with the same seed see identical noise.
Vector noise_sample(std::uint64_t seed, std::uint64_t k, Index n, double sigma_sq);

/// Value of f_s at x and a (possibly noisy) subgradient for iteration k.
double oracle(const ProblemInstance& instance, Index s, const Vector& x, std::uint64_t seed,
              std::uint64_t k, Vector& g);

}  // namespace pdsg
