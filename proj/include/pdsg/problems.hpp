#pragma once

// Benchmark generators with ground-truth references.

#include <pdsg/problem.hpp>

#include <cstdint>
#include <utility>

namespace pdsg {

struct EigenExtremes {
  double min;
  double max;
};

/// Extreme eigenvalues of a symmetric matrix: full decomposition for n <= 200,
/// shifted power iteration with Rayleigh-quotient residual checks beyond.
EigenExtremes eigen_extremes(const Matrix& S);

/// ||Ax - b||_1 + 0.5 ||Cx - d||^2 with C = I + sigma*Ct and A, Ct, x_opt
/// standard normal, b = A x_opt, d = C x_opt, x0 = 0. The draws do not depend
/// on sigma or a_scale, so a seed fixes (A, Ct, x_opt) across a sigma sweep.
/// a_scale multiplies A after drawing (0 gives a smooth instance).
ProblemInstance gen_l1_ls(Index m, Index n, double sigma, std::uint64_t seed, double a_scale = 1.0);

/// f(u, v) = 50 u^2 + 0.5 v^2 from x0 = (1, 0).
ProblemInstance toy_divergent();

/// 0.5 (x - c)^T H (x - c) with eigenvalues of H spread evenly over [1, cond],
/// c ~ N(0, I), x0 = 0.
ProblemInstance gen_quadratic(Index n, double cond, std::uint64_t seed);

struct AssumptionCConstants {
  double L0_sq;
  double L1;
};

/// L0^2 = 6 M^2 + sigma^2 + 6 L slack, L1 = 6 L.
AssumptionCConstants assumption_c_constants(double M, double L, double sigma_sq, double slack);

/// Adds (eps / 2 D^2) ||x - x0||^2 to the objective. The optimum of the
/// perturbed problem is only known to lie in [p*, p* + eps ||x_opt - x0||^2 / (2 D^2)].
ProblemInstance strongly_convexify(const ProblemInstance& base, double eps, double D, const Vector& x0);

/// min 0.5||x - c||^2 s.t. 0.5||x - a_s||^2 - rho_s <= 0 with x_opt and the
/// multipliers from an exact active-set KKT solve.
ProblemInstance make_ball_constrained(const Vector& c, const std::vector<Vector>& centers,
                                      const std::vector<double>& rhos, const Vector& x_sl,
                                      const Vector& x0);

/// Random ball-constrained instance: centers a_s ~ N(0, I), c ~ N(0, 9 I),
/// x_SL = centroid of the centers, rho_s chosen so that f_s(x_SL) <= -0.1.
/// The start x0 = c is infeasible whenever some constraint is active.
ProblemInstance gen_constrained(Index n, Index m_constraints, std::uint64_t seed);

struct KktSolution {
  Vector x;
  Vector u;
  double value;
};

/// Exact KKT point of the ball-constrained projection problem by active-set
/// enumeration (m <= 12) with Newton ascent on each face of the dual.
KktSolution solve_ball_kkt(const Vector& c, const std::vector<Vector>& centers,
                           const std::vector<double>& rhos);

}  // namespace pdsg
