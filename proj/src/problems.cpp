#include <pdsg/problems.hpp>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace pdsg {

namespace {

Matrix draw_normal(std::mt19937_64& gen, Index rows, Index cols) {
  std::normal_distribution<double> dist(0.0, 1.0);
  Matrix out(rows, cols);
  // Column-major fill order is part of the instance definition.
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) out(i, j) = dist(gen);
  return out;
}

Vector draw_normal(std::mt19937_64& gen, Index n) {
  std::normal_distribution<double> dist(0.0, 1.0);
  Vector out(n);
  for (Index i = 0; i < n; ++i) out[i] = dist(gen);
  return out;
}

// Largest eigenpair of a PSD matrix by power iteration.
double power_top(const Matrix& S, int max_iter) {
  const Index n = S.rows();
  Vector v = Vector::Ones(n) / std::sqrt(static_cast<double>(n));
  v[0] += 0.1;  // break symmetry with eigenvectors orthogonal to ones
  v.normalize();
  double theta = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    Vector w = S * v;
    theta = v.dot(w);
    const double resid = (w - theta * v).norm();
    if (resid <= 1e-12 * std::max(std::abs(theta), 1e-300)) return theta;
    const double nw = w.norm();
    if (nw == 0.0) return 0.0;
    v = w / nw;
  }
  throw std::runtime_error("eigen_extremes: power iteration did not converge");
}

}  // namespace

EigenExtremes eigen_extremes(const Matrix& S) {
  if (S.rows() != S.cols() || S.rows() == 0) throw std::invalid_argument("eigen_extremes: square input required");
  const double scale = std::max(S.cwiseAbs().maxCoeff(), 1e-300);
  if ((S - S.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw std::invalid_argument("eigen_extremes: matrix is not symmetric");
  }
  if (S.rows() <= 200) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(S, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw std::runtime_error("eigen_extremes: decomposition failed");
    return {es.eigenvalues()[0], es.eigenvalues()[S.rows() - 1]};
  }
  constexpr int kMaxIter = 200000;
  const double top = power_top(S, kMaxIter);
  const Matrix shifted = top * Matrix::Identity(S.rows(), S.cols()) - S;
  const double gap = power_top(shifted, kMaxIter);
  return {top - gap, top};
}

ProblemInstance gen_l1_ls(Index m, Index n, double sigma, std::uint64_t seed, double a_scale) {
  if (m < 1 || n < 1) throw std::invalid_argument("gen_l1_ls: m and n must be positive");
  if (!(sigma >= 0.0)) throw std::invalid_argument("gen_l1_ls: sigma must be nonnegative");
  std::mt19937_64 gen(seed);
  Matrix A = draw_normal(gen, m, n);
  const Matrix Ct = draw_normal(gen, m, n);
  const Vector x_opt = draw_normal(gen, n);
  A *= a_scale;

  Matrix C = Matrix::Identity(m, n) + sigma * Ct;
  const Matrix CtC = C.transpose() * C;
  const auto ev = eigen_extremes(CtC);
  if (!(ev.min > 1e-12 * std::max(ev.max, 1.0))) {
    throw DegenerateError("gen_l1_ls: C^T C is not positive definite; draw a new seed");
  }
  double row_norms = 0.0;
  for (Index i = 0; i < m; ++i) row_norms += A.row(i).norm();

  Vector b = A * x_opt;
  Vector d = C * x_opt;

  ProblemInstance inst;
  inst.name = "l1_ls";
  inst.x0 = Vector::Zero(n);
  inst.objective = std::make_shared<L1LeastSquares>(std::move(A), std::move(b), std::move(C), std::move(d));
  inst.refs.x_opt = x_opt;
  inst.refs.x_sl = x_opt;
  inst.refs.p_star = 0.0;
  inst.constants.mu = ev.min;
  inst.constants.L1 = 4.0 * ev.max;
  inst.constants.L0_sq = 8.0 * row_norms * row_norms;
  inst.constants.M = row_norms;
  inst.constants.L = ev.max;
  inst.constants.sigma_sq = 0.0;
  inst.params = {{"m", static_cast<double>(m)},
                 {"n", static_cast<double>(n)},
                 {"sigma", sigma},
                 {"seed", static_cast<double>(seed)},
                 {"a_scale", a_scale}};
  return inst;
}

ProblemInstance toy_divergent() {
  Matrix H = Matrix::Zero(2, 2);
  H(0, 0) = 100.0;
  H(1, 1) = 1.0;
  ProblemInstance inst;
  inst.name = "toy";
  inst.x0 = Vector::Zero(2);
  inst.x0[0] = 1.0;
  inst.objective = std::make_shared<QuadraticFunction>(H, Vector::Zero(2));
  inst.refs.x_opt = Vector::Zero(2);
  inst.refs.x_sl = Vector::Zero(2);
  inst.refs.p_star = 0.0;
  inst.constants.mu = 1.0;
  inst.constants.L0_sq = 0.0;
  inst.constants.L1 = 200.0;
  inst.constants.M = 0.0;
  inst.constants.L = 100.0;
  inst.constants.sigma_sq = 0.0;
  return inst;
}

ProblemInstance gen_quadratic(Index n, double cond, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("gen_quadratic: n must be positive");
  if (!(cond >= 1.0)) throw std::invalid_argument("gen_quadratic: cond must be >= 1");
  std::mt19937_64 gen(seed);
  const Matrix G = draw_normal(gen, n, n);
  const Vector c = draw_normal(gen, n);
  const Matrix Q = Eigen::HouseholderQR<Matrix>(G).householderQ();
  Vector ev(n);
  for (Index i = 0; i < n; ++i) ev[i] = n == 1 ? 1.0 : 1.0 + (cond - 1.0) * static_cast<double>(i) / static_cast<double>(n - 1);
  Matrix H = Q * ev.asDiagonal() * Q.transpose();
  H = 0.5 * (H + H.transpose());

  ProblemInstance inst;
  inst.name = "quadratic";
  inst.x0 = Vector::Zero(n);
  inst.objective = std::make_shared<QuadraticFunction>(std::move(H), c);
  inst.refs.x_opt = c;
  inst.refs.x_sl = c;
  inst.refs.p_star = 0.0;
  // ||H (x - c)||^2 <= 2 L (f(x) - f(c)).
  inst.constants.mu = 1.0;
  inst.constants.L = n == 1 ? 1.0 : cond;
  inst.constants.L0_sq = 0.0;
  inst.constants.L1 = 2.0 * *inst.constants.L;
  inst.constants.M = 0.0;
  inst.constants.sigma_sq = 0.0;
  inst.params = {{"n", static_cast<double>(n)}, {"cond", cond}, {"seed", static_cast<double>(seed)}};
  return inst;
}

AssumptionCConstants assumption_c_constants(double M, double L, double sigma_sq, double slack) {
  if (!(M >= 0.0 && L >= 0.0 && sigma_sq >= 0.0 && slack >= 0.0)) {
    throw std::invalid_argument("assumption_c_constants: inputs must be nonnegative");
  }
  return {6.0 * M * M + sigma_sq + 6.0 * L * slack, 6.0 * L};
}

ProblemInstance strongly_convexify(const ProblemInstance& base, double eps, double D, const Vector& x0) {
  if (!(eps > 0.0 && D > 0.0)) throw std::invalid_argument("strongly_convexify: eps and D must be positive");
  const double kappa = eps / (D * D);
  ProblemInstance out;
  out.name = base.name + "_perturbed";
  out.x0 = base.x0;
  out.objective = std::make_shared<ProximallyPerturbed>(base.objective, kappa, x0);
  out.constraints = base.constraints;
  out.regularizer = base.regularizer;
  out.noise_sigma_sq = base.noise_sigma_sq;
  out.params = base.params;
  out.params["eps"] = eps;
  out.params["D"] = D;
  out.constants.mu = base.constants.mu.value_or(0.0) + kappa;
  if (base.refs.p_star && base.refs.x_opt) {
    const double p = *base.refs.p_star;
    out.refs.p_star_interval = std::make_pair(p, p + eps * (*base.refs.x_opt - x0).squaredNorm() / (2.0 * D * D));
  }
  // Lipschitz objective, deterministic oracle, m = 0: the smooth part of the
  // perturbed objective is minimized at the new optimum, so the slack term vanishes.
  if (base.m() == 0 && base.constants.M && base.constants.L.value_or(0.0) == 0.0 &&
      base.noise_sigma_sq == 0.0) {
    const auto c = assumption_c_constants(*base.constants.M, kappa, 0.0, 0.0);
    out.constants.L0_sq = c.L0_sq;
    out.constants.L1 = c.L1;
    out.constants.M = base.constants.M;
    out.constants.L = kappa;
    out.constants.sigma_sq = 0.0;
  }
  return out;
}

namespace {

struct FaceResult {
  bool ok = false;
  Vector u;
  Vector x;
};

Vector primal_of(const Vector& c, const std::vector<Vector>& a, const std::vector<int>& S, const Vector& u) {
  Vector x = c;
  double U = 1.0;
  for (std::size_t j = 0; j < S.size(); ++j) {
    x += u[static_cast<Index>(j)] * a[static_cast<std::size_t>(S[j])];
    U += u[static_cast<Index>(j)];
  }
  return x / U;
}

double dual_value(const Vector& c, const std::vector<Vector>& a, const std::vector<double>& rho,
                  const std::vector<int>& S, const Vector& u) {
  const Vector x = primal_of(c, a, S, u);
  double q = 0.5 * (x - c).squaredNorm();
  for (std::size_t j = 0; j < S.size(); ++j) {
    const auto s = static_cast<std::size_t>(S[j]);
    q += u[static_cast<Index>(j)] * (0.5 * (x - a[s]).squaredNorm() - rho[s]);
  }
  return q;
}

// Maximizes the concave dual over the face {u_t = 0, t not in S} by damped Newton.
FaceResult solve_face(const Vector& c, const std::vector<Vector>& a, const std::vector<double>& rho,
                      const std::vector<int>& S) {
  const auto k = static_cast<Index>(S.size());
  FaceResult res;
  Vector u = Vector::Ones(k);
  for (int it = 0; it < 500; ++it) {
    if (!(1.0 + u.sum() > 1e-12)) return res;
    const Vector x = primal_of(c, a, S, u);
    const double U = 1.0 + u.sum();
    Vector grad(k);
    Matrix G(k, k);
    for (Index i = 0; i < k; ++i) {
      const auto si = static_cast<std::size_t>(S[static_cast<std::size_t>(i)]);
      grad[i] = 0.5 * (x - a[si]).squaredNorm() - rho[si];
      for (Index j = 0; j < k; ++j) {
        const auto sj = static_cast<std::size_t>(S[static_cast<std::size_t>(j)]);
        G(i, j) = (x - a[si]).dot(x - a[sj]) / U;
      }
    }
    if (grad.norm() <= 1e-14 * (1.0 + (x - c).squaredNorm())) {
      res.ok = true;
      res.u = u;
      res.x = x;
      return res;
    }
    Eigen::LDLT<Matrix> ldlt(G);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) return res;
    Vector step = ldlt.solve(grad);  // ascent direction for -G Hessian
    if (!step.allFinite()) return res;
    const double q0 = dual_value(c, a, rho, S, u);
    double t = 1.0;
    bool moved = false;
    for (int ls = 0; ls < 60; ++ls) {
      const Vector trial = u + t * step;
      if (1.0 + trial.sum() > 1e-12 && dual_value(c, a, rho, S, trial) >= q0 - 1e-15 * std::abs(q0)) {
        u = trial;
        moved = true;
        break;
      }
      t *= 0.5;
    }
    if (!moved) return res;
  }
  return res;
}

}  // namespace

KktSolution solve_ball_kkt(const Vector& c, const std::vector<Vector>& centers,
                           const std::vector<double>& rhos) {
  const int m = static_cast<int>(centers.size());
  if (m > 12) throw std::invalid_argument("solve_ball_kkt: at most 12 constraints");
  if (rhos.size() != centers.size()) throw std::invalid_argument("solve_ball_kkt: size mismatch");

  auto feasible_except = [&](const Vector& x, const std::vector<int>& S) {
    for (int t = 0; t < m; ++t) {
      if (std::find(S.begin(), S.end(), t) != S.end()) continue;
      if (0.5 * (x - centers[static_cast<std::size_t>(t)]).squaredNorm() - rhos[static_cast<std::size_t>(t)] >
          1e-12 * (1.0 + rhos[static_cast<std::size_t>(t)])) {
        return false;
      }
    }
    return true;
  };

  // Faces in order of increasing size; the first KKT point found is optimal.
  for (int size = 0; size <= std::min(m, static_cast<int>(c.size()) + 1); ++size) {
    for (unsigned mask = 0; mask < (1u << m); ++mask) {
      if (__builtin_popcount(mask) != size) continue;
      std::vector<int> S;
      for (int t = 0; t < m; ++t)
        if (mask & (1u << t)) S.push_back(t);
      Vector x;
      Vector uS;
      if (S.empty()) {
        x = c;
        uS = Vector();
      } else {
        const auto face = solve_face(c, centers, rhos, S);
        if (!face.ok || (face.u.array() < 0.0).any()) continue;
        x = face.x;
        uS = face.u;
      }
      if (!feasible_except(x, S)) continue;
      KktSolution sol;
      sol.x = x;
      sol.u = Vector::Zero(m);
      for (std::size_t j = 0; j < S.size(); ++j) sol.u[S[j]] = uS[static_cast<Index>(j)];
      sol.value = 0.5 * (x - c).squaredNorm();
      return sol;
    }
  }
  throw std::runtime_error("solve_ball_kkt: no KKT point found");
}

ProblemInstance make_ball_constrained(const Vector& c, const std::vector<Vector>& centers,
                                      const std::vector<double>& rhos, const Vector& x_sl,
                                      const Vector& x0) {
  const Index n = c.size();
  ProblemInstance inst;
  inst.name = "constrained";
  inst.x0 = x0;
  inst.objective = std::make_shared<QuadraticFunction>(Matrix::Identity(n, n), c);
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < centers.size(); ++s) {
    inst.constraints.push_back(std::make_shared<BallConstraint>(centers[s], rhos[s]));
    worst = std::max(worst, inst.constraints.back()->value(x_sl));
  }
  if (!(worst < 0.0)) throw std::invalid_argument("make_ball_constrained: x_sl is not a Slater point");

  const auto kkt = solve_ball_kkt(c, centers, rhos);
  inst.refs.x_opt = kkt.x;
  inst.refs.x_sl = x_sl;
  inst.refs.p_star = kkt.value;
  inst.refs.kkt_multipliers = kkt.u;

  double slack = 0.0;
  for (const Vector* y : {&kkt.x, &x_sl}) {
    slack = std::max(slack, 0.5 * (*y - c).squaredNorm());
    for (const auto& a : centers) slack = std::max(slack, 0.5 * (*y - a).squaredNorm());
  }
  const auto ac = assumption_c_constants(0.0, 1.0, 0.0, slack);
  inst.constants.mu = 1.0;
  inst.constants.L0_sq = ac.L0_sq;
  inst.constants.L1 = ac.L1;
  inst.constants.M = 0.0;
  inst.constants.L = 1.0;
  inst.constants.sigma_sq = 0.0;
  inst.constants.tau_sl = -worst;
  inst.constants.h_sl_gap = 0.5 * (x_sl - c).squaredNorm();
  inst.params = {{"n", static_cast<double>(n)}, {"m", static_cast<double>(centers.size())}};
  return inst;
}

ProblemInstance gen_constrained(Index n, Index m_constraints, std::uint64_t seed) {
  if (n < 1 || m_constraints < 1) throw std::invalid_argument("gen_constrained: n and m must be positive");
  if (n > 10) throw std::invalid_argument("gen_constrained: the KKT oracle supports n <= 10");
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int attempt = 0; attempt < 100; ++attempt) {
    std::vector<Vector> centers;
    for (Index s = 0; s < m_constraints; ++s) centers.push_back(draw_normal(gen, n));
    const Vector c = 3.0 * draw_normal(gen, n);
    Vector x_sl = Vector::Zero(n);
    for (const auto& a : centers) x_sl += a;
    x_sl /= static_cast<double>(m_constraints);
    std::vector<double> rhos;
    for (const auto& a : centers) rhos.push_back(0.5 * (x_sl - a).squaredNorm() + 0.1 + unif(gen));
    try {
      auto inst = make_ball_constrained(c, centers, rhos, x_sl, c);
      inst.params["seed"] = static_cast<double>(seed);
      return inst;
    } catch (const std::runtime_error&) {
      continue;  // KKT oracle failed on this draw
    }
  }
  throw std::runtime_error("gen_constrained: no valid configuration");
}

}  // namespace pdsg
