#include <pdsg/schedules.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace pdsg {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

// Exact sum_{j=1}^{N} j^p for small integer p.
bool faulhaber(double p, long double N, long double& out) {
  if (p == 0.0) {
    out = N;
  } else if (p == 1.0) {
    out = N * (N + 1) / 2;
  } else if (p == 2.0) {
    out = N * (N + 1) * (2 * N + 1) / 6;
  } else if (p == 3.0) {
    const long double t = N * (N + 1) / 2;
    out = t * t;
  } else if (p == 4.0) {
    out = N * (N + 1) * (2 * N + 1) * (3 * N * N + 3 * N - 1) / 30;
  } else {
    return false;
  }
  return true;
}

bool lambda_defined(ScheduleKind kind) {
  switch (kind) {
    case ScheduleKind::uniform:
    case ScheduleKind::linear:
    case ScheduleKind::poly:
    case ScheduleKind::optimized:
      return true;
    default:
      return false;
  }
}

double poly_exponent(const ScheduleSpec& s) {
  switch (s.kind) {
    case ScheduleKind::uniform: return 0.0;
    case ScheduleKind::linear: return 1.0;
    default: return s.p;
  }
}

constexpr long double kRenormalizeAbove = 1e300L;

}  // namespace

std::vector<double> lambda_from_alpha(std::span<const double> alphas, double lambda0,
                                      double beta_bar, double mu) {
  require(!alphas.empty(), "lambda_from_alpha: empty stepsize sequence");
  require(mu > 0.0, "lambda_from_alpha: mu must be positive");
  require(lambda0 > 0.0, "lambda_from_alpha: lambda0 must be positive");
  require(beta_bar >= 0.0, "lambda_from_alpha: beta_bar must be nonnegative");
  for (double a : alphas) require(a > 0.0, "lambda_from_alpha: stepsizes must be positive");
  const double expected0 = lambda0 / (mu * lambda0 + beta_bar);
  require(std::abs(alphas[0] - expected0) <= 1e-12 * expected0,
          "lambda_from_alpha: alpha_0 inconsistent with lambda0 and beta_bar");

  std::vector<double> out(alphas.size());
  long double prev = lambda0;
  out[0] = lambda0;
  for (std::size_t k = 1; k < alphas.size(); ++k) {
    const long double a = alphas[k];
    require(mu * a < 1.0L, "lambda_from_alpha: alpha_k >= 1/mu for k >= 1");
    prev = a / (1.0L - mu * a) * (prev / static_cast<long double>(alphas[k - 1]));
    out[k] = static_cast<double>(prev);
  }
  return out;
}

std::vector<double> alpha_from_lambda(std::span<const double> lambdas, double beta_bar, double mu) {
  require(!lambdas.empty(), "alpha_from_lambda: empty weight sequence");
  require(mu >= 0.0 && beta_bar >= 0.0, "alpha_from_lambda: mu and beta_bar must be nonnegative");
  require(mu > 0.0 || beta_bar > 0.0, "alpha_from_lambda: mu and beta_bar cannot both be zero");
  std::vector<double> out(lambdas.size());
  long double sum = 0.0L;
  for (std::size_t k = 0; k < lambdas.size(); ++k) {
    require(lambdas[k] > 0.0, "alpha_from_lambda: weights must be positive");
    sum += lambdas[k];
    out[k] = static_cast<double>(lambdas[k] / (mu * sum + beta_bar));
  }
  return out;
}

WeightStep optimized_next_weight(std::span<const double> lambdas, std::span<const double> alphas,
                                 double mu, double beta_bar) {
  require(!lambdas.empty(), "optimized_next_weight: prefix length must be at least 1");
  require(lambdas.size() == alphas.size(), "optimized_next_weight: length mismatch");
  require(mu > 0.0, "optimized_next_weight: mu must be positive");
  long double s = 0.0L, sa = 0.0L;
  for (std::size_t k = 0; k < lambdas.size(); ++k) {
    s += lambdas[k];
    sa += static_cast<long double>(lambdas[k]) * alphas[k];
  }
  const long double denom = 2.0L / mu * s - sa;
  if (!(denom > 0.0L)) throw DegenerateError("optimized_next_weight: nonpositive normalizer");
  const long double lam = s * sa / denom;
  const long double alpha = lam / (mu * (s + lam) + beta_bar);
  return {static_cast<double>(lam), static_cast<double>(alpha)};
}

double rate_bound(std::span<const double> lambdas, std::span<const double> alphas, double L0_sq,
                  double C0) {
  require(!lambdas.empty(), "rate_bound: prefix length must be at least 1");
  require(lambdas.size() == alphas.size(), "rate_bound: length mismatch");
  require(L0_sq >= 0.0 && C0 >= 0.0, "rate_bound: L0_sq and C0 must be nonnegative");
  long double s = 0.0L, sa = 0.0L;
  for (std::size_t k = 0; k < lambdas.size(); ++k) {
    s += lambdas[k];
    sa += static_cast<long double>(lambdas[k]) * alphas[k];
  }
  return static_cast<double>((L0_sq * sa + C0) / s);
}

std::string to_string(ScheduleKind kind) {
  switch (kind) {
    case ScheduleKind::uniform: return "uniform";
    case ScheduleKind::linear: return "linear";
    case ScheduleKind::poly: return "poly";
    case ScheduleKind::optimized: return "optimized";
    case ScheduleKind::smooth: return "smooth";
    case ScheduleKind::explicit_alpha: return "explicit";
    case ScheduleKind::capped: return "capped";
  }
  return "unknown";
}

ScheduleKind parse_schedule_kind(const std::string& name) {
  for (auto k : {ScheduleKind::uniform, ScheduleKind::linear, ScheduleKind::poly,
                 ScheduleKind::optimized, ScheduleKind::smooth, ScheduleKind::explicit_alpha,
                 ScheduleKind::capped}) {
    if (to_string(k) == name) return k;
  }
  throw std::invalid_argument("unknown schedule kind: " + name);
}

// ---------------------------------------------------------------------------
// ScheduleCursor

ScheduleCursor::ScheduleCursor(std::shared_ptr<const ScheduleSpec> spec) : spec_(std::move(spec)) {
  const auto& s = *spec_;
  if (lambda_defined(s.kind)) {
    set_from_lambda(s.kind == ScheduleKind::optimized ? s.lambda0 : 1.0L);
  } else {
    lambda_ = s.lambda0;
    sum_ = lambda_;
    alpha_ = alpha_rule(0);
    sum_la_ = lambda_ * alpha_;
  }
}

double ScheduleCursor::alpha_rule(std::size_t k) const {
  const auto& s = *spec_;
  switch (s.kind) {
    case ScheduleKind::smooth:
      return k == 0 ? 1.0 / s.mu : 1.0 / s.L1;
    case ScheduleKind::capped:
      return k == 0 ? 1.0 / s.mu : std::min(1.0 / s.L1, 2.0 / (s.mu * (static_cast<double>(k) + 2.0)));
    case ScheduleKind::explicit_alpha:
      if (k >= s.alphas.size()) throw std::out_of_range("explicit schedule exhausted");
      return s.alphas[k];
    default:
      throw std::logic_error("alpha_rule on a weight-defined schedule");
  }
}

void ScheduleCursor::set_from_lambda(long double lambda_scaled) {
  const auto& s = *spec_;
  lambda_ = lambda_scaled;
  long double exact = 0.0L;
  if (s.kind != ScheduleKind::optimized && shift_ == 0.0 &&
      faulhaber(poly_exponent(s), static_cast<long double>(k_ + 1), exact)) {
    sum_ = exact;
  } else {
    sum_ += lambda_;
  }
  const long double beta = s.beta_bar * std::exp(static_cast<long double>(-shift_));
  alpha_ = static_cast<double>(lambda_ / (s.mu * sum_ + beta));
  sum_la_ += lambda_ * static_cast<long double>(alpha_);
}

void ScheduleCursor::renormalize() {
  if (sum_ <= kRenormalizeAbove) return;
  const long double f = sum_;
  lambda_ /= f;
  sum_ /= f;
  sum_la_ /= f;
  shift_ += static_cast<double>(std::log(f));
}

void ScheduleCursor::advance() {
  const auto& s = *spec_;
  ++k_;
  switch (s.kind) {
    case ScheduleKind::uniform:
    case ScheduleKind::linear:
    case ScheduleKind::poly: {
      const long double base = std::pow(static_cast<long double>(k_ + 1), poly_exponent(s));
      set_from_lambda(base * std::exp(static_cast<long double>(-shift_)));
      break;
    }
    case ScheduleKind::optimized: {
      const long double denom = 2.0L / s.mu * sum_ - sum_la_;
      if (!(denom > 0.0L)) throw DegenerateError("optimized schedule: nonpositive normalizer");
      set_from_lambda(sum_ * sum_la_ / denom);
      break;
    }
    default: {
      const double a = alpha_rule(k_);
      if (!(a > 0.0) || !(s.mu * a < 1.0)) {
        throw std::invalid_argument("schedule stepsize must lie in (0, 1/mu) after the first step");
      }
      lambda_ = static_cast<long double>(a) / (1.0L - s.mu * static_cast<long double>(a)) *
                (lambda_ / static_cast<long double>(alpha_));
      alpha_ = a;
      sum_ += lambda_;
      sum_la_ += lambda_ * static_cast<long double>(alpha_);
      break;
    }
  }
  renormalize();
}

double ScheduleCursor::log_lambda() const {
  return static_cast<double>(std::log(lambda_)) + shift_;
}

double ScheduleCursor::lambda() const { return std::exp(log_lambda()); }

double ScheduleCursor::weight_ratio() const { return static_cast<double>(lambda_ / sum_); }

double ScheduleCursor::log_sum_lambda() const {
  return static_cast<double>(std::log(sum_)) + shift_;
}

long double ScheduleCursor::sum_lambda() const {
  return sum_ * std::exp(static_cast<long double>(shift_));
}

long double ScheduleCursor::sum_lambda_alpha() const {
  return sum_la_ * std::exp(static_cast<long double>(shift_));
}

// ---------------------------------------------------------------------------
// Schedule

Schedule::Schedule(ScheduleSpec spec) {
  require(spec.mu > 0.0, "schedule: mu must be positive");
  require(spec.beta_bar >= 0.0, "schedule: beta_bar must be nonnegative");
  require(spec.lambda0 > 0.0, "schedule: lambda0 must be positive");
  switch (spec.kind) {
    case ScheduleKind::poly:
      require(spec.p >= 0.0, "schedule: poly exponent must be nonnegative");
      break;
    case ScheduleKind::smooth:
      require(spec.L1 > spec.mu, "smooth schedule requires L1 > mu");
      require(spec.beta_bar == 0.0, "smooth schedule requires beta_bar = 0");
      break;
    case ScheduleKind::capped:
      require(spec.L1 > 0.0, "capped schedule requires L1 > 0");
      require(spec.beta_bar == 0.0, "capped schedule requires beta_bar = 0");
      break;
    case ScheduleKind::explicit_alpha: {
      require(!spec.alphas.empty(), "explicit schedule requires at least one stepsize");
      for (std::size_t k = 0; k < spec.alphas.size(); ++k) {
        require(spec.alphas[k] > 0.0, "explicit schedule: stepsizes must be positive");
        if (k > 0) require(spec.mu * spec.alphas[k] < 1.0, "explicit schedule: alpha_k >= 1/mu");
      }
      const double expected0 = spec.lambda0 / (spec.mu * spec.lambda0 + spec.beta_bar);
      require(std::abs(spec.alphas[0] - expected0) <= 1e-12 * expected0,
              "explicit schedule: alpha_0 inconsistent with lambda0 and beta_bar");
      break;
    }
    default:
      break;
  }
  spec_ = std::make_shared<const ScheduleSpec>(std::move(spec));
}

Schedule Schedule::uniform(double mu, double beta_bar) {
  ScheduleSpec s;
  s.kind = ScheduleKind::uniform;
  s.mu = mu;
  s.beta_bar = beta_bar;
  return Schedule(std::move(s));
}

Schedule Schedule::linear(double mu, double beta_bar) {
  ScheduleSpec s;
  s.kind = ScheduleKind::linear;
  s.mu = mu;
  s.beta_bar = beta_bar;
  return Schedule(std::move(s));
}

Schedule Schedule::poly(double p, double mu, double beta_bar) {
  ScheduleSpec s;
  s.kind = ScheduleKind::poly;
  s.mu = mu;
  s.beta_bar = beta_bar;
  s.p = p;
  return Schedule(std::move(s));
}

Schedule Schedule::optimized(double mu, double beta_bar, double lambda0) {
  ScheduleSpec s;
  s.kind = ScheduleKind::optimized;
  s.mu = mu;
  s.beta_bar = beta_bar;
  s.lambda0 = lambda0;
  return Schedule(std::move(s));
}

Schedule Schedule::smooth(double mu, double L1) {
  ScheduleSpec s;
  s.kind = ScheduleKind::smooth;
  s.mu = mu;
  s.L1 = L1;
  return Schedule(std::move(s));
}

Schedule Schedule::capped(double mu, double L1) {
  ScheduleSpec s;
  s.kind = ScheduleKind::capped;
  s.mu = mu;
  s.L1 = L1;
  return Schedule(std::move(s));
}

Schedule Schedule::explicit_alphas(std::vector<double> alphas, double mu, double beta_bar,
                                   double lambda0) {
  ScheduleSpec s;
  s.kind = ScheduleKind::explicit_alpha;
  s.mu = mu;
  s.beta_bar = beta_bar;
  s.lambda0 = lambda0;
  s.alphas = std::move(alphas);
  return Schedule(std::move(s));
}

std::string Schedule::name() const {
  if (spec_->kind != ScheduleKind::poly) return to_string(spec_->kind);
  std::ostringstream os;
  os << "poly" << spec_->p;
  return os.str();
}

std::vector<ScheduleTerm> Schedule::prefix(std::size_t T) const {
  std::vector<ScheduleTerm> out;
  out.reserve(T);
  auto c = cursor();
  for (std::size_t k = 0; k < T; ++k) {
    if (k > 0) c.advance();
    out.push_back(c.term());
  }
  return out;
}

double rate_bound(const Schedule& schedule, std::size_t T, double L0_sq, double C0) {
  require(T >= 1, "rate_bound: prefix length must be at least 1");
  require(L0_sq >= 0.0 && C0 >= 0.0, "rate_bound: L0_sq and C0 must be nonnegative");
  auto c = schedule.cursor();
  for (std::size_t k = 1; k < T; ++k) c.advance();
  // Ratio form keeps exponential schedules finite.
  const double ratio = static_cast<double>(c.sum_lambda_alpha() / c.sum_lambda());
  const double c0_term = C0 == 0.0 ? 0.0 : std::exp(std::log(C0) - c.log_sum_lambda());
  return L0_sq * ratio + c0_term;
}

}  // namespace pdsg
