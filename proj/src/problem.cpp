#include <pdsg/problem.hpp>

#include <cmath>
#include <random>
#include <stdexcept>

namespace pdsg {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Minimal URBG over a splitmix64 stream keyed by (seed, k).
class CounterStream {
 public:
  using result_type = std::uint64_t;
  CounterStream(std::uint64_t seed, std::uint64_t k)
      : state_(splitmix64(seed ^ splitmix64(k ^ 0x5851f42d4c957f2dULL))) {}
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }
  result_type operator()() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return splitmix64(state_);
  }

 private:
  std::uint64_t state_;
};

}  // namespace

double ProblemInstance::objective_value(const Vector& x) const {
  return objective->value(x) + regularizer.value(x);
}

bool ProblemInstance::feasible(const Vector& x) const {
  for (const auto& c : constraints) {
    if (c->value(x) > 0.0) return false;
  }
  return true;
}

const Vector& ProblemInstance::x_opt() const {
  if (!refs.x_opt) throw std::logic_error(name + ": no x_opt reference");
  return *refs.x_opt;
}

const Vector& ProblemInstance::x_sl() const {
  if (refs.x_sl) return *refs.x_sl;
  if (m() == 0) return x_opt();
  throw std::logic_error(name + ": no x_sl reference");
}

Vector ProblemInstance::reference_subgradient(bool opt) const {
  const auto& supplied = opt ? refs.n_xopt : refs.n_xsl;
  if (supplied) return *supplied;
  const Vector& y = opt ? x_opt() : x_sl();
  if (regularizer.smooth_at(y)) return Vector::Zero(y.size());
  if (!opt && m() == 0 && refs.n_xopt) return *refs.n_xopt;
  throw std::logic_error(name + ": r is nonsmooth at the reference point and n_y was not supplied");
}

Index switching_select(const Vector& x, const ProblemInstance& instance) {
  for (Index s = 0; s < instance.m(); ++s) {
    if (instance.constraints[static_cast<std::size_t>(s)]->value(x) > 0.0) return s + 1;
  }
  return 0;
}

double component_value(const ProblemInstance& instance, Index s, const Vector& x) {
  if (s == 0) return instance.objective->value(x);
  return instance.constraints.at(static_cast<std::size_t>(s - 1))->value(x);
}

Vector noise_sample(std::uint64_t seed, std::uint64_t k, Index n, double sigma_sq) {
  CounterStream gen(seed, k);
  std::normal_distribution<double> dist(0.0, std::sqrt(sigma_sq / static_cast<double>(n)));
  Vector out(n);
  for (Index i = 0; i < n; ++i) out[i] = dist(gen);
  return out;
}

double oracle(const ProblemInstance& instance, Index s, const Vector& x, std::uint64_t seed,
              std::uint64_t k, Vector& g) {
  if (s == 0) {
    const double v = instance.objective->value_and_subgradient(x, g);
    if (instance.noise_sigma_sq > 0.0) g += noise_sample(seed, k, x.size(), instance.noise_sigma_sq);
    return v;
  }
  return instance.constraints.at(static_cast<std::size_t>(s - 1))->value_and_subgradient(x, g);
}

}  // namespace pdsg
