#include "qfl/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qfl {

double Rng::normal() {
  if (have_cached_normal_) {
    have_cached_normal_ = false;
    return cached_normal_;
  }
  double u1 = 0.0;
  do {
    u1 = uniform01();
  } while (u1 <= 0.0);
  const double u2 = uniform01();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double t = 2.0 * std::numbers::pi * u2;
  cached_normal_ = r * std::sin(t);
  have_cached_normal_ = true;
  return r * std::cos(t);
}

double Rng::gamma(double alpha) {
  if (!(alpha > 0.0)) {
    throw std::invalid_argument("gamma: alpha must be positive");
  }
  if (alpha < 1.0) {
    // Boost to shape alpha + 1, then scale back.
    double u = 0.0;
    do {
      u = uniform01();
    } while (u <= 0.0);
    return gamma(alpha + 1.0) * std::pow(u, 1.0 / alpha);
  }
  const double d = alpha - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x = 0.0;
    double v = 0.0;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform01();
    if (u < 1.0 - 0.0331 * x * x * x * x) {
      return d * v;
    }
    if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) {
      return d * v;
    }
  }
}

std::vector<double> Rng::dirichlet(double alpha, std::size_t n) {
  std::vector<double> w(n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = gamma(alpha);
    total += w[i];
  }
  if (total <= 0.0) {
    // All draws underflowed (possible only for extremely small alpha).
    for (auto& x : w) x = 1.0 / static_cast<double>(n);
    return w;
  }
  for (auto& x : w) x /= total;
  return w;
}

}  // namespace qfl
