#pragma once

#include <cmath>
#include <numbers>
#include <span>
#include <vector>

// Independent reference values used across the test suites. Nothing here
// calls into the library.
namespace oracle {

inline constexpr double pi = std::numbers::pi;

/// Largest eigenvalue alpha^2 = beta^2 - pi^2/4 of the constant-ratio channel problem.
inline double sine_alpha_sq(double beta) { return beta * beta - pi * pi / 4.0; }

/// Same eigenvalue for the three-point discretization on n interior nodes.
inline double sine_alpha_sq_discrete(double beta, int n) {
  const double h = 2.0 / (n + 1);
  const double s = std::sin(pi * h / 4.0);
  return beta * beta - 4.0 * s * s / (h * h);
}

/// Bound state of the square well of depth (pi/4)^2 on |y| < 2: mu tan(2 mu) = sqrt(w^2 - mu^2).
inline double square_well_alpha0() {
  const double w = pi / 4.0;
  double lo = 1e-9, hi = w - 1e-12;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double f = mid * std::tan(2.0 * mid) - std::sqrt(w * w - mid * mid);
    (f < 0.0 ? lo : hi) = mid;
  }
  const double mu = 0.5 * (lo + hi);
  return std::sqrt(w * w - mu * mu);
}

/// Discrete bound state of the well on (-A, A) by the transfer matrix of the
/// three-point scheme with spacing h, ends at +-A. Returns beta^2.
inline double square_well_discrete(double A, double h, double depth_sq, double half_well) {
  const int n = static_cast<int>(std::lround(2.0 * A / h)) - 1;
  auto last = [&](double beta_sq) {
    double prev = 0.0, cur = 1.0;
    for (int i = 1; i <= n; ++i) {
      const double y = -A + i * h;
      const double v = std::abs(y) < half_well ? -depth_sq : 0.0;
      const double next = (2.0 + h * h * (v + beta_sq)) * cur - prev;
      prev = cur;
      cur = next;
    }
    return cur;  // value at y = A, zero for an eigenvalue
  };
  double lo = 1e-8, hi = depth_sq;
  const double flo = last(lo);
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    ((last(mid) > 0.0) == (flo > 0.0) ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

/// p.v. int_{-1}^{1} e^x / x dx = 2 Shi(1).
inline constexpr double pv_exp = 2.0 * 1.0572508753757285;

inline std::vector<double> sine_mode(std::span<const double> y, int m) {
  std::vector<double> out(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) out[i] = std::sin(m * pi * (y[i] + 1.0) / 2.0);
  return out;
}

inline double slope(std::span<const double> x, std::span<const double> y) {
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) mx += x[i], my += y[i];
  mx /= x.size();
  my /= y.size();
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) sxy += (x[i] - mx) * (y[i] - my), sxx += (x[i] - mx) * (x[i] - mx);
  return sxy / sxx;
}

}  // namespace oracle
