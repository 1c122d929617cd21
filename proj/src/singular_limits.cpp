#include "shearinst/singular_limits.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>

#include "shearinst/error.hpp"

namespace shearinst {
namespace {

std::atomic<bool> lambda_sign_fault{false};

double l2_norm_sq(const NeutralMode& mode) {
  double s = 0.0;
  const auto w = mode.grid.weights();
  for (std::size_t i = 0; i < mode.phi.size(); ++i) s += w[i] * mode.phi[i] * mode.phi[i];
  return s;
}

GradedQuadratureOptions mode_options(const ShearProfile& profile, const NeutralMode& mode) {
  GradedQuadratureOptions opts;
  opts.breakpoints.assign(mode.grid.nodes().begin(), mode.grid.nodes().end());
  for (double b : profile_breakpoints(profile)) opts.breakpoints.push_back(b);
  return opts;
}

// Two-point Richardson with the order measured from the last three samples.
cplx richardson(const std::vector<cplx>& v, const std::vector<double>& t, double& order) {
  const std::size_t k = v.size() - 1;
  const double r = t[k - 1] / t[k];
  order = 1.0;
  if (v.size() >= 3) {
    const double d1 = std::abs(v[k - 1] - v[k - 2]);
    const double d2 = std::abs(v[k] - v[k - 1]);
    if (d1 > 0.0 && d2 > 0.0) order = std::clamp(std::log(d1 / d2) / std::log(t[k - 2] / t[k - 1]), 0.5, 3.0);
  }
  return v[k] + (v[k] - v[k - 1]) / (std::pow(r, order) - 1.0);
}

}  // namespace

std::vector<double> profile_breakpoints(const ShearProfile& profile) {
  struct Visitor {
    std::vector<double> operator()(const SineFamily&) const { return {}; }
    std::vector<double> operator()(const CustomFamily&) const { return {}; }
    std::vector<double> operator()(const SheetBaseFamily&) const { return {-2.0, 2.0}; }
    std::vector<double> operator()(const RescaledFamily& r) const {
      std::vector<double> out = profile_breakpoints(*r.base);
      for (double& b : out) b /= r.k;
      return out;
    }
  };
  return std::visit(Visitor{}, profile.family());
}

double shifted_crossing(const ShearProfile& profile, cplx c) {
  const double target = c.real();
  const double a = profile.a();
  const Interval& d = profile.domain();
  const double step = d.length() / 4096.0;
  const double s = profile.eval(a, 1) > 0.0 ? 1.0 : -1.0;
  double lo = a, hi = a;
  while (lo - step >= d.lo && s * profile.eval(lo - step, 1) > 0.0) lo -= step;
  while (hi + step <= d.hi && s * profile.eval(hi + step, 1) > 0.0) hi += step;
  const double ulo = profile.eval(lo, 0), uhi = profile.eval(hi, 0);
  if (target < std::min(ulo, uhi) || target > std::max(ulo, uhi))
    fail(ErrorCode::NoCrossing, "Re c = " + std::to_string(target) + " outside the local range of U");
  if (target == 0.0) return a;
  double y = a;
  for (int it = 0; it < 200; ++it) {
    const double f = profile.eval(y, 0) - target;
    if (std::abs(f) <= 1e-14) return y;
    if (s * f > 0.0) hi = y; else lo = y;
    double next = y - f / profile.eval(y, 1);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == y) return y;
    y = next;
  }
  require(std::abs(profile.eval(y, 0) - target) <= 1e-12, ErrorCode::NoConvergence, "crossing search stalled");
  return y;
}

cplx gamma(const ShearProfile& profile, const NeutralMode& mode, cplx c) {
  require(c.imag() != 0.0, ErrorCode::InvalidArgument, "gamma needs Im c != 0");
  const GridSpline phi(mode.grid, mode.phi);
  const double a_prime = shifted_crossing(profile, c);
  ScalarFn f = [&](double y) {
    const double p = phi(y);
    return cplx(profile.continuous_ratio(y) * p * p) / (profile.eval(y, 0) - c);
  };
  return near_singular_integral(f, a_prime, std::abs(c.imag()), mode.grid.interval(), mode_options(profile, mode)) /
         l2_norm_sq(mode);
}

void set_lambda_sign_fault(bool enabled) { lambda_sign_fault.store(enabled); }

std::vector<double> tau_decades(int decades) {
  std::vector<double> out;
  for (int j = 1; j <= decades; ++j) out.push_back(std::pow(10.0, -j));
  return out;
}

SpectralCoefficientLambda lambda_limit(const ShearProfile& profile, const NeutralMode& mode,
                                       std::span<const double> tau_sequence) {
  require(tau_sequence.size() >= 2, ErrorCode::InvalidRange, "tau sequence needs at least two entries");
  for (std::size_t i = 1; i < tau_sequence.size(); ++i)
    require(tau_sequence[i] < tau_sequence[i - 1], ErrorCode::InvalidRange, "tau sequence must decrease");
  require(tau_sequence.front() / tau_sequence.back() >= 100.0 * (1.0 - 1e-12), ErrorCode::InvalidRange,
          "tau sequence must span at least two decades");
  require(tau_sequence.back() >= 1e-5, ErrorCode::InvalidRange, "smallest tau must be >= 1e-5");

  SpectralCoefficientLambda out;
  std::vector<cplx> values;
  std::vector<double> taus(tau_sequence.begin(), tau_sequence.end());
  for (double tau : taus) {
    values.push_back(gamma(profile, mode, cplx(0.0, tau)));
    out.samples.push_back({tau, values.back()});
  }
  const cplx lambda = richardson(values, taus, out.observed_order);
  out.C = lambda.real();
  out.imag = lambda.imag();
  out.extrapolation_error = std::abs(lambda - values.back());

  const double nrm2 = l2_norm_sq(mode);
  const double a = profile.a();
  const GridSpline phi(mode.grid, mode.phi);
  const double pa = phi(a);
  out.imag_closed_form = std::numbers::pi * profile.continuous_ratio(a) * pa * pa / std::abs(profile.eval(a, 1)) / nrm2;
  const double du = profile.eval(a, 1);
  const double limit = -profile.eval(a, 3) / (du * du);
  const double near = 1e-7 * mode.grid.interval().length();
  ScalarFn f = [&](double y) {
    const double p = phi(y);
    if (std::abs(y - a) < near) return cplx(limit * p * p);
    const double u = profile.eval(y, 0);
    return cplx(-profile.eval(y, 2) * p * p * (y - a) / (u * u));
  };
  out.C_closed_form = pv_integral(f, a, mode.grid.interval(), mode_options(profile, mode)).real() / nrm2;

  if (lambda_sign_fault.load()) out.imag = -out.imag;
  if (out.imag <= 0.0) fail(ErrorCode::ImagNotPositive, "extrapolated Im lambda = " + std::to_string(out.imag));
  return out;
}

PlemeljCheck plemelj_limit_check(const ScalarFn& f, Interval interval,
                                 std::span<const std::pair<double, double>> delta_eps) {
  require(interval.lo < 0.0 && interval.hi > 0.0, ErrorCode::InvalidArgument, "0 must lie inside the interval");
  require(delta_eps.size() >= 2, ErrorCode::InvalidRange, "plemelj check needs at least two steps");
  PlemeljCheck out;
  GradedQuadratureOptions pv_opts;
  out.target = cplx(0.0, -std::numbers::pi) * f(0.0) + pv_integral(f, 0.0, interval, pv_opts);

  std::vector<cplx> values;
  std::vector<double> eps_list;
  for (const auto& [delta, eps] : delta_eps) {
    require(eps > 0.0, ErrorCode::InvalidArgument, "plemelj check needs eps > 0");
    GradedQuadratureOptions opts;
    opts.singular_points = {-delta, 0.0};
    const cplx shift(delta, eps);
    const QuadratureResult q = graded_integral([&](double x) { return f(x) / (x + shift); }, interval, opts);
    if (!q.converged && q.last_difference > opts.fail_tol)
      fail(ErrorCode::NoConvergence, "plemelj quadrature hit the depth cap");
    values.push_back(q.value);
    eps_list.push_back(eps);
    out.steps.push_back({delta, eps, q.value, std::abs(q.value - out.target)});
  }
  double order = 1.0;
  out.extrapolated = richardson(values, eps_list, order);
  out.finest_discrepancy = out.steps.back().discrepancy;

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (const auto& s : out.steps) {
    if (s.discrepancy <= 0.0) continue;
    const double x = std::log(s.eps), y = std::log(s.discrepancy);
    sx += x; sy += y; sxx += x * x; sxy += x * y;
    ++m;
  }
  if (m >= 2) out.observed_exponent = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  return out;
}

ApproximationDefect approximation_defect(const ShearProfile& profile, cplx c, const Grid& grid) {
  require(c.imag() > 0.0, ErrorCode::InvalidArgument, "approximation defect needs Im c > 0");
  const double a_prime = shifted_crossing(profile, c);
  const double slope = profile.eval(a_prime, 1);
  ApproximationDefect out{0.0, 0.0};
  for (double y : grid.nodes()) {
    const cplx exact = 1.0 / (profile.eval(y, 0) - c);
    const cplx linear = 1.0 / cplx(slope * (y - a_prime), -c.imag());
    const cplx d = exact - linear;
    out.sup_abs = std::max(out.sup_abs, std::abs(d));
    out.sup_imag = std::max(out.sup_imag, std::abs(d.imag()));
  }
  return out;
}

SineGrowth sine_coefficient_growth(const ShearProfile& profile, cplx c, int m_max, const Grid& grid, int tail_start) {
  require(m_max >= 1, ErrorCode::InvalidRange, "m_max must be >= 1");
  require(c.imag() > 0.0, ErrorCode::InvalidArgument, "sine growth needs Im c > 0");
  CVec f(grid.n());
  for (int i = 0; i < grid.n(); ++i) f[i] = 1.0 / (profile.eval(grid.nodes()[i], 0) - c);
  SineGrowth out;
  out.tail_start = tail_start;
  for (int m = 1; m <= m_max; ++m) {
    const double a = std::abs(fourier_sine_coefficient(f, m, grid));
    const double r = a / std::log(1.0 + m);
    out.rows.push_back({m, a, r});
    out.max_ratio = std::max(out.max_ratio, r);
    if (m >= tail_start) out.tail_max_ratio = std::max(out.tail_max_ratio, r);
  }
  return out;
}

}  // namespace shearinst
