#include "shearinst/dispersion.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numbers>

#include "shearinst/error.hpp"

namespace shearinst {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double inf_norm_rows(const CVec& lo, const CVec& di, const CVec& up) {
  double m = 0.0;
  for (std::size_t i = 0; i < di.size(); ++i) {
    double r = std::abs(di[i]);
    if (i > 0) r += std::abs(lo[i - 1]);
    if (i + 1 < di.size()) r += std::abs(up[i]);
    m = std::max(m, r);
  }
  return m;
}

CVec tri_apply(const CVec& lo, const CVec& di, const CVec& up, const CVec& x) {
  const std::size_t n = x.size();
  CVec y(n);
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = di[i] * x[i];
    if (i > 0) y[i] += lo[i - 1] * x[i - 1];
    if (i + 1 < n) y[i] += up[i] * x[i + 1];
  }
  return y;
}

double vec_norm(const CVec& v) {
  double s = 0.0;
  for (const auto& x : v) s += std::norm(x);
  return std::sqrt(s);
}

PencilResult pencil_once(const ShearProfile& profile, const NeutralMode& mode, double eps, cplx shift) {
  const Grid& g = mode.grid;
  const std::size_t n = mode.phi.size();
  const TridiagonalOperator s = stiffness_operator(g);
  const double kappa = mode.alpha_sq - eps;
  CVec b_lo(n - 1), b_di(n), a_lo(n - 1), a_di(n), a_up(n - 1);
  RVec u(n), upp(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double y = g.nodes()[i];
    u[i] = profile.eval(y, 0);
    upp[i] = profile.eval(y, 2);
    b_di[i] = s.diag[i] + kappa * s.mass[i];
    a_di[i] = u[i] * b_di[i] + s.mass[i] * upp[i];
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    b_lo[i] = s.off[i];
    a_up[i] = u[i] * s.off[i];
    a_lo[i] = u[i + 1] * s.off[i];
  }
  const double a_norm = inf_norm_rows(a_lo, a_di, a_up);
  const double b_norm = inf_norm_rows(b_lo, b_di, b_lo);

  PencilResult out;
  CVec v = to_complex(mode.phi);
  cplx sigma = shift, c = shift, previous = shift;
  std::unique_ptr<TridiagonalLU<cplx>> lu;
  for (int it = 1; it <= 50; ++it) {
    if (!lu || (it - 1) % 10 == 0) {
      if (lu) sigma = c;
      CVec lo(n - 1), di(n), up(n - 1);
      for (std::size_t i = 0; i < n; ++i) di[i] = a_di[i] - sigma * b_di[i];
      for (std::size_t i = 0; i + 1 < n; ++i) {
        lo[i] = a_lo[i] - sigma * b_lo[i];
        up[i] = a_up[i] - sigma * b_lo[i];
      }
      lu = std::make_unique<TridiagonalLU<cplx>>(lo, di, up);
    }
    const CVec w = lu->solve<cplx>(tri_apply(b_lo, b_di, b_lo, v));
    cplx vw = 0.0;
    double vv = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      vw += std::conj(v[i]) * w[i];
      vv += std::norm(v[i]);
    }
    previous = c;
    c = sigma + vv / vw;
    const double wn = vec_norm(w);
    for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / wn;

    const CVec av = tri_apply(a_lo, a_di, a_up, v), bv = tri_apply(b_lo, b_di, b_lo, v);
    CVec r(n);
    for (std::size_t i = 0; i < n; ++i) r[i] = av[i] - c * bv[i];
    out.residual = vec_norm(r) / (a_norm + std::abs(c) * b_norm);
    out.iterations = it;
    if (it > 1 && std::abs(c - previous) <= 1e-14 * std::abs(c) + 1e-300 && out.residual <= 1e-8) break;
    if (it == 50) fail(ErrorCode::NotConverged, "pencil shift-invert did not converge in 50 iterations");
  }
  cplx ip = 0.0;
  for (std::size_t i = 0; i < n; ++i) ip += g.weights()[i] * v[i] * mode.phi[i];
  const cplx rot = std::abs(ip) > 0.0 ? std::conj(ip) / std::abs(ip) : cplx(1.0);
  const double l2 = norm(v, g, NormKind::L2);
  for (auto& x : v) x *= rot / l2;
  out.c = c;
  out.phi = std::move(v);
  return out;
}

}  // namespace

Grid dispersion_grid(const ShearProfile& profile, int n, double stretch) {
  return Grid::clustered(n, profile.domain(), profile.a(), stretch);
}

cplx eval_G(const RayleighOperators& ops, double eps, cplx c) {
  require(c.imag() > 0.0, ErrorCode::InvalidArgument, "G needs Im c > 0");
  const CVec psi = solve_projected(ops, eps, c).psi;
  const auto w = ops.grid().weights();
  const auto& phi = ops.mode().phi;
  cplx s = 0.0;
  for (std::size_t i = 0; i < psi.size(); ++i) s += w[i] * psi[i] * phi[i];
  return s;
}

cplx predict_c(const SpectralCoefficientLambda& lambda, double eps) {
  if (lambda.imag <= 0.0) fail(ErrorCode::ImagNotPositive, "Im lambda must be positive");
  require(eps >= 0.0, ErrorCode::InvalidArgument, "eps must be >= 0");
  return -eps / lambda.as_complex();
}

WindingResult winding_number(const RayleighOperators& ops, double eps, cplx center, double radius, int n_samples) {
  require(n_samples >= 4, ErrorCode::InvalidArgument, "winding number needs at least 4 samples");
  require(radius > 0.0 && center.imag() - radius > 0.0, ErrorCode::InvalidArgument,
          "winding circle must lie in the upper half plane");
  WindingResult out;
  out.samples = n_samples;
  std::vector<cplx> values(n_samples);
  out.min_abs_G = INFINITY;
  for (int j = 0; j < n_samples; ++j) {
    const cplx z = center + std::polar(radius, kTwoPi * j / n_samples);
    values[j] = eval_G(ops, eps, z);
    out.min_abs_G = std::min(out.min_abs_G, std::abs(values[j]));
  }
  double total = 0.0;
  for (int j = 0; j < n_samples; ++j) {
    const double d = std::arg(values[(j + 1) % n_samples] / values[j]);
    if (std::abs(d) >= std::numbers::pi / 2.0)
      fail(ErrorCode::PhaseUnwrapAmbiguous, "phase jump of " + std::to_string(d) + " between samples");
    total += d;
  }
  out.winding = static_cast<int>(std::lround(total / kTwoPi));
  return out;
}

WindingResult certified_winding(const RayleighOperators& ops, double eps, cplx center, double radius, int n_samples,
                                int max_samples) {
  for (int n = n_samples;; n *= 2) {
    try {
      return winding_number(ops, eps, center, radius, n);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::PhaseUnwrapAmbiguous || 2 * n > max_samples) throw;
    }
  }
}

DispersionPoint solve_reduced(const RayleighOperators& ops, const SpectralCoefficientLambda& lambda, double eps,
                              const ReducedOptions& options) {
  require(eps > 0.0, ErrorCode::InvalidArgument, "reduced solve needs eps > 0");
  const cplx predicted = predict_c(lambda, eps);
  DispersionPoint p;
  p.eps = eps;
  cplx c0 = options.start.value_or(predicted);
  cplx c1 = c0 * (1.0 + 1e-3);
  cplx g0 = eval_G(ops, eps, c0), g1 = eval_G(ops, eps, c1);
  for (int it = 1;; ++it) {
    p.iterations = it;
    if (std::abs(g1) <= options.tol_factor * (eps + std::abs(c1)) / ops.projection_weight()) break;
    if (it >= options.max_iterations || g1 == g0)
      fail(ErrorCode::NotConverged, "secant stalled with |G| = " + std::to_string(std::abs(g1)));
    const cplx c2 = c1 - g1 * (c1 - c0) / (g1 - g0);
    if (!(c2.imag() > 0.0)) fail(ErrorCode::NotConverged, "secant left the upper half plane");
    c0 = c1;
    g0 = g1;
    c1 = c2;
    g1 = eval_G(ops, eps, c1);
  }
  p.c = c1;
  p.g_residual = std::abs(g1);
  p.growth_rate = ops.mode().alpha() * p.c.imag();
  const double radius = eps / (2.0 * std::abs(lambda.as_complex()));
  if (std::abs(p.c - predicted) >= radius)
    fail(ErrorCode::WindingMismatch, "root lies outside the certificate disk");
  p.winding = certified_winding(ops, eps, predicted, radius, options.winding_samples).winding;
  if (p.winding != 1) fail(ErrorCode::WindingMismatch, "winding number " + std::to_string(p.winding));
  return p;
}

PencilResult pencil_eigenvalue(const ShearProfile& profile, const NeutralMode& mode, double eps, cplx shift,
                               bool allow_real) {
  require(mode.phi.size() >= 2, ErrorCode::ShapeMismatch, "pencil needs at least two nodes");
  auto attempt = [&](cplx s) {
    PencilResult r = pencil_once(profile, mode, eps, s);
    if (!allow_real && std::abs(r.c.imag()) < 1e-10)
      fail(ErrorCode::ConvergedToRealAxis, "pencil iteration landed on the real axis");
    return r;
  };
  try {
    return attempt(shift);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::ConvergedToRealAxis) throw;
    return attempt(shift * cplx(1.0, 0.5));
  }
}

namespace {

DispersionPoint curve_point(const RayleighOperators& ops, const SpectralCoefficientLambda& lambda, double eps,
                            std::optional<cplx> start, bool pencil) {
  DispersionPoint p;
  p.eps = eps;
  try {
    ReducedOptions opts;
    opts.start = start;
    p = solve_reduced(ops, lambda, eps, opts);
  } catch (const Error& e) {
    p.failure = std::string(error_code_name(e.code()));
    return p;
  }
  if (pencil) {
    try {
      p.pencil_c = pencil_eigenvalue(ops.profile(), ops.mode(), eps, p.c).c;
      if (std::abs(*p.pencil_c - p.c) > 1e-6) p.failure = "PencilMismatch";
    } catch (const Error&) {
      p.pencil_c.reset();
    }
  }
  return p;
}

}  // namespace

DispersionCurve continue_curve(const RayleighOperators& ops, const SpectralCoefficientLambda& lambda,
                               std::span<const double> eps_grid, const CurveOptions& options) {
  DispersionCurve curve;
  for (std::size_t i = 1; i < eps_grid.size(); ++i)
    require(eps_grid[i] > eps_grid[i - 1], ErrorCode::InvalidRange, "eps grid must increase");
  curve.slope_target = (-1.0 / lambda.as_complex()).imag();
  if (eps_grid.empty()) return curve;

  if (options.parallel && !options.warm_start) {
    std::vector<std::future<DispersionPoint>> jobs;
    for (double eps : eps_grid)
      jobs.push_back(std::async(std::launch::async, [&, eps] { return curve_point(ops, lambda, eps, {}, options.pencil); }));
    for (auto& j : jobs) curve.points.push_back(j.get());
  } else {
    std::optional<cplx> warm;
    double eps_prev = 0.0;
    for (double eps : eps_grid) {
      std::optional<cplx> start;
      if (options.warm_start && warm) start = *warm * (eps / eps_prev);
      curve.points.push_back(curve_point(ops, lambda, eps, start, options.pencil));
      if (curve.points.back().certified()) {
        warm = curve.points.back().c;
        eps_prev = eps;
      }
    }
  }

  double sxy = 0.0, sxx = 0.0;
  for (const auto& p : curve.points) {
    if (!p.certified()) continue;
    sxy += p.eps * p.c.imag();
    sxx += p.eps * p.eps;
  }
  if (sxx > 0.0) {
    curve.slope = sxy / sxx;
    curve.slope_deviation = std::abs(curve.slope - curve.slope_target) / std::abs(curve.slope_target);
  }
  return curve;
}

double validated_eps_max(const RayleighOperators& ops, const SpectralCoefficientLambda& lambda, double eps_lo,
                         double eps_hi, int bisections) {
  require(eps_lo > 0.0 && eps_hi > eps_lo, ErrorCode::InvalidRange, "validated range needs 0 < lo < hi");
  auto passes = [&](double eps) {
    try {
      solve_reduced(ops, lambda, eps);
      return true;
    } catch (const Error&) {
      return false;
    }
  };
  if (!passes(eps_lo)) fail(ErrorCode::InvalidRange, "lower end of the eps range does not certify");
  if (passes(eps_hi)) return eps_hi;
  double lo = std::log(eps_lo), hi = std::log(eps_hi);
  for (int i = 0; i < bisections; ++i) {
    const double mid = 0.5 * (lo + hi);
    (passes(std::exp(mid)) ? lo : hi) = mid;
  }
  return std::exp(lo);
}

std::vector<double> log_spaced(double lo, double hi, int count) {
  require(count >= 0 && (count == 0 || (lo > 0.0 && hi >= lo)), ErrorCode::InvalidRange, "bad log-spaced range");
  std::vector<double> out;
  for (int i = 0; i < count; ++i)
    out.push_back(count == 1 ? lo : std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * i / (count - 1)));
  return out;
}

StreamFunctionSample assemble_unstable_mode(const NeutralMode& mode, std::span<const cplx> psi, double alpha, cplx c,
                                            int nx) {
  require(mode.grid.conforms(psi.size()), ErrorCode::ShapeMismatch, "psi does not match the mode grid");
  require(alpha > 0.0 && nx >= 1, ErrorCode::InvalidArgument, "stream function needs alpha > 0, nx >= 1");
  StreamFunctionSample s;
  s.y.assign(mode.grid.nodes().begin(), mode.grid.nodes().end());
  for (int j = 0; j < nx; ++j) s.x.push_back(kTwoPi / alpha * j / nx);
  s.values.reserve(s.y.size() * s.x.size());
  for (std::size_t i = 0; i < s.y.size(); ++i) {
    const cplx phi = mode.phi[i] + psi[i];
    for (double x : s.x) s.values.push_back(phi * std::polar(1.0, alpha * x));
  }
  s.growth_rate = alpha * c.imag();
  s.phase_speed = c.real();
  return s;
}

}  // namespace shearinst
