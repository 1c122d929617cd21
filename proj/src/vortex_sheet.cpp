#include "shearinst/vortex_sheet.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numbers>

#include "shearinst/error.hpp"

namespace shearinst {
namespace {

// quintic smoothstep and its first two derivatives
double smoothstep(double t, int order) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return order == 0 ? 1.0 : 0.0;
  switch (order) {
    case 0: return t * t * t * (10.0 - 15.0 * t + 6.0 * t * t);
    case 1: return 30.0 * t * t * (1.0 - t) * (1.0 - t);
    default: return 60.0 * t * (1.0 - t) * (1.0 - 2.0 * t);
  }
}

double ramp(double y, double lo, double width, int order) {
  require(order >= 0 && order <= 2, ErrorCode::UnsupportedOrder, "cutoffs provide two derivatives");
  const double t = (std::abs(y) - lo) / width;
  const double s = smoothstep(t, order);
  if (order == 0) return s;
  const double sign = order == 1 && y < 0.0 ? -1.0 : 1.0;
  return sign * s / std::pow(width, order);
}

double log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

CVec tri_mul(const TridiagonalOperator& op, double s_scale, double m_scale, std::span<const cplx> x) {
  const std::size_t n = x.size();
  CVec y(n);
  for (std::size_t i = 0; i < n; ++i) {
    cplx v = (s_scale * op.diag[i] + m_scale * op.mass[i]) * x[i];
    if (i > 0) v += s_scale * op.off[i - 1] * x[i - 1];
    if (i + 1 < n) v += s_scale * op.off[i] * x[i + 1];
    y[i] = v;
  }
  return y;
}

TridiagonalLU<double> gram_lu(const TridiagonalOperator& op, double s_scale, double m_scale) {
  RVec d(op.size()), o(op.off.size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = s_scale * op.diag[i] + m_scale * op.mass[i];
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = s_scale * op.off[i];
  return TridiagonalLU<double>(o, d, o);
}

double dot_re(std::span<const cplx> a, std::span<const cplx> b) {
  cplx s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s.real();
}

}  // namespace

double CutoffPair::chi_in(double y, int order) const {
  const double v = ramp(y, in_lo / k, (L - in_lo) / k, order);
  return order == 0 ? 1.0 - v : -v;
}

double CutoffPair::chi_out(double y, int order) const { return ramp(y, out_lo / k, (out_hi - out_lo) / k, order); }

CutoffPair build_cutoffs(double k, double L, double out_hi) {
  require(k >= 1.0, ErrorCode::InvalidArgument, "cutoffs need k >= 1");
  if (!(L > 8.0)) fail(ErrorCode::BoundViolation, "cutoffs need L > 8 so the plateaus do not collide");
  require(out_hi > 2.0 && out_hi <= 4.0, ErrorCode::InvalidArgument, "outer ramp must end in (2, 4]");
  CutoffPair cut{k, L, 2.0, out_hi, 5.0};
  const int samples = 10000;
  const double span = 1.2 * L / k;
  for (int j = 0; j <= samples; ++j) {
    const double y = -span + 2.0 * span * j / samples;
    const double ay = std::abs(y);
    if (ay < 4.0 / k && cut.chi_in(y) != 1.0) fail(ErrorCode::BoundViolation, "chi_in plateau broken");
    if (ay > L / k && cut.chi_in(y) != 0.0) fail(ErrorCode::BoundViolation, "chi_in support too wide");
    if (ay < 2.0 / k && cut.chi_out(y) != 0.0) fail(ErrorCode::BoundViolation, "chi_out plateau broken");
    if (ay > 4.0 / k && cut.chi_out(y) != 1.0) fail(ErrorCode::BoundViolation, "chi_out not 1 outside 4/k");
    for (int l = 1; l <= 2; ++l) {
      if (std::abs(cut.chi_in(y, l)) > std::pow(10.0 * k / L, l))
        fail(ErrorCode::BoundViolation, "chi_in derivative bound");
      if (std::abs(cut.chi_out(y, l)) > std::pow(10.0 * k, l))
        fail(ErrorCode::BoundViolation, "chi_out derivative bound");
    }
  }
  return cut;
}

CVec inner_helmholtz(double alpha0, const Grid& xi_grid, std::span<const cplx> F) {
  require(alpha0 > 0.0, ErrorCode::InvalidArgument, "inner kernel needs alpha0 > 0");
  require(xi_grid.conforms(F.size()), ErrorCode::ShapeMismatch, "kernel operand size");
  require(xi_grid.is_uniform(), ErrorCode::InvalidArgument, "inner kernel needs a uniform grid");
  const std::size_t n = F.size();
  const auto y = xi_grid.nodes();
  const auto w = xi_grid.weights();
  CVec left(n), right(n, 0.0), out(n);
  for (std::size_t i = 0; i < n; ++i)
    left[i] = w[i] * F[i] + (i > 0 ? std::exp(-alpha0 * (y[i] - y[i - 1])) * left[i - 1] : 0.0);
  for (std::size_t i = n - 1; i-- > 0;)
    right[i] = std::exp(-alpha0 * (y[i + 1] - y[i])) * (right[i + 1] + w[i + 1] * F[i + 1]);
  for (std::size_t i = 0; i < n; ++i) out[i] = (left[i] + right[i]) / (2.0 * alpha0);
  return out;
}

InnerNeutral solve_inner_neutral(const ShearProfile& base, double half_width, int q) {
  require(half_width >= 8.0, ErrorCode::InvalidArgument, "inner problem needs half width >= 8");
  const std::vector<double> widths{std::max(4.0, half_width / 4.0), std::max(6.0, half_width / 2.0), half_width};
  LineLimit limit = line_eigenvalue_limit(base, widths, q);
  NeutralMode phi0 = solve_truncated_line(base, half_width, line_grid(half_width, q));
  return InnerNeutral{limit.alpha0, limit.alpha0_sq, std::move(phi0), std::move(limit)};
}

double z_norm(std::span<const cplx> f, const Grid& grid, double k, double L) {
  require(k > 0.0 && L > 0.0, ErrorCode::InvalidArgument, "Z norm needs k, L > 0");
  return std::sqrt(L / k) * derivative_norm(f, grid) + std::sqrt(k * L) * norm(f, grid, NormKind::L2);
}

GluedSystem::GluedSystem(const ShearProfile& rescaled, const NeutralMode& channel_mode, double k, double L,
                         double eps, double alpha0_line, CutoffPair cutoffs)
    : profile_(rescaled), grid_(channel_mode.grid), k_(k), L_(L), eps_(eps), alpha_sq_(channel_mode.alpha_sq),
      cut_(cutoffs) {
  require(cut_.k == k && cut_.L == L, ErrorCode::ShapeMismatch, "cutoffs built for a different (k, L)");
  require(alpha_sq_ - eps > 0.0, ErrorCode::InvalidArgument, "outer operator needs alpha~^2 > eps");
  xi_eff_ = std::min(std::max(2.0 * L, 8.0 / alpha0_line), k);
  const auto y = grid_.nodes();
  first_ = -1;
  for (int i = 0; i < grid_.n(); ++i) {
    if (xi_eff_ < k && std::abs(k * y[i]) >= xi_eff_) continue;
    if (first_ < 0) first_ = i;
    count_ = i - first_ + 1;
  }
  require(first_ >= 0 && count_ >= 3, ErrorCode::ShapeMismatch, "inner region holds too few nodes");

  NeutralMode inner_mode = solve_neutral(profile_, grid_.restrict(first_, count_));
  const double inner_alpha_sq = inner_mode.alpha_sq;
  inner_ = std::make_unique<RayleighOperators>(profile_, std::move(inner_mode), inner_alpha_sq);
  delta_h_ = (eps - alpha_sq_ + inner_alpha_sq) / (k * k);
  delta_ = eps / (k * k) - (alpha_sq_ / (k * k) - alpha0_line * alpha0_line);
  const CVec p0 = to_complex(inner_->mode().phi);
  const double h1 = h1_xi(p0);
  phi0_.resize(count_);
  for (int i = 0; i < count_; ++i) phi0_[i] = inner_->mode().phi[i] / h1;

  chi_in_ = grid_.sample([&](double v) { return cut_.chi_in(v); });
  chi_out_ = grid_.sample([&](double v) { return cut_.chi_out(v); });
  const double h_max = [&] {
    double m = 0.0;
    for (int i = 0; i + 1 < grid_.n(); ++i)
      if (std::abs(y[i]) < L / k + 0.1) m = std::max(m, y[i + 1] - y[i]);
    return m;
  }();
  require(h_max < 0.5 / k, ErrorCode::InvalidArgument, "channel grid too coarse to separate the cutoff ramps");
  stiff_ = stiffness_operator(grid_);
  outer_ = std::make_unique<TridiagonalLU<double>>(gram_lu(stiff_, 1.0, alpha_sq_ - eps));
}

GluedSystem::~GluedSystem() = default;

CVec GluedSystem::commutator(const RVec& chi, std::span<const cplx> x) const {
  const std::size_t n = x.size();
  CVec out(n);
  for (std::size_t i = 0; i < n; ++i) {
    cplx v = 0.0;
    if (i > 0) v += stiff_.off[i - 1] * (chi[i - 1] - chi[i]) * x[i - 1];
    if (i + 1 < n) v += stiff_.off[i] * (chi[i + 1] - chi[i]) * x[i + 1];
    out[i] = v;
  }
  return out;
}

CVec GluedSystem::extend(std::span<const cplx> inner) const {
  CVec out(grid_.n(), 0.0);
  std::copy(inner.begin(), inner.end(), out.begin() + first_);
  return out;
}

CVec GluedSystem::restrict_inner(std::span<const cplx> full) const {
  return CVec(full.begin() + first_, full.begin() + first_ + count_);
}

double GluedSystem::h1_xi(std::span<const cplx> inner) const {
  const Grid& g = inner_->grid();
  const double l2 = norm(inner, g, NormKind::L2), d = derivative_norm(inner, g);
  return std::sqrt(k_ * l2 * l2 + d * d / k_);
}

GluedSolution GluedSystem::solve(cplx c, int max_iterations) const {
  const CVec w = inner_->coefficient(k_ * k_ * delta_h_, c);
  const auto mass = inner_->grid().weights();
  const CVec phi0 = to_complex(phi0_);
  GluedSolution s;
  s.k = k_;
  s.L = L_;
  s.eps = eps_;
  s.c = c;
  s.delta = delta_;
  s.delta_h = delta_h_;
  s.Phi0 = phi0_;
  s.Psi.assign(count_, 0.0);
  s.phi_out.assign(grid_.n(), 0.0);

  double last_update = 0.0;
  int rising = 0;
  for (int it = 1;; ++it) {
    CVec x(count_);
    for (int i = 0; i < count_; ++i) x[i] = phi0[i] + s.Psi[i];
    CVec out = outer_->solve<cplx>(commutator(chi_in_, extend(x)));
    for (auto& v : out) v = -v;
    CVec rhs = restrict_inner(commutator(chi_out_, out));
    for (int i = 0; i < count_; ++i) rhs[i] = mass[i] * w[i] * phi0[i] - rhs[i];
    CVec psi = inner_->solve_shifted(w, rhs);

    CVec dpsi(count_), dout(out.size());
    for (int i = 0; i < count_; ++i) dpsi[i] = psi[i] - s.Psi[i];
    for (std::size_t i = 0; i < out.size(); ++i) dout[i] = out[i] - s.phi_out[i];
    const double update = h1_xi(dpsi) + z_norm(dout, grid_, k_, L_);
    s.Psi = std::move(psi);
    s.phi_out = std::move(out);
    s.iterations = it;
    if (it > 1) {
      const double r = update / last_update;
      s.contraction = std::max(s.contraction, r);
      rising = r >= 1.0 ? rising + 1 : 0;
      if (rising >= 3) fail(ErrorCode::BlockNotContracting, "block iteration update norms grow");
    }
    last_update = update;
    const double scale = 1.0 + h1_xi(s.Psi) + z_norm(s.phi_out, grid_, k_, L_);
    if (update <= 1e-13 * scale) break;
    if (it >= max_iterations) fail(ErrorCode::BlockNotContracting, "block iteration hit the iteration cap");
  }

  cplx g = 0.0;
  for (int i = 0; i < count_; ++i) g += k_ * mass[i] * s.Psi[i] * phi0_[i];
  s.G = g;
  s.psi_h1 = h1_xi(s.Psi);
  s.phiout_z = z_norm(s.phi_out, grid_, k_, L_);

  s.phi.assign(grid_.n(), 0.0);
  for (int i = 0; i < grid_.n(); ++i) s.phi[i] = chi_out_[i] * s.phi_out[i];
  for (int i = 0; i < count_; ++i) s.phi[first_ + i] += chi_in_[first_ + i] * (phi0[i] + s.Psi[i]);

  const auto y = grid_.nodes();
  const RVec v = neutral_potential(profile_, grid_);
  const std::size_t n = s.phi.size();
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const cplx coupling = c == cplx(0.0) ? cplx(v[i]) : profile_.eval(y[i], 2) / (profile_.eval(y[i], 0) - c);
    const cplx q = alpha_sq_ - eps_ + coupling;
    cplx r = (stiff_.diag[i] + stiff_.mass[i] * q) * s.phi[i];
    double a = std::abs(stiff_.diag[i] + stiff_.mass[i] * q) * std::abs(s.phi[i]);
    if (i > 0) {
      r += stiff_.off[i - 1] * s.phi[i - 1];
      a += std::abs(stiff_.off[i - 1] * s.phi[i - 1]);
    }
    if (i + 1 < n) {
      r += stiff_.off[i] * s.phi[i + 1];
      a += std::abs(stiff_.off[i] * s.phi[i + 1]);
    }
    num += std::norm(r);
    den += a * a;
  }
  s.assembled_residual = den > 0.0 ? std::sqrt(num / den) : 0.0;
  return s;
}

double GluedSystem::probe_B(int iterations) const {
  const TridiagonalOperator inner_stiff = stiffness_operator(inner_->grid());
  const TridiagonalLU<double> gz = gram_lu(stiff_, L_ / k_, k_ * L_);
  CVec x(grid_.n());
  for (int i = 0; i < grid_.n(); ++i) x[i] = 1.0 + 0.3 * std::sin(7.0 * i);
  double estimate = 0.0;
  for (int it = 0; it < iterations; ++it) {
    CVec bx = inner_->solve_shifted({}, restrict_inner(commutator(chi_out_, x)));
    for (auto& v : bx) v = -v;
    const CVec gh = tri_mul(inner_stiff, 1.0 / k_, k_, bx);
    const double num = dot_re(bx, gh);
    const double den = dot_re(x, tri_mul(stiff_, L_ / k_, k_ * L_, x));
    estimate = std::sqrt(num / den);
    const CVec bt = commutator(chi_out_, extend(inner_->solve_shifted({}, gh)));
    x = gz.solve<cplx>(bt);
    const double nx = std::sqrt(dot_re(x, x));
    for (auto& v : x) v /= nx;
  }
  return estimate;
}

double GluedSystem::probe_C(int iterations) const {
  const TridiagonalOperator inner_stiff = stiffness_operator(inner_->grid());
  const TridiagonalLU<double> gh = gram_lu(inner_stiff, 1.0 / k_, k_);
  CVec x(count_);
  for (int i = 0; i < count_; ++i) x[i] = phi0_[i] + 0.3 * std::sin(5.0 * i);
  double estimate = 0.0;
  for (int it = 0; it < iterations; ++it) {
    CVec cx = outer_->solve<cplx>(commutator(chi_in_, extend(x)));
    for (auto& v : cx) v = -v;
    const CVec gz = tri_mul(stiff_, L_ / k_, k_ * L_, cx);
    const double num = dot_re(cx, gz);
    const double den = dot_re(x, tri_mul(inner_stiff, 1.0 / k_, k_, x));
    estimate = std::sqrt(num / den);
    CVec ct = restrict_inner(commutator(chi_in_, outer_->solve<cplx>(gz)));
    for (auto& v : ct) v = -v;
    x = gh.solve<cplx>(ct);
    const double nx = std::sqrt(dot_re(x, x));
    for (auto& v : x) v /= nx;
  }
  return estimate;
}

GluedSolution solve_sheet_reduced(const GluedSystem& system, cplx lambda0, int winding_samples) {
  if (lambda0.imag() <= 0.0) fail(ErrorCode::ImagNotPositive, "Im lambda0 must be positive");
  const double delta = system.delta_h();
  if (delta == 0.0) return system.solve(0.0);
  require(delta > 0.0, ErrorCode::InvalidArgument, "sheet reduced solve needs delta >= 0");
  const cplx predicted = -delta / lambda0;
  const double radius = delta / (2.0 * std::abs(lambda0));
  cplx c0 = predicted, c1 = predicted * (1.0 + 1e-3);
  cplx g0 = system.G(c0);
  GluedSolution s1 = system.solve(c1);
  int it = 1;
  for (;; ++it) {
    if (std::abs(s1.G) <= 1e-10 * (delta + std::abs(c1)) * system.k() / system.inner_ops().projection_weight()) break;
    if (it >= 60 || s1.G == g0) fail(ErrorCode::NotConverged, "sheet secant stalled");
    const cplx c2 = c1 - s1.G * (c1 - c0) / (s1.G - g0);
    if (!(c2.imag() > 0.0)) fail(ErrorCode::NotConverged, "sheet secant left the upper half plane");
    c0 = c1;
    g0 = s1.G;
    c1 = c2;
    s1 = system.solve(c1);
  }
  if (std::abs(c1 - predicted) >= radius) fail(ErrorCode::WindingMismatch, "sheet root outside the certificate disk");
  require(predicted.imag() - radius > 0.0, ErrorCode::InvalidArgument, "certificate disk crosses the real axis");
  for (int n = winding_samples;; n *= 2) {
    std::vector<cplx> values(n);
    for (int j = 0; j < n; ++j)
      values[j] = system.G(predicted + std::polar(radius, 2.0 * std::numbers::pi * j / n));
    double total = 0.0;
    bool ambiguous = false;
    for (int j = 0; j < n && !ambiguous; ++j) {
      const double d = std::arg(values[(j + 1) % n] / values[j]);
      ambiguous = std::abs(d) >= std::numbers::pi / 2.0;
      total += d;
    }
    if (ambiguous) {
      if (2 * n > 4096) fail(ErrorCode::PhaseUnwrapAmbiguous, "sheet winding samples exhausted");
      continue;
    }
    s1.winding = static_cast<int>(std::lround(total / (2.0 * std::numbers::pi)));
    break;
  }
  if (s1.winding != 1) fail(ErrorCode::WindingMismatch, "sheet winding number " + std::to_string(s1.winding));
  return s1;
}

Grid sheet_grid(double k, int q) {
  require(k >= 2.0 && q >= 1, ErrorCode::InvalidArgument, "sheet grid needs k >= 2 and q >= 1");
  require(std::fmod(k, 2.0) == 0.0, ErrorCode::InvalidArgument, "sheet grid needs an even k");
  const long cells = std::lround(k * (2.0 * q + 1.0) / 2.0);
  return Grid::uniform(static_cast<int>(cells - 1), Interval{});
}

namespace {

SheetScanRow scan_row(const ShearProfile& base, double k, double eps_hat, double L, double alpha0, cplx lambda0,
                      const SheetScanOptions& o) {
  SheetScanRow row;
  row.k = k;
  row.eps = eps_hat * k * k;
  try {
    const ShearProfile rescaled = rescale_profile(base, k);
    const Grid grid = sheet_grid(k, o.q);
    NeutralMode mode = solve_neutral(rescaled, grid);
    row.alpha_tilde = mode.alpha();
    row.alpha_ratio = row.alpha_tilde / k;
    RayleighOperators ops(rescaled, mode, mode.alpha_sq);
    const auto lambda = lambda_limit(rescaled, ops.mode(), tau_decades(o.tau_decades));
    const DispersionPoint p = solve_reduced(ops, lambda, row.eps);
    row.im_c_channel = p.c.imag();
    row.growth_rate = p.growth_rate;
    row.abs_c = std::abs(p.c);
    GluedSystem system(rescaled, ops.mode(), k, L, row.eps, alpha0, build_cutoffs(k, L));
    const GluedSolution g = solve_sheet_reduced(system, lambda0);
    row.im_c_glued = g.c.imag();
    row.psi_h1 = g.psi_h1;
    row.phiout_z = g.phiout_z;
    row.residual = g.assembled_residual;
    row.delta = g.delta;
    const double rhs = row.eps / (k * k) + std::abs(row.alpha_tilde * row.alpha_tilde / (k * k) - alpha0 * alpha0) +
                       std::abs(g.c) + 1.0 / std::sqrt(L);
    row.estimate_constant = (g.psi_h1 + g.phiout_z) / rhs;
  } catch (const Error& e) {
    row.failure = std::string(error_code_name(e.code()));
  }
  return row;
}

}  // namespace

SheetScan scaling_scan(std::span<const double> k_list, double eps_hat, double L, const SheetScanOptions& options) {
  require(eps_hat > 0.0, ErrorCode::InvalidArgument, "eps_hat must be positive");
  const ShearProfile base = ShearProfile::sheet_base();
  const InnerNeutral inner = solve_inner_neutral(base, options.line_half_width);
  const auto lambda0 = lambda_limit(base, inner.phi0, tau_decades(options.tau_decades));
  SheetScan scan;
  scan.L = L;
  scan.alpha0 = inner.alpha0;
  scan.xi = std::max(2.0 * L, 8.0 / inner.alpha0);
  scan.lambda0 = lambda0.as_complex();
  if (options.parallel) {
    std::vector<std::future<SheetScanRow>> jobs;
    for (double k : k_list)
      jobs.push_back(std::async(std::launch::async,
                                [&, k] { return scan_row(base, k, eps_hat, L, scan.alpha0, scan.lambda0, options); }));
    for (auto& j : jobs) scan.rows.push_back(j.get());
  } else {
    for (double k : k_list) scan.rows.push_back(scan_row(base, k, eps_hat, L, scan.alpha0, scan.lambda0, options));
  }
  return scan;
}

CouplingScan coupling_scan(double k, std::span<const double> L_list, const SheetScanOptions& options) {
  require(L_list.size() >= 2, ErrorCode::InvalidArgument, "coupling scan needs at least two L values");
  const ShearProfile base = ShearProfile::sheet_base();
  const InnerNeutral inner = solve_inner_neutral(base, options.line_half_width);
  const ShearProfile rescaled = rescale_profile(base, k);
  const NeutralMode mode = solve_neutral(rescaled, sheet_grid(k, options.q));
  CouplingScan scan;
  scan.k = k;
  std::vector<double> ls, bs, cs;
  for (double L : L_list) {
    GluedSystem system(rescaled, mode, k, L, 0.0, inner.alpha0, build_cutoffs(k, L));
    scan.rows.push_back({L, system.probe_B(), system.probe_C()});
    ls.push_back(L);
    bs.push_back(scan.rows.back().norm_B);
    cs.push_back(scan.rows.back().norm_C);
  }
  scan.slope_B = log_slope(ls, bs);
  scan.slope_C = log_slope(ls, cs);
  return scan;
}

}  // namespace shearinst
