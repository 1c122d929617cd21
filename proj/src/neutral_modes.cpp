#include "shearinst/neutral_modes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "shearinst/error.hpp"

namespace shearinst {
namespace {

struct GroundState {
  double mu;      // smallest eigenvalue of M^{-1}(S + M V)
  RVec phi;       // sum m phi^2 = 1
  double residual;
};

int sturm_count(const RVec& d, const RVec& e, double x) {
  int count = 0;
  double q = 1.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    q = d[i] - x - (i > 0 ? e[i - 1] * e[i - 1] / q : 0.0);
    if (q == 0.0) q = -std::numeric_limits<double>::min();
    if (q < 0.0) ++count;
  }
  return count;
}

GroundState ground_state(const Grid& grid, std::span<const double> potential) {
  const TridiagonalOperator op = helmholtz_operator(grid, potential);
  const std::size_t n = op.size();
  RVec sq(n), d(n), e(n > 0 ? n - 1 : 0);
  for (std::size_t i = 0; i < n; ++i) {
    sq[i] = std::sqrt(op.mass[i]);
    d[i] = op.diag[i] / op.mass[i];
  }
  for (std::size_t i = 0; i + 1 < n; ++i) e[i] = op.off[i] / (sq[i] * sq[i + 1]);

  double lo = std::numeric_limits<double>::infinity(), hi = -lo, scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = (i > 0 ? std::abs(e[i - 1]) : 0.0) + (i + 1 < n ? std::abs(e[i]) : 0.0);
    lo = std::min(lo, d[i] - r);
    hi = std::max(hi, d[i] + r);
    scale = std::max(scale, std::abs(d[i]) + r);
  }
  for (int it = 0; it < 200 && hi - lo > 4.0 * std::numeric_limits<double>::epsilon() * scale; ++it) {
    const double mid = 0.5 * (lo + hi);
    (sturm_count(d, e, mid) >= 1 ? hi : lo) = mid;
  }

  RVec x(n, 1.0);
  double shift = lo;
  for (int attempt = 0;; ++attempt) {
    try {
      RVec diag_shifted(d);
      for (double& v : diag_shifted) v -= shift;
      TridiagonalLU<double> lu(e, diag_shifted, e);
      for (int it = 0; it < 4; ++it) {
        x = lu.solve<double>(x);
        double nrm = 0.0;
        for (double v : x) nrm += v * v;
        nrm = std::sqrt(nrm);
        for (double& v : x) v /= nrm;
      }
      break;
    } catch (const Error& err) {
      if (err.code() != ErrorCode::SingularOperator || attempt > 2) throw;
      shift -= 1e-12 * scale;
    }
  }

  double mu = 0.0;
  RVec dx(n);
  for (std::size_t i = 0; i < n; ++i) {
    dx[i] = d[i] * x[i] + (i > 0 ? e[i - 1] * x[i - 1] : 0.0) + (i + 1 < n ? e[i] * x[i + 1] : 0.0);
    mu += x[i] * dx[i];
  }
  double res = 0.0;
  for (std::size_t i = 0; i < n; ++i) res += (dx[i] - mu * x[i]) * (dx[i] - mu * x[i]);

  GroundState gs{mu, RVec(n), std::sqrt(res) / scale};
  double total = 0.0;
  for (double v : x) total += v;
  const double sign = total < 0.0 ? -1.0 : 1.0;
  for (std::size_t i = 0; i < n; ++i) gs.phi[i] = sign * x[i] / sq[i];
  return gs;
}

}  // namespace

double NeutralMode::alpha() const { return std::sqrt(std::max(alpha_sq, 0.0)); }

double NeutralMode::value_at(double y) const { return GridSpline(grid, phi)(y); }

RVec neutral_potential(const ShearProfile& profile, const Grid& grid) {
  return grid.sample([&](double y) { return -profile.continuous_ratio(y); });
}

NeutralMode solve_neutral(const ShearProfile& profile, const Grid& grid) {
  const RVec v = neutral_potential(profile, grid);
  GroundState gs = ground_state(grid, v);
  if (-gs.mu <= 0.0)
    fail(ErrorCode::NoUnstableNeutralMode, "maximal eigenvalue alpha^2 = " + std::to_string(-gs.mu) + " <= 0");
  NeutralMode mode{-gs.mu, std::move(gs.phi), grid, gs.residual, Normalization::L2Unit};
  const auto y = grid.nodes();
  const auto nearest = std::lower_bound(y.begin(), y.end(), profile.a()) - y.begin();
  const std::size_t j = std::min<std::size_t>(nearest, mode.phi.size() - 1);
  if (mode.phi[j] < 0.0)
    for (double& p : mode.phi) p = -p;
  return mode;
}

double rayleigh_quotient(std::span<const double> phi, const ShearProfile& profile, const Grid& grid) {
  require(grid.conforms(phi.size()), ErrorCode::ShapeMismatch, "rayleigh quotient operand size");
  const TridiagonalOperator op = helmholtz_operator(grid, neutral_potential(profile, grid));
  double num = 0.0, den = 0.0;
  const std::size_t n = phi.size();
  for (std::size_t i = 0; i < n; ++i) {
    double row = op.diag[i] * phi[i];
    if (i > 0) row += op.off[i - 1] * phi[i - 1];
    if (i + 1 < n) row += op.off[i] * phi[i + 1];
    num += phi[i] * row;
    den += op.mass[i] * phi[i] * phi[i];
  }
  require(den > 0.0, ErrorCode::InvalidArgument, "rayleigh quotient of the zero vector");
  return num / den;
}

Grid line_grid(double half_width, int q) {
  require(half_width > 0.0 && q >= 1, ErrorCode::InvalidArgument, "line grid needs A > 0, q >= 1");
  const double h = 4.0 / (2.0 * q + 1.0);
  const int cells = static_cast<int>(std::lround(2.0 * half_width / h));
  return Grid::uniform(cells - 1, Interval{-half_width, half_width});
}

NeutralMode solve_truncated_line(const ShearProfile& profile, double half_width, const Grid& grid) {
  if (profile.kind() != DomainKind::Line)
    fail(ErrorCode::OutOfDomain, "line problem needs a line-domain profile, got " + profile.describe());
  require(half_width >= 4.0, ErrorCode::InvalidArgument, "truncation half width must be >= 4");
  require(std::abs(grid.interval().lo + half_width) <= 1e-12 * half_width &&
              std::abs(grid.interval().hi - half_width) <= 1e-12 * half_width,
          ErrorCode::ShapeMismatch, "grid does not span (-A, A)");
  const RVec v = neutral_potential(profile, grid);
  GroundState gs = ground_state(grid, v);
  if (-gs.mu <= 0.0) fail(ErrorCode::NoBoundState, "no positive eigenvalue on (-A, A)");
  const double h1 = norm(gs.phi, grid, NormKind::H1);
  for (double& p : gs.phi) p /= h1;
  return NeutralMode{-gs.mu, std::move(gs.phi), grid, gs.residual, Normalization::H1Unit};
}

LineLimit line_eigenvalue_limit(const ShearProfile& profile, std::span<const double> widths, int q) {
  if (profile.kind() != DomainKind::Line)
    fail(ErrorCode::OutOfDomain, "line limit needs a line-domain profile, got " + profile.describe());
  require(widths.size() >= 3, ErrorCode::InvalidArgument, "line limit needs at least 3 widths");
  LineLimit out;
  for (double a : widths) out.table.push_back({a, solve_truncated_line(profile, a, line_grid(a, q)).alpha_sq});
  const auto& t = out.table;
  out.monotone = true;
  for (std::size_t i = 1; i < t.size(); ++i) {
    if (!(t[i].half_width > t[i - 1].half_width))
      fail(ErrorCode::NotConverging, "widths must be strictly increasing");
    if (t[i].beta_sq < t[i - 1].beta_sq) out.monotone = false;
  }
  for (std::size_t i = 2; i < t.size(); ++i) {
    const double d0 = std::abs(t[i - 1].beta_sq - t[i - 2].beta_sq);
    const double d1 = std::abs(t[i].beta_sq - t[i - 1].beta_sq);
    const double floor = 1e-13 * std::abs(t[i].beta_sq);
    if (d1 > floor && !(d1 < d0)) fail(ErrorCode::NotConverging, "width differences do not decrease");
  }
  // Aitken on the last three widths
  const std::size_t m = t.size();
  const double x0 = t[m - 3].beta_sq, x1 = t[m - 2].beta_sq, x2 = t[m - 1].beta_sq;
  const double denom = (x2 - x1) - (x1 - x0);
  out.alpha0_sq = std::abs(denom) > 1e-14 * std::abs(x2) ? x2 - (x2 - x1) * (x2 - x1) / denom : x2;
  out.alpha0 = std::sqrt(std::max(out.alpha0_sq, 0.0));
  return out;
}

}  // namespace shearinst
