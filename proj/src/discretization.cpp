#include "shearinst/discretization.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "shearinst/error.hpp"

namespace shearinst {
namespace {

constexpr int kGaussPoints = 16;

struct GaussRule {
  std::array<double, kGaussPoints> x{};
  std::array<double, kGaussPoints> w{};
};

const GaussRule& gauss_rule() {
  static const GaussRule rule = [] {
    GaussRule g;
    const int n = kGaussPoints;
    for (int i = 0; i < n; ++i) {
      double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
      double dp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = 0.0;
        for (int j = 1; j <= n; ++j) {
          const double p2 = p1;
          p1 = p0;
          p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / j;
        }
        dp = n * (z * p0 - p1) / (z * z - 1.0);
        const double dz = p0 / dp;
        z -= dz;
        if (std::abs(dz) < 1e-16) break;
      }
      g.x[i] = z;
      g.w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    return g;
  }();
  return rule;
}

cplx gauss_panel(const ScalarFn& f, double a, double b) {
  const auto& g = gauss_rule();
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  cplx sum = 0.0;
  for (int i = 0; i < kGaussPoints; ++i) sum += g.w[i] * f(mid + half * g.x[i]);
  return half * sum;
}

// Graded side of a panel: layers shrink toward `anchor`, `width` is signed.
struct GradedSide {
  double anchor;
  double width;
  cplx layers = 0.0;
  double magnitude = 0.0;
  int depth = 0;

  void add_layer(const ScalarFn& f) {
    const double outer = anchor + width / std::ldexp(1.0, depth);
    const double inner = anchor + width / std::ldexp(1.0, depth + 1);
    const cplx v = width > 0 ? gauss_panel(f, inner, outer) : gauss_panel(f, outer, inner);
    layers += v;
    magnitude += std::abs(v);
    ++depth;
  }
  cplx innermost(const ScalarFn& f) const {
    const double edge = anchor + width / std::ldexp(1.0, depth);
    return width > 0 ? gauss_panel(f, anchor, edge) : gauss_panel(f, edge, anchor);
  }
};

}  // namespace

Grid::Grid(Interval interval, RVec nodes, double stretch)
    : interval_(interval), nodes_(std::move(nodes)), stretch_(stretch) {
  const std::size_t n = nodes_.size();
  spacings_.resize(n + 1);
  weights_.resize(n);
  double prev = interval_.lo;
  for (std::size_t i = 0; i < n; ++i) {
    spacings_[i] = nodes_[i] - prev;
    prev = nodes_[i];
  }
  spacings_[n] = interval_.hi - prev;
  for (std::size_t i = 0; i < n; ++i) weights_[i] = 0.5 * (spacings_[i] + spacings_[i + 1]);
}

Grid Grid::uniform(int n, Interval interval) {
  require(n >= 1, ErrorCode::InvalidArgument, "grid needs n >= 1");
  require(interval.hi > interval.lo, ErrorCode::InvalidArgument, "empty grid interval");
  RVec nodes(n);
  const double h = interval.length() / (n + 1);
  for (int i = 0; i < n; ++i) nodes[i] = interval.lo + (i + 1) * h;
  return Grid(interval, std::move(nodes), 0.0);
}

Grid Grid::clustered(int n, Interval interval, double center, double stretch) {
  if (stretch == 0.0) return uniform(n, interval);
  require(n >= 1 && stretch > 0.0, ErrorCode::InvalidArgument, "clustered grid needs n >= 1, stretch > 0");
  require(center > interval.lo && center < interval.hi, ErrorCode::InvalidArgument,
          "cluster center must lie inside the interval");
  const double right = interval.hi - center, left = center - interval.lo;
  auto balance = [&](double s0) {
    return right * std::sinh(stretch * (1.0 + s0)) - left * std::sinh(stretch * (1.0 - s0));
  };
  double lo = -1.0, hi = 1.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (balance(mid) < 0.0 ? lo : hi) = mid;
  }
  const double s0 = 0.5 * (lo + hi);
  const double scale = right / std::sinh(stretch * (1.0 - s0));
  RVec nodes(n);
  for (int i = 0; i < n; ++i) {
    const double s = -1.0 + 2.0 * (i + 1) / (n + 1);
    nodes[i] = center + scale * std::sinh(stretch * (s - s0));
  }
  return Grid(interval, std::move(nodes), stretch);
}

Grid Grid::restrict(int first, int count) const {
  require(first >= 0 && count >= 1 && first + count <= n(), ErrorCode::InvalidArgument, "restriction out of range");
  const double lo = first == 0 ? interval_.lo : nodes_[first - 1];
  const double hi = first + count == n() ? interval_.hi : nodes_[first + count];
  return Grid(Interval{lo, hi}, RVec(nodes_.begin() + first, nodes_.begin() + first + count), stretch_);
}

double Grid::min_spacing() const { return *std::min_element(spacings_.begin(), spacings_.end()); }
double Grid::max_spacing() const { return *std::max_element(spacings_.begin(), spacings_.end()); }

namespace {
template <class V>
std::vector<V> apply_impl(const TridiagonalOperator& op, std::span<const V> x) {
  require(x.size() == op.size(), ErrorCode::ShapeMismatch, "operator/vector size mismatch");
  const std::size_t n = x.size();
  std::vector<V> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    V s = op.diag[i] * x[i];
    if (i > 0) s += op.off[i - 1] * x[i - 1];
    if (i + 1 < n) s += op.off[i] * x[i + 1];
    y[i] = s / op.mass[i];
  }
  return y;
}
}  // namespace

CVec TridiagonalOperator::apply(std::span<const cplx> x) const { return apply_impl(*this, x); }
RVec TridiagonalOperator::apply(std::span<const double> x) const { return apply_impl(*this, x); }

TridiagonalOperator stiffness_operator(const Grid& grid) {
  const int n = grid.n();
  const auto sp = grid.spacings();
  TridiagonalOperator op;
  op.diag.resize(n);
  op.off.resize(n > 0 ? n - 1 : 0);
  op.mass.assign(grid.weights().begin(), grid.weights().end());
  for (int i = 0; i < n; ++i) op.diag[i] = 1.0 / sp[i] + 1.0 / sp[i + 1];
  for (int i = 0; i + 1 < n; ++i) op.off[i] = -1.0 / sp[i + 1];
  return op;
}

TridiagonalOperator helmholtz_operator(const Grid& grid, double alpha_sq) {
  TridiagonalOperator op = stiffness_operator(grid);
  for (std::size_t i = 0; i < op.size(); ++i) op.diag[i] += op.mass[i] * alpha_sq;
  return op;
}

TridiagonalOperator helmholtz_operator(const Grid& grid, std::span<const double> potential) {
  require(grid.conforms(potential.size()), ErrorCode::ShapeMismatch, "potential size mismatch");
  TridiagonalOperator op = stiffness_operator(grid);
  for (std::size_t i = 0; i < op.size(); ++i) op.diag[i] += op.mass[i] * potential[i];
  return op;
}

template <class T>
TridiagonalLU<T>::TridiagonalLU(std::span<const T> lower, std::span<const T> diag, std::span<const T> upper) {
  const std::size_t n = diag.size();
  require(n >= 1 && lower.size() + 1 == n && upper.size() + 1 == n, ErrorCode::ShapeMismatch,
          "tridiagonal band sizes");
  l_.assign(n > 0 ? n - 1 : 0, T{});
  d_.assign(diag.begin(), diag.end());
  u_.assign(upper.begin(), upper.end());
  double scale = 0.0;
  for (const auto& v : diag) scale = std::max(scale, std::abs(v));
  const double tiny = 1e-300 + 1e-15 * std::numeric_limits<double>::epsilon() * scale;
  require(std::abs(d_[0]) > tiny, ErrorCode::SingularOperator, "zero pivot in tridiagonal solve");
  for (std::size_t i = 1; i < n; ++i) {
    l_[i - 1] = lower[i - 1] / d_[i - 1];
    d_[i] -= l_[i - 1] * u_[i - 1];
    require(std::abs(d_[i]) > tiny, ErrorCode::SingularOperator, "zero pivot in tridiagonal solve");
  }
}

template <class T>
template <class V>
std::vector<V> TridiagonalLU<T>::solve(std::span<const V> rhs) const {
  const std::size_t n = d_.size();
  require(rhs.size() == n, ErrorCode::ShapeMismatch, "tridiagonal rhs size");
  std::vector<V> x(rhs.begin(), rhs.end());
  for (std::size_t i = 1; i < n; ++i) x[i] -= l_[i - 1] * x[i - 1];
  x[n - 1] /= d_[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) x[i] = (x[i] - u_[i] * x[i + 1]) / d_[i];
  return x;
}

template class TridiagonalLU<double>;
template class TridiagonalLU<cplx>;
template RVec TridiagonalLU<double>::solve<double>(std::span<const double>) const;
template CVec TridiagonalLU<double>::solve<cplx>(std::span<const cplx>) const;
template CVec TridiagonalLU<cplx>::solve<cplx>(std::span<const cplx>) const;

template <class T>
LowRankTridiagonalSolver<T>::LowRankTridiagonalSolver(std::span<const T> lower, std::span<const T> diag,
                                                      std::span<const T> upper,
                                                      std::vector<std::vector<T>> u_cols, std::vector<T> c_diag,
                                                      std::vector<std::vector<T>> v_cols)
    : base_(lower, diag, upper), v_(std::move(v_cols)), r_(u_cols.size()) {
  require(c_diag.size() == r_ && v_.size() == r_, ErrorCode::ShapeMismatch, "low-rank factor sizes");
  for (auto& col : u_cols) z_.push_back(base_.template solve<T>(col));
  // capacitance K = C^{-1} + V^T Z, inverted by Gauss-Jordan (r is tiny)
  std::vector<T> k(r_ * r_), inv(r_ * r_, T{});
  for (std::size_t i = 0; i < r_; ++i) {
    for (std::size_t j = 0; j < r_; ++j) {
      T s{};
      for (std::size_t m = 0; m < v_[i].size(); ++m) s += v_[i][m] * z_[j][m];
      k[i * r_ + j] = s + (i == j ? T(1) / c_diag[i] : T{});
    }
    inv[i * r_ + i] = T(1);
  }
  for (std::size_t c = 0; c < r_; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < r_; ++r)
      if (std::abs(k[r * r_ + c]) > std::abs(k[piv * r_ + c])) piv = r;
    require(std::abs(k[piv * r_ + c]) > 1e-300, ErrorCode::SingularOperator, "singular capacitance matrix");
    for (std::size_t j = 0; j < r_; ++j) {
      std::swap(k[c * r_ + j], k[piv * r_ + j]);
      std::swap(inv[c * r_ + j], inv[piv * r_ + j]);
    }
    const T p = k[c * r_ + c];
    for (std::size_t j = 0; j < r_; ++j) {
      k[c * r_ + j] /= p;
      inv[c * r_ + j] /= p;
    }
    for (std::size_t r = 0; r < r_; ++r) {
      if (r == c) continue;
      const T f = k[r * r_ + c];
      for (std::size_t j = 0; j < r_; ++j) {
        k[r * r_ + j] -= f * k[c * r_ + j];
        inv[r * r_ + j] -= f * inv[c * r_ + j];
      }
    }
  }
  cap_inv_ = std::move(inv);
}

template <class T>
template <class V>
std::vector<V> LowRankTridiagonalSolver<T>::solve(std::span<const V> rhs) const {
  std::vector<V> x = base_.template solve<V>(rhs);
  std::vector<V> t(r_), s(r_);
  for (std::size_t i = 0; i < r_; ++i) {
    V acc{};
    for (std::size_t m = 0; m < x.size(); ++m) acc += v_[i][m] * x[m];
    t[i] = acc;
  }
  for (std::size_t i = 0; i < r_; ++i) {
    V acc{};
    for (std::size_t j = 0; j < r_; ++j) acc += cap_inv_[i * r_ + j] * t[j];
    s[i] = acc;
  }
  for (std::size_t j = 0; j < r_; ++j)
    for (std::size_t m = 0; m < x.size(); ++m) x[m] -= z_[j][m] * s[j];
  return x;
}

template class LowRankTridiagonalSolver<double>;
template class LowRankTridiagonalSolver<cplx>;
template RVec LowRankTridiagonalSolver<double>::solve<double>(std::span<const double>) const;
template CVec LowRankTridiagonalSolver<double>::solve<cplx>(std::span<const cplx>) const;
template CVec LowRankTridiagonalSolver<cplx>::solve<cplx>(std::span<const cplx>) const;

CVec helmholtz_solve(const TridiagonalOperator& op, std::span<const cplx> f) {
  require(f.size() == op.size(), ErrorCode::ShapeMismatch, "helmholtz rhs size");
  TridiagonalLU<double> lu(op.off, op.diag, op.off);
  CVec rhs(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) rhs[i] = op.mass[i] * f[i];
  return lu.solve<cplx>(rhs);
}

CVec to_complex(std::span<const double> x) { return CVec(x.begin(), x.end()); }

cplx inner_product(std::span<const cplx> f, std::span<const cplx> g, const Grid& grid, NormKind kind) {
  require(grid.conforms(f.size()) && grid.conforms(g.size()), ErrorCode::ShapeMismatch,
          "inner product operands do not conform to the grid");
  const auto w = grid.weights();
  cplx s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += w[i] * f[i] * std::conj(g[i]);
  if (kind == NormKind::H1) {
    const auto sp = grid.spacings();
    const std::size_t n = f.size();
    for (std::size_t j = 0; j <= n; ++j) {
      const cplx df = (j < n ? f[j] : 0.0) - (j > 0 ? f[j - 1] : 0.0);
      const cplx dg = (j < n ? g[j] : 0.0) - (j > 0 ? g[j - 1] : 0.0);
      s += df * std::conj(dg) / sp[j];
    }
  }
  return s;
}

double inner_product(std::span<const double> f, std::span<const double> g, const Grid& grid, NormKind kind) {
  return inner_product(to_complex(f), to_complex(g), grid, kind).real();
}

double norm(std::span<const cplx> f, const Grid& grid, NormKind kind) {
  return std::sqrt(std::max(0.0, inner_product(f, f, grid, kind).real()));
}

double norm(std::span<const double> f, const Grid& grid, NormKind kind) { return norm(to_complex(f), grid, kind); }

double derivative_norm(std::span<const cplx> f, const Grid& grid) {
  require(grid.conforms(f.size()), ErrorCode::ShapeMismatch, "derivative norm operand size");
  const auto sp = grid.spacings();
  const std::size_t n = f.size();
  double s = 0.0;
  for (std::size_t j = 0; j <= n; ++j) {
    const cplx df = (j < n ? f[j] : 0.0) - (j > 0 ? f[j - 1] : 0.0);
    s += std::norm(df) / sp[j];
  }
  return std::sqrt(s);
}

GridSpline::GridSpline(const Grid& grid, std::span<const double> values) {
  require(grid.conforms(values.size()), ErrorCode::ShapeMismatch, "spline values size");
  const std::size_t n = values.size() + 2;
  x_.resize(n);
  y_.resize(n);
  x_[0] = grid.interval().lo;
  x_[n - 1] = grid.interval().hi;
  y_[0] = y_[n - 1] = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    x_[i + 1] = grid.nodes()[i];
    y_[i + 1] = values[i];
  }
  m_.assign(n, 0.0);
  if (n < 3) return;
  const std::size_t k = n - 2;
  RVec lo(k - 1), di(k), up(k - 1), rhs(k);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double h0 = x_[i] - x_[i - 1], h1 = x_[i + 1] - x_[i];
    di[i - 1] = (h0 + h1) / 3.0;
    if (i + 1 < n - 1) up[i - 1] = h1 / 6.0;
    if (i > 1) lo[i - 2] = h0 / 6.0;
    rhs[i - 1] = (y_[i + 1] - y_[i]) / h1 - (y_[i] - y_[i - 1]) / h0;
  }
  const RVec m = TridiagonalLU<double>(lo, di, up).solve<double>(rhs);
  std::copy(m.begin(), m.end(), m_.begin() + 1);
}

double GridSpline::operator()(double y) const {
  auto it = std::upper_bound(x_.begin(), x_.end(), y);
  std::size_t i = it == x_.begin() ? 0 : static_cast<std::size_t>(it - x_.begin()) - 1;
  i = std::min(i, x_.size() - 2);
  const double h = x_[i + 1] - x_[i];
  const double a = (x_[i + 1] - y) / h, b = (y - x_[i]) / h;
  return a * y_[i] + b * y_[i + 1] + ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[i + 1]) * h * h / 6.0;
}

QuadratureResult graded_integral(const ScalarFn& f, Interval interval, const GradedQuadratureOptions& options) {
  require(interval.hi > interval.lo, ErrorCode::InvalidArgument, "empty integration interval");
  require(options.initial_panels >= 1, ErrorCode::InvalidArgument, "initial_panels must be >= 1");
  const double slack = 1e-14 * interval.length();
  auto inside = [&](double p) { return p > interval.lo + slack && p < interval.hi - slack; };

  std::vector<double> special;
  for (double p : options.singular_points)
    if (inside(p)) special.push_back(p);
  std::vector<double> pts{interval.lo, interval.hi};
  for (double p : special) pts.push_back(p);
  for (double p : options.breakpoints)
    if (inside(p)) pts.push_back(p);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end(), [&](double x, double y) { return std::abs(x - y) <= slack; }),
            pts.end());
  auto is_special = [&](double p) {
    return std::any_of(special.begin(), special.end(), [&](double s) { return std::abs(s - p) <= slack; });
  };

  cplx fixed = 0.0;
  double fixed_magnitude = 0.0;
  std::vector<GradedSide> sides;
  for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
    const double a = pts[k], b = pts[k + 1];
    const int m = options.initial_panels;
    for (int j = 0; j < m; ++j) {
      const double lo = a + (b - a) * j / m;
      const double hi = j + 1 == m ? b : a + (b - a) * (j + 1) / m;
      const bool glo = j == 0 && is_special(a);
      const bool ghi = j + 1 == m && is_special(b);
      if (glo && ghi) {
        const double mid = 0.5 * (lo + hi);
        sides.push_back({lo, mid - lo});
        sides.push_back({hi, mid - hi});
      } else if (glo) {
        sides.push_back({lo, hi - lo});
      } else if (ghi) {
        sides.push_back({hi, lo - hi});
      } else {
        const cplx v = gauss_panel(f, lo, hi);
        fixed += v;
        fixed_magnitude += std::abs(v);
      }
    }
  }

  QuadratureResult result;
  if (sides.empty()) {
    result.value = fixed;
    result.converged = true;
    return result;
  }
  cplx previous = 0.0;
  for (int depth = 0; depth <= options.max_depth; ++depth) {
    cplx total = fixed;
    double magnitude = fixed_magnitude;
    for (auto& s : sides) {
      if (depth > 0) s.add_layer(f);
      const cplx inner = s.innermost(f);
      total += s.layers + inner;
      magnitude += s.magnitude + std::abs(inner);
    }
    result.value = total;
    result.depth = depth;
    if (depth >= 2) {
      // relative to the absolute integral so cancelling integrands still terminate
      const double scale = std::max(std::abs(total), 1e-3 * magnitude);
      result.last_difference = scale > 0.0 ? std::abs(total - previous) / scale : 0.0;
      if (result.last_difference <= options.rel_tol) {
        result.converged = true;
        return result;
      }
    }
    previous = total;
  }
  return result;
}

cplx pv_integral(const ScalarFn& f, double x0, Interval interval, const GradedQuadratureOptions& options) {
  const double margin = 1e-9 * interval.length();
  require(x0 > interval.lo + margin && x0 < interval.hi - margin, ErrorCode::SingularityOnBoundary,
          "principal-value point at or too close to the interval boundary");
  const cplx f0 = f(x0);
  ScalarFn regular = [&](double x) { return (f(x) - f0) / (x - x0); };
  GradedQuadratureOptions opts = options;
  opts.singular_points.push_back(x0);
  const QuadratureResult q = graded_integral(regular, interval, opts);
  if (!q.converged && q.last_difference > opts.fail_tol)
    fail(ErrorCode::NoConvergence, "principal-value quadrature did not converge");
  return q.value + f0 * std::log((interval.hi - x0) / (x0 - interval.lo));
}

cplx near_singular_integral(const ScalarFn& f, double a_prime, double c_imag, Interval interval,
                            GradedQuadratureOptions options) {
  require(c_imag > 0.0, ErrorCode::InvalidArgument, "near-singular integral needs c_I > 0");
  options.singular_points.push_back(a_prime);
  const QuadratureResult q = graded_integral(f, interval, options);
  if (!q.converged && q.last_difference > options.fail_tol)
    fail(ErrorCode::NoConvergence, "near-singular quadrature hit the depth cap");
  return q.value;
}

cplx fourier_sine_coefficient(std::span<const cplx> f, int m, const Grid& grid) {
  require(m >= 1, ErrorCode::InvalidRange, "sine mode index must be >= 1");
  require(grid.conforms(f.size()), ErrorCode::ShapeMismatch, "sine coefficient operand size");
  require(grid.interval().lo == -1.0 && grid.interval().hi == 1.0, ErrorCode::InvalidArgument,
          "sine coefficients need a grid on (-1, 1)");
  const auto y = grid.nodes();
  const auto w = grid.weights();
  cplx s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += w[i] * f[i] * std::sin(m * std::numbers::pi * (y[i] + 1.0) / 2.0);
  return s;
}

cplx simpson(const ScalarFn& f, Interval interval, int panels) {
  require(panels >= 2 && panels % 2 == 0, ErrorCode::InvalidArgument, "simpson needs an even panel count");
  const double h = interval.length() / panels;
  cplx s = f(interval.lo) + f(interval.hi);
  for (int i = 1; i < panels; ++i) s += (i % 2 ? 4.0 : 2.0) * f(interval.lo + i * h);
  return s * h / 3.0;
}

}  // namespace shearinst
