#pragma once

#include <complex>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "shearinst/profiles.hpp"

namespace shearinst {

using cplx = std::complex<double>;
using RVec = std::vector<double>;
using CVec = std::vector<cplx>;

/// Interior nodes of a Dirichlet interval.
///
/// A uniform grid has spacing h = (hi - lo) / (n + 1). A clustered grid maps
/// a uniform parameter s in (-1, 1) through y = center + scale * sinh(stretch * (s - s0)),
/// so nodes bunch around `center` while the endpoints stay fixed. All
/// quadrature and difference weights below are written for general spacing
/// and reduce to the textbook uniform formulas when stretch = 0.
class Grid {
 public:
  static Grid uniform(int n, Interval interval);
  static Grid clustered(int n, Interval interval, double center, double stretch);
  /// Nodes [first, first + count) with Dirichlet ends at the neighbouring points.
  Grid restrict(int first, int count) const;

  int n() const { return static_cast<int>(nodes_.size()); }
  const Interval& interval() const { return interval_; }
  bool is_uniform() const { return stretch_ == 0.0; }
  double stretch() const { return stretch_; }
  /// Mean spacing (equals h on a uniform grid).
  double h() const { return interval_.length() / (n() + 1); }
  double min_spacing() const;
  double max_spacing() const;

  std::span<const double> nodes() const { return nodes_; }
  /// Trapezoid weights (lumped mass); zero boundary values are implicit.
  std::span<const double> weights() const { return weights_; }
  /// Spacing between consecutive points including the two boundary points (length n + 1).
  std::span<const double> spacings() const { return spacings_; }

  template <class F>
  RVec sample(F&& f) const {
    RVec out(nodes_.size());
    for (std::size_t i = 0; i < nodes_.size(); ++i) out[i] = f(nodes_[i]);
    return out;
  }

  bool conforms(std::size_t size) const { return size == nodes_.size(); }

 private:
  Grid(Interval interval, RVec nodes, double stretch);
  Interval interval_;
  RVec nodes_;
  RVec weights_;
  RVec spacings_;
  double stretch_ = 0.0;
};

/// Symmetric tridiagonal S + M diag(q), i.e. the weighted form of -D^2 + q.
/// `diag`/`off` hold S + M q; `mass` holds the lumped mass M.
struct TridiagonalOperator {
  RVec diag;
  RVec off;
  RVec mass;

  std::size_t size() const { return diag.size(); }
  /// Action of -D^2 + q on interior values.
  CVec apply(std::span<const cplx> x) const;
  RVec apply(std::span<const double> x) const;
};

TridiagonalOperator stiffness_operator(const Grid& grid);
TridiagonalOperator helmholtz_operator(const Grid& grid, double alpha_sq);
TridiagonalOperator helmholtz_operator(const Grid& grid, std::span<const double> potential);

/// LU factorization of a general tridiagonal matrix (no pivoting).
template <class T>
class TridiagonalLU {
 public:
  TridiagonalLU() = default;
  TridiagonalLU(std::span<const T> lower, std::span<const T> diag, std::span<const T> upper);
  std::size_t size() const { return d_.size(); }
  template <class V>
  std::vector<V> solve(std::span<const V> rhs) const;

 private:
  std::vector<T> l_, d_, u_;
};

/// Solves (D + U C V^T) x = b for a tridiagonal D and a rank-r correction.
template <class T>
class LowRankTridiagonalSolver {
 public:
  LowRankTridiagonalSolver(std::span<const T> lower, std::span<const T> diag, std::span<const T> upper,
                           std::vector<std::vector<T>> u_cols, std::vector<T> c_diag,
                           std::vector<std::vector<T>> v_cols);
  template <class V>
  std::vector<V> solve(std::span<const V> rhs) const;

 private:
  TridiagonalLU<T> base_;
  std::vector<std::vector<T>> z_;  // D^{-1} u_j
  std::vector<std::vector<T>> v_;
  std::vector<T> cap_inv_;  // inverse of (C^{-1} + V^T D^{-1} U), row-major r x r
  std::size_t r_ = 0;
};

/// Solves (S + M q) psi = M f.
CVec helmholtz_solve(const TridiagonalOperator& op, std::span<const cplx> f);

enum class NormKind { L2, H1 };

cplx inner_product(std::span<const cplx> f, std::span<const cplx> g, const Grid& grid, NormKind kind);
double inner_product(std::span<const double> f, std::span<const double> g, const Grid& grid, NormKind kind);
double norm(std::span<const cplx> f, const Grid& grid, NormKind kind);
double norm(std::span<const double> f, const Grid& grid, NormKind kind);
/// L2 norm of the difference-quotient derivative (interval midpoints, zero boundary values).
double derivative_norm(std::span<const cplx> f, const Grid& grid);

CVec to_complex(std::span<const double> x);

/// Natural cubic spline through the interior values plus zero boundary values.
class GridSpline {
 public:
  GridSpline(const Grid& grid, std::span<const double> values);
  double operator()(double y) const;

 private:
  RVec x_, y_, m_;
};

using ScalarFn = std::function<cplx(double)>;

struct GradedQuadratureOptions {
  /// Points toward which panels are refined geometrically (ratio 1/2).
  std::vector<double> singular_points;
  /// Points where the integrand is only piecewise smooth; split but not graded.
  std::vector<double> breakpoints;
  int initial_panels = 1;
  int max_depth = 30;
  double rel_tol = 1e-9;
  double fail_tol = 1e-6;
};

struct QuadratureResult {
  cplx value;
  int depth = 0;
  double last_difference = 0.0;
  bool converged = false;
};

/// Composite Gauss-Legendre with dyadic grading toward the singular points;
/// the grading depth grows until successive results agree to rel_tol.
QuadratureResult graded_integral(const ScalarFn& f, Interval interval, const GradedQuadratureOptions& options);

/// p.v. integral of f(x) / (x - x0) over the interval by singularity subtraction.
cplx pv_integral(const ScalarFn& f, double x0, Interval interval, const GradedQuadratureOptions& options = {});

/// Integral of a smooth integrand that peaks on the scale c_I around a_prime.
cplx near_singular_integral(const ScalarFn& f, double a_prime, double c_imag, Interval interval,
                            GradedQuadratureOptions options = {});

/// Trapezoid approximation of int f(y) sin(m pi (y + 1) / 2) dy on (-1, 1).
cplx fourier_sine_coefficient(std::span<const cplx> f, int m, const Grid& grid);

/// Composite Simpson rule with `panels` (even) subintervals.
cplx simpson(const ScalarFn& f, Interval interval, int panels);

}  // namespace shearinst
