#pragma once

#include <optional>
#include <string>
#include <vector>

#include "shearinst/lyapunov_schmidt.hpp"
#include "shearinst/singular_limits.hpp"

namespace shearinst {

/// Grid clustered around the zero of U; the critical layer near a has width
/// of order Im c, which uniform grids of desk size cannot resolve at small eps.
Grid dispersion_grid(const ShearProfile& profile, int n, double stretch = 7.0);

/// G(c, eps) = (psi, phi) for the directly solved projected equation.
cplx eval_G(const RayleighOperators& ops, double eps, cplx c);

cplx predict_c(const SpectralCoefficientLambda& lambda, double eps);

struct WindingResult {
  int winding = 0;
  double min_abs_G = 0.0;
  int samples = 0;
};

/// Argument increment of G around the circle, in turns.
WindingResult winding_number(const RayleighOperators& ops, double eps, cplx center, double radius, int n_samples);

/// winding_number with the sample count doubled on PhaseUnwrapAmbiguous.
WindingResult certified_winding(const RayleighOperators& ops, double eps, cplx center, double radius,
                                int n_samples = 256, int max_samples = 8192);

struct DispersionPoint {
  double eps = 0.0;
  cplx c;
  double g_residual = 0.0;
  int winding = 0;
  int iterations = 0;
  std::optional<cplx> pencil_c;
  double growth_rate = 0.0;
  /// Empty when every certificate passed, otherwise the failing error code.
  std::string failure;

  bool certified() const { return failure.empty(); }
};

struct ReducedOptions {
  double tol_factor = 1e-10;
  int max_iterations = 60;
  int winding_samples = 256;
  std::optional<cplx> start;
};

DispersionPoint solve_reduced(const RayleighOperators& ops, const SpectralCoefficientLambda& lambda, double eps,
                              const ReducedOptions& options = {});

struct PencilResult {
  cplx c;
  CVec phi;
  int iterations = 0;
  double residual = 0.0;
};

/// Eigenvalue of [U(S + kM) + M U''] phi = c (S + kM) phi with k = alpha^2 - eps
/// nearest the shift, by shift-invert iteration.
PencilResult pencil_eigenvalue(const ShearProfile& profile, const NeutralMode& mode, double eps, cplx shift,
                               bool allow_real = false);

struct CurveOptions {
  bool warm_start = true;
  bool parallel = false;
  bool pencil = true;
};

struct DispersionCurve {
  std::vector<DispersionPoint> points;
  /// Least-squares slope of Im c against eps over certified points.
  double slope = 0.0;
  double slope_target = 0.0;
  double slope_deviation = 0.0;
};

DispersionCurve continue_curve(const RayleighOperators& ops, const SpectralCoefficientLambda& lambda,
                               std::span<const double> eps_grid, const CurveOptions& options = {});

/// Largest eps in [eps_lo, eps_hi] whose point certifies, by bisection in log eps.
double validated_eps_max(const RayleighOperators& ops, const SpectralCoefficientLambda& lambda, double eps_lo,
                         double eps_hi, int bisections = 12);

std::vector<double> log_spaced(double lo, double hi, int count);

struct StreamFunctionSample {
  RVec x;
  RVec y;
  /// Row-major (y, x) samples of phi(y) exp(i alpha x).
  CVec values;
  double growth_rate = 0.0;
  double phase_speed = 0.0;
};

StreamFunctionSample assemble_unstable_mode(const NeutralMode& mode, std::span<const cplx> psi, double alpha, cplx c,
                                            int nx = 64);

}  // namespace shearinst
