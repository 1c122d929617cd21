#pragma once

#include <vector>

#include "shearinst/discretization.hpp"
#include "shearinst/neutral_modes.hpp"
#include "shearinst/profiles.hpp"

namespace shearinst {

/// Points where a profile's second derivative jumps (the sheet seams).
std::vector<double> profile_breakpoints(const ShearProfile& profile);

/// a' near a with U(a') = Re c.
double shifted_crossing(const ShearProfile& profile, cplx c);

/// int h / (U - c) dy with h = (-U''/U) phi^2, divided by ||phi||^2. Requires Im c != 0.
cplx gamma(const ShearProfile& profile, const NeutralMode& mode, cplx c);

struct GammaSample {
  double tau;
  cplx value;
};

struct SpectralCoefficientLambda {
  double C = 0.0;
  double imag = 0.0;
  cplx as_complex() const { return {C, imag}; }
  double extrapolation_error = 0.0;
  double observed_order = 0.0;
  /// pi (-U''/U)(a) phi(a)^2 / |U'(a)|, normalized like gamma.
  double imag_closed_form = 0.0;
  /// -p.v. int U'' phi^2 / U^2, normalized like gamma.
  double C_closed_form = 0.0;
  std::vector<GammaSample> samples;

  double imag_discrepancy() const { return std::abs(imag - imag_closed_form); }
  double C_discrepancy() const { return std::abs(C - C_closed_form); }
};

/// Gamma along c = i tau and two-point Richardson extrapolation to tau = 0.
SpectralCoefficientLambda lambda_limit(const ShearProfile& profile, const NeutralMode& mode,
                                       std::span<const double> tau_sequence);

/// Test hook: when set, lambda_limit flips the sign of Im lambda before its
/// positivity check. Used by `validate` to exercise fault detection.
void set_lambda_sign_fault(bool enabled);

/// tau = 10^-1, ..., 10^-decades.
std::vector<double> tau_decades(int decades);

struct PlemeljStep {
  double delta;
  double eps;
  cplx value;
  double discrepancy;
};

struct PlemeljCheck {
  cplx target;
  cplx extrapolated;
  std::vector<PlemeljStep> steps;
  double finest_discrepancy = 0.0;
  /// Least-squares slope of log discrepancy against log eps.
  double observed_exponent = 0.0;
};

/// int f(x) / (x + delta + i eps) dx against -i pi f(0) + p.v. int f(x) / x dx.
PlemeljCheck plemelj_limit_check(const ScalarFn& f, Interval interval,
                                 std::span<const std::pair<double, double>> delta_eps);

struct ApproximationDefect {
  double sup_abs;
  double sup_imag;
};

ApproximationDefect approximation_defect(const ShearProfile& profile, cplx c, const Grid& grid);

struct SineGrowthRow {
  int m;
  double abs_coef;
  double ratio;
};

struct SineGrowth {
  std::vector<SineGrowthRow> rows;
  double max_ratio = 0.0;
  /// max ratio over m >= tail_start.
  double tail_max_ratio = 0.0;
  int tail_start = 16;
};

SineGrowth sine_coefficient_growth(const ShearProfile& profile, cplx c, int m_max, const Grid& grid,
                                   int tail_start = 16);

}  // namespace shearinst
