#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "shearinst/error.hpp"
#include "shearinst/singular_limits.hpp"

using namespace shearinst;
using oracle::pi;

namespace {

struct SineSetup {
  ShearProfile profile;
  Grid grid;
  NeutralMode mode;
  explicit SineSetup(double beta, int n = 1000)
      : profile(ShearProfile::sine(beta)), grid(Grid::uniform(n, Interval{})), mode(solve_neutral(profile, grid)) {}
};

}  // namespace

TEST_CASE("shifted crossing") {
  const ShearProfile p = ShearProfile::sine(2.0);
  CHECK(shifted_crossing(p, cplx(0.1, 0.05)) == doctest::Approx(-std::asin(0.1) / 2.0).epsilon(1e-12));
  CHECK(shifted_crossing(p, cplx(0.0, 0.3)) == 0.0);
  try {
    shifted_crossing(p, cplx(10.0, 1.0));
    FAIL("out-of-range crossing accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NoCrossing);
  }
}

TEST_CASE("gamma near and far from the real axis") {
  const SineSetup s(2.0);
  const cplx g = gamma(s.profile, s.mode, cplx(0.0, 1e-2));
  CHECK(std::abs(g.imag() - 2.0 * pi) < 0.02 * 2.0 * pi);
  CHECK(std::abs(g.real()) < 1e-2);

  // Plain Simpson on the spline of phi, integrand smooth at c = i.
  const cplx c(0.0, 1.0);
  auto integrand = [&](double y) {
    const double phi = s.mode.value_at(y);
    return 4.0 * phi * phi / (s.profile.eval(y, 0) - c);
  };
  const cplx ref = simpson(integrand, Interval{}, 4000) / std::pow(norm(s.mode.phi, s.grid, NormKind::L2), 2);
  CHECK(std::abs(gamma(s.profile, s.mode, c) - ref) < 1e-9);

  const cplx c1(0.05, 0.05);
  CHECK(std::abs(gamma(s.profile, s.mode, std::conj(c1)) - std::conj(gamma(s.profile, s.mode, c1))) < 1e-9);
}

TEST_CASE("im gamma is positive along the ray") {
  const SineSetup s(2.0);
  for (double tau : {1.0, 1e-1, 1e-2, 1e-3, 1e-4}) CHECK(gamma(s.profile, s.mode, cplx(0.0, tau)).imag() > 0.0);
}

TEST_CASE("lambda limit against closed forms") {
  for (double beta : {2.0, 1.6}) {
    const SineSetup s(beta);
    const auto taus = tau_decades(4);
    const auto lam = lambda_limit(s.profile, s.mode, taus);
    const double phi0 = s.mode.value_at(0.0);
    const double cf = pi * beta * phi0 * phi0;  // pi h(a) / |U'(a)| with h = beta^2 phi^2
    CHECK(lam.imag == doctest::Approx(pi * beta).epsilon(0.01));
    CHECK(lam.imag_closed_form == doctest::Approx(cf).epsilon(1e-6));
    CHECK(std::abs(lam.C) < 1e-6);
    CHECK(std::abs(lam.C_closed_form) < 1e-6);
    CHECK(lam.imag_discrepancy() < 0.01 * lam.imag);
    CHECK(std::abs(lam.as_complex() - lam.samples.back().value) <= lam.extrapolation_error + 1e-12);
  }
  const SineSetup s(2.0, 200);
  const std::vector<double> one{1.0};
  try {
    lambda_limit(s.profile, s.mode, one);
    FAIL("single tau accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidRange);
  }
  try {
    lambda_limit(s.profile, s.mode, tau_decades(1));
    FAIL("one decade accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidRange);
  }
}

TEST_CASE("sign fault is detected") {
  const SineSetup s(2.0, 200);
  set_lambda_sign_fault(true);
  try {
    lambda_limit(s.profile, s.mode, tau_decades(3));
    set_lambda_sign_fault(false);
    FAIL("flipped lambda accepted");
  } catch (const Error& e) {
    set_lambda_sign_fault(false);
    CHECK(e.code() == ErrorCode::ImagNotPositive);
  }
}

TEST_CASE("plemelj limits") {
  std::vector<std::pair<double, double>> seq;
  for (int j = 2; j <= 8; ++j) seq.push_back({std::pow(10.0, -j), std::pow(10.0, -j)});
  const auto one = plemelj_limit_check([](double) { return cplx(1.0); }, Interval{}, seq);
  CHECK(std::abs(one.target - cplx(0.0, -pi)) < 1e-8);
  CHECK(one.finest_discrepancy <= 1e-3);
  const auto lin = plemelj_limit_check([](double x) { return cplx(x); }, Interval{}, seq);
  CHECK(std::abs(lin.target - 2.0) < 1e-8);
  CHECK(lin.finest_discrepancy <= 1e-3);
  const auto half = plemelj_limit_check([](double x) { return cplx(std::sqrt(std::abs(x))); }, Interval{}, seq);
  CHECK(std::abs(half.target) < 1e-8);
  CHECK(half.finest_discrepancy <= 1e-3);
  CHECK(half.observed_exponent >= 0.3);
  CHECK(half.observed_exponent <= 0.7);
  for (std::size_t i = 1; i < half.steps.size(); ++i) CHECK(half.steps[i].discrepancy < half.steps[i - 1].discrepancy);
}

TEST_CASE("approximation defect") {
  const SineSetup s(2.0, 1000);
  double prev = INFINITY, sup_abs = 0.0;
  for (double tau : {1e-1, 1e-2, 1e-3}) {
    const auto d = approximation_defect(s.profile, cplx(0.0, tau), s.grid);
    CHECK(d.sup_imag < prev);
    prev = d.sup_imag;
    sup_abs = std::max(sup_abs, d.sup_abs);
  }
  CHECK(sup_abs < 10.0);
  const auto far = approximation_defect(s.profile, cplx(0.0, 1.0), s.grid);
  CHECK(std::isfinite(far.sup_abs));
  const auto lin = approximation_defect(ShearProfile::linear(), cplx(0.01, 0.02), s.grid);
  CHECK(lin.sup_abs < 1e-9);
}

TEST_CASE("sine coefficient growth") {
  const Grid g = Grid::uniform(8191, Interval{});
  const ShearProfile p = ShearProfile::sine(2.0);
  const auto near = sine_coefficient_growth(p, cplx(0.0, 1e-3), 1024, g);
  CHECK(near.rows.size() == 1024);
  CHECK(std::isfinite(near.max_ratio));
  CHECK(near.tail_max_ratio <= near.max_ratio);
  const auto smooth = sine_coefficient_growth(p, cplx(0.0, 1.0), 64, g);
  // 1/(U - i) is nonzero at y = +-1, so its sine coefficients fall like 1/m and no faster.
  CHECK(64.0 * smooth.rows[63].abs_coef <= 2.0 * 8.0 * smooth.rows[7].abs_coef);
  CHECK(smooth.rows[63].ratio < smooth.rows[15].ratio);
  try {
    sine_coefficient_growth(p, cplx(0.0, 1.0), 0, g);
    FAIL("m_max = 0 accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidRange);
  }
}
