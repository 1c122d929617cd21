#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "shearinst/error.hpp"
#include "shearinst/profiles.hpp"

using namespace shearinst;

TEST_CASE("sine profile values and derivatives") {
  const ShearProfile p = ShearProfile::sine(2.0);
  CHECK(p.a() == 0.0);
  for (double y : {-0.9, -0.3, 0.0, 0.4, 0.8}) {
    CHECK(p.eval(y, 0) == doctest::Approx(-std::sin(2.0 * y)).epsilon(1e-14));
    CHECK(p.eval(y, 1) == doctest::Approx(-2.0 * std::cos(2.0 * y)).epsilon(1e-14));
    CHECK(p.eval(y, 2) == doctest::Approx(4.0 * std::sin(2.0 * y)).epsilon(1e-14));
  }
  CHECK(p.continuous_ratio(0.0) == doctest::Approx(4.0));
  CHECK(p.continuous_ratio(0.37) == doctest::Approx(4.0));
}

TEST_CASE("sheet base profile plateaus and rescaling") {
  const ShearProfile base = ShearProfile::sheet_base();
  CHECK(base.eval(3.0, 0) == -1.0);
  CHECK(base.eval(-5.0, 0) == 1.0);
  CHECK(base.global_smoothness() == 1);
  const ShearProfile r16 = rescale_profile(base, 16.0);
  CHECK(r16.eval(1.0 / 8.0, 0) == doctest::Approx(-1.0));
  const ShearProfile r1 = rescale_profile(base, 1.0);
  for (double y : {-0.7, 0.1, 0.5}) CHECK(r1.eval(y, 0) == base.eval(y, 0));
  CHECK(std::abs(rescale_profile(base, 8.0).eval(0.0, 2)) < 1e-14);
}

TEST_CASE("rescaling is exact for every order") {
  const ShearProfile base = ShearProfile::sheet_base();
  for (double k : {2.0, 8.0, 16.0, 32.0}) {
    const ShearProfile r = rescale_profile(base, k);
    for (double y : {-0.61, -0.05, 0.013, 0.3}) {
      for (int order = 0; order <= 3; ++order)
        CHECK(r.eval(y, order) == doctest::Approx(std::pow(k, order) * base.eval(k * y, order)).epsilon(1e-13));
    }
  }
}

TEST_CASE("finite differences converge at second order") {
  const ShearProfile sine = ShearProfile::sine(2.0);
  const ShearProfile sheet = rescale_profile(ShearProfile::sheet_base(), 2.0);
  for (const ShearProfile* p : {&sine, &sheet}) {
    for (int order = 0; order <= 2; ++order) {
      const double y = 0.23;
      auto err = [&](double h) {
        const double fd = (p->eval(y + h, order) - p->eval(y - h, order)) / (2.0 * h);
        return std::abs(fd - p->eval(y, order + 1));
      };
      const double observed = std::log2(err(1e-2) / err(5e-3));
      CHECK(observed >= 1.9);
    }
  }
}

TEST_CASE("assumption report") {
  const auto r = check_assumptions(ShearProfile::sine(2.0), 1001);
  CHECK(r.pass);
  CHECK(r.sign_changes == 1);
  CHECK(r.min_ratio == doctest::Approx(4.0));
  const auto lin = check_assumptions(ShearProfile::linear(), 257);
  CHECK(lin.pass);
  CHECK(lin.min_ratio == doctest::Approx(0.0));
  CHECK(check_assumptions(ShearProfile::sine(1.0), 101).pass);
  CHECK(check_assumptions(ShearProfile::sheet_base(), 4001).pass);
  for (double beta : {1.6, 2.0, 3.0}) CHECK(check_assumptions(ShearProfile::sine(beta), 513).pass);
}

TEST_CASE("profile errors") {
  const ShearProfile p = ShearProfile::sine(2.0);
  CHECK_THROWS_AS(p.eval(1.5, 0), Error);
  try {
    p.eval(0.0, 4);
    FAIL("order 4 accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnsupportedOrder);
  }
  try {
    p.eval(2.0, 0);
    FAIL("out of domain accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::OutOfDomain);
  }
}
