#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "shearinst/error.hpp"
#include "shearinst/neutral_modes.hpp"

using namespace shearinst;
using oracle::pi;

TEST_CASE("channel neutral mode of the sine profile") {
  const ShearProfile p = ShearProfile::sine(2.0);
  const Grid g = Grid::uniform(2000, p.domain());
  const NeutralMode m = solve_neutral(p, g);
  CHECK(std::abs(m.alpha_sq - oracle::sine_alpha_sq(2.0)) < 1e-5);
  CHECK(std::abs(m.alpha_sq - oracle::sine_alpha_sq_discrete(2.0, 2000)) < 1e-8);
  double err = 0.0;
  for (int i = 0; i < g.n(); ++i) {
    err = std::max(err, std::abs(m.phi[i] - std::cos(pi * g.nodes()[i] / 2.0)));
    REQUIRE(m.phi[i] > 0.0);
  }
  CHECK(err < 1e-4);
  CHECK(norm(m.phi, g, NormKind::L2) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(m.normalization == Normalization::L2Unit);
  CHECK(m.residual <= 1e-8);

  const NeutralMode m16 = solve_neutral(ShearProfile::sine(1.6), Grid::uniform(2000, Interval{}));
  CHECK(std::abs(m16.alpha_sq - oracle::sine_alpha_sq(1.6)) < 1e-5);
}

TEST_CASE("no unstable mode below the threshold") {
  const ShearProfile p = ShearProfile::sine(1.0);
  try {
    solve_neutral(p, Grid::uniform(200, p.domain()));
    FAIL("beta = 1 accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NoUnstableNeutralMode);
  }
}

TEST_CASE("eigenvalue converges at second order") {
  const ShearProfile p = ShearProfile::sine(2.0);
  auto err = [&](int n) { return std::abs(solve_neutral(p, Grid::uniform(n, p.domain())).alpha_sq - oracle::sine_alpha_sq(2.0)); };
  CHECK(std::log2(err(199) / err(399)) >= 1.9);
}

TEST_CASE("rayleigh quotient and the minimization principle") {
  const ShearProfile p = ShearProfile::sine(2.0);
  const Grid g = Grid::uniform(800, p.domain());
  const NeutralMode m = solve_neutral(p, g);
  CHECK(rayleigh_quotient(m.phi, p, g) == doctest::Approx(-m.alpha_sq).epsilon(1e-9));

  RVec mode2 = oracle::sine_mode(g.nodes(), 2);
  const double nrm = norm(mode2, g, NormKind::L2);
  for (auto& v : mode2) v /= nrm;
  CHECK(std::abs(rayleigh_quotient(mode2, p, g) - (pi * pi - 4.0)) < 1e-4);

  std::mt19937 rng(7);
  std::normal_distribution<double> dist;
  for (int trial = 0; trial < 5; ++trial) {
    RVec v(g.n());
    for (auto& x : v) x = dist(rng);
    CHECK(rayleigh_quotient(v, p, g) >= -m.alpha_sq - 1e-6);
  }
}

TEST_CASE("truncated line problem against the discrete square well") {
  const ShearProfile base = ShearProfile::sheet_base();
  for (double A : {8.0, 16.0}) {
    const Grid g = line_grid(A, 64);
    const NeutralMode m = solve_truncated_line(base, A, g);
    const double ref = oracle::square_well_discrete(A, g.h(), pi * pi / 16.0, 2.0);
    CHECK(m.alpha_sq == doctest::Approx(ref).epsilon(1e-8));
    CHECK(m.normalization == Normalization::H1Unit);
    CHECK(norm(m.phi, g, NormKind::H1) == doctest::Approx(1.0).epsilon(1e-10));
    double asym = 0.0;
    for (int i = 0; i < g.n(); ++i) asym = std::max(asym, std::abs(m.phi[i] - m.phi[g.n() - 1 - i]));
    CHECK(asym < 1e-8);
  }
}

TEST_CASE("no bound state without a potential") {
  const ShearProfile flat = ShearProfile::custom({0.0, 1.0}, {}, Interval{-8.0, 8.0}, DomainKind::Line);
  try {
    solve_truncated_line(flat, 8.0, line_grid(8.0, 16));
    FAIL("flat potential accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NoBoundState);
  }
}

TEST_CASE("line eigenvalue limit") {
  const ShearProfile base = ShearProfile::sheet_base();
  const std::vector<double> widths{4.0, 8.0, 16.0, 32.0};
  const LineLimit lim = line_eigenvalue_limit(base, widths, 128);
  CHECK(lim.monotone);
  for (std::size_t i = 1; i < lim.table.size(); ++i) CHECK(lim.table[i].beta_sq >= lim.table[i - 1].beta_sq);
  const double a0 = oracle::square_well_alpha0();
  CHECK(std::abs(lim.alpha0 - a0) < 1e-3);
  CHECK(std::abs(lim.alpha0_sq - a0 * a0) < 1e-3);

  const std::vector<double> same{16.0, 16.0, 16.0};
  try {
    line_eigenvalue_limit(base, same);
    FAIL("degenerate widths accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotConverging);
  }
  const std::vector<double> ok{8.0, 16.0, 32.0};
  try {
    line_eigenvalue_limit(ShearProfile::sine(2.0), ok);
    FAIL("channel profile accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::OutOfDomain);
  }
}
