#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "shearinst/error.hpp"
#include "shearinst/lyapunov_schmidt.hpp"
#include "shearinst/singular_limits.hpp"

using namespace shearinst;
using oracle::pi;

namespace {

struct Fixture {
  ShearProfile profile = ShearProfile::sine(2.0);
  Grid grid = Grid::uniform(400, Interval{});
  RayleighOperators ops{profile, solve_neutral(profile, grid)};
  CVec phi = to_complex(ops.mode().phi);
};

double max_diff(std::span<const cplx> a, std::span<const cplx> b) {
  double e = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) e = std::max(e, std::abs(a[i] - b[i]));
  return e;
}

CVec mode2(const Grid& g) { return to_complex(oracle::sine_mode(g.nodes(), 2)); }

}  // namespace

TEST_CASE("projection P") {
  Fixture f;
  CHECK(max_diff(apply_P(f.ops, f.phi), f.phi) < 1e-12);
  const CVec m2 = mode2(f.grid);
  const double h2 = f.grid.h() * f.grid.h();
  for (const auto& v : apply_P(f.ops, m2)) CHECK(std::abs(v) < h2);
  CVec mix(f.phi.size());
  for (std::size_t i = 0; i < mix.size(); ++i) mix[i] = 2.0 * f.phi[i] + m2[i];
  CVec twice(f.phi.size());
  for (std::size_t i = 0; i < mix.size(); ++i) twice[i] = 2.0 * f.phi[i];
  CHECK(max_diff(apply_P(f.ops, mix), twice) < h2);
  CHECK_THROWS_AS(apply_P(f.ops, CVec(3)), Error);
}

TEST_CASE("remainder R") {
  Fixture f;
  for (const auto& v : apply_R(f.ops, 0.0, 0.0, mode2(f.grid))) CHECK(std::abs(v) == 0.0);
  const CVec r = apply_R(f.ops, 1e-2, 0.0, f.phi);
  // K phi = phi / beta^2 in the continuum.
  double err = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) err = std::max(err, std::abs(r[i] - (1e-2 / 4.0) * f.phi[i]));
  CHECK(err < 1e-2 * 10.0 * f.grid.h() * f.grid.h());
}

TEST_CASE("T phi equals K phi") {
  Fixture f;
  CHECK(max_diff(apply_T(f.ops, f.phi), apply_K(f.ops, f.phi)) < 1e-10);
  CHECK(max_diff(solve_T(f.ops, apply_K(f.ops, f.phi)), f.phi) < 1e-8);
  CHECK(max_diff(solve_T(f.ops, apply_K(f.ops, f.phi), TSolver::Dense), f.phi) < 1e-8);
  for (const auto& v : solve_T(f.ops, CVec(f.phi.size()))) CHECK(v == cplx(0.0));
}

TEST_CASE("T round trip for both solvers") {
  Fixture f;
  std::mt19937 rng(11);
  std::normal_distribution<double> d;
  CVec b(f.phi.size());
  for (auto& x : b) x = cplx(d(rng), d(rng));
  double nb = 0.0;
  for (auto& x : b) nb = std::max(nb, std::abs(x));
  for (TSolver s : {TSolver::Banded, TSolver::Dense}) CHECK(max_diff(apply_T(f.ops, solve_T(f.ops, b, s)), b) < 1e-10 * nb);
  CHECK(max_diff(solve_T(f.ops, b, TSolver::Banded), solve_T(f.ops, b, TSolver::Dense)) < 1e-9 * nb);
}

TEST_CASE("T stays invertible across profiles and grids") {
  for (double beta : {1.8, 2.0, 2.6}) {
    for (int n : {100, 200}) {
      const ShearProfile p = ShearProfile::sine(beta);
      const RayleighOperators ops(p, solve_neutral(p, Grid::uniform(n, Interval{})));
      CHECK(ops.dense_T().smallest_singular_value() > 1e-3);
    }
  }
}

TEST_CASE("T inverse K is self-adjoint") {
  Fixture f;
  std::mt19937 rng(3);
  std::normal_distribution<double> d;
  CVec a(f.phi.size()), b(f.phi.size());
  for (auto& x : a) x = d(rng);
  for (auto& x : b) x = d(rng);
  const CVec ta = solve_T(f.ops, apply_K(f.ops, a)), tb = solve_T(f.ops, apply_K(f.ops, b));
  const cplx lhs = shearinst::inner_product(std::span<const cplx>(ta), b, f.grid, NormKind::L2);
  const cplx rhs = shearinst::inner_product(std::span<const cplx>(a), tb, f.grid, NormKind::L2);
  CHECK(std::abs(lhs - rhs) < 1e-8 * std::abs(lhs));
}

TEST_CASE("projected solve: direct, neumann and residual") {
  Fixture f;
  const auto psi0 = solve_projected(f.ops, 0.0, 0.0).psi;
  for (const auto& v : psi0) CHECK(std::abs(v) == 0.0);

  const auto lam = lambda_limit(f.profile, f.ops.mode(), tau_decades(4));
  const double eps = 1e-2;
  const cplx c = cplx(0.0, eps / lam.imag);
  const auto d = solve_projected(f.ops, eps, c);
  const auto n = solve_projected(f.ops, eps, c, ProjectedMethod::neumann());
  CHECK(max_diff(d.psi, n.psi) < 1e-8);
  CHECK(n.certificate.contraction_ratio < 1.0);
  for (std::size_t i = 1; i < n.certificate.term_norms.size(); ++i)
    CHECK(n.certificate.term_norms[i] < n.certificate.term_norms[i - 1]);
  CHECK(projected_residual(f.ops, eps, c, d.psi) < 1e-8);
  CHECK(norm(d.psi, f.grid, NormKind::H1) / (eps + std::abs(c)) < 10.0);
}

TEST_CASE("neumann diverges past the perturbative range") {
  Fixture f;
  try {
    solve_projected(f.ops, 1.5, 0.0, ProjectedMethod::neumann());
    FAIL("eps = 1.5 converged");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NeumannDiverging);
  }
}

TEST_CASE("remainder norm scales linearly") {
  Fixture f;
  std::vector<double> lx, ly;
  for (double s : {1e-3, 3e-3, 1e-2, 3e-2, 1e-1}) {
    const cplx c(0.0, s / (2.0 * pi));
    lx.push_back(std::log(s + std::abs(c)));
    ly.push_back(std::log(r_norm_probe(f.ops, s, c)));
  }
  CHECK(std::abs(oracle::slope(lx, ly) - 1.0) <= 0.1);
}
