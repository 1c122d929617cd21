#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>

#include "shearinst/commands.hpp"
#include "shearinst/error.hpp"
#include "shearinst/vortex_sheet.hpp"

namespace shearinst {
namespace {

constexpr double kPi = std::numbers::pi;

std::string fmt(const char* pattern, double a, double b = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, pattern, a, b);
  return buf;
}

// Square-well matching for the sheet base profile: mu tan(2 mu) = sqrt(w^2 - mu^2), w = pi / 4.
double square_well_alpha0() {
  const double w = kPi / 4.0;
  auto f = [&](double mu) { return mu * std::tan(2.0 * mu) - std::sqrt(w * w - mu * mu); };
  double lo = 1e-9, hi = w - 1e-12;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) < 0.0 ? lo : hi) = mid;
  }
  const double mu = 0.5 * (lo + hi);
  return mu * std::tan(2.0 * mu);
}

class LambdaFaultGuard {
 public:
  explicit LambdaFaultGuard(bool on) : on_(on) { set_lambda_sign_fault(on); }
  ~LambdaFaultGuard() {
    if (on_) set_lambda_sign_fault(false);
  }

 private:
  bool on_;
};

}  // namespace

std::vector<ValidateRow> validate_table(const RunConfig& config) {
  const LambdaFaultGuard guard(config.inject_fault == "lambda_sign");
  const int n = config.quick ? 250 : 1000;
  std::vector<ValidateRow> table;
  auto check = [&](const std::string& name, const std::function<std::pair<bool, std::string>()>& body) {
    ValidateRow row{name, false, ""};
    try {
      auto [ok, detail] = body();
      row.passed = ok;
      row.detail = detail;
    } catch (const Error& e) {
      row.detail = std::string("raised ") + std::string(error_code_name(e.code()));
    }
    table.push_back(std::move(row));
  };

  const ShearProfile sine = ShearProfile::sine(2.0);
  const Grid uniform = Grid::uniform(n, sine.domain());
  const NeutralMode mode = solve_neutral(sine, uniform);
  const double h = uniform.h();

  check("profiles.ratio_continuous_at_zero", [&] {
    const double d = std::abs(sine.continuous_ratio(1e-7) - sine.continuous_ratio(0.0));
    return std::pair{d < 1e-8, fmt("jump %.3g", d)};
  });
  check("profiles.rescale_chain_rule", [&] {
    const ShearProfile base = ShearProfile::sheet_base();
    const ShearProfile r = rescale_profile(base, 8.0);
    double worst = 0.0;
    for (double y : {-0.4, -0.1, 0.03, 0.2})
      worst = std::max(worst, std::abs(r.eval(y, 1) - 8.0 * base.eval(8.0 * y, 1)));
    return std::pair{worst < 1e-12, fmt("max deviation %.3g", worst)};
  });
  check("discretization.pv_closed_form", [&] {
    // p.v. int_{-1}^{1} e^x / x dx = 2 Shi(1)
    const double exact = 2.0 * 1.0572508753757285;
    const cplx v = pv_integral([](double x) { return cplx(std::exp(x)); }, 0.0, Interval{});
    const double e = std::abs(v - exact);
    return std::pair{e < 1e-8, fmt("error %.3g", e)};
  });
  check("neutral.closed_form_eigenvalue", [&] {
    const double e = std::abs(mode.alpha_sq - (4.0 - kPi * kPi / 4.0));
    return std::pair{e < 10.0 * h * h, fmt("error %.3g (bound %.3g)", e, 10.0 * h * h)};
  });
  check("neutral.rayleigh_quotient_matches", [&] {
    const double q = rayleigh_quotient(mode.phi, sine, uniform);
    const double e = std::abs(q + mode.alpha_sq);
    return std::pair{e < 1e-9, fmt("|quotient + alpha^2| = %.3g", e)};
  });
  check("neutral.line_limit_oracle", [&] {
    const std::vector<double> widths{8.0, 16.0, 32.0};
    const LineLimit lim = line_eigenvalue_limit(ShearProfile::sheet_base(), widths, config.quick ? 64 : 128);
    const double e = std::abs(lim.alpha0 - square_well_alpha0());
    return std::pair{lim.monotone && e < 1e-3, fmt("alpha0 error %.3g, monotone %g", e, lim.monotone)};
  });

  const std::vector<double> taus = tau_decades(config.tau_decades);
  check("singular_limits.im_gamma_positive", [&] {
    const auto lambda = lambda_limit(sine, mode, taus);
    double worst = INFINITY;
    for (const auto& s : lambda.samples) worst = std::min(worst, s.value.imag());
    return std::pair{worst > 0.0 && lambda.imag > 0.0, fmt("min Im gamma %.6g, Im lambda %.6g", worst, lambda.imag)};
  });
  check("singular_limits.lambda_closed_forms", [&] {
    const auto lambda = lambda_limit(sine, mode, taus);
    const double e = lambda.imag_discrepancy() / lambda.imag_closed_form;
    return std::pair{e < 0.01 && lambda.C_discrepancy() < 0.01 * lambda.imag,
                     fmt("imag rel %.3g, C abs %.3g", e, lambda.C_discrepancy())};
  });
  check("singular_limits.plemelj_decay", [&] {
    std::vector<std::pair<double, double>> seq;
    for (int j = 2; j <= 6; ++j) seq.push_back({std::pow(10.0, -j), std::pow(10.0, -j)});
    const auto r = plemelj_limit_check([](double x) { return cplx(std::sqrt(std::abs(x))); }, Interval{}, seq);
    bool decreasing = true;
    for (std::size_t i = 1; i < r.steps.size(); ++i) decreasing &= r.steps[i].discrepancy < r.steps[i - 1].discrepancy;
    return std::pair{decreasing && r.observed_exponent > 0.3 && r.observed_exponent < 0.7,
                     fmt("exponent %.3f, finest %.3g", r.observed_exponent, r.finest_discrepancy)};
  });
  check("singular_limits.defect_imag_nonincreasing", [&] {
    double prev = INFINITY, sup_abs = 0.0;
    bool mono = true;
    for (double tau : {1e-1, 1e-2, 1e-3}) {
      const auto d = approximation_defect(sine, cplx(0.0, tau), uniform);
      mono &= d.sup_imag <= prev;
      prev = d.sup_imag;
      sup_abs = std::max(sup_abs, d.sup_abs);
    }
    return std::pair{mono && std::isfinite(sup_abs), fmt("final sup_imag %.3g, sup_abs %.3g", prev, sup_abs)};
  });

  const RayleighOperators ops(sine, mode);
  check("lyapunov_schmidt.T_phi_equals_K_phi", [&] {
    const CVec phi = to_complex(mode.phi);
    const CVec x = solve_T(ops, apply_K(ops, phi));
    double e = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) e = std::max(e, std::abs(x[i] - phi[i]));
    return std::pair{e < 1e-8, fmt("max |x - phi| %.3g", e)};
  });
  const double eps = 1e-2;
  check("lyapunov_schmidt.neumann_matches_direct", [&] {
    const cplx c_pred = predict_c(lambda_limit(sine, mode, taus), eps);
    const auto d = solve_projected(ops, eps, c_pred);
    const auto m = solve_projected(ops, eps, c_pred, ProjectedMethod::neumann());
    double e = 0.0;
    for (std::size_t i = 0; i < d.psi.size(); ++i) e = std::max(e, std::abs(d.psi[i] - m.psi[i]));
    return std::pair{e < 1e-8, fmt("max diff %.3g, contraction %.3g", e, m.certificate.contraction_ratio)};
  });

  const Grid clustered = dispersion_grid(sine, n, config.stretch);
  const RayleighOperators cops(sine, solve_neutral(sine, clustered));
  check("dispersion.point_certified_and_pencil_agrees", [&] {
    const auto clambda = lambda_limit(sine, cops.mode(), taus);
    const DispersionPoint p = solve_reduced(cops, clambda, eps);
    const PencilResult pc = pencil_eigenvalue(sine, cops.mode(), eps, p.c);
    const double d = std::abs(pc.c - p.c);
    return std::pair{p.c.imag() > 0.0 && p.winding == 1 && d <= config.pencil_tolerance,
                     fmt("winding %g, |c - c_pencil| %.3g", p.winding, d)};
  });
  check("dispersion.pencil_conjugate_symmetry", [&] {
    const auto clambda = lambda_limit(sine, cops.mode(), taus);
    const PencilResult up = pencil_eigenvalue(sine, cops.mode(), eps, predict_c(clambda, eps));
    const PencilResult down = pencil_eigenvalue(sine, cops.mode(), eps, std::conj(predict_c(clambda, eps)));
    const double d = std::abs(down.c - std::conj(up.c));
    return std::pair{d < 1e-8, fmt("|c_down - conj c_up| %.3g", d)};
  });
  check("dispersion.G_reflection", [&] {
    const cplx c(0.002, 0.004);
    const cplx a = eval_G(cops, eps, c), b = eval_G(cops, eps, -std::conj(c));
    const double d = std::abs(b - std::conj(a)) / std::abs(a);
    return std::pair{d < 1e-8, fmt("relative mismatch %.3g", d)};
  });

  check("vortex_sheet.cutoff_bounds", [&] {
    const CutoffPair cut = build_cutoffs(16.0, 32.0);
    bool refused = false;
    try {
      build_cutoffs(16.0, 4.0);
    } catch (const Error& e) {
      refused = e.code() == ErrorCode::BoundViolation;
    }
    return std::pair{cut.chi_in(0.0) == 1.0 && cut.chi_out(0.0) == 0.0 && refused,
                     std::string("plateaus exact, L=4 refused")};
  });
  check("vortex_sheet.z_norm_closed_form", [&] {
    const double k = 8.0;
    const Grid g = Grid::uniform(n, Interval{});
    CVec f(g.n());
    for (int i = 0; i < g.n(); ++i) f[i] = std::sin(kPi * (g.nodes()[i] + 1.0) / 2.0);
    const double e = std::abs(z_norm(f, g, k, k) - (kPi / 2.0 + k));
    return std::pair{e < 10.0 * h * h * k, fmt("error %.3g", e)};
  });
  check("vortex_sheet.glued_matches_channel", [&] {
    const double k = 8.0, L = 32.0;
    SheetScanOptions o;
    o.q = config.quick ? 100 : 400;
    o.tau_decades = config.tau_decades;
    const std::vector<double> ks{k};
    const SheetScan scan = scaling_scan(ks, 0.02, L, o);
    const SheetScanRow& r = scan.rows.front();
    if (!r.failure.empty()) return std::pair{false, "row failed: " + r.failure};
    const double d = std::abs(r.im_c_glued - r.im_c_channel);
    return std::pair{d < 1e-8 && r.residual < 1e-6, fmt("|dIm c| %.3g, residual %.3g", d, r.residual)};
  });
  return table;
}

}  // namespace shearinst
