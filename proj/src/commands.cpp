#include "shearinst/commands.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "shearinst/error.hpp"
#include "shearinst/vortex_sheet.hpp"

namespace shearinst {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr double kPi = std::numbers::pi;

ShearProfile make_profile(const ProfileConfig& p) {
  if (p.family == "sine") return ShearProfile::sine(p.beta);
  if (p.family == "sheet") return ShearProfile::sheet_base();
  return rescale_profile(ShearProfile::sheet_base(), p.k);
}

json cplx_json(cplx z) { return json::array({z.real(), z.imag()}); }

std::string pass(bool ok) { return ok ? "PASS" : "FAIL"; }

class Output {
 public:
  Output(const RunConfig& config, std::string command) : config_(config), command_(std::move(command)) {
    std::error_code ec;
    fs::create_directories(config.out_dir, ec);
    if (ec) fail(ErrorCode::IoError, "cannot create output directory " + config.out_dir + ": " + ec.message());
  }

  std::string path(const std::string& name) const { return (fs::path(config_.out_dir) / name).string(); }

  /// Writes name.csv and its sibling name.json.
  void emit(const std::string& name, const std::vector<std::string>& header,
            const std::vector<std::vector<std::string>>& rows, const json& results, CommandResult& out) const {
    const std::string csv = path(name + ".csv");
    write_csv(csv, header, rows);
    out.files.push_back(csv);
    emit_json(name, results, out);
  }

  void emit_json(const std::string& name, const json& results, CommandResult& out) const {
    const json report{{"command", command_},
                      {"version", kVersion},
                      {"config", json::parse(config_to_json(config_))},
                      {"results", results}};
    out.report = report.dump(2);
    const std::string file = path(name + ".json");
    std::ofstream js(file);
    if (!js) fail(ErrorCode::IoError, "cannot write " + file);
    js << out.report << '\n';
    out.files.push_back(file);
  }

 private:
  const RunConfig& config_;
  std::string command_;
};

CommandResult cmd_neutral(const RunConfig& config) {
  CommandResult out;
  const Output io(config, "neutral");
  const ShearProfile profile = make_profile(config.profile);
  std::vector<std::vector<std::string>> rows;
  json results;
  if (config.profile.family == "sheet") {
    const InnerNeutral inner = solve_inner_neutral(profile, config.sheet.line_half_width);
    const auto y = inner.phi0.grid.nodes();
    for (std::size_t i = 0; i < y.size(); ++i) rows.push_back({format_number(y[i]), format_number(inner.phi0.phi[i])});
    json table = json::array();
    for (const auto& r : inner.limit.table) table.push_back({{"half_width", r.half_width}, {"beta_sq", r.beta_sq}});
    results = {{"alpha_sq", inner.alpha0_sq}, {"alpha", inner.alpha0}, {"width_table", table},
               {"monotone", inner.limit.monotone}, {"normalization", "H1"}, {"residual", inner.phi0.residual}};
  } else {
    const Grid grid = Grid::uniform(config.n, profile.domain());
    const NeutralMode mode = solve_neutral(profile, grid);
    const auto y = grid.nodes();
    for (std::size_t i = 0; i < y.size(); ++i) rows.push_back({format_number(y[i]), format_number(mode.phi[i])});
    results = {{"alpha_sq", mode.alpha_sq},
               {"alpha", mode.alpha()},
               {"residual", mode.residual},
               {"rayleigh_quotient", rayleigh_quotient(mode.phi, profile, grid)},
               {"normalization", "L2"}};
  }
  results["profile"] = profile.describe();
  io.emit("neutral", {"y", "phi"}, rows, results, out);
  char buf[128];
  std::snprintf(buf, sizeof buf, "alpha_sq = %.10g\n", results["alpha_sq"].get<double>());
  out.text = buf;
  return out;
}

CommandResult cmd_lambda(const RunConfig& config) {
  CommandResult out;
  const Output io(config, "lambda");
  const ShearProfile profile = make_profile(config.profile);
  const std::vector<double> taus = tau_decades(config.tau_decades);
  SpectralCoefficientLambda lambda;
  if (config.profile.family == "sheet") {
    lambda = lambda_limit(profile, solve_inner_neutral(profile, config.sheet.line_half_width).phi0, taus);
  } else {
    const NeutralMode mode = solve_neutral(profile, Grid::uniform(config.n, profile.domain()));
    lambda = lambda_limit(profile, mode, taus);
  }
  std::vector<std::vector<std::string>> rows;
  for (const auto& s : lambda.samples)
    rows.push_back({format_number(s.tau), format_number(s.value.real()), format_number(s.value.imag())});
  const json results{{"C", lambda.C},
                     {"imag", lambda.imag},
                     {"extrapolation_error", lambda.extrapolation_error},
                     {"observed_order", lambda.observed_order},
                     {"imag_closed_form", lambda.imag_closed_form},
                     {"C_closed_form", lambda.C_closed_form},
                     {"profile", profile.describe()}};
  io.emit("lambda", {"tau", "re_gamma", "im_gamma"}, rows, results, out);
  char buf[160];
  std::snprintf(buf, sizeof buf, "lambda = %.10g + %.10gi (closed form imag %.10g)\n", lambda.C, lambda.imag,
                lambda.imag_closed_form);
  out.text = buf;
  return out;
}

CommandResult cmd_dispersion(const RunConfig& config) {
  CommandResult out;
  const Output io(config, "dispersion");
  if (config.profile.family == "sheet") fail(ErrorCode::ConfigError, "dispersion needs a channel profile");
  const ShearProfile profile = make_profile(config.profile);
  RayleighOperators ops(profile, solve_neutral(profile, dispersion_grid(profile, config.n, config.stretch)));
  const auto lambda = lambda_limit(profile, ops.mode(), tau_decades(config.tau_decades));
  const std::vector<double> eps = log_spaced(config.eps.min, config.eps.max, config.eps.count);
  CurveOptions options;
  options.warm_start = config.warm_start;
  options.parallel = config.parallel;
  const DispersionCurve curve = continue_curve(ops, lambda, eps, options);

  std::vector<std::vector<std::string>> rows;
  int certified = 0;
  for (const auto& p : curve.points) {
    const cplx pc = p.pencil_c.value_or(cplx(NAN, NAN));
    rows.push_back({format_number(p.eps), format_number(p.c.real()), format_number(p.c.imag()),
                    format_number(p.g_residual), std::to_string(p.winding), format_number(pc.real()),
                    format_number(pc.imag()), format_number(p.growth_rate), std::to_string(p.iterations),
                    p.certified() ? "ok" : p.failure});
    certified += p.certified();
  }
  json validated = nullptr;
  try {
    validated = validated_eps_max(ops, lambda, config.eps.min, config.eps.max);
  } catch (const Error& e) {
    validated = std::string(error_code_name(e.code()));
  }
  const bool slope_ok = curve.slope_deviation <= 0.05;
  const json results{{"lambda", cplx_json(lambda.as_complex())},
                     {"slope", curve.slope},
                     {"slope_target", curve.slope_target},
                     {"slope_deviation", curve.slope_deviation},
                     {"slope_check", pass(slope_ok)},
                     {"certified_points", certified},
                     {"points", curve.points.size()},
                     {"validated_eps_range", json::array({config.eps.min, validated})},
                     {"profile", profile.describe()}};
  io.emit("dispersion",
          {"eps", "re_c", "im_c", "g_residual", "winding", "pencil_re_c", "pencil_im_c", "growth_rate", "iterations",
           "status"},
          rows, results, out);
  std::ostringstream text;
  text << certified << "/" << curve.points.size() << " points certified; slope " << curve.slope << " vs "
       << curve.slope_target << " (" << pass(slope_ok) << ")\n";
  if (certified < static_cast<int>(curve.points.size())) text << "warning: uncertified rows flagged in status column\n";
  out.text = text.str();
  return out;
}

SheetScanOptions scan_options(const RunConfig& config) {
  SheetScanOptions o;
  o.q = config.sheet.q;
  o.tau_decades = config.tau_decades;
  o.line_half_width = config.sheet.line_half_width;
  o.parallel = config.parallel;
  return o;
}

CommandResult cmd_sheet(const RunConfig& config) {
  CommandResult out;
  const Output io(config, "sheet");
  const SheetScanOptions options = scan_options(config);
  const SheetScan scan = scaling_scan(config.sheet.k_list, config.sheet.eps_hat, config.sheet.L, options);
  std::vector<std::vector<std::string>> rows;
  json constants = json::array();
  for (const auto& r : scan.rows) {
    rows.push_back({format_number(r.k), format_number(r.alpha_tilde), format_number(r.alpha_ratio),
                    format_number(r.eps), format_number(r.im_c_channel), format_number(r.im_c_glued),
                    format_number(r.growth_rate), format_number(r.psi_h1), format_number(r.phiout_z),
                    format_number(r.residual), r.failure.empty() ? "ok" : r.failure});
    constants.push_back(r.estimate_constant);
  }
  json results{{"L", scan.L}, {"xi", scan.xi}, {"alpha0", scan.alpha0}, {"lambda0", cplx_json(scan.lambda0)},
               {"estimate_constants", constants}};
  if (config.sheet.L_list.size() >= 2) {
    const CouplingScan cs = coupling_scan(config.sheet.coupling_k, config.sheet.L_list, options);
    json probes = json::array();
    for (const auto& r : cs.rows) probes.push_back({{"L", r.L}, {"norm_B", r.norm_B}, {"norm_C", r.norm_C}});
    results["probes"] = {{"k", cs.k}, {"rows", probes}, {"slope_B", cs.slope_B}, {"slope_C", cs.slope_C}};
  }
  io.emit("sheet_scan",
          {"k", "alpha_tilde", "alpha_ratio", "eps", "im_c_channel", "im_c_glued", "growth_rate", "psi_h1",
           "phiout_z", "residual", "status"},
          rows, results, out);
  std::ostringstream text;
  for (const auto& r : scan.rows)
    text << "k=" << r.k << (r.failure.empty() ? " Im c=" + format_number(r.im_c_glued) : " failed: " + r.failure)
         << '\n';
  out.text = text.str();
  return out;
}

CommandResult cmd_glue(const RunConfig& config) {
  CommandResult out;
  const Output io(config, "glue");
  const double k = config.glue.k, L = config.sheet.L;
  const ShearProfile base = ShearProfile::sheet_base();
  const InnerNeutral inner = solve_inner_neutral(base, config.sheet.line_half_width);
  const auto lambda0 = lambda_limit(base, inner.phi0, tau_decades(config.tau_decades));
  const ShearProfile rescaled = rescale_profile(base, k);
  const NeutralMode mode = solve_neutral(rescaled, sheet_grid(k, config.sheet.q));
  const GluedSystem system(rescaled, mode, k, L, config.glue.eps_hat * k * k, inner.alpha0,
                           build_cutoffs(k, L, config.glue.out_hi));
  const GluedSolution s = solve_sheet_reduced(system, lambda0.as_complex());
  const auto y = mode.grid.nodes();
  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 0; i < y.size(); ++i)
    rows.push_back({format_number(y[i]), format_number(system.cutoffs().chi_in(y[i])),
                    format_number(system.cutoffs().chi_out(y[i])), format_number(s.phi[i].real()),
                    format_number(s.phi[i].imag()), format_number(s.phi_out[i].real()),
                    format_number(s.phi_out[i].imag())});
  const json results{{"k", k},
                     {"L", L},
                     {"eps", s.eps},
                     {"c", cplx_json(s.c)},
                     {"G", cplx_json(s.G)},
                     {"delta", s.delta},
                     {"delta_h", s.delta_h},
                     {"winding", s.winding},
                     {"psi_h1", s.psi_h1},
                     {"phiout_z", s.phiout_z},
                     {"assembled_residual", s.assembled_residual},
                     {"iterations", s.iterations},
                     {"contraction", s.contraction},
                     {"xi_eff", system.xi_eff()},
                     {"norm_B", system.probe_B()},
                     {"norm_C", system.probe_C()},
                     {"alpha0", inner.alpha0},
                     {"lambda0", cplx_json(lambda0.as_complex())}};
  io.emit("glue", {"y", "chi_in", "chi_out", "re_phi", "im_phi", "re_phi_out", "im_phi_out"}, rows, results, out);
  out.text = "glued c = " + format_number(s.c.real()) + " + " + format_number(s.c.imag()) + "i, winding " +
             std::to_string(s.winding) + '\n';
  return out;
}

CommandResult cmd_validate(const RunConfig& config) {
  CommandResult out;
  const Output io(config, "validate");
  const std::vector<ValidateRow> table = validate_table(config);
  std::vector<std::vector<std::string>> rows;
  std::ostringstream text;
  int failed = 0;
  for (const auto& r : table) {
    rows.push_back({r.name, pass(r.passed), r.detail});
    text << pass(r.passed) << "  " << r.name << "  " << r.detail << '\n';
    failed += !r.passed;
  }
  text << (table.size() - failed) << "/" << table.size() << " invariants hold\n";
  io.emit("validate", {"invariant", "status", "detail"}, rows, json{{"failed", failed}, {"total", table.size()}}, out);
  out.text = text.str();
  out.exit = failed ? ExitCode::Invariant : ExitCode::Ok;
  return out;
}

}  // namespace

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
  std::ofstream f(path, std::ios::binary);
  if (!f) fail(ErrorCode::IoError, "cannot write " + path);
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) f << (i ? "," : "") << cells[i];
    f << '\n';
  };
  line(header);
  for (const auto& r : rows) {
    require(r.size() == header.size(), ErrorCode::ShapeMismatch, "CSV row width differs from header");
    line(r);
  }
  if (!f) fail(ErrorCode::IoError, "write failed for " + path);
}

ExitCode exit_code_for(const Error& error) {
  switch (error.code()) {
    case ErrorCode::ConfigError:
    case ErrorCode::IoError:
    case ErrorCode::InvalidArgument:
    case ErrorCode::InvalidRange:
      return ExitCode::Usage;
    default:
      return ExitCode::Precondition;
  }
}

CommandResult run_command(const std::string& name, const RunConfig& config) {
  try {
    config.check();
    if (name == "neutral") return cmd_neutral(config);
    if (name == "lambda") return cmd_lambda(config);
    if (name == "dispersion") return cmd_dispersion(config);
    if (name == "sheet") return cmd_sheet(config);
    if (name == "glue") return cmd_glue(config);
    if (name == "validate") return cmd_validate(config);
    fail(ErrorCode::ConfigError, "unknown command '" + name + "'");
  } catch (const Error& e) {
    CommandResult out;
    out.exit = exit_code_for(e);
    out.text = std::string("error: ") + e.what() + '\n';
    return out;
  } catch (const std::exception& e) {
    CommandResult out;
    out.exit = ExitCode::Usage;
    out.text = std::string("error: ") + e.what() + '\n';
    return out;
  }
  return {};
}

}  // namespace shearinst
