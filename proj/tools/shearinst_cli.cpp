#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "shearinst/shearinst.h"

namespace {

struct Flags {
  std::optional<std::string> config_file;
  std::optional<std::string> profile;
  std::optional<double> beta;
  std::optional<double> k;
  std::optional<int> n;
  std::optional<double> stretch;
  std::optional<double> eps_min, eps_max;
  std::optional<int> eps_count;
  std::optional<int> tau_decades;
  std::optional<double> L;
  std::optional<std::vector<double>> k_list, L_list;
  std::optional<double> eps_hat;
  std::optional<std::string> out_dir;
  std::optional<std::string> inject_fault;
  bool parallel = false;
  bool no_warm_start = false;
  bool quick = false;
};

nlohmann::json overlay(const Flags& f) {
  nlohmann::json j = nlohmann::json::object();
  if (f.profile) j["profile"]["family"] = *f.profile;
  if (f.beta) j["profile"]["beta"] = *f.beta;
  if (f.k) {
    j["profile"]["k"] = *f.k;
    j["glue"]["k"] = *f.k;
  }
  if (f.n) j["n"] = *f.n;
  if (f.stretch) j["stretch"] = *f.stretch;
  if (f.eps_min) j["eps"]["min"] = *f.eps_min;
  if (f.eps_max) j["eps"]["max"] = *f.eps_max;
  if (f.eps_count) j["eps"]["count"] = *f.eps_count;
  if (f.tau_decades) j["tau_decades"] = *f.tau_decades;
  if (f.L) j["sheet"]["L"] = *f.L;
  if (f.k_list) j["sheet"]["k_list"] = *f.k_list;
  if (f.L_list) j["sheet"]["L_list"] = *f.L_list;
  if (f.eps_hat) {
    j["sheet"]["eps_hat"] = *f.eps_hat;
    j["glue"]["eps_hat"] = *f.eps_hat;
  }
  if (f.out_dir) j["out_dir"] = *f.out_dir;
  if (f.inject_fault) j["inject_fault"] = *f.inject_fault;
  if (f.parallel) j["parallel"] = true;
  if (f.no_warm_start) j["warm_start"] = false;
  if (f.quick) j["quick"] = true;
  return j;
}

int report_failure() {
  std::cerr << "error: " << si_last_error() << "\n";
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Unstable Rayleigh-equation eigenvalues of shear flows"};
  app.set_version_flag("--version", si_version());
  app.require_subcommand(1);
  app.fallthrough();

  Flags f;
  app.add_option("--config", f.config_file, "JSON config file")->check(CLI::ExistingFile);
  app.add_option("--profile", f.profile, "sine | sheet | rescaled")
      ->check(CLI::IsMember({"sine", "sheet", "rescaled"}));
  app.add_option("--beta", f.beta, "sine profile parameter");
  app.add_option("--k", f.k, "rescaling wavenumber");
  app.add_option("--n", f.n, "interior grid nodes");
  app.add_option("--stretch", f.stretch, "dispersion grid clustering");
  app.add_option("--eps-min", f.eps_min);
  app.add_option("--eps-max", f.eps_max);
  app.add_option("--eps-count", f.eps_count);
  app.add_option("--tau-decades", f.tau_decades, "tau = 10^-1 .. 10^-d");
  app.add_option("--L", f.L, "cutoff length");
  app.add_option("--k-list", f.k_list, "sheet scan wavenumbers")->delimiter(',');
  app.add_option("--L-list", f.L_list, "coupling scan lengths")->delimiter(',');
  app.add_option("--eps-hat", f.eps_hat, "eps / k^2 for sheet and glue");
  app.add_option("--out-dir", f.out_dir, "output directory");
  app.add_flag("--parallel", f.parallel, "solve independent rows concurrently");
  app.add_flag("--no-warm-start", f.no_warm_start, "solve dispersion points independently");
  app.add_flag("--quick", f.quick, "reduced grids for validate");
  app.add_option("--inject-fault", f.inject_fault, "test hook")->group("");

  const std::vector<std::pair<std::string, std::string>> commands{
      {"neutral", "neutral mode of the profile"},
      {"lambda", "spectral coefficient lambda"},
      {"dispersion", "certified dispersion curve"},
      {"sheet", "vortex-sheet scaling scan and coupling probes"},
      {"glue", "one glued inner-outer solve"},
      {"validate", "invariant suite"}};
  for (const auto& [name, help] : commands) app.add_subcommand(name, help);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return 1;
  }
  const std::string command = app.get_subcommands().front()->get_name();
  const bool needs_profile = command == "neutral" || command == "lambda" || command == "dispersion";
  if (needs_profile && !f.profile && !f.config_file) {
    std::cerr << "error: " << command << " needs --profile or --config\n" << app.help();
    return 1;
  }

  si_config* config = nullptr;
  if (si_status s = si_config_new(&config); s != SI_OK) return report_failure();
  if (f.config_file) {
    if (si_status s = si_config_load_file(config, f.config_file->c_str()); s != SI_OK) {
      si_config_free(config);
      return report_failure();
    }
  }
  if (si_status s = si_config_merge_json(config, overlay(f).dump().c_str()); s != SI_OK) {
    si_config_free(config);
    return report_failure();
  }
  si_result* result = nullptr;
  const si_status s = si_run(config, command.c_str(), &result);
  si_config_free(config);
  if (s != SI_OK) return report_failure();
  const int code = si_result_exit_code(result);
  (code == 0 ? std::cout : std::cerr) << si_result_text(result);
  for (size_t i = 0; i < si_result_file_count(result); ++i) std::cout << "wrote " << si_result_file(result, i) << '\n';
  si_result_free(result);
  return code;
}
