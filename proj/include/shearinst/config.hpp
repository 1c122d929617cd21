#pragma once

#include <string>
#include <vector>

namespace shearinst {

struct ProfileConfig {
  std::string family = "sine";  // sine | sheet | rescaled
  double beta = 2.0;
  double k = 16.0;
};

struct EpsConfig {
  double min = 1e-3;
  double max = 5e-2;
  int count = 20;
};

struct SheetConfig {
  std::vector<double> k_list{8.0, 16.0, 32.0};
  double eps_hat = 0.02;
  double L = 32.0;
  std::vector<double> L_list{16.0, 32.0, 64.0};
  double coupling_k = 128.0;
  int q = 400;
  double line_half_width = 32.0;
};

struct GlueConfig {
  double k = 16.0;
  double eps_hat = 0.05;
  double out_hi = 3.5;
};

struct RunConfig {
  ProfileConfig profile;
  int n = 1000;
  double stretch = 7.0;
  EpsConfig eps;
  int tau_decades = 4;
  SheetConfig sheet;
  GlueConfig glue;
  double pencil_tolerance = 1e-6;
  std::string out_dir = "out";
  bool parallel = false;
  bool warm_start = true;
  bool quick = false;
  /// Test hook for validate; "" or "lambda_sign".
  std::string inject_fault;

  /// Throws ConfigError on a bad value.
  void check() const;
};

/// Parses a JSON object; unknown keys and wrong types raise ConfigError.
RunConfig config_from_json(const std::string& text);
RunConfig config_from_file(const std::string& path);
/// Overlays the keys present in `text` onto `base`.
RunConfig merge_config_json(const RunConfig& base, const std::string& text);
std::string config_to_json(const RunConfig& config, int indent = 2);

}  // namespace shearinst
