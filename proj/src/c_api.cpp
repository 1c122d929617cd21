#include "shearinst/shearinst.h"

#include <cstring>
#include <string>

#include "shearinst/commands.hpp"
#include "shearinst/error.hpp"
#include "shearinst/singular_limits.hpp"

struct si_config {
  shearinst::RunConfig value;
};

struct si_result {
  shearinst::CommandResult value;
};

struct si_profile {
  shearinst::ShearProfile value;
};

struct si_neutral {
  shearinst::NeutralMode value;
};

namespace {

thread_local std::string last_error;

si_status record(si_status status, const std::string& message) {
  last_error = message;
  return status;
}

template <class F>
si_status guarded(F&& body) {
  try {
    body();
    return SI_OK;
  } catch (const shearinst::Error& e) {
    return record(static_cast<si_status>(static_cast<int>(e.code())), e.what());
  } catch (const std::exception& e) {
    return record(SI_ERR_INTERNAL, e.what());
  } catch (...) {
    return record(SI_ERR_INTERNAL, "unknown exception");
  }
}

si_status null_handle(const char* what) { return record(SI_ERR_NULL_HANDLE, std::string(what) + " is NULL"); }

char* duplicate(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

}  // namespace

extern "C" {

const char* si_version(void) { return shearinst::kVersion; }

const char* si_status_name(si_status status) {
  switch (status) {
    case SI_OK:
      return "Ok";
    case SI_ERR_NULL_HANDLE:
      return "NullHandle";
    case SI_ERR_INTERNAL:
      return "Internal";
    default:
      if (status >= SI_ERR_INVALID_ARGUMENT && status <= SI_ERR_IO)
        return shearinst::error_code_name(static_cast<shearinst::ErrorCode>(status)).data();
      return "Unknown";
  }
}

const char* si_last_error(void) { return last_error.c_str(); }

void si_string_free(char* text) { delete[] text; }

si_status si_config_new(si_config** out) {
  if (!out) return null_handle("out");
  return guarded([&] { *out = new si_config{}; });
}

void si_config_free(si_config* config) { delete config; }

si_status si_config_merge_json(si_config* config, const char* json_text) {
  if (!config) return null_handle("config");
  if (!json_text) return null_handle("json_text");
  return guarded([&] { config->value = shearinst::merge_config_json(config->value, json_text); });
}

si_status si_config_load_file(si_config* config, const char* path) {
  if (!config) return null_handle("config");
  if (!path) return null_handle("path");
  return guarded([&] { config->value = shearinst::config_from_file(path); });
}

si_status si_config_to_json(const si_config* config, char** out) {
  if (!config) return null_handle("config");
  if (!out) return null_handle("out");
  return guarded([&] { *out = duplicate(shearinst::config_to_json(config->value)); });
}

si_status si_run(const si_config* config, const char* command, si_result** out) {
  if (!config) return null_handle("config");
  if (!command) return null_handle("command");
  if (!out) return null_handle("out");
  return guarded([&] { *out = new si_result{shearinst::run_command(command, config->value)}; });
}

int si_result_exit_code(const si_result* result) { return result ? static_cast<int>(result->value.exit) : 1; }

const char* si_result_text(const si_result* result) { return result ? result->value.text.c_str() : ""; }

const char* si_result_report(const si_result* result) { return result ? result->value.report.c_str() : ""; }

size_t si_result_file_count(const si_result* result) { return result ? result->value.files.size() : 0; }

const char* si_result_file(const si_result* result, size_t index) {
  if (!result || index >= result->value.files.size()) return nullptr;
  return result->value.files[index].c_str();
}

void si_result_free(si_result* result) { delete result; }

si_status si_profile_sine(double beta, si_profile** out) {
  if (!out) return null_handle("out");
  return guarded([&] { *out = new si_profile{shearinst::ShearProfile::sine(beta)}; });
}

si_status si_profile_sheet(si_profile** out) {
  if (!out) return null_handle("out");
  return guarded([&] { *out = new si_profile{shearinst::ShearProfile::sheet_base()}; });
}

si_status si_profile_rescaled(double k, si_profile** out) {
  if (!out) return null_handle("out");
  return guarded(
      [&] { *out = new si_profile{shearinst::rescale_profile(shearinst::ShearProfile::sheet_base(), k)}; });
}

si_status si_profile_eval(const si_profile* profile, double y, int order, double* out) {
  if (!profile) return null_handle("profile");
  if (!out) return null_handle("out");
  return guarded([&] { *out = profile->value.eval(y, order); });
}

void si_profile_free(si_profile* profile) { delete profile; }

si_status si_neutral_solve(const si_profile* profile, int n, si_neutral** out) {
  if (!profile) return null_handle("profile");
  if (!out) return null_handle("out");
  return guarded([&] {
    const auto& p = profile->value;
    *out = new si_neutral{shearinst::solve_neutral(p, shearinst::Grid::uniform(n, p.domain()))};
  });
}

si_status si_neutral_alpha_sq(const si_neutral* mode, double* out) {
  if (!mode) return null_handle("mode");
  if (!out) return null_handle("out");
  *out = mode->value.alpha_sq;
  return SI_OK;
}

size_t si_neutral_size(const si_neutral* mode) { return mode ? mode->value.phi.size() : 0; }

si_status si_neutral_copy(const si_neutral* mode, double* y, double* phi, size_t len) {
  if (!mode) return null_handle("mode");
  const auto nodes = mode->value.grid.nodes();
  const size_t count = len < nodes.size() ? len : nodes.size();
  for (size_t i = 0; i < count; ++i) {
    if (y) y[i] = nodes[i];
    if (phi) phi[i] = mode->value.phi[i];
  }
  return SI_OK;
}

void si_neutral_free(si_neutral* mode) { delete mode; }

si_status si_lambda(const si_profile* profile, const si_neutral* mode, int tau_decades, double* re, double* im) {
  if (!profile) return null_handle("profile");
  if (!mode) return null_handle("mode");
  if (!re || !im) return null_handle("re/im");
  return guarded([&] {
    const auto lambda = shearinst::lambda_limit(profile->value, mode->value, shearinst::tau_decades(tau_decades));
    *re = lambda.C;
    *im = lambda.imag;
  });
}

void si_set_lambda_sign_fault(int enabled) { shearinst::set_lambda_sign_fault(enabled != 0); }

}  // extern "C"
