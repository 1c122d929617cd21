#include "shearinst/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "shearinst/error.hpp"

namespace shearinst {
namespace {

using nlohmann::json;

void config_fail(const std::string& what) { fail(ErrorCode::ConfigError, what); }

const std::set<std::string>& known_keys(const std::string& section) {
  static const std::set<std::string> top{"profile", "n",          "stretch", "eps",   "tau_decades",   "sheet", "glue",
                                         "pencil_tolerance", "out_dir", "parallel", "warm_start", "quick", "inject_fault"};
  static const std::set<std::string> profile{"family", "beta", "k"};
  static const std::set<std::string> eps{"min", "max", "count"};
  static const std::set<std::string> sheet{"k_list", "eps_hat", "L", "L_list", "coupling_k", "q", "line_half_width"};
  static const std::set<std::string> glue{"k", "eps_hat", "out_hi"};
  if (section == "profile") return profile;
  if (section == "eps") return eps;
  if (section == "sheet") return sheet;
  if (section == "glue") return glue;
  return top;
}

// Recursively overlays patch onto target, rejecting keys the schema does not know.
void overlay(json& target, const json& patch, const std::string& section) {
  if (!patch.is_object()) config_fail(section.empty() ? "config must be a JSON object" : section + " must be an object");
  const auto& keys = known_keys(section);
  for (const auto& [key, value] : patch.items()) {
    const std::string path = section.empty() ? key : section + "." + key;
    if (!keys.count(key)) config_fail("unknown config key '" + path + "'");
    if (section.empty() && (key == "profile" || key == "eps" || key == "sheet" || key == "glue"))
      overlay(target[key], value, key);
    else
      target[key] = value;
  }
}

double get_number(const json& j, const char* key, const std::string& path) {
  const auto& v = j.at(key);
  if (!v.is_number()) config_fail(path + "." + key + " must be a number");
  return v.get<double>();
}

int get_int(const json& j, const char* key, const std::string& path) {
  const auto& v = j.at(key);
  if (!v.is_number_integer()) config_fail(path + "." + key + " must be an integer");
  return v.get<int>();
}

bool get_bool(const json& j, const char* key) {
  const auto& v = j.at(key);
  if (!v.is_boolean()) config_fail(std::string(key) + " must be a boolean");
  return v.get<bool>();
}

std::string get_string(const json& j, const char* key, const std::string& path) {
  const auto& v = j.at(key);
  if (!v.is_string()) config_fail(path + "." + key + " must be a string");
  return v.get<std::string>();
}

std::vector<double> get_list(const json& j, const char* key, const std::string& path) {
  const auto& v = j.at(key);
  if (!v.is_array()) config_fail(path + "." + key + " must be an array");
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) config_fail(path + "." + key + " must hold numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

json to_json(const RunConfig& c) {
  return json{{"profile", {{"family", c.profile.family}, {"beta", c.profile.beta}, {"k", c.profile.k}}},
              {"n", c.n},
              {"stretch", c.stretch},
              {"eps", {{"min", c.eps.min}, {"max", c.eps.max}, {"count", c.eps.count}}},
              {"tau_decades", c.tau_decades},
              {"sheet",
               {{"k_list", c.sheet.k_list},
                {"eps_hat", c.sheet.eps_hat},
                {"L", c.sheet.L},
                {"L_list", c.sheet.L_list},
                {"coupling_k", c.sheet.coupling_k},
                {"q", c.sheet.q},
                {"line_half_width", c.sheet.line_half_width}}},
              {"glue", {{"k", c.glue.k}, {"eps_hat", c.glue.eps_hat}, {"out_hi", c.glue.out_hi}}},
              {"pencil_tolerance", c.pencil_tolerance},
              {"out_dir", c.out_dir},
              {"parallel", c.parallel},
              {"warm_start", c.warm_start},
              {"quick", c.quick},
              {"inject_fault", c.inject_fault}};
}

RunConfig from_resolved(const json& j) {
  RunConfig c;
  const json& p = j.at("profile");
  c.profile.family = get_string(p, "family", "profile");
  c.profile.beta = get_number(p, "beta", "profile");
  c.profile.k = get_number(p, "k", "profile");
  c.n = get_int(j, "n", "config");
  c.stretch = get_number(j, "stretch", "config");
  const json& e = j.at("eps");
  c.eps.min = get_number(e, "min", "eps");
  c.eps.max = get_number(e, "max", "eps");
  c.eps.count = get_int(e, "count", "eps");
  c.tau_decades = get_int(j, "tau_decades", "config");
  const json& s = j.at("sheet");
  c.sheet.k_list = get_list(s, "k_list", "sheet");
  c.sheet.eps_hat = get_number(s, "eps_hat", "sheet");
  c.sheet.L = get_number(s, "L", "sheet");
  c.sheet.L_list = get_list(s, "L_list", "sheet");
  c.sheet.coupling_k = get_number(s, "coupling_k", "sheet");
  c.sheet.q = get_int(s, "q", "sheet");
  c.sheet.line_half_width = get_number(s, "line_half_width", "sheet");
  const json& g = j.at("glue");
  c.glue.k = get_number(g, "k", "glue");
  c.glue.eps_hat = get_number(g, "eps_hat", "glue");
  c.glue.out_hi = get_number(g, "out_hi", "glue");
  c.pencil_tolerance = get_number(j, "pencil_tolerance", "config");
  c.out_dir = get_string(j, "out_dir", "config");
  c.parallel = get_bool(j, "parallel");
  c.warm_start = get_bool(j, "warm_start");
  c.quick = get_bool(j, "quick");
  c.inject_fault = get_string(j, "inject_fault", "config");
  c.check();
  return c;
}

json parse(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    config_fail(std::string("config is not valid JSON: ") + e.what());
  }
  return {};
}

}  // namespace

void RunConfig::check() const {
  if (profile.family != "sine" && profile.family != "sheet" && profile.family != "rescaled")
    config_fail("profile.family must be sine, sheet or rescaled");
  if (!(profile.beta > 0.0)) config_fail("profile.beta must be positive");
  if (!(profile.k > 0.0)) config_fail("profile.k must be positive");
  if (n < 8) config_fail("n must be at least 8");
  if (!(stretch >= 0.0)) config_fail("stretch must be >= 0");
  if (!(eps.min > 0.0) || !(eps.max > eps.min) || eps.count < 2) config_fail("eps grid must be increasing and positive");
  if (tau_decades < 2) config_fail("tau_decades must be at least 2");
  if (sheet.k_list.empty()) config_fail("sheet.k_list is empty");
  for (double k : sheet.k_list)
    if (!(k > 0.0)) config_fail("sheet.k_list must be positive");
  for (std::size_t i = 1; i < sheet.L_list.size(); ++i)
    if (!(sheet.L_list[i] > sheet.L_list[i - 1])) config_fail("sheet.L_list must be increasing");
  for (double L : sheet.L_list)
    if (!(L > 0.0)) config_fail("sheet.L_list must be positive");
  if (!(sheet.eps_hat > 0.0) || !(sheet.L > 0.0) || !(sheet.coupling_k > 0.0) || sheet.q < 1 ||
      !(sheet.line_half_width > 0.0))
    config_fail("sheet settings must be positive");
  if (!(glue.k > 0.0) || !(glue.eps_hat > 0.0) || !(glue.out_hi > 0.0)) config_fail("glue settings must be positive");
  if (!(pencil_tolerance > 0.0)) config_fail("pencil_tolerance must be positive");
  if (out_dir.empty()) config_fail("out_dir is empty");
  if (!inject_fault.empty() && inject_fault != "lambda_sign") config_fail("inject_fault must be empty or lambda_sign");
}

RunConfig merge_config_json(const RunConfig& base, const std::string& text) {
  json resolved = to_json(base);
  overlay(resolved, parse(text), "");
  return from_resolved(resolved);
}

RunConfig config_from_json(const std::string& text) { return merge_config_json(RunConfig{}, text); }

RunConfig config_from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoError, "cannot read config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return config_from_json(ss.str());
}

std::string config_to_json(const RunConfig& config, int indent) { return to_json(config).dump(indent); }

}  // namespace shearinst
