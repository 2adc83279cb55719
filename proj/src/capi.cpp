#include "oscount.h"

#include <cstring>
#include <string>

#include <json.hpp>

#include "osc/runner.hpp"

namespace {

thread_local std::string g_last_error;

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

osc::RunOptions parse_options(const char* options_json) {
  osc::RunOptions opt;
  if (!options_json || !*options_json) return opt;
  const auto j = nlohmann::json::parse(options_json);
  auto num = [&](const char* key, double& dst) {
    if (j.contains(key)) dst = j[key].get<double>();
  };
  num("eps", opt.eps);
  num("xmax", opt.xmax);
  num("x_step", opt.x_step);
  num("lambda_step", opt.lambda_step);
  num("lambda1", opt.lambda1);
  num("lambda2", opt.lambda2);
  num("lambda0", opt.lambda0);
  num("tol_rel", opt.tol_rel);
  num("tol_abs", opt.tol_abs);
  if (j.contains("mu0")) {
    const auto& m = j["mu0"];
    if (!m.is_array() || m.size() != 2)
      throw osc::ValidationError("mu0 must be [re, im]");
    opt.mu0 = osc::Complex(m[0].get<double>(), m[1].get<double>());
  }
  return opt;
}

}  // namespace

struct oscount_problem {
  osc::ProblemHandle handle;
};

extern "C" {

oscount_problem* oscount_problem_builtin(const char* name,
                                         const char* params_json) {
  try {
    auto* p = new oscount_problem{
        osc::make_problem(name ? name : "",
                          params_json ? params_json : "")};
    return p;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return nullptr;
  }
}

oscount_problem* oscount_problem_from_json(const char* config_json) {
  try {
    auto* p = new oscount_problem{
        osc::make_problem_from_config(config_json ? config_json : "")};
    return p;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return nullptr;
  }
}

void oscount_problem_free(oscount_problem* p) { delete p; }

int oscount_run(const oscount_problem* p, const char* command,
                const char* options_json, char** result_json, char** csv) {
  if (!p || !command || !result_json) {
    g_last_error = "null argument";
    return OSCOUNT_ERR_CONFIG;
  }
  *result_json = nullptr;
  if (csv) *csv = nullptr;
  const std::string cmd = command;
  try {
    osc::RunOptions opt;
    try {
      opt = parse_options(options_json);
    } catch (const std::exception& e) {
      g_last_error = e.what();
      return OSCOUNT_ERR_CONFIG;
    }

    std::string result;
    std::string csv_text;
    if (cmd == "classify") {
      result = osc::cmd_classify(p->handle, opt);
    } else if (cmd == "count") {
      result = osc::cmd_count(p->handle, opt);
    } else if (cmd == "curves") {
      result = osc::cmd_curves(p->handle, opt, &csv_text);
    } else if (cmd == "box") {
      result = osc::cmd_box(p->handle, opt);
    } else if (cmd == "verify") {
      result = osc::cmd_verify(p->handle, opt);
    } else {
      g_last_error = "unknown command: " + cmd;
      return OSCOUNT_ERR_CONFIG;
    }
    *result_json = dup_string(result);
    if (csv && cmd == "curves") *csv = dup_string(csv_text);
    return OSCOUNT_OK;
  } catch (const osc::ValidationError& e) {
    g_last_error = e.what();
    return OSCOUNT_ERR_CONFIG;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return OSCOUNT_ERR_NUMERIC;
  }
}

void oscount_string_free(char* s) { std::free(s); }

const char* oscount_last_error(void) { return g_last_error.c_str(); }

const char* oscount_version(void) { return "1.0.0"; }

}  // extern "C"
