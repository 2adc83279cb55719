// oscount command-line tool: load a problem, run
// classify / count / curves / box / verify, emit JSON and CSV.
//
// Uses only the C API of liboscount.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "oscount.h"

namespace {

struct CommonFlags {
  std::string problem;
  std::string config_path;
  std::string out_path;
  std::string json_out_path;
  double eps = -1, xmax = -1, x_step = -1, lambda_step = -1;
  double lambda1 = std::nan(""), lambda2 = std::nan("");
  double lambda0 = std::nan("");
  std::string mu0;
  double tol_rel = -1, tol_abs = -1;
  double delta = std::nan(""), gamma = std::nan("");
  std::vector<std::string> params;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--problem", f.problem,
                  "built-in problem (hydrogen | mhd | saint-venant-synthetic)");
  cmd->add_option("--config", f.config_path, "JSON problem configuration file");
  cmd->add_option("--out", f.out_path, "output file (CSV for curves)");
  cmd->add_option("--json", f.json_out_path, "write the JSON report here");
  cmd->add_option("--eps", f.eps, "singular-endpoint offset");
  cmd->add_option("--xmax", f.xmax, "right horizon / window top");
  cmd->add_option("--x-step", f.x_step, "x resolution");
  cmd->add_option("--lambda-step", f.lambda_step, "lambda resolution");
  cmd->add_option("--lambda1", f.lambda1, "interval left endpoint");
  cmd->add_option("--lambda2", f.lambda2, "interval right endpoint");
  cmd->add_option("--lambda0", f.lambda0, "probe reference lambda");
  cmd->add_option("--mu0", f.mu0, "probe shift as a+bi (e.g. 0+1i)");
  cmd->add_option("--tol-rel", f.tol_rel, "integrator relative tolerance");
  cmd->add_option("--tol-abs", f.tol_abs, "integrator absolute tolerance");
  cmd->add_option("--delta", f.delta, "hydrogen delta");
  cmd->add_option("--gamma", f.gamma, "hydrogen gamma");
  cmd->add_option("--param", f.params, "extra problem parameter key=value")
      ->take_all();
}

// "a+bi" -> [a, b]; plain reals get a zero imaginary part.
bool parse_complex(const std::string& text, double& re, double& im) {
  if (text.empty()) return false;
  const auto ipos = text.find_last_of("iI");
  if (ipos == std::string::npos) {
    try {
      re = std::stod(text);
      im = 0.0;
      return true;
    } catch (...) {
      return false;
    }
  }
  // split at the sign of the imaginary part (not a leading sign, not an
  // exponent sign)
  for (std::size_t k = text.size(); k-- > 1;) {
    const char c = text[k];
    if ((c == '+' || c == '-') && text[k - 1] != 'e' && text[k - 1] != 'E') {
      try {
        re = std::stod(text.substr(0, k));
        std::string imt = text.substr(k, ipos - k);
        if (imt == "+" || imt == "-") imt += "1";
        im = std::stod(imt);
        return true;
      } catch (...) {
        return false;
      }
    }
  }
  // pure imaginary, e.g. "1i"
  try {
    std::string imt = text.substr(0, ipos);
    if (imt.empty() || imt == "+" || imt == "-") imt += "1";
    im = std::stod(imt);
    re = 0.0;
    return true;
  } catch (...) {
    return false;
  }
}

int fail_config(const std::string& msg) {
  std::cerr << "config error: " << msg << "\n";
  return 2;
}

int run_command(const std::string& command, const CommonFlags& f) {
  nlohmann::json params = nlohmann::json::object();
  if (!std::isnan(f.delta)) params["delta"] = f.delta;
  if (!std::isnan(f.gamma)) params["gamma"] = f.gamma;
  for (const auto& kv : f.params) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos)
      return fail_config("--param expects key=value, got: " + kv);
    try {
      params[kv.substr(0, eq)] = std::stod(kv.substr(eq + 1));
    } catch (...) {
      return fail_config("--param value not numeric: " + kv);
    }
  }

  oscount_problem* problem = nullptr;
  if (!f.config_path.empty()) {
    std::ifstream in(f.config_path);
    if (!in) return fail_config("cannot open config: " + f.config_path);
    std::stringstream ss;
    ss << in.rdbuf();
    problem = oscount_problem_from_json(ss.str().c_str());
  } else if (!f.problem.empty()) {
    problem = oscount_problem_builtin(f.problem.c_str(),
                                      params.dump().c_str());
  } else {
    return fail_config("one of --problem / --config is required");
  }
  if (!problem) return fail_config(oscount_last_error());

  nlohmann::json opts = nlohmann::json::object();
  auto set = [&](const char* key, double v, bool positive_only) {
    if (positive_only ? v > 0 : !std::isnan(v)) opts[key] = v;
  };
  set("eps", f.eps, true);
  set("xmax", f.xmax, true);
  set("x_step", f.x_step, true);
  set("lambda_step", f.lambda_step, true);
  set("lambda1", f.lambda1, false);
  set("lambda2", f.lambda2, false);
  set("lambda0", f.lambda0, false);
  set("tol_rel", f.tol_rel, true);
  set("tol_abs", f.tol_abs, true);
  if (!f.mu0.empty()) {
    double re = 0, im = 0;
    if (!parse_complex(f.mu0, re, im)) {
      oscount_problem_free(problem);
      return fail_config("cannot parse --mu0: " + f.mu0);
    }
    if (command == "classify" && im == 0.0) {
      oscount_problem_free(problem);
      return fail_config("--mu0 needs a nonzero imaginary part (a+bi)");
    }
    opts["mu0"] = {re, im};
  }

  char* result = nullptr;
  char* csv = nullptr;
  const int rc = oscount_run(problem, command.c_str(), opts.dump().c_str(),
                             &result, command == "curves" ? &csv : nullptr);
  if (rc != OSCOUNT_OK) {
    std::cerr << (rc == OSCOUNT_ERR_CONFIG ? "config error: "
                                           : "numerical failure: ")
              << oscount_last_error() << "\n";
    oscount_problem_free(problem);
    return rc;
  }

  if (!f.json_out_path.empty()) {
    std::ofstream out(f.json_out_path);
    out << result << "\n";
  } else {
    std::cout << result << "\n";
  }
  if (csv) {
    if (!f.out_path.empty()) {
      std::ofstream out(f.out_path);
      out << csv;
    } else {
      std::cout << csv;
    }
  }
  oscount_string_free(result);
  oscount_string_free(csv);
  oscount_problem_free(problem);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "oscount: eigenvalue counts for singular linear Hamiltonian systems "
      "via renormalized oscillation theory"};
  app.require_subcommand(1);

  CommonFlags flags[5];
  const char* names[5] = {"classify", "count", "curves", "box", "verify"};
  const char* descs[5] = {
      "endpoint classification via probe-matrix eigenvalue limits",
      "eigenvalue count on [lambda1, lambda2)",
      "spectral curves through the Maslov box with eigenvalue intercepts",
      "four-shelf Maslov box with the closure check",
      "assumption report and Green's-function residual checks"};
  for (int k = 0; k < 5; ++k)
    add_common(app.add_subcommand(names[k], descs[k]), flags[k]);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  for (int k = 0; k < 5; ++k)
    if (app.get_subcommand(names[k])->parsed())
      return run_command(names[k], flags[k]);
  return 2;
}
