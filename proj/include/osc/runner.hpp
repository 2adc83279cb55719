#pragma once

// Command layer shared by the C API and the CLI: problem presets, request
// assembly, and the classify / count / curves / box / verify commands with
// JSON (and CSV) output.

#include <string>

#include "osc/counter.hpp"
#include "osc/problems.hpp"

namespace osc {

struct RunOptions {
  // Unset numeric options inherit problem presets.
  double eps = -1;          // singular finite-endpoint offset
  double xmax = -1;         // right horizon / window top
  double x_step = -1;
  double lambda_step = -1;
  double lambda1 = kInf, lambda2 = kInf;  // kInf = use lambda_domain
  Complex mu0{0.0, 0.0};  // 0 = use the problem's default probe shift
  double lambda0 = kInf;    // reference lambda for probes
  double tol_rel = -1, tol_abs = -1;
};

struct ProblemHandle {
  HamiltonianSystem sys;
  // Preset geometry (overridable through RunOptions).
  double eps = 1e-10;
  double probe_left = 1e-10, probe_right = 50.0;
  double window_lo = 1e-10, window_hi = 10.0;
  double base_c = 1.0;
  double x_step = 1e-3, lambda_step = 5e-3;
  double default_lambda0 = 0.0;
  Complex default_mu0{0.0, 1.0};
  BoundarySpec left_spec, right_spec;
};

ProblemHandle make_problem(const std::string& name,
                           const std::string& params_json);
ProblemHandle make_problem_from_config(const std::string& config_json);

CountRequest make_count_request(const ProblemHandle& h, const RunOptions& opt);

// Commands; each returns a JSON document as text.  The curves command also
// fills `csv` when non-null.
std::string cmd_classify(const ProblemHandle& h, const RunOptions& opt);
std::string cmd_count(const ProblemHandle& h, const RunOptions& opt);
std::string cmd_curves(const ProblemHandle& h, const RunOptions& opt,
                       std::string* csv);
std::string cmd_box(const ProblemHandle& h, const RunOptions& opt);
std::string cmd_verify(const ProblemHandle& h, const RunOptions& opt);

// 17-significant-digit fixed formatting for CSV output.
std::string csv_double(double v);

}  // namespace osc
