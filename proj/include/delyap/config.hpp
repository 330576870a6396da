#pragma once

// Run configuration for the command-line front end.
//
// The file is a JSON object; matrices are row-major nested arrays:
//
//   {
//     "system": {
//       "A0": [[-1, 0], [0, -1]], "A1": [[0, 1], [-1, 0]], "h": 1.0,
//       "Ad": ..., "Bd": ..., "Cd": ...            // factored kernel, or
//       "sincos_kernel": {"B0": ..., "B1": ..., "frequency": 3.14159...}
//     },
//     "Q": [[1, 0], [0, 1]],
//     "tau": {"points": 201} | {"values": [0, 0.5, 1]},
//     "simulation": {"T": 0, "dt": 0, "histories": [[1, 0], [0, 1]]},
//     "tolerances": {"residual_dde": 1e-5, ...},
//     "output": {"dir": "out"}
//   }
//
// Everything except "system" and "Q" is optional.

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "delyap/matcore.hpp"
#include "delyap/model.hpp"

namespace delyap {

struct SinCosKernel {
  Matrix B0;
  Matrix B1;
  double frequency = 0.0;
};

struct Tolerances {
  double spectrum_violated = 1e-12;
  double spectrum_borderline = 1e-8;
  double q_symmetry = 1e-12;
  double quadrature = 1e-10;
  double fd_step = 1e-6;
  double residual_dde = 1e-5;
  double residual_algebraic = 1e-6;
  double residual_collapsed = 1e-6;
  double flip = 1e-8;
  double symmetry = 1e-9;
  double endpoint = 1e-9;
  double oracle = 1e-3;
  double cost_relative = 1e-3;

  /// Sets one field by name; false if the name is unknown.
  bool set(const std::string& name, double value);
  nlohmann::ordered_json to_json() const;
};

struct RunConfig {
  TimeDelaySystem system;
  /// Present when the kernel was given in sin/cos form; kept for dumping.
  std::optional<SinCosKernel> sincos;
  Matrix Q;

  int tau_points = 201;
  std::vector<double> tau_values;  // overrides tau_points when non-empty

  double sim_T = 0.0;   // 0: automatic
  double sim_dt = 0.0;  // 0: automatic
  std::vector<Vector> histories;  // point-mass x0 list; empty: unit vectors
  int residual_points = 11;
  int validate_tau_points = 5;

  Tolerances tolerances;
  std::string output_dir = ".";

  /// Sample points for P(τ): explicit values or an even grid on [0, h].
  std::vector<double> tau_grid() const;
  /// Configured histories, or e_1..e_n.
  std::vector<Vector> effective_histories() const;
};

/// Throws ConfigError naming the offending key path.
RunConfig parse_config(const nlohmann::json& doc);
RunConfig parse_config_text(const std::string& text);
RunConfig load_config(const std::string& path);

/// Canonical JSON form; parse_config(dump_config(c)) reproduces c.
nlohmann::ordered_json dump_config(const RunConfig& config);

/// Row-major nested arrays.
nlohmann::json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const nlohmann::json& j, const std::string& where);

bool operator==(const RunConfig& a, const RunConfig& b);

}  // namespace delyap
