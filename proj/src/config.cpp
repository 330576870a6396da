#include "delyap/config.hpp"

#include <fstream>
#include <sstream>

#include "delyap/errors.hpp"

namespace delyap {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

struct TolField {
  const char* name;
  double Tolerances::*member;
};

constexpr TolField kTolFields[] = {
    {"spectrum_violated", &Tolerances::spectrum_violated},
    {"spectrum_borderline", &Tolerances::spectrum_borderline},
    {"q_symmetry", &Tolerances::q_symmetry},
    {"quadrature", &Tolerances::quadrature},
    {"fd_step", &Tolerances::fd_step},
    {"residual_dde", &Tolerances::residual_dde},
    {"residual_algebraic", &Tolerances::residual_algebraic},
    {"residual_collapsed", &Tolerances::residual_collapsed},
    {"flip", &Tolerances::flip},
    {"symmetry", &Tolerances::symmetry},
    {"endpoint", &Tolerances::endpoint},
    {"oracle", &Tolerances::oracle},
    {"cost_relative", &Tolerances::cost_relative},
};

double number_at(const json& j, const std::string& where) {
  if (!j.is_number()) throw ConfigError(where, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError(where, "must be finite");
  return v;
}

int positive_int_at(const json& j, const std::string& where) {
  if (!j.is_number_integer() || j.get<long long>() < 1) {
    throw ConfigError(where, "expected a positive integer");
  }
  return j.get<int>();
}

Vector vector_from_json(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) {
    throw ConfigError(where, "expected a non-empty array of numbers");
  }
  Vector v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    v(static_cast<Index>(i)) =
        number_at(j[i], where + "[" + std::to_string(i) + "]");
  }
  return v;
}

const json& require(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key)) {
    throw ConfigError(where.empty() ? key : where + "." + key, "missing");
  }
  return obj.at(key);
}

void check_keys(const json& obj, const std::string& where,
                std::initializer_list<const char*> allowed) {
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* a : allowed) known = known || item.key() == a;
    if (!known) {
      throw ConfigError(where.empty() ? item.key() : where + "." + item.key(),
                        "unknown key");
    }
  }
}

}  // namespace

bool Tolerances::set(const std::string& name, double value) {
  for (const auto& f : kTolFields) {
    if (name == f.name) {
      this->*f.member = value;
      return true;
    }
  }
  return false;
}

ordered_json Tolerances::to_json() const {
  ordered_json out = ordered_json::object();
  for (const auto& f : kTolFields) out[f.name] = this->*f.member;
  return out;
}

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) {
    throw ConfigError(where, "expected a non-empty array of rows");
  }
  const auto rows = j.size();
  if (!j[0].is_array() || j[0].empty()) {
    throw ConfigError(where + "[0]", "expected a non-empty row array");
  }
  const auto cols = j[0].size();
  Matrix m(static_cast<Index>(rows), static_cast<Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    const std::string row_where = where + "[" + std::to_string(r) + "]";
    if (!j[r].is_array() || j[r].size() != cols) {
      throw ConfigError(row_where, "row length differs from row 0 (" +
                                       std::to_string(cols) + ")");
    }
    for (std::size_t c = 0; c < cols; ++c) {
      m(static_cast<Index>(r), static_cast<Index>(c)) =
          number_at(j[r][c], row_where + "[" + std::to_string(c) + "]");
    }
  }
  return m;
}

std::vector<double> RunConfig::tau_grid() const {
  if (!tau_values.empty()) return tau_values;
  std::vector<double> grid(tau_points);
  if (tau_points == 1) return {0.0};
  for (int i = 0; i < tau_points; ++i) {
    grid[i] = system.h * i / (tau_points - 1);
  }
  grid.back() = system.h;
  return grid;
}

std::vector<Vector> RunConfig::effective_histories() const {
  if (!histories.empty()) return histories;
  std::vector<Vector> out;
  for (Index i = 0; i < system.n(); ++i) {
    out.push_back(Vector::Unit(system.n(), i));
  }
  return out;
}

RunConfig parse_config(const json& doc) {
  if (!doc.is_object()) throw ConfigError("<root>", "expected a JSON object");
  check_keys(doc, "",
             {"system", "Q", "tau", "simulation", "tolerances", "output",
              "validation"});
  RunConfig cfg;

  const json& sys = require(doc, "system", "");
  if (!sys.is_object()) throw ConfigError("system", "expected an object");
  check_keys(sys, "system", {"A0", "A1", "Ad", "Bd", "Cd", "h", "sincos_kernel"});
  cfg.system.A0 = matrix_from_json(require(sys, "A0", "system"), "system.A0");
  cfg.system.A1 = matrix_from_json(require(sys, "A1", "system"), "system.A1");
  cfg.system.h = number_at(require(sys, "h", "system"), "system.h");
  if (sys.contains("sincos_kernel")) {
    for (const char* key : {"Ad", "Bd", "Cd"}) {
      if (sys.contains(key)) {
        throw ConfigError(std::string("system.") + key,
                          "conflicts with system.sincos_kernel");
      }
    }
    const json& k = sys.at("sincos_kernel");
    const std::string where = "system.sincos_kernel";
    if (!k.is_object()) throw ConfigError(where, "expected an object");
    check_keys(k, where, {"B0", "B1", "frequency"});
    SinCosKernel kernel;
    kernel.B0 = matrix_from_json(require(k, "B0", where), where + ".B0");
    kernel.B1 = matrix_from_json(require(k, "B1", where), where + ".B1");
    kernel.frequency =
        number_at(require(k, "frequency", where), where + ".frequency");
    try {
      cfg.system = make_sincos_system(cfg.system.A0, cfg.system.A1, kernel.B0,
                                      kernel.B1, kernel.frequency,
                                      cfg.system.h);
    } catch (const Error& e) {
      throw ConfigError(where, e.what());
    }
    cfg.sincos = std::move(kernel);
  } else {
    cfg.system.Ad = matrix_from_json(require(sys, "Ad", "system"), "system.Ad");
    cfg.system.Bd = matrix_from_json(require(sys, "Bd", "system"), "system.Bd");
    cfg.system.Cd = matrix_from_json(require(sys, "Cd", "system"), "system.Cd");
  }
  const auto violations = validate(cfg.system);
  if (!violations.empty()) {
    std::string all;
    for (const auto& v : violations) all += (all.empty() ? "" : "; ") + v;
    throw ConfigError("system", all);
  }

  cfg.Q = matrix_from_json(require(doc, "Q", ""), "Q");
  try {
    if (cfg.Q.rows() != cfg.system.n()) {
      throw DimensionError("Q must be n x n with n = " +
                           std::to_string(cfg.system.n()));
    }
    (void)Weight(cfg.Q);
  } catch (const Error& e) {
    throw ConfigError("Q", e.what());
  }

  if (doc.contains("tau")) {
    const json& tau = doc.at("tau");
    if (!tau.is_object()) throw ConfigError("tau", "expected an object");
    check_keys(tau, "tau", {"points", "values"});
    if (tau.contains("points")) {
      cfg.tau_points = positive_int_at(tau.at("points"), "tau.points");
    }
    if (tau.contains("values")) {
      const Vector v = vector_from_json(tau.at("values"), "tau.values");
      cfg.tau_values.assign(v.data(), v.data() + v.size());
      for (std::size_t i = 0; i < cfg.tau_values.size(); ++i) {
        if (std::abs(cfg.tau_values[i]) > cfg.system.h) {
          throw ConfigError("tau.values[" + std::to_string(i) + "]",
                            "outside [-h, h]");
        }
      }
    }
  }

  if (doc.contains("simulation")) {
    const json& sim = doc.at("simulation");
    if (!sim.is_object()) throw ConfigError("simulation", "expected an object");
    check_keys(sim, "simulation", {"T", "dt", "histories"});
    if (sim.contains("T")) cfg.sim_T = number_at(sim.at("T"), "simulation.T");
    if (sim.contains("dt")) cfg.sim_dt = number_at(sim.at("dt"), "simulation.dt");
    if (cfg.sim_T < 0.0) throw ConfigError("simulation.T", "must be ≥ 0");
    if (cfg.sim_dt < 0.0) throw ConfigError("simulation.dt", "must be ≥ 0");
    if (sim.contains("histories")) {
      const json& hs = sim.at("histories");
      if (!hs.is_array()) {
        throw ConfigError("simulation.histories", "expected an array");
      }
      for (std::size_t i = 0; i < hs.size(); ++i) {
        const std::string where = "simulation.histories[" + std::to_string(i) + "]";
        Vector x0 = vector_from_json(hs[i], where);
        if (x0.size() != cfg.system.n()) {
          throw ConfigError(where, "length must equal n");
        }
        cfg.histories.push_back(std::move(x0));
      }
    }
  }

  if (doc.contains("validation")) {
    const json& v = doc.at("validation");
    if (!v.is_object()) throw ConfigError("validation", "expected an object");
    check_keys(v, "validation", {"residual_points", "tau_points"});
    if (v.contains("residual_points")) {
      cfg.residual_points =
          positive_int_at(v.at("residual_points"), "validation.residual_points");
    }
    if (v.contains("tau_points")) {
      cfg.validate_tau_points =
          positive_int_at(v.at("tau_points"), "validation.tau_points");
    }
  }

  if (doc.contains("tolerances")) {
    const json& tol = doc.at("tolerances");
    if (!tol.is_object()) throw ConfigError("tolerances", "expected an object");
    for (const auto& item : tol.items()) {
      const std::string where = "tolerances." + item.key();
      const double value = number_at(item.value(), where);
      if (!(value > 0.0)) throw ConfigError(where, "must be positive");
      if (!cfg.tolerances.set(item.key(), value)) {
        throw ConfigError(where, "unknown tolerance");
      }
    }
  }

  if (doc.contains("output")) {
    const json& out = doc.at("output");
    if (!out.is_object()) throw ConfigError("output", "expected an object");
    check_keys(out, "output", {"dir"});
    if (out.contains("dir")) {
      if (!out.at("dir").is_string()) {
        throw ConfigError("output.dir", "expected a string");
      }
      cfg.output_dir = out.at("dir").get<std::string>();
    }
  }
  return cfg;
}

RunConfig parse_config_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("byte " + std::to_string(e.byte), e.what());
  }
  return parse_config(doc);
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, "cannot open file");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

ordered_json dump_config(const RunConfig& cfg) {
  ordered_json doc;
  ordered_json sys;
  sys["A0"] = matrix_to_json(cfg.system.A0);
  sys["A1"] = matrix_to_json(cfg.system.A1);
  if (cfg.sincos) {
    ordered_json k;
    k["B0"] = matrix_to_json(cfg.sincos->B0);
    k["B1"] = matrix_to_json(cfg.sincos->B1);
    k["frequency"] = cfg.sincos->frequency;
    sys["sincos_kernel"] = std::move(k);
  } else {
    sys["Ad"] = matrix_to_json(cfg.system.Ad);
    sys["Bd"] = matrix_to_json(cfg.system.Bd);
    sys["Cd"] = matrix_to_json(cfg.system.Cd);
  }
  sys["h"] = cfg.system.h;
  doc["system"] = std::move(sys);
  doc["Q"] = matrix_to_json(cfg.Q);

  ordered_json tau;
  tau["points"] = cfg.tau_points;
  if (!cfg.tau_values.empty()) tau["values"] = cfg.tau_values;
  doc["tau"] = std::move(tau);

  ordered_json sim;
  sim["T"] = cfg.sim_T;
  sim["dt"] = cfg.sim_dt;
  ordered_json hs = ordered_json::array();
  for (const Vector& x0 : cfg.histories) {
    hs.push_back(std::vector<double>(x0.data(), x0.data() + x0.size()));
  }
  sim["histories"] = std::move(hs);
  doc["simulation"] = std::move(sim);

  doc["validation"] = {{"residual_points", cfg.residual_points},
                       {"tau_points", cfg.validate_tau_points}};
  doc["tolerances"] = cfg.tolerances.to_json();
  doc["output"] = {{"dir", cfg.output_dir}};
  return doc;
}

bool operator==(const RunConfig& a, const RunConfig& b) {
  auto same = [](const Matrix& x, const Matrix& y) {
    return x.rows() == y.rows() && x.cols() == y.cols() && x == y;
  };
  const bool systems = same(a.system.A0, b.system.A0) &&
                       same(a.system.A1, b.system.A1) &&
                       same(a.system.Ad, b.system.Ad) &&
                       same(a.system.Bd, b.system.Bd) &&
                       same(a.system.Cd, b.system.Cd) &&
                       a.system.h == b.system.h;
  const bool kernels =
      a.sincos.has_value() == b.sincos.has_value() &&
      (!a.sincos || (same(a.sincos->B0, b.sincos->B0) &&
                     same(a.sincos->B1, b.sincos->B1) &&
                     a.sincos->frequency == b.sincos->frequency));
  bool histories = a.histories.size() == b.histories.size();
  for (std::size_t i = 0; histories && i < a.histories.size(); ++i) {
    histories = same(a.histories[i], b.histories[i]);
  }
  return systems && kernels && histories && same(a.Q, b.Q) &&
         a.tau_points == b.tau_points && a.tau_values == b.tau_values &&
         a.sim_T == b.sim_T && a.sim_dt == b.sim_dt &&
         a.residual_points == b.residual_points &&
         a.validate_tau_points == b.validate_tau_points &&
         a.tolerances.to_json() == b.tolerances.to_json() &&
         a.output_dir == b.output_dir;
}

}  // namespace delyap
