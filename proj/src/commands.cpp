#include "delyap/commands.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <ostream>
#include <sstream>

#include "delyap/ddesim.hpp"
#include "delyap/errors.hpp"
#include "delyap/spectrum.hpp"

namespace delyap::cli {

using nlohmann::ordered_json;

namespace {

namespace fs = std::filesystem;

// Adding +0.0 turns -0.0 into +0.0 so zero tables print uniformly.
double clean(double v) { return v + 0.0; }

void write_number(std::ostream& os, double v) {
  os << std::setprecision(17) << clean(v);
}

fs::path prepare_dir(const RunConfig& config) {
  fs::path dir(config.output_dir);
  fs::create_directories(dir);
  return dir;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write " + path.string());
  f << content;
}

SolveOptions solve_options(const RunConfig& config) {
  SolveOptions o;
  o.thresholds.violated = config.tolerances.spectrum_violated;
  o.thresholds.borderline = config.tolerances.spectrum_borderline;
  return o;
}

ResidualOptions residual_options(const RunConfig& config) {
  ResidualOptions o;
  o.quadrature.tolerance = config.tolerances.quadrature;
  o.fd_step = config.tolerances.fd_step;
  return o;
}

ordered_json spectrum_json(const SpectrumReport& r) {
  return {{"verdict", std::string(to_string(r.verdict))},
          {"sigma_min", r.sigma_min},
          {"sigma_min_relative", r.sigma_min_relative},
          {"threshold_violated", r.thresholds.violated},
          {"threshold_borderline", r.thresholds.borderline},
          {"n_s", r.ns}};
}

ordered_json residual_json(const ResidualReport& r) {
  return {{"dde", r.dde},
          {"algebraic", r.algebraic},
          {"collapsed", {r.collapsed[0], r.collapsed[1], r.collapsed[2],
                         r.collapsed[3]}},
          {"flip", r.flip},
          {"symmetry", r.symmetry},
          {"endpoint", r.endpoint}};
}

ordered_json omega_json(const OmegaBlocks& w) {
  ordered_json out;
  for (int k = 1; k <= 6; ++k) {
    const Vector v = vec(w.block(k));
    std::vector<double> values(v.data(), v.data() + v.size());
    for (double& x : values) x = clean(x);
    out["vec_Omega" + std::to_string(k)] = values;
  }
  return out;
}

void print_vector(std::ostream& os, const Vector& v) {
  os << '[';
  for (Index i = 0; i < v.size(); ++i) {
    if (i) os << ", ";
    os << std::setprecision(6) << clean(v(i));
  }
  os << ']';
}

void print_report_header(std::ostream& os, const LyapunovSolution& sol) {
  const SpectrumReport& s = sol.diagnostics().spectrum;
  os << "n = " << sol.system().n() << ", n_d = " << sol.system().nd()
     << ", n_s = " << s.ns << ", h = " << sol.h() << '\n';
  os << "spectrum condition: " << to_string(s.verdict)
     << " (sigma_min = " << std::setprecision(6) << s.sigma_min
     << ", relative " << s.sigma_min_relative << ")\n";
  os << "rcond(G) = " << sol.diagnostics().rcond << '\n';
  if (sol.diagnostics().near_singular) {
    os << "warning: boundary matrix is nearly singular; accuracy degraded\n";
  }
  os << "initial state:\n";
  for (int k = 1; k <= 6; ++k) {
    os << "  vec(Omega" << k << "(0)) = ";
    print_vector(os, vec(sol.omega0().block(k)));
    os << '\n';
  }
}

void print_residuals(std::ostream& os, const ResidualReport& r) {
  os << std::setprecision(3) << "residuals:\n"
     << "  delay differential equation  " << r.dde << '\n'
     << "  algebraic coupling           " << r.algebraic << '\n'
     << "  collapsed Omega3..Omega6     " << r.collapsed[0] << ' '
     << r.collapsed[1] << ' ' << r.collapsed[2] << ' ' << r.collapsed[3]
     << '\n'
     << "  flip identities              " << r.flip << '\n'
     << "  symmetry of Omega1(0)        " << r.symmetry << '\n'
     << "  boundary endpoints           " << r.endpoint << '\n';
}

template <typename Body>
int guarded(Body&& body) {
  try {
    return body();
  } catch (const SpectrumConditionViolated& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kSpectrumViolation;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumericalFailure;
  }
}

}  // namespace

void write_p_table(std::ostream& os, const LyapunovSolution& sol,
                   const std::vector<double>& taus) {
  const Index n = sol.system().n();
  os << "tau";
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) os << ",p_" << (i + 1) << (j + 1);
  }
  os << '\n';
  for (double tau : taus) {
    const Matrix p = sol.P_at(tau);
    write_number(os, tau);
    for (Index i = 0; i < n; ++i) {
      for (Index j = 0; j < n; ++j) {
        os << ',';
        write_number(os, p(i, j));
      }
    }
    os << '\n';
  }
}

int cmd_solve(const RunConfig& config, std::ostream& out,
              const CommandOptions& options) {
  return guarded([&] {
    const LyapunovSolution sol =
        solve(config.system, Weight(config.Q, config.tolerances.q_symmetry),
              solve_options(config));
    const auto grid = uniform_grid(config.system.h, config.residual_points);
    const ResidualReport residuals =
        certify(sol, grid, residual_options(config));

    const fs::path dir = prepare_dir(config);
    std::ostringstream table;
    write_p_table(table, sol, config.tau_grid());
    write_file(dir / "P_tau.csv", table.str());

    std::ostringstream report;
    print_report_header(report, sol);
    print_residuals(report, residuals);
    write_file(dir / "report.txt", report.str());

    ordered_json summary;
    summary["command"] = "solve";
    summary["spectrum"] = spectrum_json(sol.diagnostics().spectrum);
    summary["rcond"] = sol.diagnostics().rcond;
    summary["omega0"] = omega_json(sol.omega0());
    summary["residuals"] = residual_json(residuals);
    write_file(dir / "summary.json", summary.dump(2) + "\n");

    if (!options.quiet) out << report.str();
    return sol.diagnostics().near_singular ? kBorderline : kSuccess;
  });
}

int cmd_check(const RunConfig& config, std::ostream& out,
              const CommandOptions& options) {
  return guarded([&] {
    const OdecOperator op = assemble(config.system);
    const SpectrumReport report =
        check(op, solve_options(config).thresholds);
    if (!options.quiet) {
      out << "verdict: " << to_string(report.verdict) << '\n'
          << "sigma_min: " << std::setprecision(6) << report.sigma_min << '\n'
          << "sigma_min_relative: " << report.sigma_min_relative << '\n'
          << "n_s: " << report.ns << '\n';
    }
    switch (report.verdict) {
      case SpectrumVerdict::satisfied: return int(kSuccess);
      case SpectrumVerdict::borderline: return int(kBorderline);
      case SpectrumVerdict::violated: break;
    }
    return int(kSpectrumViolation);
  });
}

int cmd_sample(const RunConfig& config, std::ostream& out,
               const CommandOptions& options) {
  return guarded([&] {
    const LyapunovSolution sol =
        solve(config.system, Weight(config.Q, config.tolerances.q_symmetry),
              solve_options(config));
    std::ostringstream table;
    write_p_table(table, sol, config.tau_grid());
    write_file(prepare_dir(config) / "P_samples.csv", table.str());
    if (!options.quiet) out << table.str();
    return sol.diagnostics().near_singular ? kBorderline : kSuccess;
  });
}

int cmd_validate(const RunConfig& config, std::ostream& out,
                 const CommandOptions& options) {
  return guarded([&] {
    const Tolerances& tol = config.tolerances;
    const TimeDelaySystem& sys = config.system;
    const LyapunovSolution sol =
        solve(sys, Weight(config.Q, tol.q_symmetry), solve_options(config));

    struct Check {
      std::string name;
      double value;
      double threshold;
      bool pass;
      std::string note;
    };
    std::vector<Check> checks;
    auto add = [&](std::string name, double value, double threshold,
                   std::string note = {}) {
      checks.push_back({std::move(name), value, threshold,
                        value <= threshold, std::move(note)});
    };

    const auto grid = uniform_grid(sys.h, config.residual_points);
    const ResidualReport r = certify(sol, grid, residual_options(config));
    add("residual_dde", r.dde, tol.residual_dde);
    add("residual_algebraic", r.algebraic, tol.residual_algebraic);
    for (int k = 0; k < 4; ++k) {
      add("residual_collapsed_Omega" + std::to_string(k + 3), r.collapsed[k],
          tol.residual_collapsed);
    }
    add("flip", r.flip, tol.flip);
    add("symmetry", r.symmetry, tol.symmetry);
    add("endpoint", r.endpoint, tol.endpoint);

    OracleOptions oracle_opts;
    oracle_opts.T = config.sim_T;
    oracle_opts.dt = config.sim_dt;
    const auto taus = uniform_grid(sys.h, config.validate_tau_points);
    try {
      const OracleResult oracle = oracle_P(sys, config.Q, taus, oracle_opts);
      double worst = 0.0;
      for (std::size_t i = 0; i < taus.size(); ++i) {
        worst = std::max(worst, max_abs(oracle.P[i] - sol.P_at(taus[i])));
      }
      add("oracle_P", worst, tol.oracle,
          oracle.tail_warning ? "non-decaying tail; system may be unstable"
                              : "");
    } catch (const SimulationBlowUp& e) {
      checks.push_back({"oracle_P", e.time(), 0.0, false, e.what()});
    }

    const double dt =
        config.sim_dt > 0.0 ? config.sim_dt : (sys.h > 0.0 ? sys.h / 100.0 : 0.01);
    const double horizon =
        config.sim_T > 0.0 ? config.sim_T : std::max(20.0, 20.0 * sys.h);
    const Matrix P0 = sol.P_at(0.0);
    const auto histories = config.effective_histories();
    std::string trajectory_csv;
    for (std::size_t i = 0; i < histories.size(); ++i) {
      const Vector& x0 = histories[i];
      const std::string name = "cost_history_" + std::to_string(i + 1);
      try {
        const HistorySpec hist = HistorySpec::point_mass(x0);
        double T = horizon;
        Trajectory traj = simulate(sys, hist, T, dt);
        CostEstimate cost = cost_quadrature(traj, config.Q);
        for (int d = 0; d < 8 && cost.tail > 1e-5; ++d) {
          T *= 2.0;
          traj = simulate(sys, hist, T, dt);
          cost = cost_quadrature(traj, config.Q);
        }
        const double expected = (x0.transpose() * P0 * x0)(0, 0);
        add(name, std::abs(cost.value - expected),
            tol.cost_relative * std::max(1.0, std::abs(expected)),
            cost.tail_warning ? "non-decaying tail" : "");
        if (i == 0) {
          std::ostringstream csv;
          traj.write_csv(csv);
          trajectory_csv = csv.str();
        }
      } catch (const SimulationBlowUp& e) {
        checks.push_back({name, e.time(), 0.0, false, e.what()});
      }
    }

    bool all_pass = true;
    std::ostringstream report;
    print_report_header(report, sol);
    report << "checks:\n";
    ordered_json jchecks = ordered_json::array();
    for (const Check& c : checks) {
      all_pass = all_pass && c.pass;
      report << "  " << (c.pass ? "PASS " : "FAIL ") << std::left
             << std::setw(30) << c.name << std::right << std::setprecision(3)
             << std::scientific << c.value << " <= " << c.threshold
             << std::defaultfloat;
      if (!c.note.empty()) report << "  (" << c.note << ")";
      report << '\n';
      jchecks.push_back({{"name", c.name},
                         {"value", c.value},
                         {"threshold", c.threshold},
                         {"pass", c.pass},
                         {"note", c.note}});
    }
    report << (all_pass ? "all checks passed\n" : "some checks FAILED\n");

    const fs::path dir = prepare_dir(config);
    write_file(dir / "report.txt", report.str());
    if (!trajectory_csv.empty()) write_file(dir / "trajectory.csv", trajectory_csv);
    ordered_json summary;
    summary["command"] = "validate";
    summary["spectrum"] = spectrum_json(sol.diagnostics().spectrum);
    summary["omega0"] = omega_json(sol.omega0());
    summary["residuals"] = residual_json(r);
    summary["checks"] = std::move(jchecks);
    summary["all_pass"] = all_pass;
    write_file(dir / "summary.json", summary.dump(2) + "\n");

    if (!options.quiet) out << report.str();
    return all_pass ? int(kSuccess) : int(kNumericalFailure);
  });
}

}  // namespace delyap::cli
