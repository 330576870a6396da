// delyap: delay Lyapunov matrices for systems with a distributed delay.
//
//   delyap solve --config run.json [--out dir] [--tau-points N]
//   delyap check --config run.json
//   delyap validate --config run.json [--tolerance residual_dde=1e-6 ...]
//   delyap sample --config run.json --tau 0,0.25,0.5
//   delyap dump-config --config run.json

#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "delyap/commands.hpp"
#include "delyap/config.hpp"
#include "delyap/errors.hpp"

namespace {

struct Args {
  std::string config;
  std::string out;
  int tau_points = 0;
  std::vector<std::string> tolerances;
  std::string tau_list;
  bool quiet = false;
};

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size()) {
      throw delyap::ConfigError("--tau", "not a number: '" + item + "'");
    }
    values.push_back(v);
  }
  return values;
}

delyap::RunConfig load(const Args& args) {
  delyap::RunConfig config = delyap::load_config(args.config);
  if (!args.out.empty()) config.output_dir = args.out;
  if (args.tau_points > 0) {
    if (args.tau_points < 2) {
      throw delyap::ConfigError("--tau-points", "must be at least 2");
    }
    config.tau_points = args.tau_points;
    config.tau_values.clear();
  }
  if (!args.tau_list.empty()) config.tau_values = parse_list(args.tau_list);
  for (const std::string& kv : args.tolerances) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      throw delyap::ConfigError("--tolerance", "expected name=value, got '" + kv + "'");
    }
    const std::string name = kv.substr(0, eq);
    const auto values = parse_list(kv.substr(eq + 1));
    if (values.size() != 1 || !(values[0] > 0.0)) {
      throw delyap::ConfigError("--tolerance " + name, "needs one positive value");
    }
    if (!config.tolerances.set(name, values[0])) {
      throw delyap::ConfigError("--tolerance", "unknown tolerance '" + name + "'");
    }
  }
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Delay Lyapunov matrices for linear time-delay systems"};
  app.require_subcommand(1);
  Args args;

  auto common = [&](CLI::App* sub) {
    sub->add_option("-c,--config", args.config, "JSON run configuration")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("-o,--out", args.out, "output directory");
    sub->add_option("--tau-points", args.tau_points, "points on the tau grid");
    sub->add_option("--tolerance", args.tolerances, "override, name=value")
        ->take_all();
    sub->add_flag("-q,--quiet", args.quiet, "suppress console output");
  };

  auto* solve = app.add_subcommand("solve", "compute P(tau) and write the table");
  auto* check = app.add_subcommand("check", "spectrum condition only");
  auto* validate = app.add_subcommand("validate", "cross-check against simulation");
  auto* sample = app.add_subcommand("sample", "P at explicit tau values");
  auto* dump = app.add_subcommand("dump-config", "print the canonical configuration");
  for (auto* sub : {solve, check, validate, sample, dump}) common(sub);
  sample->add_option("--tau", args.tau_list, "comma-separated tau values");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : delyap::cli::kInputError;
  }

  delyap::RunConfig config;
  try {
    config = load(args);
  } catch (const delyap::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return delyap::cli::kInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return delyap::cli::kInputError;
  }

  const delyap::cli::CommandOptions options{args.quiet};
  std::ostream& out = std::cout;
  try {
    if (*solve) return delyap::cli::cmd_solve(config, out, options);
    if (*check) return delyap::cli::cmd_check(config, out, options);
    if (*validate) return delyap::cli::cmd_validate(config, out, options);
    if (*sample) return delyap::cli::cmd_sample(config, out, options);
    out << delyap::dump_config(config).dump(2) << '\n';
    return delyap::cli::kSuccess;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return delyap::cli::kNumericalFailure;
  }
}
