#include "loadflow/cli.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "loadflow/certificate.hpp"
#include "loadflow/continuation.hpp"
#include "loadflow/fixed_point.hpp"
#include "loadflow/grid.hpp"
#include "loadflow/network.hpp"
#include "loadflow/report.hpp"

namespace loadflow::cli {

using nlohmann::json;

namespace {

// Largest ||v_hat - G(v_hat)||_{W,inf} accepted for a supplied operating point.
constexpr double kOperatingPointTolerance = 1e-6;

class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Scenario {
  PreparedGrid grid;
  ComplexVector s;
  std::optional<OperatingPoint> known_state;
};

Scenario load_scenario(const RunConfig& config, bool need_injections) {
  Scenario sc;
  try {
    NetworkDescription net = load_network(config.network_path);
    if (need_injections) sc.s = load_injections(config.injection_path, net).s;
    if (config.operating_point_path) {
      sc.known_state = load_operating_point(*config.operating_point_path, net);
    }
    sc.grid = prepare_grid(std::move(net));
  } catch (const NetworkError& e) {
    throw InputError(e.what());
  } catch (const NumericalError& e) {
    throw InputError(e.what());
  } catch (const std::runtime_error& e) {
    throw InputError(e.what());
  }
  if (sc.known_state) {
    const double r = operating_point_residual(sc.grid.factors, sc.grid.w, *sc.known_state);
    if (!(r <= kOperatingPointTolerance)) {
      throw InputError("operating point does not satisfy the load-flow equations (residual " +
                       std::to_string(r) + ")");
    }
  }
  return sc;
}

KernelMatrix kernel_for(const Scenario& sc) {
  try {
    return build_kernel(sc.grid.factors, sc.grid.w);
  } catch (const std::length_error& e) {
    throw InputError(e.what());
  }
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << text;
  if (!out) throw InputError("failed writing '" + path + "'");
}

void write_json(const std::string& path, const json& doc) { write_text(path, dump_report(doc)); }

json header(const char* command, const Scenario& sc) {
  return {{"schema_version", kReportSchemaVersion},
          {"command", command},
          {"load_buses", sc.grid.net.load_count()}};
}

// The theorem is the requested test when a known state is supplied,
// otherwise the corollary.
bool requested_pass(const CertificateReport& report) {
  return report.theorem ? report.theorem->ok : report.corollary.ok;
}

template <typename Fn>
int guarded(std::ostream& err, Fn&& body) {
  try {
    return body();
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  }
}

}  // namespace

int run_check(const RunConfig& config, std::ostream& err) {
  return guarded(err, [&] {
    const Scenario sc = load_scenario(config, true);
    const KernelMatrix kernel = kernel_for(sc);
    const CertificateReport report = certify(kernel, sc.grid.w, sc.s, sc.known_state);
    const bool pass = requested_pass(report);

    json doc = header("check", sc);
    doc["condition"] = report.theorem ? "theorem" : "corollary";
    doc["passed"] = pass;
    doc["certificate"] = to_json(report);
    write_json(config.output_path, doc);

    if (!pass) err << "certificate: " << doc["condition"].get<std::string>() << " conditions fail\n";
    return pass ? kExitPass : kExitConditionFailed;
  });
}

int run_solve(const RunConfig& config, std::ostream& err) {
  return guarded(err, [&] {
    const Scenario sc = load_scenario(config, true);
    const KernelMatrix kernel = kernel_for(sc);
    const CertificateReport report = certify(kernel, sc.grid.w, sc.s, sc.known_state);

    SolveOptions options;
    options.tol = config.tol;
    options.max_iter = config.max_iter;
    ComplexVector start = sc.grid.w.w;
    if (report.theorem) {
      start = sc.known_state->v;
      if (report.theorem->ok) {
        options.certified_ball = solution_ball(*report.theorem, sc.known_state->v, sc.grid.w);
      }
    } else if (report.corollary.ok) {
      options.certified_ball = solution_ball(report.corollary, sc.grid.w);
    }
    if (!options.certified_ball) {
      err << "warning: no certificate holds for this injection; iterating without guarantee\n";
    }

    SolveResult result;
    try {
      result = solve_fixed_point(sc.grid.factors, sc.grid.w, sc.s, start, options);
    } catch (const VoltageCollapse& e) {
      err << "error: " << e.what() << '\n';
      return static_cast<int>(kExitNotConverged);
    }

    json doc = header("solve", sc);
    doc["certificate"] = to_json(report);
    doc["solver"] = to_json(result);
    doc["voltages"] = voltage_table(sc.grid.net, result.v, sc.grid.w);
    write_json(config.output_path, doc);

    if (config.operating_point_output && result.converged) {
      write_text(*config.operating_point_output,
                 serialize_operating_point(OperatingPoint{result.v, sc.s}, sc.grid.net));
    }
    if (!result.converged) {
      err << "error: no convergence after " << result.iterations << " iterations (last step "
          << result.final_step << ")\n";
      return static_cast<int>(kExitNotConverged);
    }
    return static_cast<int>(kExitPass);
  });
}

int run_sweep(const RunConfig& config, std::ostream& err) {
  return guarded(err, [&] {
    const Scenario sc = load_scenario(config, true);
    const KernelMatrix kernel = kernel_for(sc);
    const ComplexVector& ray = sc.known_state ? sc.known_state->s : sc.s;
    const double kappa_max =
        config.kappa_max.value_or(2.0 * ray.cwiseAbs().sum() * sc.grid.net.bases.power_mva);
    if (!(kappa_max > 0.0) || config.steps < 2) {
      throw InputError("sweep needs kappa_max > 0, steps >= 2 and a nonzero injection ray");
    }

    SweepOptions options;
    options.solver.tol = config.tol;
    options.solver.max_iter = config.max_iter;
    SweepResult result;
    try {
      result = sweep(sc.grid, kernel, sc.s, sc.known_state, kappa_max, config.steps, options);
    } catch (const std::invalid_argument& e) {
      throw InputError(e.what());
    }

    std::ostringstream table;
    write_sweep_table(table, result);
    write_text(config.output_path, table.str());

    if (config.summary_path) {
      json doc = header("sweep", sc);
      doc["kappa_max"] = kappa_max;
      doc["steps"] = config.steps;
      doc["kappa_hat"] = result.kappa_hat ? json(*result.kappa_hat) : json(nullptr);
      doc["boundaries"] = to_json(result.boundaries);
      write_json(*config.summary_path, doc);
    }
    return static_cast<int>(kExitPass);
  });
}

int run_dump_matrix(const RunConfig& config, std::ostream& err) {
  return guarded(err, [&] {
    const Scenario sc = load_scenario(config, false);
    const SparseMatrix y = build_full_admittance(sc.grid.net);
    std::string text = "row col re im\n";
    char buf[128];
    for (int col = 0; col < y.outerSize(); ++col) {
      for (SparseMatrix::InnerIterator it(y, col); it; ++it) {
        std::snprintf(buf, sizeof buf, "%d %d %.17g %.17g\n", static_cast<int>(it.row()), col,
                      it.value().real(), it.value().imag());
        text += buf;
      }
    }
    write_text(config.output_path, text);
    return static_cast<int>(kExitPass);
  });
}

int run(const RunConfig& config, std::ostream& err) {
  if (config.subcommand == "check") return run_check(config, err);
  if (config.subcommand == "solve") return run_solve(config, err);
  if (config.subcommand == "sweep") return run_sweep(config, err);
  if (config.subcommand == "dump-matrix") return run_dump_matrix(config, err);
  err << "error: unknown subcommand '" << config.subcommand << "'\n";
  return kExitInputError;
}

int main_entry(int argc, char** argv) {
  CLI::App app{"Certified fixed-point load flow for distribution networks"};
  app.require_subcommand(1);

  RunConfig config;
  auto add_common = [&](CLI::App* sub, bool injections) {
    sub->add_option("--network", config.network_path, "Network document (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    if (injections) {
      sub->add_option("--injections", config.injection_path, "Injection document (JSON)")
          ->required()
          ->check(CLI::ExistingFile);
      sub->add_option("--operating-point", config.operating_point_path,
                      "Known solution (v_hat, s_hat) document (JSON)")
          ->check(CLI::ExistingFile);
    } else {
      // accepted for a uniform command line, unused
      sub->add_option("--injections", config.injection_path, "Ignored");
    }
    sub->add_option("--out", config.output_path, "Output file")->required();
  };

  auto* check = app.add_subcommand("check", "Evaluate the existence/uniqueness certificates");
  add_common(check, true);

  auto* solve = app.add_subcommand("solve", "Run the fixed-point load flow");
  add_common(solve, true);
  solve->add_option("--tol", config.tol, "Step tolerance in normalized coordinates");
  solve->add_option("--max-iter", config.max_iter, "Iteration limit");
  solve->add_option("--write-operating-point", config.operating_point_output,
                    "Also write the converged (v, s) as an operating-point document");

  auto* sweep_cmd = app.add_subcommand("sweep", "Continuation sweep of the certified regions");
  add_common(sweep_cmd, true);
  sweep_cmd->add_option("--kappa-max", config.kappa_max, "Largest total injection (MVA)");
  sweep_cmd->add_option("--steps", config.steps, "Grid points");
  sweep_cmd->add_option("--tol", config.tol, "Solver step tolerance");
  sweep_cmd->add_option("--max-iter", config.max_iter, "Solver iteration limit");
  sweep_cmd->add_option("--summary", config.summary_path, "Boundary summary (JSON)");

  auto* dump = app.add_subcommand("dump-matrix", "Write Y in coordinate form");
  add_common(dump, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(kExitInputError);
  }
  config.subcommand = app.get_subcommands().front()->get_name();
  return run(config, std::cerr);
}

}  // namespace loadflow::cli
