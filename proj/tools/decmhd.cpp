#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "decmhd/cli_io.hpp"
#include "decmhd/operators.hpp"

using namespace decmhd;

namespace {

void write_field_csv(const std::filesystem::path& path, const Array2& a) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  for (int j = 0; j < a.ny(); ++j) {
    for (int i = 0; i < a.nx(); ++i) {
      if (i) out << ',';
      out << format_double(a(i, j));
    }
    out << '\n';
  }
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Structure-preserving ideal MHD on a periodic staggered grid"};
  app.require_subcommand(1);

  std::string config_path;
  std::string output_dir;
  bool strict = false;
  double newton_tol = 0.0;
  long max_steps = 0;

  auto add_run_flags = [&](CLI::App* sub) {
    sub->add_option("config", config_path, "Run configuration (INI)")->required();
    sub->add_flag("--strict", strict, "Treat unknown config keys as errors");
    sub->add_option("--output-dir", output_dir, "Override [output] dir");
    sub->add_option("--newton-tol", newton_tol, "Override [newton] tol")->check(CLI::PositiveNumber);
    sub->add_option("--max-steps", max_steps, "Stop after at most this many steps")->check(CLI::PositiveNumber);
  };
  CLI::App* run_cmd = app.add_subcommand("run", "Advance a case and write diagnostics and snapshots");
  add_run_flags(run_cmd);
  CLI::App* check_cmd = app.add_subcommand("check", "Validate a configuration and print it fully resolved");
  add_run_flags(check_cmd);

  std::string snapshot_path, potential_out, current_out;
  CLI::App* diag_cmd = app.add_subcommand("diag", "Print the conserved quantities of a snapshot");
  diag_cmd->add_option("snapshot", snapshot_path, "DECMHD01 snapshot file")->required();
  diag_cmd->add_option("--potential", potential_out, "Write the magnetic potential A (anchor 0) as CSV");
  diag_cmd->add_option("--current", current_out, "Write the current density J as CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*diag_cmd) {
      const State s = read_snapshot(snapshot_path);
      const DiagnosticsRecord r = measure(s);
      const Grid& g = s.grid();
      std::cout << "nx = " << g.nx << "\nny = " << g.ny << "\nt = " << format_double(r.t)
                << "\ne_kin = " << format_double(r.e_kin) << "\ne_mag = " << format_double(r.e_mag)
                << "\ne_total = " << format_double(r.e_total) << "\ncross_helicity = " << format_double(r.cross_helicity)
                << "\nmagnetic_helicity = " << format_double(r.magnetic_helicity)
                << "\ndiv_v_max = " << format_double(r.div_v_max) << "\ndiv_b_max = " << format_double(r.div_b_max)
                << '\n';
      if (!potential_out.empty()) write_field_csv(potential_out, reconstruct_potential(s.b, 0.0));
      if (!current_out.empty()) write_field_csv(current_out, current_density(s.b).values);
      return kExitOk;
    }

    ParsedConfig parsed = load_config(config_path, strict);
    for (const auto& w : parsed.warnings) std::cerr << "warning: " << w << '\n';
    RunConfig& cfg = parsed.config;
    if (!output_dir.empty()) cfg.output.dir = output_dir;
    if (newton_tol > 0.0) cfg.newton.tol = newton_tol;
    if (max_steps > 0) cfg.max_steps = max_steps;
    validate(cfg);

    if (*check_cmd) {
      std::cout << to_ini(cfg);
      std::cout << "# steps = " << cfg.n_steps() << '\n';
      return kExitOk;
    }
    const RunSummary summary = run(cfg, &std::cerr);
    std::cout << "completed " << summary.steps << " steps, t = " << format_double(summary.t_final)
              << "\nenergy drift = " << format_double(summary.last.e_total - summary.initial.e_total)
              << "\noutput: " << cfg.output.dir << '\n';
    return kExitOk;
  } catch (...) {
    return report_error(std::cerr);
  }
}
