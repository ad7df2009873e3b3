#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "decmhd/cases.hpp"
#include "decmhd/diagnostics.hpp"
#include "decmhd/integrator.hpp"

namespace decmhd {

/// Malformed or inconsistent configuration (exit status 1).
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// File system or snapshot format problem (exit status 3).
class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

enum ExitStatus : int { kExitOk = 0, kExitConfig = 1, kExitSolver = 2, kExitIo = 3 };

struct OutputConfig {
  std::string dir = "output";
  /// Unset: only the final state is written.
  std::optional<long> snapshot_every;
  long diag_every = 1;
};

struct RunConfig {
  CaseSpec case_spec;
  int nx = 0;
  int ny = 0;
  double lx = 0.0;
  double ly = 0.0;
  double x0 = 0.0;
  double y0 = 0.0;
  double ht = 0.0;
  double t_end = 0.0;
  OutputConfig output;
  NewtonConfig newton;
  /// Stops the run early after this many steps.
  std::optional<long> max_steps;

  Grid grid() const { return make_grid(nx, ny, lx, ly, x0, y0); }
  /// Steps needed to reach t_end (the last step may overshoot by < ht),
  /// capped by max_steps.
  long n_steps() const;
};

struct ParsedConfig {
  RunConfig config;
  std::vector<std::string> warnings;
};

/// Parses the INI-style run configuration:
///
///   [case]    name, v0, b0, a0, radius, pressure
///   [grid]    nx, ny, lx, ly, x0, y0
///   [time]    ht, t_end
///   [output]  dir, snapshot_every, diag_every
///   [newton]  tol, max_iter, linear_solver (auto|direct|gmres), gmres_restart,
///             gmres_tol, gmres_max_iter, preconditioner (none|block-jacobi|ilu),
///             extrapolate_guess (true|false)
///
/// Only [case] name is required; everything else defaults per case. '#' and
/// ';' start comments. Unknown sections or keys are warnings, or errors when
/// strict. Throws ConfigError with line numbers.
ParsedConfig parse_config(const std::string& text, bool strict = false);
ParsedConfig load_config(const std::filesystem::path& path, bool strict = false);

/// Checks field ranges and the case against its domain. Throws ConfigError
/// naming the offending field.
void validate(const RunConfig& cfg);

/// Fully resolved configuration in the input format; parse_config of the
/// result reproduces cfg.
std::string to_ini(const RunConfig& cfg);

/// Shortest decimal text that parses back to exactly v.
std::string format_double(double v);

// --- DECMHD01 snapshots -------------------------------------------------
//
// 8-byte magic "DECMHD01", little-endian u32 nx, ny, f64 lx, ly, x0, y0, t,
// then v_x, v_y, b_x, b_y, p as row-major (j outer) f64 arrays.

inline constexpr char kSnapshotMagic[8] = {'D', 'E', 'C', 'M', 'H', 'D', '0', '1'};
std::uintmax_t snapshot_size(int nx, int ny);

void write_snapshot(const State& s, const std::filesystem::path& path);
State read_snapshot(const std::filesystem::path& path);

// --- diagnostics.csv ----------------------------------------------------

std::string csv_header();
std::string csv_row(const DiagnosticsRecord& r);

// --- run driver ---------------------------------------------------------

struct RunSummary {
  long steps = 0;
  double t_final = 0.0;
  DiagnosticsRecord initial;
  DiagnosticsRecord last;
  std::vector<std::filesystem::path> snapshots;
};

/// Builds the initial state, advances it to t_end and writes
/// diagnostics.csv, snapshots and run.json into cfg.output.dir. Throws
/// ConfigError, IoError or SolverFailure; outputs written before a solver
/// failure are kept and run.json records the failure.
RunSummary run(const RunConfig& cfg, std::ostream* log = nullptr);

/// Maps an exception from the functions above to an exit status and writes
/// a one-line message to err.
int report_error(std::ostream& err);

}  // namespace decmhd
