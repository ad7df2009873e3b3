#include "decmhd/cli_io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace decmhd {

namespace fs = std::filesystem;
using nlohmann::json;

// ---------------------------------------------------------------------------
// number formatting and parsing

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

struct Entry {
  std::string value;
  int line = 0;
};

class ConfigReader {
public:
  ConfigReader(std::map<std::string, Entry> entries) : entries_(std::move(entries)) {}

  bool has(const std::string& key) const { return entries_.count(key) != 0; }

  std::string text(const std::string& key, const std::string& fallback) const {
    const auto it = entries_.find(key);
    return it == entries_.end() ? fallback : it->second.value;
  }

  template <class T>
  std::optional<T> number(const std::string& key) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    const std::string& v = it->second.value;
    T out{};
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size()) {
      std::ostringstream os;
      os << "line " << it->second.line << ": " << key << ": expected " << (std::is_integral_v<T> ? "an integer" : "a number")
         << ", got '" << v << "'";
      throw ConfigError(os.str());
    }
    return out;
  }

  template <class T>
  T number(const std::string& key, T fallback) const {
    return number<T>(key).value_or(fallback);
  }

  bool boolean(const std::string& key, bool fallback) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    if (it->second.value == "true") return true;
    if (it->second.value == "false") return false;
    throw ConfigError("line " + std::to_string(it->second.line) + ": " + key + ": expected true or false, got '" +
                      it->second.value + "'");
  }

  int line(const std::string& key) const { return entries_.at(key).line; }

private:
  std::map<std::string, Entry> entries_;
};

const std::map<std::string, std::vector<std::string>>& known_keys() {
  static const std::map<std::string, std::vector<std::string>> keys = {
      {"case", {"name", "v0", "b0", "a0", "radius", "pressure"}},
      {"grid", {"nx", "ny", "lx", "ly", "x0", "y0"}},
      {"time", {"ht", "t_end"}},
      {"output", {"dir", "snapshot_every", "diag_every"}},
      {"newton",
       {"tol", "max_iter", "linear_solver", "gmres_restart", "gmres_tol", "gmres_max_iter", "preconditioner",
        "extrapolate_guess"}},
  };
  return keys;
}

LinearSolver parse_linear_solver(const std::string& v, int line) {
  for (LinearSolver s : {LinearSolver::automatic, LinearSolver::sparse_direct, LinearSolver::gmres})
    if (v == to_string(s)) return s;
  throw ConfigError("line " + std::to_string(line) + ": newton.linear_solver: expected auto, direct or gmres, got '" +
                    v + "'");
}

Preconditioner parse_preconditioner(const std::string& v, int line) {
  for (Preconditioner p : {Preconditioner::none, Preconditioner::block_jacobi, Preconditioner::incomplete_lu})
    if (v == to_string(p)) return p;
  throw ConfigError("line " + std::to_string(line) +
                    ": newton.preconditioner: expected none, block-jacobi or ilu, got '" + v + "'");
}

}  // namespace

// ---------------------------------------------------------------------------
// configuration

long RunConfig::n_steps() const {
  long n = static_cast<long>(std::ceil(t_end / ht - 1e-9));
  n = std::max(n, 1L);
  if (max_steps) n = std::min(n, *max_steps);
  return n;
}

ParsedConfig parse_config(const std::string& text, bool strict) {
  ParsedConfig out;
  std::map<std::string, Entry> entries;
  std::string section;
  bool section_known = false;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  auto complain = [&](const std::string& msg) {
    if (strict) throw ConfigError(msg);
    out.warnings.push_back(msg);
  };

  while (std::getline(in, raw)) {
    ++line_no;
    const auto cut = raw.find_first_of("#;");
    const std::string line = trim(cut == std::string::npos ? raw : raw.substr(0, cut));
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(line_no) + ": ";
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      section_known = known_keys().count(section) != 0;
      if (!section_known) complain(where + "unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + "expected 'key = value'");
    if (section.empty()) throw ConfigError(where + "key outside of any [section]");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(where + "empty key");
    const std::string full = section + "." + key;
    if (const auto it = entries.find(full); it != entries.end()) {
      throw ConfigError(where + "duplicate key '" + full + "' (first set on line " + std::to_string(it->second.line) +
                        ")");
    }
    if (!section_known) continue;
    const auto& keys = known_keys().at(section);
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      complain(where + "unknown key '" + full + "'");
      entries[full] = Entry{value, line_no};  // keeps duplicate detection
      continue;
    }
    entries[full] = Entry{value, line_no};
  }

  const ConfigReader r(std::move(entries));
  if (!r.has("case.name")) throw ConfigError("missing required key [case] name");
  RunConfig& c = out.config;
  try {
    c.case_spec.id = parse_case_id(r.text("case.name", ""));
  } catch (const InvalidArgument& e) {
    throw ConfigError("line " + std::to_string(r.line("case.name")) + ": " + e.what());
  }
  c.case_spec.v0 = r.number<double>("case.v0");
  c.case_spec.b0 = r.number<double>("case.b0");
  c.case_spec.a0 = r.number<double>("case.a0");
  c.case_spec.radius = r.number<double>("case.radius");
  c.case_spec.pressure = r.number<double>("case.pressure");

  const CaseDefaults d = case_defaults(c.case_spec.id);
  c.nx = r.number<int>("grid.nx", d.nx);
  c.ny = r.number<int>("grid.ny", d.ny);
  c.lx = r.number<double>("grid.lx", d.lx);
  c.ly = r.number<double>("grid.ly", d.ly);
  c.x0 = r.number<double>("grid.x0", d.x0);
  c.y0 = r.number<double>("grid.y0", d.y0);
  c.ht = r.number<double>("time.ht", d.ht);
  c.t_end = r.number<double>("time.t_end", d.t_end);

  c.output.dir = r.text("output.dir", c.output.dir);
  c.output.snapshot_every = r.number<long>("output.snapshot_every");
  c.output.diag_every = r.number<long>("output.diag_every", c.output.diag_every);

  NewtonConfig& n = c.newton;
  n.tol = r.number<double>("newton.tol", n.tol);
  n.max_iter = r.number<int>("newton.max_iter", n.max_iter);
  if (r.has("newton.linear_solver"))
    n.linear_solver = parse_linear_solver(r.text("newton.linear_solver", ""), r.line("newton.linear_solver"));
  n.gmres_restart = r.number<int>("newton.gmres_restart", n.gmres_restart);
  n.gmres_tol = r.number<double>("newton.gmres_tol", n.gmres_tol);
  n.gmres_max_iter = r.number<int>("newton.gmres_max_iter", n.gmres_max_iter);
  if (r.has("newton.preconditioner"))
    n.preconditioner = parse_preconditioner(r.text("newton.preconditioner", ""), r.line("newton.preconditioner"));
  n.extrapolate_guess = r.boolean("newton.extrapolate_guess", n.extrapolate_guess);

  validate(c);
  return out;
}

ParsedConfig load_config(const fs::path& path, bool strict) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), strict);
}

void validate(const RunConfig& c) {
  if (c.nx < 2) throw ConfigError("grid.nx must be at least 2");
  if (c.ny < 2) throw ConfigError("grid.ny must be at least 2");
  if (!(c.lx > 0.0) || !std::isfinite(c.lx)) throw ConfigError("grid.lx must be positive");
  if (!(c.ly > 0.0) || !std::isfinite(c.ly)) throw ConfigError("grid.ly must be positive");
  if (!std::isfinite(c.x0) || !std::isfinite(c.y0)) throw ConfigError("grid origin must be finite");
  if (!(c.ht > 0.0) || !std::isfinite(c.ht)) throw ConfigError("ht must be positive");
  if (!(c.t_end > 0.0) || !std::isfinite(c.t_end)) throw ConfigError("t_end must be positive");
  if (c.output.dir.empty()) throw ConfigError("output.dir must not be empty");
  if (c.output.diag_every < 1) throw ConfigError("output.diag_every must be at least 1");
  if (c.output.snapshot_every && *c.output.snapshot_every < 1)
    throw ConfigError("output.snapshot_every must be at least 1");
  if (c.max_steps && *c.max_steps < 1) throw ConfigError("max_steps must be at least 1");
  try {
    validate(c.newton);
    (void)resolve(c.case_spec, c.grid());
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
}

std::string to_ini(const RunConfig& c) {
  std::ostringstream os;
  os << "[case]\nname = " << to_string(c.case_spec.id) << '\n';
  auto opt = [&](const char* key, const std::optional<double>& v) {
    if (v) os << key << " = " << format_double(*v) << '\n';
  };
  opt("v0", c.case_spec.v0);
  opt("b0", c.case_spec.b0);
  opt("a0", c.case_spec.a0);
  opt("radius", c.case_spec.radius);
  opt("pressure", c.case_spec.pressure);
  os << "\n[grid]\nnx = " << c.nx << "\nny = " << c.ny << "\nlx = " << format_double(c.lx)
     << "\nly = " << format_double(c.ly) << "\nx0 = " << format_double(c.x0) << "\ny0 = " << format_double(c.y0)
     << "\n\n[time]\nht = " << format_double(c.ht) << "\nt_end = " << format_double(c.t_end) << "\n\n[output]\ndir = "
     << c.output.dir << '\n';
  if (c.output.snapshot_every) os << "snapshot_every = " << *c.output.snapshot_every << '\n';
  os << "diag_every = " << c.output.diag_every << "\n\n[newton]\ntol = " << format_double(c.newton.tol)
     << "\nmax_iter = " << c.newton.max_iter << "\nlinear_solver = " << to_string(c.newton.linear_solver)
     << "\ngmres_restart = " << c.newton.gmres_restart << "\ngmres_tol = " << format_double(c.newton.gmres_tol)
     << "\ngmres_max_iter = " << c.newton.gmres_max_iter << "\npreconditioner = " << to_string(c.newton.preconditioner)
     << "\nextrapolate_guess = " << (c.newton.extrapolate_guess ? "true" : "false") << '\n';
  return os.str();
}

// ---------------------------------------------------------------------------
// snapshots

namespace {

template <class T>
void put_le(std::string& buf, T v) {
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  buf.append(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <class T>
T get_le(const char* p) {
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, p, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  T v;
  std::memcpy(&v, bytes, sizeof(T));
  return v;
}

constexpr std::uintmax_t kHeaderBytes = 8 + 2 * 4 + 5 * 8;

}  // namespace

std::uintmax_t snapshot_size(int nx, int ny) {
  return kHeaderBytes + 5u * static_cast<std::uintmax_t>(nx) * static_cast<std::uintmax_t>(ny) * 8u;
}

void write_snapshot(const State& s, const fs::path& path) {
  validate_state(s);
  const Grid& g = s.grid();
  std::string buf;
  buf.reserve(static_cast<std::size_t>(snapshot_size(g.nx, g.ny)));
  buf.append(kSnapshotMagic, sizeof kSnapshotMagic);
  put_le<std::uint32_t>(buf, static_cast<std::uint32_t>(g.nx));
  put_le<std::uint32_t>(buf, static_cast<std::uint32_t>(g.ny));
  for (double v : {g.lx, g.ly, g.x0, g.y0, s.t}) put_le<double>(buf, v);
  for (const Array2* a : {&s.v.x, &s.v.y, &s.b.x, &s.b.y, &s.p})
    for (double v : a->values()) put_le<double>(buf, v);

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  out.flush();
  if (!out) throw IoError("failed writing " + path.string());
}

State read_snapshot(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open snapshot " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  const std::string buf = ss.str();
  const std::string name = path.string();

  if (buf.size() < sizeof kSnapshotMagic) throw IoError(name + ": truncated snapshot (no header)");
  if (std::memcmp(buf.data(), kSnapshotMagic, sizeof kSnapshotMagic) != 0) {
    if (std::memcmp(buf.data(), kSnapshotMagic, 6) == 0) {
      throw IoError(name + ": unsupported snapshot version '" + buf.substr(0, 8) + "' (expected DECMHD01)");
    }
    throw IoError(name + ": not a DECMHD snapshot (bad magic)");
  }
  if (buf.size() < kHeaderBytes) throw IoError(name + ": truncated snapshot header");
  const char* p = buf.data() + 8;
  const auto nx = get_le<std::uint32_t>(p);
  const auto ny = get_le<std::uint32_t>(p + 4);
  p += 8;
  double hdr[5];
  for (double& v : hdr) {
    v = get_le<double>(p);
    p += 8;
  }
  if (nx < 2 || ny < 2 || nx > (1u << 20) || ny > (1u << 20)) throw IoError(name + ": invalid grid size in header");
  const std::uintmax_t expected = snapshot_size(static_cast<int>(nx), static_cast<int>(ny));
  if (buf.size() < expected) {
    throw IoError(name + ": truncated snapshot (" + std::to_string(buf.size()) + " of " + std::to_string(expected) +
                  " bytes)");
  }
  if (buf.size() > expected) throw IoError(name + ": trailing data after snapshot");

  Grid g;
  try {
    g = make_grid(static_cast<int>(nx), static_cast<int>(ny), hdr[0], hdr[1], hdr[2], hdr[3]);
  } catch (const InvalidArgument& e) {
    throw IoError(name + ": invalid snapshot header: " + e.what());
  }
  State s = make_state(g);
  s.t = hdr[4];
  for (Array2* a : {&s.v.x, &s.v.y, &s.b.x, &s.b.y, &s.p}) {
    for (double& v : a->values()) {
      v = get_le<double>(p);
      p += 8;
    }
  }
  return s;
}

// ---------------------------------------------------------------------------
// diagnostics.csv

std::string csv_header() {
  return "step,t,e_kin,e_mag,e_total,cross_helicity,magnetic_helicity,div_v_max,div_b_max,newton_iters,residual_norm";
}

std::string csv_row(const DiagnosticsRecord& r) {
  std::string s = std::to_string(r.step);
  for (double v : {r.t, r.e_kin, r.e_mag, r.e_total, r.cross_helicity, r.magnetic_helicity, r.div_v_max, r.div_b_max}) {
    s += ',';
    s += format_double(v);
  }
  s += ',';
  s += std::to_string(r.newton_iterations);
  s += ',';
  s += format_double(r.residual_norm);
  return s;
}

// ---------------------------------------------------------------------------
// run driver

namespace {

json record_json(const DiagnosticsRecord& r) {
  return json{{"step", r.step},
              {"t", r.t},
              {"e_kin", r.e_kin},
              {"e_mag", r.e_mag},
              {"e_total", r.e_total},
              {"cross_helicity", r.cross_helicity},
              {"magnetic_helicity", r.magnetic_helicity},
              {"div_v_max", r.div_v_max},
              {"div_b_max", r.div_b_max},
              {"newton_iters", r.newton_iterations},
              {"residual_norm", r.residual_norm}};
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  out.flush();
  if (!out) throw IoError("failed writing " + path.string());
}

std::string snapshot_name(long step) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "snapshot_%06ld.bin", step);
  return buf;
}

// Largest deviation of the conserved quantities from their initial values
// over the recorded rows.
struct DriftTracker {
  const DiagnosticsRecord& first;
  double e = 0.0, ch = 0.0, mh = 0.0;

  void add(const DiagnosticsRecord& r) {
    e = std::max(e, std::abs(r.e_total - first.e_total));
    ch = std::max(ch, std::abs(r.cross_helicity - first.cross_helicity));
    mh = std::max(mh, std::abs(r.magnetic_helicity - first.magnetic_helicity));
  }

  json to_json() const {
    auto entry = [](double abs, double ref) {
      return json{{"absolute", abs}, {"relative", ref != 0.0 ? abs / std::abs(ref) : INFINITY}};
    };
    return json{{"e_total", entry(e, first.e_total)},
                {"cross_helicity", entry(ch, first.cross_helicity)},
                {"magnetic_helicity", entry(mh, first.magnetic_helicity)}};
  }
};

}  // namespace

RunSummary run(const RunConfig& cfg, std::ostream* log) {
  validate(cfg);
  const Grid g = cfg.grid();
  State s0;
  CaseParameters params;
  try {
    params = resolve(cfg.case_spec, g);
    s0 = build_initial_state(cfg.case_spec, g);
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }

  const fs::path dir(cfg.output.dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory " + dir.string());

  const long n_steps = cfg.n_steps();
  RunSummary summary;
  summary.initial = measure(s0);
  summary.last = summary.initial;

  json meta;
  meta["format"] = "decmhd-run/1";
  meta["status"] = "running";
  meta["config"] = to_ini(cfg);
  meta["case"] = json{{"name", to_string(params.id)}, {"v0", params.v0},         {"b0", params.b0},
                      {"a0", params.a0},             {"radius", params.radius}, {"theta", params.theta},
                      {"pressure", params.pressure}, {"x1", params.x1},         {"x2", params.x2}};
  meta["grid"] = json{{"nx", g.nx}, {"ny", g.ny}, {"lx", g.lx}, {"ly", g.ly}, {"x0", g.x0}, {"y0", g.y0}};
  meta["time"] = json{{"ht", cfg.ht}, {"t_end", cfg.t_end}, {"n_steps", n_steps}};
  {
    StepSolver probe(g, cfg.newton);
    meta["solver"] = json{{"newton_tol", cfg.newton.tol},
                          {"newton_max_iter", cfg.newton.max_iter},
                          {"residual_norm", "max-norm of the unscaled residual"},
                          {"initial_guess", cfg.newton.extrapolate_guess ? "linear extrapolation" : "previous state"},
                          {"linear_solver", to_string(probe.effective_linear_solver())},
                          {"direct_backend", direct_solver_backend()},
                          {"gmres_restart", cfg.newton.gmres_restart},
                          {"gmres_tol", cfg.newton.gmres_tol},
                          {"preconditioner", to_string(cfg.newton.preconditioner)}};
  }
  meta["gauge"] = json{
      {"pressure", "P is defined up to a constant; its mean keeps the initial value"},
      {"magnetic_potential",
       "A(i=0,j=0) = 0 at t = 0; the anchor value is advanced with the step, so magnetic_helicity drifts only "
       "physically"},
      {"divergence_constraint", "div V enforced at the new time level"},
      {"edge_sampling", "point values at edge midpoints"}};
  meta["initial"] = record_json(summary.initial);
  const fs::path meta_path = dir / "run.json";
  write_text(meta_path, meta.dump(2) + "\n");

  const fs::path csv_path = dir / "diagnostics.csv";
  std::ofstream csv(csv_path, std::ios::binary | std::ios::trunc);
  if (!csv) throw IoError("cannot open " + csv_path.string() + " for writing");
  csv << csv_header() << '\n';

  HelicityGauge gauge;
  DriftTracker drift{summary.initial};
  const long log_every = std::max(1L, n_steps / 20);
  auto observer = [&](long k, const State& prev, const State& next, const StepReport& report) {
    gauge.advance(prev, next, cfg.ht);
    const bool last = k == n_steps;
    if (k % cfg.output.diag_every == 0 || last) {
      summary.last = measure(next, gauge.anchor(), k, &report);
      drift.add(summary.last);
      csv << csv_row(summary.last) << '\n';
      csv.flush();
      if (!csv) throw IoError("failed writing " + csv_path.string());
    }
    if ((cfg.output.snapshot_every && k % *cfg.output.snapshot_every == 0) || last) {
      const fs::path snap = dir / snapshot_name(k);
      write_snapshot(next, snap);
      summary.snapshots.push_back(snap);
    }
    if (log && (k % log_every == 0 || last)) {
      *log << "step " << k << '/' << n_steps << "  t = " << format_double(next.t)
           << "  newton = " << report.newton_iterations << "  residual = " << report.final_residual_norm << '\n';
    }
  };

  State final_state;
  try {
    final_state = advance(s0, cfg.ht, n_steps, cfg.newton, observer);
  } catch (const SolverFailure& f) {
    csv.close();
    meta["status"] = "solver_failure";
    meta["failure"] = json{{"message", f.what()}, {"step", f.step()}, {"residual_history", f.residual_history()}};
    meta["last"] = record_json(summary.last);
    meta["drift"] = drift.to_json();
    write_text(meta_path, meta.dump(2) + "\n");
    throw;
  }
  csv.close();

  summary.steps = n_steps;
  summary.t_final = final_state.t;
  meta["status"] = "completed";
  meta["final"] = record_json(summary.last);
  meta["drift"] = drift.to_json();
  json snaps = json::array();
  for (const auto& p : summary.snapshots) snaps.push_back(p.filename().string());
  meta["snapshots"] = snaps;
  write_text(meta_path, meta.dump(2) + "\n");
  return summary;
}

int report_error(std::ostream& err) {
  try {
    throw;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const InvalidArgument& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const SolverFailure& e) {
    err << "solver error: " << e.what() << '\n';
    if (!e.residual_history().empty()) {
      err << "residual history:";
      for (double r : e.residual_history()) err << ' ' << r;
      err << '\n';
    }
    return kExitSolver;
  } catch (const IoError& e) {
    err << "io error: " << e.what() << '\n';
    return kExitIo;
  } catch (const fs::filesystem_error& e) {
    err << "io error: " << e.what() << '\n';
    return kExitIo;
  } catch (const ReconstructionError& e) {
    err << "io error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitSolver;
  }
}

}  // namespace decmhd
