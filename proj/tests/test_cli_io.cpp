#include <doctest.h>

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "decmhd/cli_io.hpp"
#include "support.hpp"

using namespace decmhd;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("decmhd_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string message_of(const std::string& text, bool strict = false) {
  try {
    parse_config(text, strict);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

std::vector<std::string> read_lines(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::string> out;
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

}  // namespace

TEST_CASE("minimal config is filled with case defaults") {
  const ParsedConfig p = parse_config("[case]\nname = alfven\n[grid]\nnx = 32\nny = 32\n[time]\nht = 0.1\nt_end = 20\n");
  const RunConfig& c = p.config;
  CHECK(p.warnings.empty());
  CHECK(c.case_spec.id == CaseId::alfven);
  CHECK(c.lx == 2.0);
  CHECK(c.ly == 2.0);
  CHECK(c.n_steps() == 200);
  CHECK(c.newton.tol == 1e-10);
  CHECK(c.output.diag_every == 1);
  CHECK_FALSE(c.output.snapshot_every.has_value());

  const RunConfig ot = parse_config("[case]\nname = orszag_tang\n").config;
  CHECK(ot.nx == 64);
  CHECK(ot.ht == 0.01);
}

TEST_CASE("config values, comments and enums") {
  const RunConfig c = parse_config(R"(
# comment
[case]
name = loop_cone   ; trailing comment
radius = 0.25
[grid]
nx = 16
ny = 8
[output]
dir = somewhere
snapshot_every = 5
diag_every = 2
[newton]
linear_solver = gmres
preconditioner = block-jacobi
extrapolate_guess = true
max_iter = 7
)")
                          .config;
  CHECK(*c.case_spec.radius == 0.25);
  CHECK(c.x0 == -1.0);
  CHECK(c.output.dir == "somewhere");
  CHECK(*c.output.snapshot_every == 5);
  CHECK(c.output.diag_every == 2);
  CHECK(c.newton.linear_solver == LinearSolver::gmres);
  CHECK(c.newton.preconditioner == Preconditioner::block_jacobi);
  CHECK(c.newton.extrapolate_guess);
  CHECK(c.newton.max_iter == 7);
}

TEST_CASE("config errors name the field and the lines") {
  CHECK(message_of("[case]\nname = alfven\n[time]\nht = 0\n") == "ht must be positive");
  CHECK(message_of("[case]\nname = alfven\n[time]\nht = -0.5\n") == "ht must be positive");
  const std::string dup = message_of("[case]\nname = alfven\n[grid]\nnx = 8\n\nnx = 16\n");
  CHECK(dup.find("line 6") != std::string::npos);
  CHECK(dup.find("line 4") != std::string::npos);
  CHECK(dup.find("grid.nx") != std::string::npos);
  CHECK(message_of("[case]\nname = alfven\n[grid]\nnx = eight\n").find("line 4: grid.nx") == 0);
  CHECK(message_of("[case]\nname = alfven\n[grid]\nnx = 1\n") == "grid.nx must be at least 2");
  CHECK(message_of("[grid]\nnx = 8\n").find("name") != std::string::npos);
  CHECK(message_of("[case]\nname = tornado\n").find("unknown case") != std::string::npos);
  CHECK(message_of("name = alfven\n").find("outside") != std::string::npos);
  CHECK(message_of("[case\nname = alfven\n").find("line 1") == 0);
  CHECK(message_of("[case]\nname alfven\n").find("line 2") == 0);
  CHECK(message_of("[case]\nname = alfven\n[newton]\nlinear_solver = cg\n").find("newton.linear_solver") !=
        std::string::npos);
  CHECK(message_of("[case]\nname = alfven\n[grid]\nlx = 3\n").find("multiple of 2") != std::string::npos);
  CHECK(message_of("[case]\nname = alfven\n[output]\ndiag_every = 0\n") == "output.diag_every must be at least 1");
}

TEST_CASE("unknown keys warn, or fail when strict") {
  const std::string text = "[case]\nname = alfven\ncolour = blue\n[extras]\nx = 1\n";
  const ParsedConfig p = parse_config(text);
  REQUIRE(p.warnings.size() == 2);
  CHECK(p.warnings[0].find("case.colour") != std::string::npos);
  CHECK(p.warnings[1].find("[extras]") != std::string::npos);
  CHECK(message_of(text, true).find("case.colour") != std::string::npos);
}

TEST_CASE("to_ini reproduces the configuration") {
  RunConfig c = parse_config("[case]\nname = sheet_tanh\nv0 = 0.125\n[time]\nt_end = 3.3\n[newton]\ntol = 3e-13\n"
                             "[output]\nsnapshot_every = 4\n")
                    .config;
  const RunConfig d = parse_config(to_ini(c)).config;
  CHECK(to_ini(d) == to_ini(c));
  CHECK(*d.case_spec.v0 == 0.125);
  CHECK(d.newton.tol == 3e-13);
  CHECK(d.t_end == 3.3);
  CHECK(*d.output.snapshot_every == 4);
}

TEST_CASE("step count reaches t_end") {
  RunConfig c = parse_config("[case]\nname = alfven\n[time]\nht = 0.1\nt_end = 2\n").config;
  CHECK(c.n_steps() == 20);
  c.t_end = 2.05;
  CHECK(c.n_steps() == 21);
  c.max_steps = 3;
  CHECK(c.n_steps() == 3);
}

TEST_CASE("format_double round trips") {
  std::mt19937_64 rng(51);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int k = 0; k < 1000; ++k) {
    const double v = u(rng) * std::pow(10.0, static_cast<int>(k % 40) - 20);
    const std::string s = format_double(v);
    double back = 0.0;
    std::from_chars(s.data(), s.data() + s.size(), back);
    CHECK(back == v);
  }
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(4.0) == "4");
}

TEST_CASE("snapshot round trip is bit exact") {
  std::mt19937_64 rng(52);
  const Grid g = make_grid(32, 32, 2.0, 2.0, -1.0, 0.5);
  State s = testing_support::random_state(g, rng);
  s.t = 1.2345678901234567;
  const fs::path dir = scratch("snap");
  fs::create_directories(dir);
  const fs::path file = dir / "s.bin";
  write_snapshot(s, file);
  CHECK(fs::file_size(file) == 41016u);
  CHECK(snapshot_size(32, 32) == 41016u);
  const State r = read_snapshot(file);
  CHECK(r.grid() == g);
  CHECK(r.t == s.t);
  CHECK(r.v.x == s.v.x);
  CHECK(r.v.y == s.v.y);
  CHECK(r.b.x == s.b.x);
  CHECK(r.b.y == s.b.y);
  CHECK(r.p == s.p);

  std::ifstream in(file, std::ios::binary);
  char head[16];
  in.read(head, 16);
  CHECK(std::string(head, 8) == "DECMHD01");
  CHECK(static_cast<unsigned char>(head[8]) == 32);  // little-endian nx
  CHECK(head[9] == 0);
}

TEST_CASE("snapshot format errors") {
  const Grid g = make_grid(4, 4, 1.0, 1.0);
  const fs::path dir = scratch("snap_err");
  fs::create_directories(dir);
  const fs::path good = dir / "good.bin";
  write_snapshot(make_state(g), good);
  std::ifstream in(good, std::ios::binary);
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  auto write_bytes = [&](const std::string& name, const std::string& content) {
    std::ofstream out(dir / name, std::ios::binary);
    out << content;
    return dir / name;
  };
  auto error_of = [](const fs::path& p) -> std::string {
    try {
      read_snapshot(p);
    } catch (const IoError& e) {
      return e.what();
    }
    return "";
  };

  std::string v2 = bytes;
  v2[7] = '2';
  CHECK(error_of(write_bytes("v2.bin", v2)).find("version") != std::string::npos);
  std::string bad = bytes;
  bad[0] = 'X';
  CHECK(error_of(write_bytes("bad.bin", bad)).find("magic") != std::string::npos);
  CHECK(error_of(write_bytes("short.bin", bytes.substr(0, bytes.size() - 8))).find("truncated") != std::string::npos);
  CHECK(error_of(write_bytes("hdr.bin", bytes.substr(0, 20))).find("truncated") != std::string::npos);
  CHECK(error_of(write_bytes("long.bin", bytes + "x")).find("trailing") != std::string::npos);
  CHECK(error_of(dir / "missing.bin").find("cannot open") != std::string::npos);
}

TEST_CASE("csv rows") {
  DiagnosticsRecord r;
  r.step = 3;
  r.t = 0.30000000000000004;
  r.e_total = 4.0;
  r.newton_iterations = 2;
  r.residual_norm = 1e-13;
  CHECK(csv_header() ==
        "step,t,e_kin,e_mag,e_total,cross_helicity,magnetic_helicity,div_v_max,div_b_max,newton_iters,residual_norm");
  CHECK(csv_row(r) == "3,0.30000000000000004,0,0,4,0,0,0,0,2,1e-13");
}

TEST_CASE("run writes the diagnostics, snapshots and metadata") {
  const fs::path dir = scratch("run");
  RunConfig c = parse_config("[case]\nname = alfven\n[time]\nht = 0.1\nt_end = 2\n").config;
  c.output.dir = dir.string();
  const RunSummary s = run(c);
  CHECK(s.steps == 20);
  CHECK(s.t_final == 2.0);
  const auto lines = read_lines(dir / "diagnostics.csv");
  REQUIRE(lines.size() == 21u);
  CHECK(lines[0] == csv_header());
  CHECK(lines[20].rfind("20,2,", 0) == 0);
  REQUIRE(s.snapshots.size() == 1u);
  CHECK(s.snapshots[0].filename() == "snapshot_000020.bin");
  std::ifstream meta(dir / "run.json");
  const nlohmann::json j = nlohmann::json::parse(meta);
  CHECK(j["status"] == "completed");
  CHECK(j["grid"]["nx"] == 32);
  CHECK(j["drift"]["e_total"]["relative"].get<double>() < 1e-12);
  CHECK(j["final"]["step"] == 20);
  CHECK(read_snapshot(s.snapshots[0]).t == 2.0);
  CHECK(s.initial.e_total == doctest::Approx(4.0));

  // cadence: every 5th step, plus the final state
  c.output.snapshot_every = 5;
  c.output.diag_every = 3;
  c.t_end = 1.1;
  const RunSummary t = run(c);
  CHECK(t.snapshots.size() == 3u);  // 5, 10, 11
  CHECK(read_lines(dir / "diagnostics.csv").size() == 1u + 3u + 1u);  // 3, 6, 9, final 11
}

TEST_CASE("unwritable output directory is an io error") {
  const fs::path blocker = scratch("blocker");
  std::ofstream(blocker) << "file";
  RunConfig c = parse_config("[case]\nname = alfven\n[time]\nt_end = 0.1\n").config;
  c.output.dir = (blocker / "sub").string();
  CHECK_THROWS_AS(run(c), IoError);
}

TEST_CASE("solver failure keeps partial output") {
  const fs::path dir = scratch("fail");
  RunConfig c = parse_config("[case]\nname = orszag_tang\n[grid]\nnx = 8\nny = 8\n[time]\nht = 0.5\nt_end = 5\n"
                             "[newton]\nmax_iter = 1\ntol = 1e-14\n")
                    .config;
  c.output.dir = dir.string();
  CHECK_THROWS_AS(run(c), SolverFailure);
  CHECK(fs::exists(dir / "diagnostics.csv"));
  std::ifstream meta(dir / "run.json");
  std::stringstream ss;
  ss << meta.rdbuf();
  CHECK(ss.str().find("solver_failure") != std::string::npos);
  try {
    throw SolverFailure("x", {1.0, 0.5}, 1);
  } catch (...) {
    std::ostringstream err;
    CHECK(report_error(err) == kExitSolver);
    CHECK(err.str().find("residual history") != std::string::npos);
  }
}

#ifdef DECMHD_CLI
TEST_CASE("command line exit status") {
  const fs::path dir = scratch("cli");
  fs::create_directories(dir);
  const std::string cli = DECMHD_CLI;
  auto status = [&](const std::string& args) {
    const int raw = std::system((cli + " " + args + " > " + (dir / "out.txt").string() + " 2>&1").c_str());
    return WEXITSTATUS(raw);
  };
  std::ofstream(dir / "ok.ini") << "[case]\nname = alfven\n[time]\nt_end = 0.2\n[output]\ndir = " << (dir / "o").string()
                                << "\n";
  std::ofstream(dir / "bad.ini") << "[case]\nname = alfven\n[time]\nht = 0\n";
  std::ofstream(dir / "unknown.ini") << "[case]\nname = alfven\nfoo = 1\n[time]\nt_end = 0.1\n[output]\ndir = "
                                     << (dir / "u").string() << "\n";
  std::ofstream(dir / "hard.ini") << "[case]\nname = orszag_tang\n[grid]\nnx = 8\nny = 8\n[time]\nht = 0.5\n"
                                  << "[newton]\nmax_iter = 1\ntol = 1e-14\n[output]\ndir = " << (dir / "h").string()
                                  << "\n";
  std::ofstream(dir / "blocked.ini") << "[case]\nname = alfven\n[output]\ndir = " << (dir / "ok.ini" / "x").string()
                                     << "\n";

  CHECK(status("check " + (dir / "ok.ini").string()) == 0);
  CHECK(status("run " + (dir / "ok.ini").string()) == 0);
  CHECK(fs::exists(dir / "o" / "snapshot_000002.bin"));
  CHECK(status("diag " + (dir / "o" / "snapshot_000002.bin").string() + " --potential " +
               (dir / "a.csv").string()) == 0);
  CHECK(read_lines(dir / "a.csv").size() == 32u);
  CHECK(status("run " + (dir / "bad.ini").string()) == 1);
  CHECK(status("run " + (dir / "unknown.ini").string() + " --max-steps 1") == 0);
  CHECK(status("run " + (dir / "unknown.ini").string() + " --strict") == 1);
  CHECK(status("run " + (dir / "missing.ini").string()) == 3);
  CHECK(status("run " + (dir / "hard.ini").string()) == 2);
  CHECK(status("run " + (dir / "blocked.ini").string()) == 3);
  CHECK(status("diag " + (dir / "ok.ini").string()) == 3);
  CHECK(status("frobnicate") == 1);
  CHECK(status("run " + (dir / "ok.ini").string() + " --newton-tol -1") == 1);
  CHECK(status("run " + (dir / "ok.ini").string() + " --output-dir " + (dir / "o2").string() +
               " --max-steps 1") == 0);
  CHECK(fs::exists(dir / "o2" / "snapshot_000001.bin"));
}
#endif
