#include <doctest.h>

#include <cmath>
#include <numbers>

#include "decmhd/cases.hpp"
#include "decmhd/diagnostics.hpp"
#include "decmhd/operators.hpp"
#include "support.hpp"

using namespace decmhd;
using testing_support::random_array;

namespace {

constexpr double kPi = std::numbers::pi;

Grid default_grid(CaseId id) {
  const CaseDefaults d = case_defaults(id);
  return make_grid(d.nx, d.ny, d.lx, d.ly, d.x0, d.y0);
}

}  // namespace

TEST_CASE("case names round trip") {
  for (const std::string& name : case_names()) CHECK(to_string(parse_case_id(name)) == name);
  CHECK_THROWS_AS(parse_case_id("kelvin_helmholtz"), InvalidArgument);
}

TEST_CASE("b_from_potential is solenoidal and vanishes for constant A") {
  std::mt19937_64 rng(41);
  const Grid g = make_grid(9, 7, 1.0, 2.0);
  const Array2 a = random_array(g, rng, 5.0);
  CHECK(div_staggered(b_from_potential(g, a)).max_abs() < 1e-13 * 5.0 / (g.hx * g.hx));
  const Form1 zero = b_from_potential(g, Array2(g, 3.0));
  CHECK(zero.x.max_abs() == 0.0);
  CHECK(zero.y.max_abs() == 0.0);
}

TEST_CASE("every case builds a consistent state on its default grid") {
  for (const std::string& name : case_names()) {
    CAPTURE(name);
    const CaseId id = parse_case_id(name);
    const Grid g = default_grid(id);
    const State s = build_initial_state(CaseSpec{id}, g);
    CHECK(div_staggered(s.v).max_abs() <= 1e-12);
    CHECK(div_staggered(s.b).max_abs() <= 1e-12);
    CHECK(s.t == 0.0);
    CHECK_NOTHROW(reconstruct_potential(s.b));
  }
}

TEST_CASE("alfven initial state") {
  const Grid g = default_grid(CaseId::alfven);
  const State s = build_initial_state(CaseSpec{CaseId::alfven}, g);
  CHECK(s.v.y(3, 5) == doctest::Approx(std::sin(kPi * (3.5 / 16.0))));
  CHECK(s.b.x.max_abs() == doctest::Approx(1.0));
  CHECK(s.p(4, 4) == doctest::Approx(0.1));
  CHECK(energy(s).total() == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(cross_helicity(s) == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("orszag_tang current density near the origin") {
  // continuum J = 4 cos 2y - 2 cos x, J(0,0) = 2, second-order convergence
  double previous_error = 0.0;
  for (int n : {32, 64, 128}) {
    const Grid g = make_grid(n, n, 2.0 * kPi, 2.0 * kPi);
    const State s = build_initial_state(CaseSpec{CaseId::orszag_tang}, g);
    const double err = std::abs(current_density(s.b).values(0, 0) - 2.0);
    if (previous_error > 0.0) CHECK(previous_error / err == doctest::Approx(4.0).epsilon(0.05));
    previous_error = err;
  }
  CHECK(previous_error < 5e-3);
}

TEST_CASE("loop_cone field strength is the cone slope") {
  const Grid g = default_grid(CaseId::loop_cone);
  const State s = build_initial_state(CaseSpec{CaseId::loop_cone}, g);
  // x-edge straddling the positive y-axis at r ~ 0.15: cell (64, j) centre at x = 0
  const int j = 32 + 9;  // y_half(j) = 0.1484
  CHECK(std::abs(s.b.x(64, j)) == doctest::Approx(1e-3).epsilon(1e-12));
  // outside the loop the field vanishes
  CHECK(s.b.x(5, 5) == 0.0);
  const CaseParameters p = resolve(CaseSpec{CaseId::loop_cone}, g);
  CHECK(p.v0 == doctest::Approx(std::sqrt(5.0)));
  CHECK(p.theta == doctest::Approx(std::atan(0.5)));
  CHECK(s.v.x(0, 0) == doctest::Approx(2.0));
  CHECK(s.v.y(0, 0) == doctest::Approx(1.0));
}

TEST_CASE("sheet cases") {
  const Grid g = default_grid(CaseId::sheet_sharp);
  const State sharp = build_initial_state(CaseSpec{CaseId::sheet_sharp}, g);
  CHECK(sharp.b.y(0, 0) == 1.0);
  CHECK(sharp.b.y(8, 3) == -1.0);
  CHECK(sharp.b.y(23, 3) == -1.0);
  CHECK(sharp.b.y(24, 3) == 1.0);
  CHECK(sharp.b.x.max_abs() == 0.0);
  CHECK(sharp.v.x(0, 8) == doctest::Approx(0.1 * std::sin(kPi * 8.5 / 16.0)));
  const State smooth = build_initial_state(CaseSpec{CaseId::sheet_tanh}, g);
  CHECK(smooth.b.y(8, 0) == doctest::Approx(std::tanh(10.0 * (8.5 / 16.0 - 0.5))));
  CHECK(smooth.b.y(20, 0) == doctest::Approx(-std::tanh(10.0 * (20.5 / 16.0 - 1.5))));
}

TEST_CASE("parameter overrides") {
  const Grid g = default_grid(CaseId::alfven);
  CaseSpec spec{CaseId::alfven};
  spec.v0 = 0.5;
  spec.b0 = 2.0;
  spec.pressure = 3.0;
  const State s = build_initial_state(spec, g);
  CHECK(energy(s).kinetic == doctest::Approx(0.25));
  CHECK(energy(s).magnetic == doctest::Approx(12.0));
  CHECK(s.p(0, 0) == 3.0);
}

TEST_CASE("case and domain mismatches are rejected") {
  CHECK_THROWS_AS(build_initial_state(CaseSpec{CaseId::alfven}, make_grid(32, 32, 3.0, 2.0)), InvalidArgument);
  CHECK_THROWS_AS(build_initial_state(CaseSpec{CaseId::orszag_tang}, make_grid(16, 16, 6.0, 6.0)), InvalidArgument);
  CaseSpec big{CaseId::loop_cone};
  big.radius = 0.6;
  CHECK_THROWS_AS(build_initial_state(big, make_grid(32, 16, 2.0, 1.0, -1.0, -0.5)), InvalidArgument);
  big.radius = -0.1;
  CHECK_THROWS_AS(build_initial_state(big, make_grid(32, 16, 2.0, 1.0, -1.0, -0.5)), InvalidArgument);
}

TEST_CASE("project_solenoidal removes a gradient") {
  std::mt19937_64 rng(42);
  const Grid g = make_grid(12, 10, 1.0, 1.2);
  const Form1 sol = testing_support::solenoidal(g, random_array(g, rng));
  const Form1 grad = grad_pressure(g, random_array(g, rng));
  const Form1 proj = project_solenoidal(sol + grad);
  CHECK(div_staggered(proj).max_abs() < 1e-12);
  CHECK((proj.x - sol.x).max_abs() < 1e-12);
  CHECK((proj.y - sol.y).max_abs() < 1e-12);
}
