#pragma once

#include <optional>
#include <string>
#include <vector>

#include "decmhd/integrator.hpp"

namespace decmhd {

enum class CaseId { alfven, orszag_tang, loop_cone, loop_smooth, sheet_sharp, sheet_tanh };

const char* to_string(CaseId id) noexcept;
/// Throws InvalidArgument for an unknown name.
CaseId parse_case_id(const std::string& name);
std::vector<std::string> case_names();

/// Case parameters. Unset values take the case default (see resolve()).
struct CaseSpec {
  CaseId id = CaseId::alfven;
  std::optional<double> v0;
  std::optional<double> b0;
  std::optional<double> a0;
  std::optional<double> radius;
  std::optional<double> pressure;
};

/// Fully resolved parameters for a case on a given grid. Unused fields stay 0.
struct CaseParameters {
  CaseId id = CaseId::alfven;
  double v0 = 0.0;
  double b0 = 0.0;
  double a0 = 0.0;
  double radius = 0.0;
  double theta = 0.0;
  double pressure = 0.0;
  double x1 = 0.0;
  double x2 = 0.0;
};

/// Default mesh and run length of a case.
struct CaseDefaults {
  int nx = 32;
  int ny = 32;
  double lx = 2.0;
  double ly = 2.0;
  double x0 = 0.0;
  double y0 = 0.0;
  double ht = 0.1;
  double t_end = 20.0;
};

CaseDefaults case_defaults(CaseId id);

/// Fills defaults and checks the case against the grid (periodicity of the
/// closed-form data, loop radius inside the box, positive amplitudes).
CaseParameters resolve(const CaseSpec& spec, const Grid& grid);

/// B^x(i, j+1/2) = (A(i,j+1) - A(i,j)) / hy, B^y(i+1/2, j) = -(A(i+1,j) - A(i,j)) / hx
/// for A at the dual vertices. With the Hodge star of the dec module this is
/// -*dA; the result is exactly divergence free.
Form1 b_from_potential(const Grid& grid, const Array2& a);

/// Removes the discrete gradient part of a primal one-form: solves
/// div grad phi = div v (mean-zero phi) and returns v - grad phi.
Form1 project_solenoidal(const Form1& v);

/// Initial state: V and any directly given B sampled at the edge midpoints,
/// B from the vertex-sampled potential where the case defines one, constant
/// P. V is projected if its discrete divergence exceeds 1e-12.
State build_initial_state(const CaseSpec& spec, const Grid& grid);

}  // namespace decmhd
