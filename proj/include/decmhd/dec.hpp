#pragma once

// Discrete exterior calculus on a periodic staggered Cartesian mesh.
//
// Storage of coefficients (all at the integer pair (i, j) of the owning cell):
//
//   primal 0-form  vertex  (i+1/2, j+1/2)   dual 0-form  vertex (i, j)
//   primal 1-form  x-edge  (i, j+1/2)       dual 1-form  x-edge (i+1/2, j)
//                  y-edge  (i+1/2, j)                    y-edge (i, j+1/2)
//   primal 2-form  cell    (i, j)           dual 2-form  cell   (i+1/2, j+1/2)
//
// A primal x-edge coincides with a dual y-edge, a primal vertex with a dual
// cell centre and a primal cell centre with a dual vertex.

#include "decmhd/grid.hpp"

namespace decmhd {

enum class Kind { primal, dual };

constexpr Kind opposite(Kind k) noexcept { return k == Kind::primal ? Kind::dual : Kind::primal; }
const char* to_string(Kind k) noexcept;

struct Form0 {
  Grid grid;
  Kind kind = Kind::primal;
  Array2 values;

  Form0() = default;
  Form0(const Grid& g, Kind k, double fill = 0.0) : grid(g), kind(k), values(g, fill) {}
  Form0(const Grid& g, Kind k, Array2 v);
};

struct Form1 {
  Grid grid;
  Kind kind = Kind::primal;
  Array2 x;
  Array2 y;

  Form1() = default;
  Form1(const Grid& g, Kind k, double fill = 0.0) : grid(g), kind(k), x(g, fill), y(g, fill) {}
  Form1(const Grid& g, Kind k, Array2 xv, Array2 yv);
};

struct Form2 {
  Grid grid;
  Kind kind = Kind::primal;
  Array2 values;

  Form2() = default;
  Form2(const Grid& g, Kind k, double fill = 0.0) : grid(g), kind(k), values(g, fill) {}
  Form2(const Grid& g, Kind k, Array2 v);
};

/// Formal weighted sum of vertices (degree 0), edges (1) or cells (2).
/// Coefficients follow the layout of the forms of the same degree and kind;
/// `a` holds vertex/cell coefficients, `ax`/`ay` the two edge families.
struct Chain {
  Grid grid;
  int degree = 0;
  Kind kind = Kind::primal;
  Array2 a;
  Array2 ax;
  Array2 ay;

  Chain() = default;
  Chain(const Grid& g, int deg, Kind k);
};

// Linear-space helpers used by tests and by callers building combinations.
Form0 operator+(const Form0& a, const Form0& b);
Form1 operator+(const Form1& a, const Form1& b);
Form2 operator+(const Form2& a, const Form2& b);
Form0 operator*(double s, const Form0& a);
Form1 operator*(double s, const Form1& a);
Form2 operator*(double s, const Form2& a);

/// Boundary of an edge or cell chain. Cells are traversed counter-clockwise,
/// so that boundary(boundary(c)) vanishes and Stokes' theorem holds for d.
Chain boundary(const Chain& c);

double integrate(const Form0& f, const Chain& c);
double integrate(const Form1& f, const Chain& c);
double integrate(const Form2& f, const Chain& c);

/// Chain with unit coefficients on every element of the given degree/kind.
Chain full_chain(const Grid& g, int degree, Kind kind);

Form2 hodge(const Form0& f);
Form1 hodge(const Form1& f);
Form0 hodge(const Form2& f);

Form1 d(const Form0& f);
Form2 d(const Form1& f);
// There is no degree-3 form on a surface.
Form2 d(const Form2& f) = delete;

// Exterior products. Primal/primal and dual/dual are defined for every
// degree pair with total degree <= 2; mixed kinds only for total degree 2,
// where primal^dual lands on the primal grid and dual^primal on the dual grid.
Form0 wedge(const Form0& a, const Form0& b);
Form1 wedge(const Form0& a, const Form1& b);
Form1 wedge(const Form1& a, const Form0& b);
Form2 wedge(const Form0& a, const Form2& b);
Form2 wedge(const Form2& a, const Form0& b);
Form2 wedge(const Form1& a, const Form1& b);

/// <a, b> = integral of a ^ *b over the whole grid of a's kind.
double pairing(const Form0& a, const Form0& b);
double pairing(const Form1& a, const Form1& b);
double pairing(const Form2& a, const Form2& b);

}  // namespace decmhd
