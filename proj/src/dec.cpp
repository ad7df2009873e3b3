#include "decmhd/dec.hpp"

#include <string>

namespace decmhd {

const char* to_string(Kind k) noexcept { return k == Kind::primal ? "primal" : "dual"; }

namespace {

void require_same_grid(const Grid& a, const Grid& b, const char* op) {
  if (!(a == b)) throw InvalidArgument(std::string(op) + ": operands live on different grids");
}

void require_same_kind(Kind a, Kind b, const char* op) {
  if (a != b) throw InvalidArgument(std::string(op) + ": primal/dual kind mismatch");
}

[[noreturn]] void unsupported(const char* op, Kind a, Kind b) {
  throw InvalidArgument(std::string(op) + ": no exterior product defined for " + to_string(a) +
                        " and " + to_string(b) + " forms of these degrees");
}

}  // namespace

Form0::Form0(const Grid& g, Kind k, Array2 v) : grid(g), kind(k), values(std::move(v)) {
  require_shape(values, grid, "Form0");
}

Form1::Form1(const Grid& g, Kind k, Array2 xv, Array2 yv)
    : grid(g), kind(k), x(std::move(xv)), y(std::move(yv)) {
  require_shape(x, grid, "Form1");
  require_shape(y, grid, "Form1");
}

Form2::Form2(const Grid& g, Kind k, Array2 v) : grid(g), kind(k), values(std::move(v)) {
  require_shape(values, grid, "Form2");
}

Chain::Chain(const Grid& g, int deg, Kind k) : grid(g), degree(deg), kind(k) {
  if (deg < 0 || deg > 2) throw InvalidArgument("chain degree must be 0, 1 or 2");
  if (deg == 1) {
    ax = Array2(g);
    ay = Array2(g);
  } else {
    a = Array2(g);
  }
}

Form0 operator+(const Form0& a, const Form0& b) {
  require_same_grid(a.grid, b.grid, "add");
  require_same_kind(a.kind, b.kind, "add");
  return Form0(a.grid, a.kind, a.values + b.values);
}

Form1 operator+(const Form1& a, const Form1& b) {
  require_same_grid(a.grid, b.grid, "add");
  require_same_kind(a.kind, b.kind, "add");
  return Form1(a.grid, a.kind, a.x + b.x, a.y + b.y);
}

Form2 operator+(const Form2& a, const Form2& b) {
  require_same_grid(a.grid, b.grid, "add");
  require_same_kind(a.kind, b.kind, "add");
  return Form2(a.grid, a.kind, a.values + b.values);
}

Form0 operator*(double s, const Form0& a) { return Form0(a.grid, a.kind, s * a.values); }
Form1 operator*(double s, const Form1& a) { return Form1(a.grid, a.kind, s * a.x, s * a.y); }
Form2 operator*(double s, const Form2& a) { return Form2(a.grid, a.kind, s * a.values); }

// ---------------------------------------------------------------------------
// chains

Chain boundary(const Chain& c) {
  const Grid& g = c.grid;
  if (c.degree == 0) throw InvalidArgument("boundary: vertex chains have no boundary operator");
  Chain out(g, c.degree - 1, c.kind);
  if (c.degree == 1) {
    for (int j = 0; j < g.ny; ++j) {
      for (int i = 0; i < g.nx; ++i) {
        if (c.kind == Kind::primal) {
          // d e^x_{i,j+1/2} = v_{i+1/2,j+1/2} - v_{i-1/2,j+1/2}
          out.a(i, j) = c.ax(i, j) - c.ax.at(i + 1, j) + c.ay(i, j) - c.ay.at(i, j + 1);
        } else {
          // d e*x_{i+1/2,j} = v*_{i+1,j} - v*_{i,j}
          out.a(i, j) = c.ax.at(i - 1, j) - c.ax(i, j) + c.ay.at(i, j - 1) - c.ay(i, j);
        }
      }
    }
  } else {
    for (int j = 0; j < g.ny; ++j) {
      for (int i = 0; i < g.nx; ++i) {
        if (c.kind == Kind::primal) {
          // d c_{i,j} = e^x_{i,j-1/2} + e^y_{i+1/2,j} - e^x_{i,j+1/2} - e^y_{i-1/2,j}
          out.ax(i, j) = c.a.at(i, j + 1) - c.a(i, j);
          out.ay(i, j) = c.a(i, j) - c.a.at(i + 1, j);
        } else {
          out.ax(i, j) = c.a(i, j) - c.a.at(i, j - 1);
          out.ay(i, j) = c.a.at(i - 1, j) - c.a(i, j);
        }
      }
    }
  }
  return out;
}

Chain full_chain(const Grid& g, int degree, Kind kind) {
  Chain c(g, degree, kind);
  if (degree == 1) {
    c.ax = Array2(g, 1.0);
    c.ay = Array2(g, 1.0);
  } else {
    c.a = Array2(g, 1.0);
  }
  return c;
}

namespace {

void check_integrand(const Grid& fg, Kind fk, const Chain& c, int degree) {
  require_same_grid(fg, c.grid, "integrate");
  if (c.degree != degree) throw InvalidArgument("integrate: chain degree differs from form degree");
  require_same_kind(fk, c.kind, "integrate");
}

}  // namespace

double integrate(const Form0& f, const Chain& c) {
  check_integrand(f.grid, f.kind, c, 0);
  double s = 0.0;
  for (int j = 0; j < f.grid.ny; ++j)
    for (int i = 0; i < f.grid.nx; ++i) s += c.a(i, j) * f.values(i, j);
  return s;
}

double integrate(const Form1& f, const Chain& c) {
  check_integrand(f.grid, f.kind, c, 1);
  const double hx = f.grid.hx, hy = f.grid.hy;
  double s = 0.0;
  for (int j = 0; j < f.grid.ny; ++j)
    for (int i = 0; i < f.grid.nx; ++i) s += hx * c.ax(i, j) * f.x(i, j) + hy * c.ay(i, j) * f.y(i, j);
  return s;
}

double integrate(const Form2& f, const Chain& c) {
  check_integrand(f.grid, f.kind, c, 2);
  const double area = f.grid.hx * f.grid.hy;
  double s = 0.0;
  for (int j = 0; j < f.grid.ny; ++j)
    for (int i = 0; i < f.grid.nx; ++i) s += area * c.a(i, j) * f.values(i, j);
  return s;
}

// ---------------------------------------------------------------------------
// Hodge star

Form2 hodge(const Form0& f) { return Form2(f.grid, opposite(f.kind), f.values); }

Form0 hodge(const Form2& f) { return Form0(f.grid, opposite(f.kind), f.values); }

Form1 hodge(const Form1& f) {
  if (f.kind == Kind::primal) {
    // *e^x = e*y,  *e^y = -e*x
    return Form1(f.grid, Kind::dual, -1.0 * f.y, f.x);
  }
  // *e*y = -e^x,  *e*x = e^y
  return Form1(f.grid, Kind::primal, -1.0 * f.y, f.x);
}

// ---------------------------------------------------------------------------
// exterior derivative

Form1 d(const Form0& f) {
  const Grid& g = f.grid;
  Form1 out(g, f.kind);
  const Array2& p = f.values;
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      if (f.kind == Kind::primal) {
        out.x(i, j) = (p(i, j) - p.at(i - 1, j)) / g.hx;
        out.y(i, j) = (p(i, j) - p.at(i, j - 1)) / g.hy;
      } else {
        out.x(i, j) = (p.at(i + 1, j) - p(i, j)) / g.hx;
        out.y(i, j) = (p.at(i, j + 1) - p(i, j)) / g.hy;
      }
    }
  }
  return out;
}

Form2 d(const Form1& f) {
  const Grid& g = f.grid;
  Form2 out(g, f.kind);
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      if (f.kind == Kind::primal) {
        out.values(i, j) = (f.y(i, j) - f.y.at(i - 1, j)) / g.hx - (f.x(i, j) - f.x.at(i, j - 1)) / g.hy;
      } else {
        out.values(i, j) = (f.y.at(i + 1, j) - f.y(i, j)) / g.hx - (f.x.at(i, j + 1) - f.x(i, j)) / g.hy;
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// exterior products

Form0 wedge(const Form0& a, const Form0& b) {
  require_same_grid(a.grid, b.grid, "wedge");
  if (a.kind != b.kind) unsupported("wedge", a.kind, b.kind);
  Form0 out(a.grid, a.kind);
  for (std::size_t k = 0; k < a.values.size(); ++k) out.values.data()[k] = a.values.data()[k] * b.values.data()[k];
  return out;
}

Form1 wedge(const Form0& a, const Form1& b) {
  require_same_grid(a.grid, b.grid, "wedge");
  if (a.kind != b.kind) unsupported("wedge", a.kind, b.kind);
  const Grid& g = a.grid;
  const Array2& p = a.values;
  Form1 out(g, a.kind);
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      if (a.kind == Kind::primal) {
        out.x(i, j) = 0.5 * (p.at(i - 1, j) + p(i, j)) * b.x(i, j);
        out.y(i, j) = 0.5 * (p.at(i, j - 1) + p(i, j)) * b.y(i, j);
      } else {
        out.x(i, j) = 0.5 * (p(i, j) + p.at(i + 1, j)) * b.x(i, j);
        out.y(i, j) = 0.5 * (p(i, j) + p.at(i, j + 1)) * b.y(i, j);
      }
    }
  }
  return out;
}

Form1 wedge(const Form1& a, const Form0& b) { return wedge(b, a); }

Form2 wedge(const Form0& a, const Form2& b) {
  require_same_grid(a.grid, b.grid, "wedge");
  const Grid& g = a.grid;
  const Array2& p = a.values;
  const Array2& w = b.values;
  if (a.kind == Kind::primal && b.kind == Kind::primal) {
    Form2 out(g, Kind::primal);
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i)
        out.values(i, j) = 0.25 * (p.at(i - 1, j - 1) + p.at(i, j - 1) + p.at(i - 1, j) + p(i, j)) * w(i, j);
    return out;
  }
  if (a.kind == Kind::dual && b.kind == Kind::dual) {
    Form2 out(g, Kind::dual);
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i)
        out.values(i, j) = 0.25 * (p(i, j) + p.at(i + 1, j) + p.at(i, j + 1) + p.at(i + 1, j + 1)) * w(i, j);
    return out;
  }
  if (a.kind == Kind::primal) {
    // primal vertex values times dual cell values (co-located), averaged to primal cells
    Form2 out(g, Kind::primal);
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i)
        out.values(i, j) = 0.25 * (p.at(i - 1, j - 1) * w.at(i - 1, j - 1) + p.at(i - 1, j) * w.at(i - 1, j) +
                                   p.at(i, j - 1) * w.at(i, j - 1) + p(i, j) * w(i, j));
    return out;
  }
  // dual vertex values times primal cell values (co-located), averaged to dual cells
  Form2 out(g, Kind::dual);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      out.values(i, j) = 0.25 * (p(i, j) * w(i, j) + p.at(i, j + 1) * w.at(i, j + 1) +
                                 p.at(i + 1, j) * w.at(i + 1, j) + p.at(i + 1, j + 1) * w.at(i + 1, j + 1));
  return out;
}

Form2 wedge(const Form2& a, const Form0& b) {
  if (a.kind == b.kind) return wedge(b, a);
  require_same_grid(a.grid, b.grid, "wedge");
  // mixed: pointwise, result on the grid of the two-form
  Form2 out(a.grid, a.kind);
  for (std::size_t k = 0; k < a.values.size(); ++k) out.values.data()[k] = a.values.data()[k] * b.values.data()[k];
  return out;
}

Form2 wedge(const Form1& a, const Form1& b) {
  require_same_grid(a.grid, b.grid, "wedge");
  const Grid& g = a.grid;
  if (a.kind == Kind::primal && b.kind == Kind::primal) {
    Form2 out(g, Kind::primal);
    for (int j = 0; j < g.ny; ++j) {
      for (int i = 0; i < g.nx; ++i) {
        const double ax = a.x.at(i, j - 1) + a.x(i, j);
        const double ay = a.y.at(i - 1, j) + a.y(i, j);
        const double bx = b.x.at(i, j - 1) + b.x(i, j);
        const double by = b.y.at(i - 1, j) + b.y(i, j);
        out.values(i, j) = 0.25 * (ax * by - ay * bx);
      }
    }
    return out;
  }
  if (a.kind == Kind::dual && b.kind == Kind::dual) {
    Form2 out(g, Kind::dual);
    for (int j = 0; j < g.ny; ++j) {
      for (int i = 0; i < g.nx; ++i) {
        const double ax = a.x(i, j) + a.x.at(i, j + 1);
        const double ay = a.y(i, j) + a.y.at(i + 1, j);
        const double bx = b.x(i, j) + b.x.at(i, j + 1);
        const double by = b.y(i, j) + b.y.at(i + 1, j);
        out.values(i, j) = 0.25 * (ax * by - ay * bx);
      }
    }
    return out;
  }
  if (a.kind == Kind::primal) {
    // primal x-edges pair with co-located dual y-edges, primal y-edges with dual x-edges
    Form2 out(g, Kind::primal);
    for (int j = 0; j < g.ny; ++j) {
      for (int i = 0; i < g.nx; ++i) {
        out.values(i, j) = 0.5 * (a.x.at(i, j - 1) * b.y.at(i, j - 1) + a.x(i, j) * b.y(i, j) -
                                  a.y.at(i - 1, j) * b.x.at(i - 1, j) - a.y(i, j) * b.x(i, j));
      }
    }
    return out;
  }
  Form2 out(g, Kind::dual);
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      out.values(i, j) = 0.5 * (a.x(i, j) * b.y(i, j) + a.x.at(i, j + 1) * b.y.at(i, j + 1) -
                                a.y(i, j) * b.x(i, j) - a.y.at(i + 1, j) * b.x.at(i + 1, j));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// pairings (periodic reduction of the averaged stencils)

double pairing(const Form0& a, const Form0& b) {
  require_same_grid(a.grid, b.grid, "pairing");
  require_same_kind(a.kind, b.kind, "pairing");
  double s = 0.0;
  for (int j = 0; j < a.grid.ny; ++j)
    for (int i = 0; i < a.grid.nx; ++i) s += a.values(i, j) * b.values(i, j);
  return a.grid.hx * a.grid.hy * s;
}

double pairing(const Form1& a, const Form1& b) {
  require_same_grid(a.grid, b.grid, "pairing");
  require_same_kind(a.kind, b.kind, "pairing");
  double s = 0.0;
  for (int j = 0; j < a.grid.ny; ++j)
    for (int i = 0; i < a.grid.nx; ++i) s += a.x(i, j) * b.x(i, j) + a.y(i, j) * b.y(i, j);
  return a.grid.hx * a.grid.hy * s;
}

double pairing(const Form2& a, const Form2& b) {
  require_same_grid(a.grid, b.grid, "pairing");
  require_same_kind(a.kind, b.kind, "pairing");
  double s = 0.0;
  for (int j = 0; j < a.grid.ny; ++j)
    for (int i = 0; i < a.grid.nx; ++i) s += a.values(i, j) * b.values(i, j);
  return a.grid.hx * a.grid.hy * s;
}

}  // namespace decmhd
