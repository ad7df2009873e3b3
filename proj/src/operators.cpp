#include "decmhd/operators.hpp"

namespace decmhd {

namespace {

void check_pair(const EdgePair& f) {
  if (!(f.old_level.grid == f.new_level.grid)) throw InvalidArgument("edge pair spans two grids");
  if (f.old_level.kind != Kind::primal || f.new_level.kind != Kind::primal) {
    throw InvalidArgument("MHD stencils act on primal one-forms");
  }
}

void check_bar(const BarField& b, const Grid& g) {
  require_shape(b.x, g, "bar field");
  require_shape(b.y, g, "bar field");
}

}  // namespace

Form1 midpoint(const EdgePair& f) {
  check_pair(f);
  return 0.5 * (f.old_level + f.new_level);
}

BarField bar_average(const EdgePair& f) {
  check_pair(f);
  const Grid& g = f.old_level.grid;
  const Array2& x0 = f.old_level.x;
  const Array2& x1 = f.new_level.x;
  const Array2& y0 = f.old_level.y;
  const Array2& y1 = f.new_level.y;
  BarField out{Array2(g), Array2(g)};
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      out.x(i, j) = 0.25 * (x0.at(i, j - 1) + x0(i, j) + x1.at(i, j - 1) + x1(i, j));
      out.y(i, j) = 0.25 * (y0.at(i - 1, j) + y0(i, j) + y1.at(i - 1, j) + y1(i, j));
    }
  }
  return out;
}

Form1 psi_discrete(const BarField& vbar, const EdgePair& w) {
  check_pair(w);
  const Grid& g = w.old_level.grid;
  check_bar(vbar, g);
  const Form1 wm = midpoint(w);
  // curl(i,j) = (Dy W^x - Dx W^y) at cell centres
  Array2 curl(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      curl(i, j) = (wm.x(i, j) - wm.x.at(i, j - 1)) / g.hy - (wm.y(i, j) - wm.y.at(i - 1, j)) / g.hx;

  Form1 out(g, Kind::primal);
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      // x-edge (i, j+1/2) between cells (i,j) and (i,j+1)
      out.x(i, j) = 0.5 * vbar.y(i, j) * curl(i, j) + 0.5 * vbar.y.at(i, j + 1) * curl.at(i, j + 1);
      // y-edge (i+1/2, j) between cells (i,j) and (i+1,j)
      out.y(i, j) = -0.5 * vbar.x(i, j) * curl(i, j) - 0.5 * vbar.x.at(i + 1, j) * curl.at(i + 1, j);
    }
  }
  return out;
}

Array2 cross_product(const BarField& vbar, const BarField& bbar) {
  const int nx = vbar.x.nx(), ny = vbar.x.ny();
  Array2 w(nx, ny);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) w(i, j) = vbar.y(i, j) * bbar.x(i, j) - vbar.x(i, j) * bbar.y(i, j);
  return w;
}

Form1 phi_discrete(const Grid& g, const BarField& vbar, const BarField& bbar) {
  check_bar(vbar, g);
  check_bar(bbar, g);
  const Array2 w = cross_product(vbar, bbar);
  Form1 out(g, Kind::primal);
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      out.x(i, j) = (w.at(i, j + 1) - w(i, j)) / g.hy;
      out.y(i, j) = -(w.at(i + 1, j) - w(i, j)) / g.hx;
    }
  }
  return out;
}

Array2 div_staggered(const Form1& v) {
  if (v.kind != Kind::primal) throw InvalidArgument("div_staggered: expects a primal one-form");
  const Grid& g = v.grid;
  Array2 out(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      out(i, j) = (v.x.at(i + 1, j) - v.x(i, j)) / g.hx + (v.y.at(i, j + 1) - v.y(i, j)) / g.hy;
  return out;
}

Form1 grad_pressure(const Grid& g, const Array2& p) {
  require_shape(p, g, "grad_pressure");
  Form1 out(g, Kind::primal);
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      out.x(i, j) = (p(i, j) - p.at(i - 1, j)) / g.hx;
      out.y(i, j) = (p(i, j) - p.at(i, j - 1)) / g.hy;
    }
  }
  return out;
}

}  // namespace decmhd
