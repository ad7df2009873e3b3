#pragma once

// Stencils of the discrete ideal MHD equations on the staggered grid. All
// of them act on primal one-forms (velocity V, magnetic field B) at two
// consecutive time levels and are evaluated at the half step n+1/2.

#include "decmhd/dec.hpp"

namespace decmhd {

/// One physical edge field at time levels n and n+1.
struct EdgePair {
  Form1 old_level;
  Form1 new_level;
};

/// Cell-centred space-time averages of the two components of an edge field.
struct BarField {
  Array2 x;
  Array2 y;
};

/// xbar(i,j) is the mean of the four x-edge values above and below cell
/// (i,j) at both time levels; ybar uses the left and right y-edges.
BarField bar_average(const EdgePair& f);

/// Edge-wise time average (f^n + f^{n+1}) / 2.
Form1 midpoint(const EdgePair& f);

/// psi(V, W): cell-centred V-bar times the curl (Dy W^x - Dx W^y) of the
/// time-averaged W, averaged back onto the primal edges.
Form1 psi_discrete(const BarField& vbar, const EdgePair& w);

/// phi(V, B) in flux form: the difference quotient across each edge of the
/// cell-centred product Vbar^y Bbar^x - Vbar^x Bbar^y.
Form1 phi_discrete(const Grid& grid, const BarField& vbar, const BarField& bbar);

/// Cell-centred Vbar^y Bbar^x - Vbar^x Bbar^y, whose discrete curl is phi.
Array2 cross_product(const BarField& vbar, const BarField& bbar);

/// Divergence of a primal one-form at the primal vertices (i+1/2, j+1/2),
/// by forward differences of the stored layout.
Array2 div_staggered(const Form1& v);

/// Gradient of a vertex scalar onto primal edges, backward differences.
Form1 grad_pressure(const Grid& grid, const Array2& p);

}  // namespace decmhd
