#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "decmhd/integrator.hpp"

namespace decmhd {

struct Energy {
  double kinetic = 0.0;
  double magnetic = 0.0;
  double total() const noexcept { return kinetic + magnetic; }
};

/// E_kin = <V,V>/2 and E_mag = <B,B>/2 with the primal one-form pairing.
Energy energy(const State& s);

/// <V,B>.
double cross_helicity(const State& s);

/// Thrown when B is not discretely solenoidal, so that no potential exists.
class ReconstructionError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Magnetic potential A at the dual vertices (cell centres) with
///   B^x(i, j+1/2) = (A(i,j+1) - A(i,j)) / hy,
///   B^y(i+1/2, j) = -(A(i+1,j) - A(i,j)) / hx,
/// and A(0,0) = anchor_value. Column i = 0 is filled first, then each row.
///
/// A uniform component of B (net flux through the periodic box) has no
/// periodic potential; it appears as a linear ramp in A with the jump across
/// the seam j = ny-1 -> 0 (resp. i = nx-1 -> 0) equal to the net flux.
Array2 reconstruct_potential(const Form1& b, double anchor_value = 0.0);

/// hx*hy*sum(A) for the potential anchored at anchor_value. Only differences
/// in time are meaningful, and only if the anchor follows the gauge
/// (see HelicityGauge).
double magnetic_helicity(const Form1& b, double anchor_value = 0.0);
double magnetic_helicity(const State& s, double anchor_value = 0.0);

/// J = d(B), a primal two-form at the cell centres.
Form2 current_density(const Form1& b);

/// Follows the potential value at the anchor cell along a run. The step
/// changes A by -ht * (Vbar^y Bbar^x - Vbar^x Bbar^y) in every cell, so
/// pinning A(0,0) to a fixed value would add a spurious uniform shift to the
/// helicity on each step.
class HelicityGauge {
public:
  double anchor() const noexcept { return anchor_; }
  /// Accounts for the step s_n -> s_np1 of size ht.
  void advance(const State& s_n, const State& s_np1, double ht);

private:
  double anchor_ = 0.0;
};

struct DiagnosticsRecord {
  long step = 0;
  double t = 0.0;
  double e_kin = 0.0;
  double e_mag = 0.0;
  double e_total = 0.0;
  double cross_helicity = 0.0;
  double magnetic_helicity = 0.0;
  double div_v_max = 0.0;
  double div_b_max = 0.0;
  int newton_iterations = 0;
  double residual_norm = 0.0;
};

DiagnosticsRecord measure(const State& s, double anchor_value = 0.0, long step = 0, const StepReport* report = nullptr);

class NoDominantMode : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Phase velocity of a travelling wave from a probe series. rows[n] holds
/// the samples along x (uniform spacing, periodic length lx) at time n*ht.
/// The dominant spatial Fourier mode m is located from the time-averaged
/// spectrum; the unwrapped phase of its coefficient is fitted by least
/// squares and v = -slope / k with k = 2*pi*m/lx. Positive v means
/// propagation towards +x.
///
/// Throws NoDominantMode if the spectral peak is below ten times the median
/// of the other bins, or if the mode amplitude drops below a tenth of its
/// maximum somewhere in the series (a standing wave has no direction).
double phase_velocity(const std::vector<std::vector<double>>& rows, double ht, double lx);

}  // namespace decmhd
