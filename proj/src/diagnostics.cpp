#include "decmhd/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

#include "decmhd/operators.hpp"

namespace decmhd {

Energy energy(const State& s) {
  return Energy{0.5 * pairing(s.v, s.v), 0.5 * pairing(s.b, s.b)};
}

double cross_helicity(const State& s) { return pairing(s.v, s.b); }

Array2 reconstruct_potential(const Form1& b, double anchor_value) {
  if (b.kind != Kind::primal) throw InvalidArgument("reconstruct_potential: expects a primal one-form");
  const Grid& g = b.grid;
  Array2 a(g);
  a(0, 0) = anchor_value;
  for (int j = 0; j + 1 < g.ny; ++j) a(0, j + 1) = a(0, j) + g.hy * b.x(0, j);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i + 1 < g.nx; ++i) a(i + 1, j) = a(i, j) - g.hx * b.y(i, j);

  // net fluxes across the periodic seams
  double flux_x = 0.0, flux_y = 0.0;
  for (int j = 0; j < g.ny; ++j) flux_x += g.hy * b.x(0, j);
  for (int i = 0; i < g.nx; ++i) flux_y += g.hx * b.y(i, 0);

  double defect = 0.0;
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const double up = j + 1 < g.ny ? a(i, j + 1) : a(i, 0) + flux_x;
      const double right = i + 1 < g.nx ? a(i + 1, j) : a(0, j) - flux_y;
      defect = std::max(defect, std::abs(g.hy * b.x(i, j) - (up - a(i, j))));
      defect = std::max(defect, std::abs(g.hx * b.y(i, j) + (right - a(i, j))));
    }
  }
  const double bmax = std::max(b.x.max_abs(), b.y.max_abs());
  const double limit = 1e-8 * bmax * std::max(g.lx, g.ly);
  if (!(defect <= limit)) {
    std::ostringstream os;
    os << "magnetic potential does not close around the periodic box (defect " << defect << ", limit " << limit
       << "); B is not discretely solenoidal";
    throw ReconstructionError(os.str());
  }
  return a;
}

double magnetic_helicity(const Form1& b, double anchor_value) {
  const Array2 a = reconstruct_potential(b, anchor_value);
  double s = 0.0;
  for (double v : a.values()) s += v;
  return b.grid.hx * b.grid.hy * s;
}

double magnetic_helicity(const State& s, double anchor_value) { return magnetic_helicity(s.b, anchor_value); }

Form2 current_density(const Form1& b) {
  if (b.kind != Kind::primal) throw InvalidArgument("current_density: expects a primal one-form");
  return d(b);
}

void HelicityGauge::advance(const State& s_n, const State& s_np1, double ht) {
  const BarField vbar = bar_average({s_n.v, s_np1.v});
  const BarField bbar = bar_average({s_n.b, s_np1.b});
  anchor_ -= ht * (vbar.y(0, 0) * bbar.x(0, 0) - vbar.x(0, 0) * bbar.y(0, 0));
}

DiagnosticsRecord measure(const State& s, double anchor_value, long step, const StepReport* report) {
  DiagnosticsRecord r;
  r.step = step;
  r.t = s.t;
  const Energy e = energy(s);
  r.e_kin = e.kinetic;
  r.e_mag = e.magnetic;
  r.e_total = e.total();
  r.cross_helicity = cross_helicity(s);
  r.magnetic_helicity = magnetic_helicity(s, anchor_value);
  r.div_v_max = div_staggered(s.v).max_abs();
  r.div_b_max = div_staggered(s.b).max_abs();
  if (report) {
    r.newton_iterations = report->newton_iterations;
    r.residual_norm = report->final_residual_norm;
  }
  return r;
}

double phase_velocity(const std::vector<std::vector<double>>& rows, double ht, double lx) {
  if (rows.size() < 2) throw InvalidArgument("phase_velocity: need at least two samples in time");
  if (!(ht > 0.0) || !(lx > 0.0)) throw InvalidArgument("phase_velocity: ht and lx must be positive");
  const std::size_t n = rows.front().size();
  if (n < 4) throw InvalidArgument("phase_velocity: need at least four samples along x");
  for (const auto& r : rows)
    if (r.size() != n) throw InvalidArgument("phase_velocity: rows of different length");

  const std::size_t half = n / 2;
  auto coefficient = [&](const std::vector<double>& row, std::size_t m) {
    std::complex<double> c = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double arg = -2.0 * std::numbers::pi * static_cast<double>(m * k % n) / static_cast<double>(n);
      c += row[k] * std::complex<double>(std::cos(arg), std::sin(arg));
    }
    return c;
  };

  // time-averaged amplitude of modes 1..n/2
  std::vector<double> spectrum(half + 1, 0.0);
  for (const auto& r : rows)
    for (std::size_t m = 1; m <= half; ++m) spectrum[m] += std::abs(coefficient(r, m));
  std::size_t peak = 1;
  for (std::size_t m = 2; m <= half; ++m)
    if (spectrum[m] > spectrum[peak]) peak = m;
  std::vector<double> others;
  for (std::size_t m = 1; m <= half; ++m)
    if (m != peak) others.push_back(spectrum[m]);
  std::nth_element(others.begin(), others.begin() + others.size() / 2, others.end());
  const double median = others[others.size() / 2];
  if (!(spectrum[peak] > 0.0) || spectrum[peak] < 10.0 * median) {
    throw NoDominantMode("no dominant spatial mode in the probe series");
  }

  std::vector<double> phase;
  phase.reserve(rows.size());
  double amp_min = INFINITY, amp_max = 0.0;
  for (const auto& r : rows) {
    const std::complex<double> c = coefficient(r, peak);
    amp_min = std::min(amp_min, std::abs(c));
    amp_max = std::max(amp_max, std::abs(c));
    double p = std::arg(c);
    if (!phase.empty()) {
      const double prev = phase.back();
      p += 2.0 * std::numbers::pi * std::round((prev - p) / (2.0 * std::numbers::pi));
    }
    phase.push_back(p);
  }
  if (amp_min < 0.1 * amp_max) {
    throw NoDominantMode("dominant mode amplitude collapses during the series (standing wave, no direction)");
  }

  // least-squares slope of phase against t
  const double count = static_cast<double>(phase.size());
  double t_mean = 0.0, p_mean = 0.0;
  for (std::size_t k = 0; k < phase.size(); ++k) {
    t_mean += static_cast<double>(k) * ht;
    p_mean += phase[k];
  }
  t_mean /= count;
  p_mean /= count;
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < phase.size(); ++k) {
    const double dt = static_cast<double>(k) * ht - t_mean;
    num += dt * (phase[k] - p_mean);
    den += dt * dt;
  }
  const double slope = num / den;
  const double wavenumber = 2.0 * std::numbers::pi * static_cast<double>(peak) / lx;
  return -slope / wavenumber;
}

}  // namespace decmhd
