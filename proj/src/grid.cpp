#include "decmhd/grid.hpp"

#include <algorithm>
#include <cmath>

namespace decmhd {

Grid make_grid(int nx, int ny, double lx, double ly, double x0, double y0) {
  if (nx < 2 || ny < 2) {
    throw InvalidArgument("grid needs at least 2 cells per direction, got " + std::to_string(nx) +
                          "x" + std::to_string(ny));
  }
  if (!(lx > 0.0) || !(ly > 0.0) || !std::isfinite(lx) || !std::isfinite(ly)) {
    throw InvalidArgument("domain lengths must be positive and finite");
  }
  if (!std::isfinite(x0) || !std::isfinite(y0)) {
    throw InvalidArgument("domain origin must be finite");
  }
  Grid g;
  g.nx = nx;
  g.ny = ny;
  g.lx = lx;
  g.ly = ly;
  g.hx = lx / nx;
  g.hy = ly / ny;
  g.x0 = x0;
  g.y0 = y0;
  return g;
}

double Array2::max_abs() const noexcept {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

bool Array2::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

Array2& Array2::operator+=(const Array2& o) {
  if (o.nx_ != nx_ || o.ny_ != ny_) throw InvalidArgument("array shape mismatch");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
  return *this;
}

Array2& Array2::operator-=(const Array2& o) {
  if (o.nx_ != nx_ || o.ny_ != ny_) throw InvalidArgument("array shape mismatch");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
  return *this;
}

Array2& Array2::operator*=(double s) noexcept {
  for (double& v : data_) v *= s;
  return *this;
}

Array2 operator+(Array2 a, const Array2& b) { return a += b; }
Array2 operator-(Array2 a, const Array2& b) { return a -= b; }
Array2 operator*(double s, Array2 a) { return a *= s; }

void require_shape(const Array2& a, const Grid& g, const char* what) {
  if (a.nx() != g.nx || a.ny() != g.ny) {
    throw InvalidArgument(std::string(what) + ": array shape does not match grid");
  }
}

}  // namespace decmhd
