#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace decmhd {

/// Thrown for malformed mesh dimensions, lengths or mismatched operands.
class InvalidArgument : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Periodic fold of an integer index into [0, n).
constexpr int wrap(int i, int n) noexcept {
  const int r = i % n;
  return r < 0 ? r + n : r;
}

/// Uniform periodic Cartesian mesh.
///
/// Integer labels (i, j) denote primal cell centres, half-integer labels
/// (i+1/2, j+1/2) primal vertices. Every staggered quantity is stored at the
/// integer pair of its owning cell; the half-integer offset is implied by the
/// field's stagger.
struct Grid {
  int nx = 0;
  int ny = 0;
  double lx = 0.0;
  double ly = 0.0;
  double hx = 0.0;
  double hy = 0.0;
  double x0 = 0.0;
  double y0 = 0.0;

  std::size_t size() const noexcept {
    return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny);
  }

  /// Row-major linear index, j outer and i inner, with periodic wrap.
  std::size_t index(int i, int j) const noexcept {
    return static_cast<std::size_t>(wrap(j, ny)) * static_cast<std::size_t>(nx) +
           static_cast<std::size_t>(wrap(i, nx));
  }

  double x(int i) const noexcept { return x0 + i * hx; }
  double y(int j) const noexcept { return y0 + j * hy; }
  double x_half(int i) const noexcept { return x0 + (i + 0.5) * hx; }
  double y_half(int j) const noexcept { return y0 + (j + 0.5) * hy; }

  bool operator==(const Grid&) const = default;
};

Grid make_grid(int nx, int ny, double lx, double ly, double x0 = 0.0, double y0 = 0.0);

/// Dense nx-by-ny array of coefficients sharing the Grid storage convention.
class Array2 {
public:
  Array2() = default;
  Array2(int nx, int ny, double fill = 0.0)
      : nx_(nx), ny_(ny), data_(static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny), fill) {}
  explicit Array2(const Grid& g, double fill = 0.0) : Array2(g.nx, g.ny, fill) {}

  int nx() const noexcept { return nx_; }
  int ny() const noexcept { return ny_; }
  std::size_t size() const noexcept { return data_.size(); }

  /// Unchecked access for 0 <= i < nx, 0 <= j < ny.
  double& operator()(int i, int j) noexcept { return data_[static_cast<std::size_t>(j) * nx_ + i]; }
  double operator()(int i, int j) const noexcept { return data_[static_cast<std::size_t>(j) * nx_ + i]; }

  /// Access with periodic wrap of both indices.
  double& at(int i, int j) noexcept { return (*this)(wrap(i, nx_), wrap(j, ny_)); }
  double at(int i, int j) const noexcept { return (*this)(wrap(i, nx_), wrap(j, ny_)); }

  double* data() noexcept { return data_.data(); }
  const double* data() const noexcept { return data_.data(); }
  std::vector<double>& values() noexcept { return data_; }
  const std::vector<double>& values() const noexcept { return data_; }

  double max_abs() const noexcept;
  bool all_finite() const noexcept;

  Array2& operator+=(const Array2& o);
  Array2& operator-=(const Array2& o);
  Array2& operator*=(double s) noexcept;

  bool operator==(const Array2&) const = default;

private:
  int nx_ = 0;
  int ny_ = 0;
  std::vector<double> data_;
};

Array2 operator+(Array2 a, const Array2& b);
Array2 operator-(Array2 a, const Array2& b);
Array2 operator*(double s, Array2 a);

void require_shape(const Array2& a, const Grid& g, const char* what);

}  // namespace decmhd
