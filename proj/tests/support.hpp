#pragma once

#include <random>

#include "decmhd/dec.hpp"
#include "decmhd/integrator.hpp"

namespace testing_support {

using namespace decmhd;

inline Array2 random_array(const Grid& g, std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Array2 a(g);
  for (double& v : a.values()) v = u(rng);
  return a;
}

inline Form0 random0(const Grid& g, Kind k, std::mt19937_64& rng) { return Form0(g, k, random_array(g, rng)); }
inline Form1 random1(const Grid& g, Kind k, std::mt19937_64& rng) {
  return Form1(g, k, random_array(g, rng), random_array(g, rng));
}
inline Form2 random2(const Grid& g, Kind k, std::mt19937_64& rng) { return Form2(g, k, random_array(g, rng)); }

inline Chain random_chain(const Grid& g, int degree, Kind k, std::mt19937_64& rng) {
  Chain c(g, degree, k);
  std::uniform_int_distribution<int> u(-3, 3);
  for (Array2* a : {&c.a, &c.ax, &c.ay})
    for (double& v : a->values()) v = u(rng);
  return c;
}

/// Edge field with zero staggered divergence, built from a cell-centred
/// stream function.
inline Form1 solenoidal(const Grid& g, const Array2& a) {
  Form1 f(g, Kind::primal);
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      f.x(i, j) = (a.at(i, j + 1) - a(i, j)) / g.hy;
      f.y(i, j) = -(a.at(i + 1, j) - a(i, j)) / g.hx;
    }
  }
  return f;
}

inline State random_state(const Grid& g, std::mt19937_64& rng, double amplitude = 0.3) {
  State s = make_state(g);
  s.v = solenoidal(g, random_array(g, rng, amplitude * g.hx));
  s.b = solenoidal(g, random_array(g, rng, amplitude * g.hx));
  s.p = random_array(g, rng, 0.1);
  return s;
}

}  // namespace testing_support
