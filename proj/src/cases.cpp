#include "decmhd/cases.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/SparseCholesky>

#include "decmhd/operators.hpp"

namespace decmhd {

namespace {

constexpr double kPi = std::numbers::pi;

struct NamedCase {
  CaseId id;
  const char* name;
};

constexpr NamedCase kCases[] = {
    {CaseId::alfven, "alfven"},           {CaseId::orszag_tang, "orszag_tang"}, {CaseId::loop_cone, "loop_cone"},
    {CaseId::loop_smooth, "loop_smooth"}, {CaseId::sheet_sharp, "sheet_sharp"}, {CaseId::sheet_tanh, "sheet_tanh"},
};

bool is_multiple(double length, double period) {
  const double r = length / period;
  const double k = std::round(r);
  return k >= 1.0 && std::abs(r - k) <= 1e-12 * r;
}

void require_period(const char* which, double length, double period, const char* period_text, CaseId id) {
  if (!is_multiple(length, period)) {
    std::ostringstream os;
    os << to_string(id) << ": domain length " << which << " = " << length << " must be a multiple of " << period_text
       << " for periodic initial data";
    throw InvalidArgument(os.str());
  }
}

double positive(const char* name, double v) {
  if (!(v > 0.0) || !std::isfinite(v)) throw InvalidArgument(std::string(name) + " must be positive");
  return v;
}

double finite(const char* name, double v) {
  if (!std::isfinite(v)) throw InvalidArgument(std::string(name) + " must be finite");
  return v;
}

// By profile of the current sheets, periodic with period 2 in x
double sheet_profile(CaseId id, const CaseParameters& p, double x) {
  const double xm = x - 2.0 * std::floor(x / 2.0);
  if (id == CaseId::sheet_sharp) return (xm < p.x1 || xm > p.x2) ? 1.0 : -1.0;
  return xm < 1.0 ? std::tanh(10.0 * (xm - p.x1)) : -std::tanh(10.0 * (xm - p.x2));
}

}  // namespace

const char* to_string(CaseId id) noexcept {
  for (const auto& c : kCases)
    if (c.id == id) return c.name;
  return "?";
}

CaseId parse_case_id(const std::string& name) {
  for (const auto& c : kCases)
    if (name == c.name) return c.id;
  std::ostringstream os;
  os << "unknown case '" << name << "' (expected one of:";
  for (const auto& c : kCases) os << ' ' << c.name;
  os << ')';
  throw InvalidArgument(os.str());
}

std::vector<std::string> case_names() {
  std::vector<std::string> out;
  for (const auto& c : kCases) out.emplace_back(c.name);
  return out;
}

CaseDefaults case_defaults(CaseId id) {
  switch (id) {
    case CaseId::alfven: return {32, 32, 2.0, 2.0, 0.0, 0.0, 0.1, 20.0};
    case CaseId::orszag_tang: return {64, 64, 2.0 * kPi, 2.0 * kPi, 0.0, 0.0, 0.01, 1.0};
    case CaseId::loop_cone: return {128, 64, 2.0, 1.0, -1.0, -0.5, 0.01, 1.0};
    case CaseId::loop_smooth: return {64, 64, 2.0, 2.0, -1.0, -1.0, 0.01, 1.0};
    case CaseId::sheet_sharp: return {32, 32, 2.0, 2.0, 0.0, 0.0, 0.1, 20.0};
    case CaseId::sheet_tanh: return {32, 32, 2.0, 2.0, 0.0, 0.0, 0.1, 20.0};
  }
  throw InvalidArgument("unknown case id");
}

CaseParameters resolve(const CaseSpec& spec, const Grid& g) {
  CaseParameters p;
  p.id = spec.id;
  switch (spec.id) {
    case CaseId::alfven:
      p.v0 = finite("v0", spec.v0.value_or(1.0));
      p.b0 = finite("b0", spec.b0.value_or(1.0));
      p.pressure = finite("pressure", spec.pressure.value_or(0.1));
      require_period("lx", g.lx, 2.0, "2", spec.id);
      break;
    case CaseId::orszag_tang:
      p.pressure = finite("pressure", spec.pressure.value_or(0.1));
      require_period("lx", g.lx, 2.0 * kPi, "2*pi", spec.id);
      require_period("ly", g.ly, 2.0 * kPi, "2*pi", spec.id);
      break;
    case CaseId::loop_cone:
    case CaseId::loop_smooth:
      p.v0 = finite("v0", spec.v0.value_or(std::sqrt(g.lx * g.lx + g.ly * g.ly)));
      p.theta = std::atan(g.ly / g.lx);
      p.a0 = finite("a0", spec.a0.value_or(1e-3));
      p.pressure = finite("pressure", spec.pressure.value_or(1.0));
      if (spec.id == CaseId::loop_cone) {
        p.radius = positive("radius", spec.radius.value_or(0.3));
        if (2.0 * p.radius >= std::min(g.lx, g.ly)) {
          std::ostringstream os;
          os << "loop_cone: radius " << p.radius << " does not fit in the " << g.lx << " x " << g.ly << " box";
          throw InvalidArgument(os.str());
        }
      } else {
        require_period("lx", g.lx, 2.0, "2", spec.id);
        require_period("ly", g.ly, 2.0, "2", spec.id);
      }
      break;
    case CaseId::sheet_sharp:
    case CaseId::sheet_tanh:
      p.v0 = finite("v0", spec.v0.value_or(0.1));
      p.pressure = finite("pressure", spec.pressure.value_or(0.1));
      p.x1 = 0.5;
      p.x2 = 1.5;
      require_period("lx", g.lx, 2.0, "2", spec.id);
      require_period("ly", g.ly, 2.0, "2", spec.id);
      break;
  }
  return p;
}

Form1 b_from_potential(const Grid& g, const Array2& a) {
  require_shape(a, g, "b_from_potential");
  Form1 b(g, Kind::primal);
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      b.x(i, j) = (a.at(i, j + 1) - a(i, j)) / g.hy;
      b.y(i, j) = -(a.at(i + 1, j) - a(i, j)) / g.hx;
    }
  }
  return b;
}

Form1 project_solenoidal(const Form1& v) {
  if (v.kind != Kind::primal) throw InvalidArgument("project_solenoidal: expects a primal one-form");
  const Grid& g = v.grid;
  const int n = static_cast<int>(g.size());
  // -div grad on vertex values, with phi(0,0) pinned to zero
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(static_cast<std::size_t>(n) * 5);
  const double cx = 1.0 / (g.hx * g.hx), cy = 1.0 / (g.hy * g.hy);
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const int r = static_cast<int>(g.index(i, j));
      if (r == 0) {
        t.emplace_back(0, 0, 1.0);
        continue;
      }
      t.emplace_back(r, r, 2.0 * cx + 2.0 * cy);
      const int nb[4] = {static_cast<int>(g.index(i - 1, j)), static_cast<int>(g.index(i + 1, j)),
                         static_cast<int>(g.index(i, j - 1)), static_cast<int>(g.index(i, j + 1))};
      const double w[4] = {cx, cx, cy, cy};
      for (int k = 0; k < 4; ++k)
        if (nb[k] != 0) t.emplace_back(r, nb[k], -w[k]);
    }
  }
  Eigen::SparseMatrix<double> L(n, n);
  L.setFromTriplets(t.begin(), t.end());
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(L);
  if (solver.info() != Eigen::Success) throw std::runtime_error("project_solenoidal: factorisation failed");

  Form1 out = v;
  for (int pass = 0; pass < 3; ++pass) {
    const Array2 div = div_staggered(out);
    if (div.max_abs() <= 1e-13) break;
    Eigen::VectorXd rhs = -Eigen::Map<const Eigen::VectorXd>(div.data(), n);
    rhs(0) = 0.0;
    const Eigen::VectorXd phi = solver.solve(rhs);
    Array2 p(g);
    Eigen::Map<Eigen::VectorXd>(p.data(), n) = phi;
    const Form1 grad = grad_pressure(g, p);
    out.x -= grad.x;
    out.y -= grad.y;
  }
  return out;
}

State build_initial_state(const CaseSpec& spec, const Grid& g) {
  const CaseParameters p = resolve(spec, g);
  State s = make_state(g);
  s.p = Array2(g, p.pressure);

  auto sample_edges = [&](Form1& f, auto&& fx, auto&& fy) {
    for (int j = 0; j < g.ny; ++j) {
      for (int i = 0; i < g.nx; ++i) {
        f.x(i, j) = fx(g.x(i), g.y_half(j));
        f.y(i, j) = fy(g.x_half(i), g.y(j));
      }
    }
  };
  auto sample_potential = [&](auto&& fa) {
    Array2 a(g);
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) a(i, j) = fa(g.x(i), g.y(j));
    return b_from_potential(g, a);
  };

  switch (p.id) {
    case CaseId::alfven:
      sample_edges(s.v, [](double, double) { return 0.0; }, [&](double x, double) { return p.v0 * std::sin(kPi * x); });
      sample_edges(s.b, [&](double, double) { return p.b0; }, [&](double x, double) { return p.b0 * std::sin(kPi * x); });
      break;
    case CaseId::orszag_tang:
      // stream function 2 sin y - 2 cos x
      sample_edges(s.v, [](double, double y) { return 2.0 * std::cos(y); }, [](double x, double) { return -2.0 * std::sin(x); });
      s.b = sample_potential([](double x, double y) { return std::cos(2.0 * y) - 2.0 * std::cos(x); });
      break;
    case CaseId::loop_cone: {
      const double xc = g.x0 + 0.5 * g.lx, yc = g.y0 + 0.5 * g.ly;
      s.v = Form1(g, Kind::primal, Array2(g, p.v0 * std::cos(p.theta)), Array2(g, p.v0 * std::sin(p.theta)));
      s.b = sample_potential([&](double x, double y) {
        const double r = std::hypot(x - xc, y - yc);
        return r <= p.radius ? p.a0 * (p.radius - r) : 0.0;
      });
      break;
    }
    case CaseId::loop_smooth:
      s.v = Form1(g, Kind::primal, Array2(g, p.v0 * std::cos(p.theta)), Array2(g, p.v0 * std::sin(p.theta)));
      s.b = sample_potential([&](double x, double y) { return p.a0 * std::exp(std::cos(kPi * x) + std::cos(kPi * y)); });
      break;
    case CaseId::sheet_sharp:
    case CaseId::sheet_tanh:
      sample_edges(s.v, [&](double, double y) { return p.v0 * std::sin(kPi * y); }, [](double, double) { return 0.0; });
      sample_edges(s.b, [](double, double) { return 0.0; }, [&](double x, double) { return sheet_profile(p.id, p, x); });
      break;
  }

  if (div_staggered(s.v).max_abs() > 1e-12) s.v = project_solenoidal(s.v);
  if (div_staggered(s.b).max_abs() > 1e-12) s.b = project_solenoidal(s.b);
  validate_state(s);
  return s;
}

}  // namespace decmhd
