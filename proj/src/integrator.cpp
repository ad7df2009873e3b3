#include "decmhd/integrator.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/SparseLU>
#include <unsupported/Eigen/IterativeSolvers>
#ifdef DECMHD_HAVE_UMFPACK
#include <Eigen/UmfPackSupport>
#endif

#include "decmhd/operators.hpp"
#include "decmhd/preconditioners.hpp"

namespace decmhd {

const char* to_string(LinearSolver s) noexcept {
  switch (s) {
    case LinearSolver::automatic: return "auto";
    case LinearSolver::sparse_direct: return "direct";
    case LinearSolver::gmres: return "gmres";
  }
  return "?";
}

const char* to_string(Preconditioner p) noexcept {
  switch (p) {
    case Preconditioner::none: return "none";
    case Preconditioner::block_jacobi: return "block-jacobi";
    case Preconditioner::incomplete_lu: return "ilu";
  }
  return "?";
}

const char* direct_solver_backend() noexcept {
#ifdef DECMHD_HAVE_UMFPACK
  return "umfpack";
#else
  return "eigen-sparselu";
#endif
}

State make_state(const Grid& g) {
  return State{Form1(g, Kind::primal), Form1(g, Kind::primal), Array2(g), 0.0};
}

void validate_state(const State& s) {
  const Grid& g = s.v.grid;
  if (!(s.b.grid == g)) throw InvalidArgument("state: V and B on different grids");
  if (s.v.kind != Kind::primal || s.b.kind != Kind::primal) throw InvalidArgument("state: V and B must be primal one-forms");
  require_shape(s.p, g, "state pressure");
  if (!s.v.x.all_finite() || !s.v.y.all_finite() || !s.b.x.all_finite() || !s.b.y.all_finite() ||
      !s.p.all_finite()) {
    throw InvalidArgument("state: non-finite field values");
  }
}

void validate(const NewtonConfig& cfg) {
  if (!(cfg.tol > 0.0)) throw InvalidArgument("newton tol must be positive");
  if (cfg.max_iter < 1) throw InvalidArgument("newton max_iter must be at least 1");
  if (cfg.gmres_restart < 1) throw InvalidArgument("gmres_restart must be at least 1");
  if (!(cfg.gmres_tol > 0.0)) throw InvalidArgument("gmres_tol must be positive");
  if (cfg.gmres_max_iter < 1) throw InvalidArgument("gmres_max_iter must be at least 1");
}

Eigen::VectorXd pack_unknowns(const State& s) {
  const auto n = static_cast<Eigen::Index>(s.grid().size());
  Eigen::VectorXd x(kBlocks * n);
  const Array2* blocks[kBlocks] = {&s.v.x, &s.v.y, &s.b.x, &s.b.y, &s.p};
  for (int b = 0; b < kBlocks; ++b) x.segment(b * n, n) = Eigen::Map<const Eigen::VectorXd>(blocks[b]->data(), n);
  return x;
}

State unpack_unknowns(const Grid& g, const Eigen::VectorXd& x, double t) {
  const auto n = static_cast<Eigen::Index>(g.size());
  if (x.size() != kBlocks * n) throw InvalidArgument("unknown vector has the wrong length");
  State s = make_state(g);
  s.t = t;
  Array2* blocks[kBlocks] = {&s.v.x, &s.v.y, &s.b.x, &s.b.y, &s.p};
  for (int b = 0; b < kBlocks; ++b) Eigen::Map<Eigen::VectorXd>(blocks[b]->data(), n) = x.segment(b * n, n);
  return s;
}

namespace {

void check_step_inputs(const State& s_n, const State& guess, double ht) {
  if (!(ht > 0.0) || !std::isfinite(ht)) throw InvalidArgument("time step must be positive");
  if (!(s_n.grid() == guess.grid())) throw InvalidArgument("old and new state on different grids");
}

}  // namespace

Eigen::VectorXd residual(const State& s_n, const State& guess, double ht) {
  check_step_inputs(s_n, guess, ht);
  const Grid& g = s_n.grid();
  const EdgePair vp{s_n.v, guess.v};
  const EdgePair bp{s_n.b, guess.b};
  const BarField vbar = bar_average(vp);
  const BarField bbar = bar_average(bp);
  const Form1 psi_vv = psi_discrete(vbar, vp);
  const Form1 psi_bb = psi_discrete(bbar, bp);
  const Form1 phi = phi_discrete(g, vbar, bbar);
  const Form1 grad_p = grad_pressure(g, guess.p);
  const Array2 div_v = div_staggered(guess.v);

  const auto n = static_cast<Eigen::Index>(g.size());
  Eigen::VectorXd r(kBlocks * n);
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const auto e = static_cast<Eigen::Index>(g.index(i, j));
      r(kVx * n + e) = (guess.v.x(i, j) - s_n.v.x(i, j)) / ht + psi_vv.x(i, j) - psi_bb.x(i, j) + grad_p.x(i, j);
      r(kVy * n + e) = (guess.v.y(i, j) - s_n.v.y(i, j)) / ht + psi_vv.y(i, j) - psi_bb.y(i, j) + grad_p.y(i, j);
      r(kBx * n + e) = (guess.b.x(i, j) - s_n.b.x(i, j)) / ht + phi.x(i, j);
      r(kBy * n + e) = (guess.b.y(i, j) - s_n.b.y(i, j)) / ht + phi.y(i, j);
      r(kP * n + e) = div_v(i, j);
    }
  }
  return r;
}

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

/// A cell-centred quantity that depends linearly on at most four unknowns.
struct Lin {
  int n = 0;
  int col[4] = {};
  double w[4] = {};
  void add(int c, double v) {
    col[n] = c;
    w[n] = v;
    ++n;
  }
};

struct CellLinearisation {
  double xbar, ybar, curl;
  Lin dxbar, dybar, dcurl;
};

// Midpoint averages and curl of one field at cell (i,j), with their
// derivatives with respect to the new-level unknowns of that field.
CellLinearisation linearise_cell(const Grid& g, const BarField& bar, const Array2& curl, int xblock, int yblock,
                                 int i, int j) {
  const int n = static_cast<int>(g.size());
  const int c_here = static_cast<int>(g.index(i, j));
  const int c_south = static_cast<int>(g.index(i, j - 1));
  const int c_west = static_cast<int>(g.index(i - 1, j));
  CellLinearisation out{bar.x(i, j), bar.y(i, j), curl(i, j), {}, {}, {}};
  out.dxbar.add(xblock * n + c_south, 0.25);
  out.dxbar.add(xblock * n + c_here, 0.25);
  out.dybar.add(yblock * n + c_west, 0.25);
  out.dybar.add(yblock * n + c_here, 0.25);
  out.dcurl.add(xblock * n + c_here, 0.5 / g.hy);
  out.dcurl.add(xblock * n + c_south, -0.5 / g.hy);
  out.dcurl.add(yblock * n + c_here, -0.5 / g.hx);
  out.dcurl.add(yblock * n + c_west, 0.5 / g.hx);
  return out;
}

void emit(Triplets& t, int row, double scale, const Lin& l) {
  for (int k = 0; k < l.n; ++k) t.emplace_back(row, l.col[k], scale * l.w[k]);
}

void jacobian_triplets(const State& s_n, const State& guess, double ht, Triplets& t) {
  check_step_inputs(s_n, guess, ht);
  const Grid& g = s_n.grid();
  const int n = static_cast<int>(g.size());
  const EdgePair vp{s_n.v, guess.v};
  const EdgePair bp{s_n.b, guess.b};
  const BarField vbar = bar_average(vp);
  const BarField bbar = bar_average(bp);
  // curl = Dy W^x - Dx W^y = -d(W)
  Array2 curl_v = d(midpoint(vp)).values;
  curl_v *= -1.0;
  Array2 curl_b = d(midpoint(bp)).values;
  curl_b *= -1.0;

  std::vector<CellLinearisation> vc(static_cast<std::size_t>(n)), bc(static_cast<std::size_t>(n));
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      vc[g.index(i, j)] = linearise_cell(g, vbar, curl_v, kVx, kVy, i, j);
      bc[g.index(i, j)] = linearise_cell(g, bbar, curl_b, kBx, kBy, i, j);
    }
  }

  t.clear();
  t.reserve(static_cast<std::size_t>(n) * 110);
  const double inv_ht = 1.0 / ht;
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const int e = static_cast<int>(g.index(i, j));

      // x-momentum on edge (i, j+1/2): cells (i,j) and (i,j+1)
      {
        const int row = kVx * n + e;
        t.emplace_back(row, kVx * n + e, inv_ht);
        for (const std::size_t c : {g.index(i, j), g.index(i, j + 1)}) {
          const auto& V = vc[c];
          const auto& B = bc[c];
          emit(t, row, 0.5 * V.curl, V.dybar);
          emit(t, row, 0.5 * V.ybar, V.dcurl);
          emit(t, row, -0.5 * B.curl, B.dybar);
          emit(t, row, -0.5 * B.ybar, B.dcurl);
        }
        t.emplace_back(row, kP * n + e, 1.0 / g.hx);
        t.emplace_back(row, kP * n + static_cast<int>(g.index(i - 1, j)), -1.0 / g.hx);
      }

      // y-momentum on edge (i+1/2, j): cells (i,j) and (i+1,j)
      {
        const int row = kVy * n + e;
        t.emplace_back(row, kVy * n + e, inv_ht);
        for (const std::size_t c : {g.index(i, j), g.index(i + 1, j)}) {
          const auto& V = vc[c];
          const auto& B = bc[c];
          emit(t, row, -0.5 * V.curl, V.dxbar);
          emit(t, row, -0.5 * V.xbar, V.dcurl);
          emit(t, row, 0.5 * B.curl, B.dxbar);
          emit(t, row, 0.5 * B.xbar, B.dcurl);
        }
        t.emplace_back(row, kP * n + e, 1.0 / g.hy);
        t.emplace_back(row, kP * n + static_cast<int>(g.index(i, j - 1)), -1.0 / g.hy);
      }

      // d(Vbar^y Bbar^x - Vbar^x Bbar^y) at cell c, scaled
      auto emit_cross = [&](int row, std::size_t c, double s) {
        const auto& V = vc[c];
        const auto& B = bc[c];
        emit(t, row, s * B.xbar, V.dybar);
        emit(t, row, s * V.ybar, B.dxbar);
        emit(t, row, -s * B.ybar, V.dxbar);
        emit(t, row, -s * V.xbar, B.dybar);
      };

      {
        const int row = kBx * n + e;
        t.emplace_back(row, kBx * n + e, inv_ht);
        emit_cross(row, g.index(i, j + 1), 1.0 / g.hy);
        emit_cross(row, g.index(i, j), -1.0 / g.hy);
      }
      {
        const int row = kBy * n + e;
        t.emplace_back(row, kBy * n + e, inv_ht);
        emit_cross(row, g.index(i + 1, j), -1.0 / g.hx);
        emit_cross(row, g.index(i, j), 1.0 / g.hx);
      }

      {
        const int row = kP * n + e;
        t.emplace_back(row, kVx * n + static_cast<int>(g.index(i + 1, j)), 1.0 / g.hx);
        t.emplace_back(row, kVx * n + e, -1.0 / g.hx);
        t.emplace_back(row, kVy * n + static_cast<int>(g.index(i, j + 1)), 1.0 / g.hy);
        t.emplace_back(row, kVy * n + e, -1.0 / g.hy);
      }
    }
  }
}

}  // namespace

Eigen::SparseMatrix<double> jacobian(const State& s_n, const State& guess, double ht) {
  Triplets t;
  jacobian_triplets(s_n, guess, ht, t);
  const auto m = static_cast<Eigen::Index>(kBlocks * s_n.grid().size());
  Eigen::SparseMatrix<double> J(m, m);
  J.setFromTriplets(t.begin(), t.end());
  J.makeCompressed();
  return J;
}

// ---------------------------------------------------------------------------
// step solver

struct StepSolver::Impl {
  using Matrix = Eigen::SparseMatrix<double>;
#ifdef DECMHD_HAVE_UMFPACK
  Eigen::UmfPackLU<Matrix> lu;
#else
  Eigen::SparseLU<Matrix, Eigen::COLAMDOrdering<int>> lu;
#endif
  bool lu_analyzed = false;
  Eigen::GMRES<Matrix, Eigen::IdentityPreconditioner> gmres_plain;
  Eigen::GMRES<Matrix, CellBlockJacobi> gmres_block;
  Eigen::GMRES<Matrix, Eigen::IncompleteLUT<double>> gmres_ilu;
  Triplets triplets;
};

StepSolver::StepSolver(const Grid& grid, NewtonConfig cfg) : grid_(grid), cfg_(cfg), impl_(std::make_unique<Impl>()) {
  validate(cfg_);
  impl_->gmres_block.preconditioner().set_block_size(kBlocks, static_cast<int>(grid.size()));
  impl_->gmres_ilu.preconditioner().setDroptol(1e-6);
  impl_->gmres_ilu.preconditioner().setFillfactor(20);
}

StepSolver::~StepSolver() = default;
StepSolver::StepSolver(StepSolver&&) noexcept = default;
StepSolver& StepSolver::operator=(StepSolver&&) noexcept = default;

LinearSolver StepSolver::effective_linear_solver() const noexcept {
  if (cfg_.linear_solver != LinearSolver::automatic) return cfg_.linear_solver;
  return grid_.size() <= 64u * 64u ? LinearSolver::sparse_direct : LinearSolver::gmres;
}

namespace {

template <class Solver>
int gmres_solve(Solver& solver, const Eigen::SparseMatrix<double>& K, const Eigen::VectorXd& rhs,
                const NewtonConfig& cfg, Eigen::VectorXd& x) {
  solver.set_restart(cfg.gmres_restart);
  solver.setTolerance(cfg.gmres_tol);
  solver.setMaxIterations(cfg.gmres_max_iter);
  solver.compute(K);
  if (solver.info() != Eigen::Success) throw std::runtime_error("preconditioner setup failed");
  x = solver.solve(rhs);
  // An incompletely converged Krylov solve still gives a usable inexact
  // Newton direction; only give up when it made essentially no progress.
  if (solver.info() != Eigen::Success && !(solver.error() < 1e-2)) {
    std::ostringstream os;
    os << "GMRES did not converge (" << solver.iterations() << " iterations, estimated error " << solver.error()
       << ")";
    throw std::runtime_error(os.str());
  }
  return static_cast<int>(solver.iterations());
}

}  // namespace

State StepSolver::step(const State& s_n, double ht, StepReport* report, const State* guess) {
  validate_state(s_n);
  if (!(s_n.grid() == grid_)) throw InvalidArgument("state does not live on the solver's grid");
  if (!(ht > 0.0) || !std::isfinite(ht)) throw InvalidArgument("time step must be positive");

  const int n = static_cast<int>(grid_.size());
  const int m = kBlocks * n;
  const double t_new = s_n.t + ht;
  Eigen::VectorXd x = pack_unknowns(guess ? *guess : s_n);
  StepReport rep;

  for (int it = 0;; ++it) {
    const State current = unpack_unknowns(grid_, x, t_new);
    const Eigen::VectorXd r = residual(s_n, current, ht);
    const double norm = r.lpNorm<Eigen::Infinity>();
    rep.residual_history.push_back(norm);
    if (!std::isfinite(norm)) throw SolverFailure("non-finite residual, Newton iteration diverged", rep.residual_history);
    if (norm <= cfg_.tol) {
      rep.final_residual_norm = norm;
      if (report) *report = std::move(rep);
      return current;
    }
    if (it == cfg_.max_iter) {
      std::ostringstream os;
      os << "Newton did not converge in " << cfg_.max_iter << " iterations (residual " << norm << ")";
      throw SolverFailure(os.str(), rep.residual_history);
    }

    // The divergence rows sum to zero identically and P enters only through
    // differences, so row/column (div 0, P 0) are replaced by the identity.
    // The constant is projected out of the pressure update afterwards.
    auto& t = impl_->triplets;
    jacobian_triplets(s_n, current, ht, t);
    const int gauge = kP * n;
    for (auto& e : t)
      if (e.row() == gauge || e.col() == gauge) e = Eigen::Triplet<double>(e.row(), e.col(), 0.0);
    t.emplace_back(gauge, gauge, 1.0);
    Eigen::SparseMatrix<double> K(m, m);
    K.setFromTriplets(t.begin(), t.end());
    K.makeCompressed();
    Eigen::VectorXd rhs = -r;
    rhs(gauge) = 0.0;

    Eigen::VectorXd delta;
    try {
      switch (effective_linear_solver()) {
        case LinearSolver::sparse_direct:
        case LinearSolver::automatic: {
          if (!impl_->lu_analyzed) {
            impl_->lu.analyzePattern(K);
            impl_->lu_analyzed = true;
          }
          impl_->lu.factorize(K);
          if (impl_->lu.info() != Eigen::Success) throw std::runtime_error("sparse LU factorisation failed");
          delta = impl_->lu.solve(rhs);
          break;
        }
        case LinearSolver::gmres:
          switch (cfg_.preconditioner) {
            case Preconditioner::none: rep.linear_iterations_total += gmres_solve(impl_->gmres_plain, K, rhs, cfg_, delta); break;
            case Preconditioner::block_jacobi: rep.linear_iterations_total += gmres_solve(impl_->gmres_block, K, rhs, cfg_, delta); break;
            case Preconditioner::incomplete_lu: rep.linear_iterations_total += gmres_solve(impl_->gmres_ilu, K, rhs, cfg_, delta); break;
          }
          break;
      }
    } catch (const std::runtime_error& err) {
      throw SolverFailure(err.what(), rep.residual_history);
    }
    delta.segment(kP * n, n).array() -= delta.segment(kP * n, n).mean();
    x += delta;
    ++rep.newton_iterations;
  }
}

State newton_solve(const State& s_n, double ht, const NewtonConfig& cfg, StepReport* report) {
  StepSolver solver(s_n.grid(), cfg);
  return solver.step(s_n, ht, report);
}

State advance(const State& s, double ht, long n_steps, const NewtonConfig& cfg, const StepObserver& observer) {
  if (!(ht > 0.0)) throw InvalidArgument("time step must be positive");
  if (n_steps < 1) throw InvalidArgument("number of steps must be at least 1");
  StepSolver solver(s.grid(), cfg);
  State current = s;
  State previous;
  bool have_previous = false;
  for (long k = 1; k <= n_steps; ++k) {
    StepReport report;
    State next;
    try {
      if (cfg.extrapolate_guess && have_previous) {
        State guess = current;
        guess.v = 2.0 * current.v + (-1.0) * previous.v;
        guess.b = 2.0 * current.b + (-1.0) * previous.b;
        next = solver.step(current, ht, &report, &guess);
      } else {
        next = solver.step(current, ht, &report);
      }
    } catch (const SolverFailure& f) {
      std::ostringstream os;
      os << "step " << k << ": " << f.what();
      throw SolverFailure(os.str(), f.residual_history(), k);
    }
    next.t = s.t + static_cast<double>(k) * ht;
    if (observer) observer(k, current, next, report);
    previous = std::move(current);
    have_previous = true;
    current = std::move(next);
  }
  return current;
}

}  // namespace decmhd
