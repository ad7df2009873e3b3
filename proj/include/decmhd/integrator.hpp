#pragma once

#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Sparse>

#include "decmhd/dec.hpp"

namespace decmhd {

/// Physical unknowns at one time level. `p` is the total pressure
/// P = p + (|V|^2 - |B|^2)/2 at the primal vertices, attached to the half
/// step that produced it.
struct State {
  Form1 v;
  Form1 b;
  Array2 p;
  double t = 0.0;

  const Grid& grid() const noexcept { return v.grid; }
};

State make_state(const Grid& g);
void validate_state(const State& s);

enum class LinearSolver { automatic, sparse_direct, gmres };
enum class Preconditioner { none, block_jacobi, incomplete_lu };

const char* to_string(LinearSolver s) noexcept;
const char* to_string(Preconditioner p) noexcept;

/// Library behind LinearSolver::sparse_direct ("umfpack" or "eigen-sparselu").
const char* direct_solver_backend() noexcept;

struct NewtonConfig {
  double tol = 1e-10;
  int max_iter = 20;
  LinearSolver linear_solver = LinearSolver::automatic;
  int gmres_restart = 200;
  double gmres_tol = 1e-13;
  int gmres_max_iter = 2000;
  Preconditioner preconditioner = Preconditioner::incomplete_lu;
  /// Start Newton from a linear extrapolation of the last two states.
  bool extrapolate_guess = false;
};

void validate(const NewtonConfig& cfg);

struct StepReport {
  int newton_iterations = 0;
  double final_residual_norm = 0.0;
  int linear_iterations_total = 0;
  std::vector<double> residual_history;
};

class SolverFailure : public std::runtime_error {
public:
  SolverFailure(const std::string& what, std::vector<double> history, long step = -1)
      : std::runtime_error(what), history_(std::move(history)), step_(step) {}
  const std::vector<double>& residual_history() const noexcept { return history_; }
  long step() const noexcept { return step_; }

private:
  std::vector<double> history_;
  long step_;
};

// Unknown / residual layout, each block nx*ny long in row-major (j outer)
// order: V^x, V^y, B^x, B^y at n+1 and P at n+1/2. Residual rows follow the
// same blocks: x-momentum, y-momentum, x-induction, y-induction, and the
// divergence of V^{n+1} at the primal vertices.
enum Block : int { kVx = 0, kVy = 1, kBx = 2, kBy = 3, kP = 4 };
constexpr int kBlocks = 5;

Eigen::VectorXd pack_unknowns(const State& s);
State unpack_unknowns(const Grid& g, const Eigen::VectorXd& x, double t);

Eigen::VectorXd residual(const State& s_n, const State& guess, double ht);
Eigen::SparseMatrix<double> jacobian(const State& s_n, const State& guess, double ht);

/// Implicit step solver. Keeps the symbolic analysis of the Jacobian between
/// steps since the sparsity pattern never changes for a given grid.
class StepSolver {
public:
  StepSolver(const Grid& grid, NewtonConfig cfg);
  ~StepSolver();
  StepSolver(StepSolver&&) noexcept;
  StepSolver& operator=(StepSolver&&) noexcept;

  /// Advances s_n by ht. Throws SolverFailure when the residual does not
  /// drop below the tolerance within max_iter iterations.
  State step(const State& s_n, double ht, StepReport* report = nullptr, const State* guess = nullptr);

  const NewtonConfig& config() const noexcept { return cfg_; }
  LinearSolver effective_linear_solver() const noexcept;

private:
  struct Impl;
  Grid grid_;
  NewtonConfig cfg_;
  std::unique_ptr<Impl> impl_;
};

State newton_solve(const State& s_n, double ht, const NewtonConfig& cfg, StepReport* report = nullptr);

/// Called after every completed step with (step index starting at 1,
/// previous state, new state, report).
using StepObserver = std::function<void(long, const State&, const State&, const StepReport&)>;

State advance(const State& s, double ht, long n_steps, const NewtonConfig& cfg, const StepObserver& observer = {});

}  // namespace decmhd
