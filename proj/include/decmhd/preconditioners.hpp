#pragma once

#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace decmhd {

/// Block Jacobi preconditioner for the step Jacobian. Unknowns are grouped
/// by cell: block e holds the indices {k*n + e : k < blocks}, i.e. every field
/// stored at cell e together with the divergence row / pressure of that cell.
/// Indices beyond blocks*n (the gauge border) are left untouched. Singular
/// blocks fall back to the identity.
///
/// Satisfies the preconditioner interface expected by Eigen's iterative
/// solvers.
class CellBlockJacobi {
public:
  using StorageIndex = int;
  enum { ColsAtCompileTime = Eigen::Dynamic, MaxColsAtCompileTime = Eigen::Dynamic };

  CellBlockJacobi() = default;

  void set_block_size(int blocks, int cells) {
    blocks_ = blocks;
    cells_ = cells;
  }

  template <class MatType>
  CellBlockJacobi& analyzePattern(const MatType&) {
    return *this;
  }

  template <class MatType>
  CellBlockJacobi& factorize(const MatType& mat) {
    info_ = Eigen::Success;
    size_ = mat.cols();
    if (blocks_ <= 0 || cells_ <= 0 || static_cast<Eigen::Index>(blocks_) * cells_ > size_) {
      info_ = Eigen::InvalidInput;
      return *this;
    }
    std::vector<Eigen::MatrixXd> local(static_cast<std::size_t>(cells_), Eigen::MatrixXd::Zero(blocks_, blocks_));
    const Eigen::Index covered = static_cast<Eigen::Index>(blocks_) * cells_;
    for (Eigen::Index col = 0; col < covered; ++col) {
      const int cell = static_cast<int>(col % cells_);
      const int lc = static_cast<int>(col / cells_);
      for (typename MatType::InnerIterator it(mat, col); it; ++it) {
        const Eigen::Index row = it.row();
        if (row >= covered || row % cells_ != cell) continue;
        local[cell](row / cells_, lc) += it.value();
      }
    }
    inverses_.assign(static_cast<std::size_t>(cells_), Eigen::MatrixXd());
    for (int c = 0; c < cells_; ++c) {
      Eigen::FullPivLU<Eigen::MatrixXd> lu(local[c]);
      inverses_[c] = lu.isInvertible() ? Eigen::MatrixXd(lu.inverse()) : Eigen::MatrixXd::Identity(blocks_, blocks_);
    }
    return *this;
  }

  template <class MatType>
  CellBlockJacobi& compute(const MatType& mat) {
    analyzePattern(mat);
    return factorize(mat);
  }

  template <class Rhs>
  Eigen::VectorXd solve(const Rhs& b) const {
    Eigen::VectorXd x = b;
    Eigen::VectorXd tmp(blocks_);
    for (int c = 0; c < cells_; ++c) {
      for (int k = 0; k < blocks_; ++k) tmp(k) = b(static_cast<Eigen::Index>(k) * cells_ + c);
      const Eigen::VectorXd y = inverses_[c] * tmp;
      for (int k = 0; k < blocks_; ++k) x(static_cast<Eigen::Index>(k) * cells_ + c) = y(k);
    }
    return x;
  }

  Eigen::ComputationInfo info() const noexcept { return info_; }

private:
  int blocks_ = 0;
  int cells_ = 0;
  Eigen::Index size_ = 0;
  std::vector<Eigen::MatrixXd> inverses_;
  Eigen::ComputationInfo info_ = Eigen::Success;
};

}  // namespace decmhd
