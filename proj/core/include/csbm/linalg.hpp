#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

namespace csbm {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

struct EigPair {
  double value = 0.0;
  VectorXd vector;  // unit norm, sign unconstrained
};

/// The four train/test blocks of an N x N matrix split after row/column n.
struct BlockView {
  MatrixXd LL, LU, UL, UU;

  static BlockView split(const MatrixXd& M, Index n);
  MatrixXd reassemble() const;
};

/// G = X X^T with the diagonal zeroed. Exactly symmetric.
MatrixXd hollow_gram(const MatrixXd& X);

/// Eigenpairs of a symmetric matrix at the requested ranks, where rank 1 is the largest
/// eigenvalue and rank M.rows() the smallest. Results follow the order of `ranks`.
/// Throws ParameterError for an out-of-range rank or a non-symmetric input.
std::vector<EigPair> eig_ordered(const MatrixXd& M, std::span<const int> ranks);

/// All eigenvalues, descending.
VectorXd eigenvalues_descending(const MatrixXd& M);

/// Ridge solution beta = (H_L^T H_L + lambda I)^{-1} H_L^T y_L, where H_L and y_L keep the
/// rows listed in `train`. `y` has one entry per row of H. Requires lambda > 0.
VectorXd ridge_solve(const MatrixXd& H, std::span<const Index> train, const VectorXd& y,
                     double lambda);

/// Convenience: indices first..first+count-1.
std::vector<Index> index_range(Index first, Index count);

}  // namespace csbm
