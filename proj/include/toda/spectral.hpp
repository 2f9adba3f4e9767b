#pragma once

#include <cstdint>
#include <functional>

#include <Eigen/Core>

namespace toda {

/// Applies a linear operator to every column of a block.
using BlockMap = std::function<Eigen::MatrixXd(const Eigen::MatrixXd&)>;

struct RitzPairs {
  Eigen::VectorXd values;   ///< sorted by decreasing magnitude
  Eigen::MatrixXd vectors;  ///< Euclidean-orthonormal columns
  int iterations = 0;
  bool converged = false;
};

/// Dominant eigenpairs of a symmetric operator on R^n by block subspace
/// iteration with Rayleigh-Ritz. A pair counts as converged when
/// ||A x - theta x|| <= tol |theta|. `project`, when given, is applied to every
/// iterate (for example to stay inside an invariant subspace).
RitzPairs dominant_eigenpairs(const BlockMap& apply, Eigen::Index n, int wanted, int block,
                              double tol, int max_iter, std::uint64_t seed,
                              const BlockMap& project = {});

}  // namespace toda
