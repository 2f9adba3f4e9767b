#include "toda/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "toda/error.hpp"

namespace toda {

namespace {

Eigen::MatrixXd orthonormalize(const Eigen::MatrixXd& x) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(x);
  return qr.householderQ() * Eigen::MatrixXd::Identity(x.rows(), x.cols());
}

}  // namespace

RitzPairs dominant_eigenpairs(const BlockMap& apply, Eigen::Index n, int wanted, int block,
                              double tol, int max_iter, std::uint64_t seed,
                              const BlockMap& project) {
  if (wanted < 1 || block < wanted || n < block) {
    throw ArgumentError("dominant_eigenpairs: need 1 <= wanted <= block <= n");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  Eigen::MatrixXd q(n, block);
  for (Eigen::Index j = 0; j < block; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) q(i, j) = nd(rng);
  }
  if (project) q = project(q);
  q = orthonormalize(q);

  RitzPairs out;
  for (int it = 1; it <= max_iter; ++it) {
    Eigen::MatrixXd y = apply(q);
    if (project) y = project(y);
    if (!y.allFinite()) throw SolverError("eigen-solver produced non-finite iterates");
    Eigen::MatrixXd h = q.transpose() * y;
    h = 0.5 * (h + h.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    std::vector<int> order(static_cast<std::size_t>(block));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      return std::abs(es.eigenvalues()[a]) > std::abs(es.eigenvalues()[b]);
    });
    Eigen::MatrixXd s(block, block);
    Eigen::VectorXd theta(block);
    for (int j = 0; j < block; ++j) {
      s.col(j) = es.eigenvectors().col(order[static_cast<std::size_t>(j)]);
      theta[j] = es.eigenvalues()[order[static_cast<std::size_t>(j)]];
    }
    const Eigen::MatrixXd x = q * s;
    const Eigen::MatrixXd ys = y * s;
    bool done = true;
    for (int j = 0; j < wanted; ++j) {
      const double res = (ys.col(j) - theta[j] * x.col(j)).norm();
      if (res > tol * std::abs(theta[j])) done = false;
    }
    out.values = theta.head(wanted);
    out.vectors = x.leftCols(wanted);
    out.iterations = it;
    if (done) {
      out.converged = true;
      return out;
    }
    q = orthonormalize(ys);
  }
  return out;
}

}  // namespace toda
