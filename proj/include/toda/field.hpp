#pragma once

#include <memory>
#include <utility>

#include <Eigen/Core>

#include "toda/domain.hpp"

namespace toda {

/// Nodal values of one scalar unknown, boundary nodes included.
struct ScalarField {
  std::shared_ptr<const Grid> grid;
  Eigen::VectorXd values;

  ScalarField() = default;
  ScalarField(std::shared_ptr<const Grid> g, Eigen::VectorXd v)
      : grid(std::move(g)), values(std::move(v)) {}

  static ScalarField zeros(std::shared_ptr<const Grid> g) {
    const Index n = g->size();
    return {std::move(g), Eigen::VectorXd::Zero(n)};
  }

  Index size() const { return values.size(); }
  double operator[](Index i) const { return values[i]; }
  auto interior() const { return values.head(grid->interior_count()); }
  auto boundary() const { return values.tail(grid->boundary_count()); }
};

/// A pair (u1, u2) on a common grid.
struct FieldPair {
  ScalarField first;
  ScalarField second;
};

}  // namespace toda
