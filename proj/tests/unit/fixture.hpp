#pragma once

#include <cmath>
#include <numbers>

#include "toda/ansatz.hpp"
#include "toda/domain.hpp"
#include "toda/elliptic.hpp"

namespace toda::testing {

inline constexpr double kRho = 6.0 * std::numbers::pi;

/// Graded unit-disk grid fine enough for lambda down to 1e-3, built once.
inline const Background& disk_background() {
  static const Background bg = make_background(
      assemble_laplacian(build_grid({Disk{1.0}, 4}, PolarResolution{160, 16, std::nullopt}, 1e-3)), kRho);
  return bg;
}

}  // namespace toda::testing
