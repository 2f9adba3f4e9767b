#pragma once

#include <cstddef>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

namespace toda {

using Index = Eigen::Index;

struct Point {
  double x = 0.0;
  double y = 0.0;
};

double norm(Point p);
Point rotate(Point p, double angle);

struct Disk {
  double radius = 1.0;
};

struct Square {
  double side = 2.0;
};

/// Simple polygon, vertices listed counterclockwise.
struct Polygon {
  std::vector<Point> vertices;
};

using Shape = std::variant<Disk, Square, Polygon>;

/// A planar domain together with the order k of its rotational symmetry.
struct DomainSpec {
  Shape shape = Disk{};
  int symmetry_order = 4;
};

/// Throws toda::DomainError unless k > 2, the shape is invariant under the
/// rotation by 2*pi/k and the origin is an interior point.
void validate(const DomainSpec& spec);

bool contains(const DomainSpec& spec, Point p);
/// Distance from p to the boundary (positive inside).
double boundary_distance(const DomainSpec& spec, Point p);
double area(const DomainSpec& spec);
/// Largest radius of a ball centred at the origin contained in the domain.
double inradius(const DomainSpec& spec);
std::string shape_name(const DomainSpec& spec);

/// Reads "x y" pairs, one vertex per line; blank lines and '#' comments skipped.
Polygon read_polygon(std::istream& in);
Polygon load_polygon(const std::string& path);

struct PolarResolution {
  int n_r = 128;      ///< rings including the boundary ring
  int n_theta = 16;   ///< rays; must be a multiple of the symmetry order
  /// Strength of the sinh grading toward r = 0. Derived from delta_min when unset.
  std::optional<double> grading;
};

struct CartesianResolution {
  double h = 1.0 / 64.0;
};

using Resolution = std::variant<PolarResolution, CartesianResolution>;

enum class GridKind { polar, cartesian };

/// One link of the discrete Laplacian: flux coefficient between two nodes.
struct Edge {
  Index a = 0;
  Index b = 0;
  double conductance = 0.0;
};

struct PolarLayout {
  int n_r = 0;
  int n_theta = 0;
  double radius = 1.0;
  double grading = 0.0;
  double ds = 0.0;                  ///< spacing in the computational variable s
  std::vector<double> ring_radius;  ///< n_r entries, last one equals radius

  double map(double s) const;         ///< r(s)
  double map_derivative(double s) const;
  double inverse(double r) const;     ///< s(r)
  double ring_s(int ring) const { return (ring + 0.5) * ds; }
};

/// Nodes, quadrature weights and Laplacian links of a discretized domain.
/// Interior nodes come first, boundary nodes after them. Immutable.
class Grid {
 public:
  GridKind kind() const { return kind_; }
  const DomainSpec& domain() const { return domain_; }
  int symmetry_order() const { return domain_.symmetry_order; }

  Index size() const { return static_cast<Index>(nodes_.size()); }
  Index interior_count() const { return n_interior_; }
  Index boundary_count() const { return size() - n_interior_; }
  bool is_interior(Index i) const { return i < n_interior_; }

  const std::vector<Point>& nodes() const { return nodes_; }
  Point node(Index i) const { return nodes_[static_cast<std::size_t>(i)]; }
  const Eigen::VectorXd& weights() const { return weights_; }
  const std::vector<Edge>& edges() const { return edges_; }

  /// Image of every node under the domain's symmetry rotation; empty when the
  /// node set is not invariant.
  std::span<const Index> rotation() const { return rotation_; }
  bool rotation_invariant() const { return !rotation_.empty(); }
  /// Node permutation for the rotation by 2*pi/k; empty if the node set is not
  /// invariant under it.
  std::vector<Index> rotation_map(int k) const;

  const PolarLayout* polar() const { return polar_ ? &*polar_ : nullptr; }
  Index polar_index(int ring, int ray) const;

  /// Smallest radial spacing near the origin (h on Cartesian grids).
  double min_spacing() const;
  /// Radial mesh width at distance r from the origin.
  double local_spacing(double r) const;
  double cartesian_h() const { return h_; }

  friend std::shared_ptr<const Grid> build_grid(const DomainSpec&, const Resolution&, double);

 private:
  Grid() = default;
  void finish_rotation();

  GridKind kind_ = GridKind::polar;
  DomainSpec domain_;
  std::vector<Point> nodes_;
  Index n_interior_ = 0;
  Eigen::VectorXd weights_;
  std::vector<Edge> edges_;
  std::vector<Index> rotation_;
  std::optional<PolarLayout> polar_;
  double h_ = 0.0;
};

/// Builds a graded polar grid for disks and an origin-aligned Cartesian grid for
/// squares and polygons. delta_min is the smallest length scale the grid must
/// resolve; the first radial spacing is made no larger than delta_min / 4.
std::shared_ptr<const Grid> build_grid(const DomainSpec& spec, const Resolution& resolution,
                                       double delta_min);

/// Label of the rotation orbit of every node (labels numbered in order of
/// first appearance) and the number of orbits. Throws when the node set is not
/// invariant.
std::vector<Index> orbit_labels(const Grid& grid, int k, Index* count);

/// Orbit average over the k rotations. Exact: f(R x) == f(x) bitwise afterwards.
Eigen::VectorXd symmetrize(const Grid& grid, const Eigen::VectorXd& values, int k);

}  // namespace toda
