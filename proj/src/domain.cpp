#include "toda/domain.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <numbers>
#include <sstream>
#include <unordered_map>

#include "toda/error.hpp"

namespace toda {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::vector<Point> square_vertices(double side) {
  const double a = 0.5 * side;
  return {{-a, -a}, {a, -a}, {a, a}, {-a, a}};
}

double signed_area(const std::vector<Point>& v) {
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Point p = v[i];
    const Point q = v[(i + 1) % v.size()];
    s += p.x * q.y - q.x * p.y;
  }
  return 0.5 * s;
}

bool point_in_polygon(const std::vector<Point>& v, Point p) {
  bool inside = false;
  for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
    const Point a = v[i];
    const Point b = v[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x = (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x;
      if (p.x < x) inside = !inside;
    }
  }
  return inside;
}

double segment_distance(Point p, Point a, Point b) {
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  double t = len2 > 0.0 ? ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return std::hypot(p.x - (a.x + t * dx), p.y - (a.y + t * dy));
}

double polygon_edge_distance(const std::vector<Point>& v, Point p) {
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < v.size(); ++i) {
    d = std::min(d, segment_distance(p, v[i], v[(i + 1) % v.size()]));
  }
  return d;
}

// Sutherland-Hodgman against one half-plane {p : dot(n, p) <= c}.
std::vector<Point> clip_half_plane(const std::vector<Point>& poly, double nx, double ny, double c) {
  std::vector<Point> out;
  if (poly.empty()) return out;
  out.reserve(poly.size() + 2);
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Point cur = poly[i];
    const Point nxt = poly[(i + 1) % poly.size()];
    const double dc = nx * cur.x + ny * cur.y - c;
    const double dn = nx * nxt.x + ny * nxt.y - c;
    if (dc <= 0.0) out.push_back(cur);
    if ((dc < 0.0 && dn > 0.0) || (dc > 0.0 && dn < 0.0)) {
      const double t = dc / (dc - dn);
      out.push_back({cur.x + t * (nxt.x - cur.x), cur.y + t * (nxt.y - cur.y)});
    }
  }
  return out;
}

double clipped_cell_area(const std::vector<Point>& poly, Point c, double h) {
  auto clipped = clip_half_plane(poly, 1.0, 0.0, c.x + 0.5 * h);
  clipped = clip_half_plane(clipped, -1.0, 0.0, -(c.x - 0.5 * h));
  clipped = clip_half_plane(clipped, 0.0, 1.0, c.y + 0.5 * h);
  clipped = clip_half_plane(clipped, 0.0, -1.0, -(c.y - 0.5 * h));
  return clipped.size() < 3 ? 0.0 : std::abs(signed_area(clipped));
}

// Length of the segment [a, b] lying inside the polygon.
double clipped_segment_length(const std::vector<Point>& poly, Point a, Point b) {
  std::vector<double> ts{0.0, 1.0};
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Point p = poly[i];
    const Point q = poly[(i + 1) % poly.size()];
    const double ex = q.x - p.x;
    const double ey = q.y - p.y;
    const double den = dx * ey - dy * ex;
    if (std::abs(den) < 1e-300) continue;
    const double t = ((p.x - a.x) * ey - (p.y - a.y) * ex) / den;
    const double u = ((p.x - a.x) * dy - (p.y - a.y) * dx) / den;
    if (t > 0.0 && t < 1.0 && u >= 0.0 && u <= 1.0) ts.push_back(t);
  }
  std::sort(ts.begin(), ts.end());
  double len = 0.0;
  for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
    const double tm = 0.5 * (ts[i] + ts[i + 1]);
    const Point m{a.x + tm * dx, a.y + tm * dy};
    if (point_in_polygon(poly, m) || polygon_edge_distance(poly, m) < 1e-12) {
      len += (ts[i + 1] - ts[i]);
    }
  }
  return len * std::hypot(dx, dy);
}

const std::vector<Point>* polygon_vertices(const DomainSpec& spec, std::vector<Point>& storage) {
  if (const auto* sq = std::get_if<Square>(&spec.shape)) {
    storage = square_vertices(sq->side);
    return &storage;
  }
  if (const auto* pg = std::get_if<Polygon>(&spec.shape)) return &pg->vertices;
  return nullptr;
}

}  // namespace

double norm(Point p) { return std::hypot(p.x, p.y); }

Point rotate(Point p, double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return {c * p.x - s * p.y, s * p.x + c * p.y};
}

bool contains(const DomainSpec& spec, Point p) {
  return std::visit(overloaded{
                        [&](const Disk& d) { return norm(p) < d.radius; },
                        [&](const Square& s) {
                          return std::abs(p.x) < 0.5 * s.side && std::abs(p.y) < 0.5 * s.side;
                        },
                        [&](const Polygon& g) { return point_in_polygon(g.vertices, p); },
                    },
                    spec.shape);
}

double boundary_distance(const DomainSpec& spec, Point p) {
  double d = std::visit(overloaded{
                            [&](const Disk& disk) { return std::abs(disk.radius - norm(p)); },
                            [&](const Square& s) {
                              std::vector<Point> v = square_vertices(s.side);
                              return polygon_edge_distance(v, p);
                            },
                            [&](const Polygon& g) { return polygon_edge_distance(g.vertices, p); },
                        },
                        spec.shape);
  return contains(spec, p) ? d : -d;
}

double area(const DomainSpec& spec) {
  return std::visit(overloaded{
                        [](const Disk& d) { return std::numbers::pi * d.radius * d.radius; },
                        [](const Square& s) { return s.side * s.side; },
                        [](const Polygon& g) { return std::abs(signed_area(g.vertices)); },
                    },
                    spec.shape);
}

double inradius(const DomainSpec& spec) { return boundary_distance(spec, Point{}); }

std::string shape_name(const DomainSpec& spec) {
  return std::visit(overloaded{
                        [](const Disk&) { return std::string("disk"); },
                        [](const Square&) { return std::string("square"); },
                        [](const Polygon&) { return std::string("polygon"); },
                    },
                    spec.shape);
}

void validate(const DomainSpec& spec) {
  const int k = spec.symmetry_order;
  if (k <= 2) {
    throw DomainError("symmetry order must exceed 2, got " + std::to_string(k));
  }
  std::visit(overloaded{
                 [](const Disk& d) {
                   if (!(d.radius > 0.0)) throw DomainError("disk radius must be positive");
                 },
                 [k](const Square& s) {
                   if (!(s.side > 0.0)) throw DomainError("square side must be positive");
                   if (4 % k != 0) {
                     throw DomainError("a square is not invariant under rotation by 2*pi/" +
                                       std::to_string(k));
                   }
                 },
                 [k](const Polygon& g) {
                   const auto& v = g.vertices;
                   if (v.size() < 3) throw DomainError("polygon needs at least three vertices");
                   if (signed_area(v) <= 0.0) {
                     throw DomainError("polygon vertices must be listed counterclockwise");
                   }
                   double scale = 0.0;
                   for (const Point& p : v) scale = std::max(scale, norm(p));
                   const double tol = 1e-9 * scale;
                   constexpr int kSamplesPerEdge = 16;
                   for (std::size_t i = 0; i < v.size(); ++i) {
                     const Point a = v[i];
                     const Point b = v[(i + 1) % v.size()];
                     for (int m = 0; m < kSamplesPerEdge; ++m) {
                       const double t = static_cast<double>(m) / kSamplesPerEdge;
                       const Point p{a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)};
                       const Point q = rotate(p, -kTwoPi / k);
                       if (polygon_edge_distance(v, q) > tol) {
                         throw DomainError("polygon is not invariant under rotation by 2*pi/" +
                                           std::to_string(k));
                       }
                     }
                   }
                 },
             },
             spec.shape);
  if (!contains(spec, Point{}) || boundary_distance(spec, Point{}) <= 0.0) {
    throw DomainError("the origin must lie inside the domain");
  }
}

Polygon read_polygon(std::istream& in) {
  Polygon poly;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    double x = 0.0;
    double y = 0.0;
    if (!(ls >> x)) continue;
    if (!(ls >> y)) {
      throw DomainError("polygon line " + std::to_string(lineno) + ": expected \"x y\"");
    }
    poly.vertices.push_back({x, y});
  }
  return poly;
}

Polygon load_polygon(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open polygon file " + path);
  return read_polygon(in);
}

double PolarLayout::map(double s) const {
  if (grading < 1e-8) return radius * s;
  return radius * std::sinh(grading * s) / std::sinh(grading);
}

double PolarLayout::map_derivative(double s) const {
  if (grading < 1e-8) return radius;
  return radius * grading * std::cosh(grading * s) / std::sinh(grading);
}

double PolarLayout::inverse(double r) const {
  if (grading < 1e-8) return r / radius;
  return std::asinh(r * std::sinh(grading) / radius) / grading;
}

Index Grid::polar_index(int ring, int ray) const {
  const int n = polar_->n_theta;
  ray %= n;
  if (ray < 0) ray += n;
  return static_cast<Index>(ring) * n + ray;
}

double Grid::min_spacing() const {
  if (polar_) return polar_->ring_radius[1] - polar_->ring_radius[0];
  return h_;
}

double Grid::local_spacing(double r) const {
  if (polar_) {
    const double s = std::clamp(polar_->inverse(r), 0.0, 1.0);
    return polar_->map_derivative(s) * polar_->ds;
  }
  return h_;
}

std::vector<Index> Grid::rotation_map(int k) const {
  std::vector<Index> map(nodes_.size());
  if (k <= 1) {
    for (std::size_t i = 0; i < map.size(); ++i) map[i] = static_cast<Index>(i);
    return map;
  }
  if (polar_) {
    const int n = polar_->n_theta;
    if (n % k != 0) return {};
    const int shift = n / k;
    for (int ring = 0; ring < polar_->n_r; ++ring) {
      for (int ray = 0; ray < n; ++ray) {
        map[static_cast<std::size_t>(polar_index(ring, ray))] = polar_index(ring, ray - shift);
      }
    }
    return map;
  }
  std::map<std::pair<long, long>, Index> lookup;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    lookup.emplace(std::pair{std::lround(nodes_[i].x / h_), std::lround(nodes_[i].y / h_)},
                   static_cast<Index>(i));
  }
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const Point q = rotate(nodes_[i], -kTwoPi / k);
    const auto it = lookup.find({std::lround(q.x / h_), std::lround(q.y / h_)});
    if (it == lookup.end()) return {};
    const Point p = nodes_[static_cast<std::size_t>(it->second)];
    if (std::hypot(p.x - q.x, p.y - q.y) > 1e-9 * h_) return {};
    map[i] = it->second;
  }
  return map;
}

void Grid::finish_rotation() { rotation_ = rotation_map(domain_.symmetry_order); }

namespace {

double first_spacing(const PolarLayout& layout) {
  return layout.map(1.5 * layout.ds) - layout.map(0.5 * layout.ds);
}

double grading_for(PolarLayout layout, double delta_min) {
  const double target = 0.25 * delta_min;
  layout.grading = 0.0;
  if (first_spacing(layout) <= target) return 0.0;
  double lo = 0.0;
  double hi = 60.0;
  layout.grading = hi;
  if (first_spacing(layout) > target) {
    throw ResolutionError("polar grid with " + std::to_string(layout.n_r) +
                          " rings cannot resolve delta_min = " + num_text(delta_min));
  }
  for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
    layout.grading = 0.5 * (lo + hi);
    (first_spacing(layout) > target ? lo : hi) = layout.grading;
  }
  return hi;
}

}  // namespace

std::shared_ptr<const Grid> build_grid(const DomainSpec& spec, const Resolution& resolution,
                                       double delta_min) {
  validate(spec);
  if (!(delta_min > 0.0)) throw DomainError("delta_min must be positive");
  auto grid = std::shared_ptr<Grid>(new Grid());
  grid->domain_ = spec;
  const int k = spec.symmetry_order;

  if (const auto* disk = std::get_if<Disk>(&spec.shape)) {
    const auto* res = std::get_if<PolarResolution>(&resolution);
    if (!res) throw DomainError("disk domains use a polar resolution");
    if (res->n_r < 4 || res->n_theta < 3) {
      throw DomainError("polar grid needs n_r >= 4 and n_theta >= 3");
    }
    if (res->n_theta % k != 0) {
      throw DomainError("n_theta = " + std::to_string(res->n_theta) +
                        " is not divisible by the symmetry order " + std::to_string(k));
    }
    grid->kind_ = GridKind::polar;
    PolarLayout layout;
    layout.n_r = res->n_r;
    layout.n_theta = res->n_theta;
    layout.radius = disk->radius;
    layout.ds = 1.0 / (res->n_r - 0.5);
    if (res->grading) {
      if (*res->grading < 0.0 || !std::isfinite(*res->grading)) {
        throw DomainError("grading must be finite and nonnegative");
      }
      layout.grading = *res->grading;
    } else {
      layout.grading = grading_for(layout, delta_min);
    }
    layout.ring_radius.resize(static_cast<std::size_t>(layout.n_r));
    for (int i = 0; i < layout.n_r; ++i) layout.ring_radius[i] = layout.map(layout.ring_s(i));
    layout.ring_radius.back() = layout.radius;

    const int nr = layout.n_r;
    const int nt = layout.n_theta;
    const double dtheta = kTwoPi / nt;
    const double ds = layout.ds;
    grid->polar_ = layout;
    grid->nodes_.resize(static_cast<std::size_t>(nr) * nt);
    grid->weights_.resize(static_cast<Index>(nr) * nt);
    grid->n_interior_ = static_cast<Index>(nr - 1) * nt;
    const double r_last_face = layout.map(1.0 - 0.5 * ds);
    for (int i = 0; i < nr; ++i) {
      const double r = layout.ring_radius[i];
      const double s = layout.ring_s(i);
      const double w = i + 1 < nr ? layout.map(s) * layout.map_derivative(s) * ds * dtheta
                                  : 0.5 * (r * r - r_last_face * r_last_face) * dtheta;
      for (int j = 0; j < nt; ++j) {
        const double th = j * dtheta;
        const Index id = grid->polar_index(i, j);
        grid->nodes_[static_cast<std::size_t>(id)] = {r * std::cos(th), r * std::sin(th)};
        grid->weights_[id] = w;
      }
    }
    for (int i = 0; i < nr; ++i) {
      const double s = layout.ring_s(i);
      if (i + 1 < nr) {
        const double sf = s + 0.5 * ds;
        const double c = layout.map(sf) / layout.map_derivative(sf) * dtheta / ds;
        for (int j = 0; j < nt; ++j) {
          grid->edges_.push_back({grid->polar_index(i, j), grid->polar_index(i + 1, j), c});
        }
      }
      const double width = i + 1 < nr ? ds : 0.5 * ds;
      const double c = layout.map_derivative(s) / layout.map(s) * width / dtheta;
      for (int j = 0; j < nt; ++j) {
        grid->edges_.push_back({grid->polar_index(i, j), grid->polar_index(i, j + 1), c});
      }
    }
  } else {
    const auto* res = std::get_if<CartesianResolution>(&resolution);
    if (!res) throw DomainError("square and polygon domains use a Cartesian resolution");
    const double h = res->h;
    if (!(h > 0.0) || !std::isfinite(h)) throw DomainError("grid spacing must be positive");
    if (const auto* sq = std::get_if<Square>(&spec.shape)) {
      const double cells = 0.5 * sq->side / h;
      if (std::abs(cells - std::round(cells)) > 1e-9 * cells) {
        throw DomainError("square half-side must be an integer multiple of h");
      }
    }
    grid->kind_ = GridKind::cartesian;
    grid->h_ = h;
    std::vector<Point> storage;
    const std::vector<Point>& poly = *polygon_vertices(spec, storage);
    double xmax = 0.0;
    for (const Point& p : poly) xmax = std::max({xmax, std::abs(p.x), std::abs(p.y)});
    const long m = static_cast<long>(std::ceil(xmax / h)) + 1;
    const long width = 2 * m + 1;
    auto at = [&](long i, long j) { return static_cast<std::size_t>((i + m) * width + (j + m)); };
    std::vector<char> interior(static_cast<std::size_t>(width * width), 0);
    std::vector<double> cell_area(interior.size(), 0.0);
    const double edge_tol = 1e-10 * h;
    for (long i = -m; i <= m; ++i) {
      for (long j = -m; j <= m; ++j) {
        const Point p{static_cast<double>(i) * h, static_cast<double>(j) * h};
        interior[at(i, j)] =
            point_in_polygon(poly, p) && polygon_edge_distance(poly, p) > edge_tol ? 1 : 0;
        cell_area[at(i, j)] = clipped_cell_area(poly, p, h);
      }
    }
    std::vector<Index> id(interior.size(), -1);
    std::vector<std::pair<long, long>> order_interior;
    std::vector<std::pair<long, long>> order_boundary;
    for (long i = -m; i <= m; ++i) {
      for (long j = -m; j <= m; ++j) {
        if (interior[at(i, j)]) {
          order_interior.emplace_back(i, j);
          continue;
        }
        bool near = cell_area[at(i, j)] > 1e-14 * h * h;
        for (auto [di, dj] : {std::pair{1L, 0L}, {-1L, 0L}, {0L, 1L}, {0L, -1L}}) {
          const long a = i + di;
          const long b = j + dj;
          if (a >= -m && a <= m && b >= -m && b <= m && interior[at(a, b)]) near = true;
        }
        if (near) order_boundary.emplace_back(i, j);
      }
    }
    grid->n_interior_ = static_cast<Index>(order_interior.size());
    const std::size_t total = order_interior.size() + order_boundary.size();
    grid->nodes_.reserve(total);
    grid->weights_.resize(static_cast<Index>(total));
    for (const auto* list : {&order_interior, &order_boundary}) {
      for (auto [i, j] : *list) {
        const Index n = static_cast<Index>(grid->nodes_.size());
        id[at(i, j)] = n;
        grid->nodes_.push_back({static_cast<double>(i) * h, static_cast<double>(j) * h});
        grid->weights_[n] = cell_area[at(i, j)];
      }
    }
    for (long i = -m; i <= m; ++i) {
      for (long j = -m; j <= m; ++j) {
        const Index a = id[at(i, j)];
        if (a < 0) continue;
        for (auto [di, dj] : {std::pair{1L, 0L}, {0L, 1L}}) {
          const long i2 = i + di;
          const long j2 = j + dj;
          if (i2 > m || j2 > m) continue;
          const Index b = id[at(i2, j2)];
          if (b < 0) continue;
          double c = 1.0;
          if (!grid->is_interior(a) && !grid->is_interior(b)) {
            // dual face: perpendicular bisector segment of the link
            const double xm = (static_cast<double>(i) + 0.5 * di) * h;
            const double ym = (static_cast<double>(j) + 0.5 * dj) * h;
            const Point p0{xm - 0.5 * h * dj, ym - 0.5 * h * di};
            const Point p1{xm + 0.5 * h * dj, ym + 0.5 * h * di};
            c = clipped_segment_length(poly, p0, p1) / h;
          }
          if (c > 0.0) grid->edges_.push_back({a, b, c});
        }
      }
    }
  }
  grid->finish_rotation();
  return grid;
}

std::vector<Index> orbit_labels(const Grid& grid, int k, Index* count) {
  const std::vector<Index> map = grid.rotation_map(k);
  if (map.empty()) {
    throw DomainError("node set is not invariant under rotation by 2*pi/" + std::to_string(k));
  }
  std::vector<Index> label(map.size(), -1);
  Index next = 0;
  for (std::size_t start = 0; start < map.size(); ++start) {
    if (label[start] >= 0) continue;
    std::size_t i = start;
    do {
      label[i] = next;
      i = static_cast<std::size_t>(map[i]);
    } while (i != start);
    ++next;
  }
  if (count) *count = next;
  return label;
}

Eigen::VectorXd symmetrize(const Grid& grid, const Eigen::VectorXd& values, int k) {
  if (values.size() != grid.size()) throw DomainError("field size does not match grid");
  if (k <= 1) return values;
  const std::vector<Index> map = grid.rotation_map(k);
  if (map.empty()) {
    throw DomainError("node set is not invariant under rotation by 2*pi/" + std::to_string(k));
  }
  Eigen::VectorXd out = values;
  std::vector<char> seen(static_cast<std::size_t>(grid.size()), 0);
  std::vector<Index> orbit;
  for (Index start = 0; start < grid.size(); ++start) {
    if (seen[static_cast<std::size_t>(start)]) continue;
    orbit.clear();
    Index i = start;
    do {
      orbit.push_back(i);
      seen[static_cast<std::size_t>(i)] = 1;
      i = map[static_cast<std::size_t>(i)];
    } while (i != start && orbit.size() <= static_cast<std::size_t>(k));
    bool equal = true;
    double sum = 0.0;
    for (Index n : orbit) {
      sum += values[n];
      equal = equal && values[n] == values[orbit.front()];
    }
    if (equal) continue;
    const double mean = sum / static_cast<double>(orbit.size());
    for (Index n : orbit) out[n] = mean;
  }
  return out;
}

}  // namespace toda
