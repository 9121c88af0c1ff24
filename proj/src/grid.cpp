#include "cohset/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "cohset/errors.hpp"

namespace cohset {

Grid::Grid(std::vector<Axis> axes) : axes_(std::move(axes)) {
  if (axes_.empty() || axes_.size() > 2) throw ConfigError("grid: dimension must be 1 or 2");
  size_ = 1;
  for (const auto& a : axes_) {
    if (a.count == 0) throw ConfigError("grid: axis box count must be positive");
    if (!(a.upper > a.lower)) throw ConfigError("grid: axis bounds must satisfy lower < upper");
    size_ *= a.count;
  }
}

Grid Grid::circle(std::size_t n) { return Grid({Axis{0.0, 1.0, n, true}}); }

Grid Grid::cylinder(std::size_t nx, std::size_t ny) {
  return Grid({Axis{0.0, 2.0 * std::numbers::pi, nx, true}, Axis{0.0, std::numbers::pi, ny, false}});
}

std::size_t Grid::axis_index(int d, double v) const {
  const Axis& a = axes_[static_cast<std::size_t>(d)];
  if (!std::isfinite(v)) throw DomainError("grid: nonfinite coordinate");
  double r = v - a.lower;
  const double len = a.length();
  if (a.periodic) {
    r = std::fmod(r, len);
    if (r < 0) r += len;
    if (r >= len) r = 0.0;
  } else if (r < 0 || r > len) {
    std::ostringstream msg;
    msg << "grid: coordinate " << v << " outside [" << a.lower << ", " << a.upper << "] on axis " << d;
    throw DomainError(msg.str());
  }
  const auto i = static_cast<std::size_t>(std::floor(r * static_cast<double>(a.count) / len));
  return std::min(i, a.count - 1);
}

std::size_t Grid::locate(const Point& p) const {
  const std::size_t ix = axis_index(0, p[0]);
  if (dim() == 1) return ix;
  return flat_index(ix, axis_index(1, p[1]));
}

std::vector<Point> Grid::test_points(std::size_t box, std::size_t q) const {
  if (q == 0) throw ConfigError("test_points: Q must be at least 1");
  if (box >= size_) throw DomainError("test_points: box index out of range");
  std::vector<Point> pts;
  pts.reserve(q);
  const auto [ix, iy] = multi_index(box);
  const Axis& ax = axes_[0];
  if (dim() == 1) {
    for (std::size_t k = 0; k < q; ++k) {
      const double frac = (static_cast<double>(k) + 0.5) / static_cast<double>(q);
      pts.push_back({ax.lower + (static_cast<double>(ix) + frac) * ax.width(), 0.0});
    }
    return pts;
  }
  const auto side = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(q))));
  if (side * side != q) throw ConfigError("test_points: Q must be a perfect square on a 2D grid");
  const Axis& ay = axes_[1];
  for (std::size_t a = 0; a < side; ++a) {
    const double fx = (static_cast<double>(a) + 0.5) / static_cast<double>(side);
    for (std::size_t b = 0; b < side; ++b) {
      const double fy = (static_cast<double>(b) + 0.5) / static_cast<double>(side);
      pts.push_back({ax.lower + (static_cast<double>(ix) + fx) * ax.width(),
                     ay.lower + (static_cast<double>(iy) + fy) * ay.width()});
    }
  }
  return pts;
}

Point Grid::center(std::size_t box) const {
  const auto [ix, iy] = multi_index(box);
  Point c{axes_[0].lower + (static_cast<double>(ix) + 0.5) * axes_[0].width(), 0.0};
  if (dim() == 2) c[1] = axes_[1].lower + (static_cast<double>(iy) + 0.5) * axes_[1].width();
  return c;
}

std::array<std::size_t, 2> Grid::multi_index(std::size_t box) const {
  const std::size_t nx = axes_[0].count;
  return {box % nx, box / nx};
}

std::vector<std::size_t> Grid::neighbours(std::size_t box) const {
  std::vector<std::size_t> out;
  const auto [ix, iy] = multi_index(box);
  auto step = [&](int d, std::size_t i, int delta) -> std::ptrdiff_t {
    const Axis& a = axes_[static_cast<std::size_t>(d)];
    const auto n = static_cast<std::ptrdiff_t>(a.count);
    std::ptrdiff_t j = static_cast<std::ptrdiff_t>(i) + delta;
    if (j < 0 || j >= n) {
      if (!a.periodic) return -1;
      j = (j + n) % n;
    }
    return j;
  };
  for (int delta : {-1, 1}) {
    const auto j = step(0, ix, delta);
    if (j >= 0) out.push_back(dim() == 1 ? static_cast<std::size_t>(j) : flat_index(static_cast<std::size_t>(j), iy));
    if (dim() == 2) {
      const auto k = step(1, iy, delta);
      if (k >= 0) out.push_back(flat_index(ix, static_cast<std::size_t>(k)));
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  out.erase(std::remove(out.begin(), out.end(), box), out.end());
  return out;
}

BoxSet::BoxSet(Grid grid, std::vector<std::size_t> indices)
    : grid_(std::move(grid)), indices_(std::move(indices)) {
  std::sort(indices_.begin(), indices_.end());
  indices_.erase(std::unique(indices_.begin(), indices_.end()), indices_.end());
  if (!indices_.empty() && indices_.back() >= grid_.size()) throw DomainError("BoxSet: box index out of range");
}

BoxSet BoxSet::full(const Grid& grid) {
  std::vector<std::size_t> all(grid.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  return BoxSet(grid, std::move(all));
}

bool BoxSet::contains(std::size_t box) const {
  return std::binary_search(indices_.begin(), indices_.end(), box);
}

double BoxSet::measure() const {
  return static_cast<double>(indices_.size()) / static_cast<double>(grid_.size());
}

std::vector<char> BoxSet::mask() const {
  std::vector<char> m(grid_.size(), 0);
  for (auto i : indices_) m[i] = 1;
  return m;
}

std::vector<BoxSet> components(const BoxSet& set) {
  const Grid& g = set.grid();
  std::vector<char> in = set.mask();
  std::vector<char> seen(g.size(), 0);
  std::vector<BoxSet> out;
  std::vector<std::size_t> stack;
  for (auto start : set.indices()) {
    if (seen[start]) continue;
    std::vector<std::size_t> comp;
    stack.assign(1, start);
    seen[start] = 1;
    while (!stack.empty()) {
      const auto b = stack.back();
      stack.pop_back();
      comp.push_back(b);
      for (auto nb : g.neighbours(b)) {
        if (in[nb] && !seen[nb]) {
          seen[nb] = 1;
          stack.push_back(nb);
        }
      }
    }
    out.emplace_back(g, std::move(comp));
  }
  return out;
}

BoxSet set_union(const BoxSet& a, const BoxSet& b) {
  if (!(a.grid() == b.grid())) throw DomainError("set_union: grids differ");
  std::vector<std::size_t> out;
  std::set_union(a.indices().begin(), a.indices().end(), b.indices().begin(), b.indices().end(),
                 std::back_inserter(out));
  return BoxSet(a.grid(), std::move(out));
}

BoxSet set_intersection(const BoxSet& a, const BoxSet& b) {
  if (!(a.grid() == b.grid())) throw DomainError("set_intersection: grids differ");
  std::vector<std::size_t> out;
  std::set_intersection(a.indices().begin(), a.indices().end(), b.indices().begin(), b.indices().end(),
                        std::back_inserter(out));
  return BoxSet(a.grid(), std::move(out));
}

std::size_t symmetric_difference_size(const BoxSet& a, const BoxSet& b) {
  std::vector<std::size_t> out;
  std::set_symmetric_difference(a.indices().begin(), a.indices().end(), b.indices().begin(),
                                b.indices().end(), std::back_inserter(out));
  return out.size();
}

std::vector<std::size_t> half_turn(const Grid& grid) {
  if (grid.dim() != 2 || !grid.axis(0).periodic || grid.axis(0).count % 2 != 0) {
    throw ConfigError("half_turn: needs a 2D grid with an even periodic x axis");
  }
  const std::size_t nx = grid.axis(0).count;
  const std::size_t ny = grid.axis(1).count;
  std::vector<std::size_t> out(grid.size());
  for (std::size_t iy = 0; iy < ny; ++iy)
    for (std::size_t ix = 0; ix < nx; ++ix) out[grid.flat_index(ix, iy)] = grid.flat_index((ix + nx / 2) % nx, ny - 1 - iy);
  return out;
}

}  // namespace cohset
