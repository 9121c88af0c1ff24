#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace cohset {

/// State-space coordinates. 1D grids ignore the second component.
using Point = std::array<double, 2>;

struct Axis {
  double lower = 0.0;
  double upper = 1.0;
  std::size_t count = 1;
  bool periodic = false;

  double length() const { return upper - lower; }
  double width() const { return length() / static_cast<double>(count); }
  bool operator==(const Axis&) const = default;
};

/// Uniform box partition of a 1D circle/interval or a 2D rectangle/cylinder.
///
/// Boxes are half-open on their upper faces; on a nonperiodic axis the last
/// box is closed so that `locate` is total on the domain. In 2D the box index
/// is `ix + nx * iy` (x fastest).
class Grid {
 public:
  explicit Grid(std::vector<Axis> axes);

  /// The unit circle [0,1) with `n` boxes.
  static Grid circle(std::size_t n);
  /// [0,2pi) x [0,pi] with x periodic and y walled.
  static Grid cylinder(std::size_t nx, std::size_t ny);

  int dim() const { return static_cast<int>(axes_.size()); }
  std::size_t size() const { return size_; }
  const Axis& axis(int d) const { return axes_[static_cast<std::size_t>(d)]; }

  std::size_t locate(const Point& p) const;
  std::size_t locate(double x) const { return locate(Point{x, 0.0}); }

  /// Deterministic midpoint lattice of `q` points inside `box`. In 2D `q`
  /// must be a perfect square; points are ordered x-major.
  std::vector<Point> test_points(std::size_t box, std::size_t q) const;

  Point center(std::size_t box) const;
  std::array<std::size_t, 2> multi_index(std::size_t box) const;
  std::size_t flat_index(std::size_t ix, std::size_t iy) const { return ix + axes_[0].count * iy; }

  /// Face neighbours, honouring periodic wraparound. No duplicates.
  std::vector<std::size_t> neighbours(std::size_t box) const;

  bool operator==(const Grid&) const = default;

 private:
  std::size_t axis_index(int d, double v) const;

  std::vector<Axis> axes_;
  std::size_t size_ = 0;
};

/// Sorted, duplicate-free set of boxes of one grid.
class BoxSet {
 public:
  explicit BoxSet(Grid grid) : grid_(std::move(grid)) {}
  BoxSet(Grid grid, std::vector<std::size_t> indices);

  static BoxSet full(const Grid& grid);

  const Grid& grid() const { return grid_; }
  std::span<const std::size_t> indices() const { return indices_; }
  std::size_t size() const { return indices_.size(); }
  bool empty() const { return indices_.empty(); }
  bool contains(std::size_t box) const;

  /// Normalised Lebesgue measure; the full set has measure 1.
  double measure() const;

  /// Membership mask of length grid().size().
  std::vector<char> mask() const;

  bool operator==(const BoxSet& other) const {
    return grid_ == other.grid_ && indices_ == other.indices_;
  }

 private:
  Grid grid_;
  std::vector<std::size_t> indices_;
};

/// Maximal face-connected components, ordered by smallest member.
std::vector<BoxSet> components(const BoxSet& set);

/// Box permutation of the half-turn (x, y) -> (x + L/2, upper + lower - y) on
/// a 2D grid whose x axis is periodic with an even count. Entry b is the
/// image of box b.
std::vector<std::size_t> half_turn(const Grid& grid);

BoxSet set_union(const BoxSet& a, const BoxSet& b);
BoxSet set_intersection(const BoxSet& a, const BoxSet& b);
std::size_t symmetric_difference_size(const BoxSet& a, const BoxSet& b);

}  // namespace cohset
