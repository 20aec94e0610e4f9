#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "qqm/errors.hpp"
#include "qqm/quaternion.hpp"

namespace qqm {

struct Vec2 {
  double x{0.0};
  double y{0.0};

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  double dot(const Vec2& o) const { return x * o.x + y * o.y; }
  double cross(const Vec2& o) const { return x * o.y - y * o.x; }
  double norm() const { return std::hypot(x, y); }
};

inline Vec2 operator*(double s, const Vec2& v) { return v * s; }

/// Uniform 2D grid. Coordinates are x0 + i*dx, y0 + j*dy in dimensionless
/// lattice units. An optional mask excludes regions (1 = excluded); masked
/// nodes are never read by differential stencils.
struct GridSpec {
  int nx{0};
  int ny{0};
  double dx{0.0};
  double dy{0.0};
  double x0{0.0};
  double y0{0.0};
  std::vector<std::uint8_t> mask;  // empty or nx*ny entries

  void validate() const {
    if (nx < 3 || ny < 3) {
      throw DomainError("GridSpec: counts must be >= 3 (stencil width)");
    }
    if (!(dx > 0.0) || !(dy > 0.0)) {
      throw DomainError("GridSpec: spacings must be strictly positive");
    }
    if (!mask.empty() && mask.size() != static_cast<std::size_t>(nx) * ny) {
      throw DomainError("GridSpec: mask size must equal nx*ny");
    }
  }

  std::size_t num_nodes() const {
    return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny);
  }
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(j) * nx + i;
  }
  bool in_range(int i, int j) const {
    return i >= 0 && i < nx && j >= 0 && j < ny;
  }
  bool has_mask() const { return !mask.empty(); }
  bool masked(int i, int j) const {
    return has_mask() && mask[index(i, j)] != 0;
  }
  /// Usable by a stencil: inside the grid and not excluded.
  bool valid(int i, int j) const { return in_range(i, j) && !masked(i, j); }

  double x(int i) const { return x0 + i * dx; }
  double y(int j) const { return y0 + j * dy; }
  Vec2 point(int i, int j) const { return {x(i), y(j)}; }

  double xmax() const { return x0 + (nx - 1) * dx; }
  double ymax() const { return y0 + (ny - 1) * dy; }

  bool contains(const Vec2& p) const {
    return p.x >= x0 && p.x <= xmax() && p.y >= y0 && p.y <= ymax();
  }

  /// Convenience constructor covering [x0, x0+lx] x [y0, y0+ly] inclusive.
  static GridSpec cover(int nx, int ny, double x0, double y0, double lx,
                        double ly) {
    GridSpec g;
    g.nx = nx;
    g.ny = ny;
    g.x0 = x0;
    g.y0 = y0;
    g.dx = lx / (nx - 1);
    g.dy = ly / (ny - 1);
    g.validate();
    return g;
  }

  /// Marks every node with predicate(p) true as excluded.
  void apply_mask(const std::function<bool(Vec2)>& predicate) {
    mask.assign(num_nodes(), 0);
    for (int j = 0; j < ny; ++j) {
      for (int i = 0; i < nx; ++i) {
        if (predicate(point(i, j))) mask[index(i, j)] = 1;
      }
    }
  }
};

inline bool same_layout(const GridSpec& a, const GridSpec& b) {
  return a.nx == b.nx && a.ny == b.ny && a.dx == b.dx && a.dy == b.dy &&
         a.x0 == b.x0 && a.y0 == b.y0;
}

template <typename T>
class ScalarField {
 public:
  ScalarField() = default;
  explicit ScalarField(GridSpec grid)
      : grid_(std::move(grid)), values_(grid_.num_nodes(), T{}) {
    grid_.validate();
  }

  static ScalarField sample(const GridSpec& grid,
                            const std::function<T(Vec2)>& fn) {
    ScalarField f(grid);
    for (int j = 0; j < grid.ny; ++j) {
      for (int i = 0; i < grid.nx; ++i) {
        if (!grid.masked(i, j)) f.at(i, j) = fn(grid.point(i, j));
      }
    }
    return f;
  }

  const GridSpec& grid() const { return grid_; }
  T& at(int i, int j) { return values_[grid_.index(i, j)]; }
  const T& at(int i, int j) const { return values_[grid_.index(i, j)]; }
  std::vector<T>& values() { return values_; }
  const std::vector<T>& values() const { return values_; }

 private:
  GridSpec grid_;
  std::vector<T> values_;
};

template <typename T>
class VectorField {
 public:
  VectorField() = default;
  explicit VectorField(GridSpec grid)
      : grid_(std::move(grid)),
        x_(grid_.num_nodes(), T{}),
        y_(grid_.num_nodes(), T{}) {
    grid_.validate();
  }

  template <typename FnX, typename FnY>
  static VectorField sample(const GridSpec& grid, FnX fx, FnY fy) {
    VectorField f(grid);
    for (int j = 0; j < grid.ny; ++j) {
      for (int i = 0; i < grid.nx; ++i) {
        if (grid.masked(i, j)) continue;
        const Vec2 p = grid.point(i, j);
        f.x(i, j) = fx(p);
        f.y(i, j) = fy(p);
      }
    }
    return f;
  }

  const GridSpec& grid() const { return grid_; }
  T& x(int i, int j) { return x_[grid_.index(i, j)]; }
  const T& x(int i, int j) const { return x_[grid_.index(i, j)]; }
  T& y(int i, int j) { return y_[grid_.index(i, j)]; }
  const T& y(int i, int j) const { return y_[grid_.index(i, j)]; }

 private:
  GridSpec grid_;
  std::vector<T> x_, y_;
};

using RealField = ScalarField<double>;
using ComplexField = ScalarField<Complex>;
using RealVectorField = VectorField<double>;
using ComplexVectorField = VectorField<Complex>;

/// Quaternion-valued grid function stored as its symplectic pair.
struct QuatField {
  ComplexField z;
  ComplexField zeta;

  Quaternion at(int i, int j) const { return {z.at(i, j), zeta.at(i, j)}; }
};

}  // namespace qqm
