#pragma once

#include "qqm/grid.hpp"

namespace qqm {

/// Boundary treatment for the difference stencils.
///  - OneSided: second-order one-sided stencils at domain edges and next to
///    masked nodes (the default for verification work on open domains).
///  - Periodic: wrap-around indexing; not combinable with a mask.
///  - DirichletZero: out-of-range and masked neighbours read as zero
///    (hard-wall evolution).
enum class Boundary { OneSided, Periodic, DirichletZero };

namespace detail {

// First derivative along one axis at (i,j). `get` fetches values, `ok`
// reports whether a node may be read.
template <typename T, typename Get, typename Ok>
T d1_axis(int i, int n, double h, Boundary bc, const Get& get, const Ok& ok) {
  auto wrap = [n](int k) { return (k % n + n) % n; };
  if (bc == Boundary::Periodic) {
    return (get(wrap(i + 1)) - get(wrap(i - 1))) * (0.5 / h);
  }
  if (bc == Boundary::DirichletZero) {
    const T fp = (i + 1 < n && ok(i + 1)) ? get(i + 1) : T{};
    const T fm = (i - 1 >= 0 && ok(i - 1)) ? get(i - 1) : T{};
    return (fp - fm) * (0.5 / h);
  }
  const bool m_ok = i - 1 >= 0 && ok(i - 1);
  const bool p_ok = i + 1 < n && ok(i + 1);
  if (m_ok && p_ok) {
    return (get(i + 1) - get(i - 1)) * (0.5 / h);
  }
  if (p_ok && i + 2 < n && ok(i + 2)) {  // forward, second order
    return (get(i) * -3.0 + get(i + 1) * 4.0 - get(i + 2)) * (0.5 / h);
  }
  if (m_ok && i - 2 >= 0 && ok(i - 2)) {  // backward, second order
    return (get(i) * 3.0 - get(i - 1) * 4.0 + get(i - 2)) * (0.5 / h);
  }
  throw DomainError(
      "fd: not enough unmasked neighbours for a second-order stencil");
}

// Second derivative along one axis.
template <typename T, typename Get, typename Ok>
T d2_axis(int i, int n, double h, Boundary bc, const Get& get, const Ok& ok) {
  const double ih2 = 1.0 / (h * h);
  auto wrap = [n](int k) { return (k % n + n) % n; };
  if (bc == Boundary::Periodic) {
    return (get(wrap(i + 1)) - get(i) * 2.0 + get(wrap(i - 1))) * ih2;
  }
  if (bc == Boundary::DirichletZero) {
    const T fp = (i + 1 < n && ok(i + 1)) ? get(i + 1) : T{};
    const T fm = (i - 1 >= 0 && ok(i - 1)) ? get(i - 1) : T{};
    return (fp - get(i) * 2.0 + fm) * ih2;
  }
  const bool m_ok = i - 1 >= 0 && ok(i - 1);
  const bool p_ok = i + 1 < n && ok(i + 1);
  if (m_ok && p_ok) {
    return (get(i + 1) - get(i) * 2.0 + get(i - 1)) * ih2;
  }
  if (p_ok && i + 3 < n && ok(i + 2) && ok(i + 3)) {
    return (get(i) * 2.0 - get(i + 1) * 5.0 + get(i + 2) * 4.0 - get(i + 3)) *
           ih2;
  }
  if (m_ok && i - 3 >= 0 && ok(i - 2) && ok(i - 3)) {
    return (get(i) * 2.0 - get(i - 1) * 5.0 + get(i - 2) * 4.0 - get(i - 3)) *
           ih2;
  }
  throw DomainError(
      "fd: not enough unmasked neighbours for a second-order stencil");
}

}  // namespace detail

template <typename T>
T fd_dx_at(const ScalarField<T>& f, int i, int j,
           Boundary bc = Boundary::OneSided) {
  const GridSpec& g = f.grid();
  return detail::d1_axis<T>(
      i, g.nx, g.dx, bc, [&](int k) { return f.at(k, j); },
      [&](int k) { return !g.masked(k, j); });
}

template <typename T>
T fd_dy_at(const ScalarField<T>& f, int i, int j,
           Boundary bc = Boundary::OneSided) {
  const GridSpec& g = f.grid();
  return detail::d1_axis<T>(
      j, g.ny, g.dy, bc, [&](int k) { return f.at(i, k); },
      [&](int k) { return !g.masked(i, k); });
}

/// Second-order gradient. Central stencils in the interior, one-sided at
/// boundaries and mask edges (per the boundary mode). Masked nodes get zero.
template <typename T>
VectorField<T> fd_gradient(const ScalarField<T>& f,
                           Boundary bc = Boundary::OneSided) {
  const GridSpec& g = f.grid();
  g.validate();
  if (bc == Boundary::Periodic && g.has_mask()) {
    throw DomainError("fd_gradient: periodic mode does not support masks");
  }
  VectorField<T> out(g);
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      if (g.masked(i, j)) continue;
      out.x(i, j) = fd_dx_at(f, i, j, bc);
      out.y(i, j) = fd_dy_at(f, i, j, bc);
    }
  }
  return out;
}

template <typename T>
ScalarField<T> fd_divergence(const VectorField<T>& v,
                             Boundary bc = Boundary::OneSided) {
  const GridSpec& g = v.grid();
  g.validate();
  if (bc == Boundary::Periodic && g.has_mask()) {
    throw DomainError("fd_divergence: periodic mode does not support masks");
  }
  ScalarField<T> out(g);
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      if (g.masked(i, j)) continue;
      const T dxx = detail::d1_axis<T>(
          i, g.nx, g.dx, bc, [&](int k) { return v.x(k, j); },
          [&](int k) { return !g.masked(k, j); });
      const T dyy = detail::d1_axis<T>(
          j, g.ny, g.dy, bc, [&](int k) { return v.y(i, k); },
          [&](int k) { return !g.masked(i, k); });
      out.at(i, j) = dxx + dyy;
    }
  }
  return out;
}

/// 2D curl, z-component: d(v_y)/dx - d(v_x)/dy.
template <typename T>
ScalarField<T> fd_curl(const VectorField<T>& v,
                       Boundary bc = Boundary::OneSided) {
  const GridSpec& g = v.grid();
  g.validate();
  if (bc == Boundary::Periodic && g.has_mask()) {
    throw DomainError("fd_curl: periodic mode does not support masks");
  }
  ScalarField<T> out(g);
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      if (g.masked(i, j)) continue;
      const T dvy_dx = detail::d1_axis<T>(
          i, g.nx, g.dx, bc, [&](int k) { return v.y(k, j); },
          [&](int k) { return !g.masked(k, j); });
      const T dvx_dy = detail::d1_axis<T>(
          j, g.ny, g.dy, bc, [&](int k) { return v.x(i, k); },
          [&](int k) { return !g.masked(i, k); });
      out.at(i, j) = dvy_dx - dvx_dy;
    }
  }
  return out;
}

template <typename T>
ScalarField<T> fd_laplacian(const ScalarField<T>& f,
                            Boundary bc = Boundary::OneSided) {
  const GridSpec& g = f.grid();
  g.validate();
  if (bc == Boundary::Periodic && g.has_mask()) {
    throw DomainError("fd_laplacian: periodic mode does not support masks");
  }
  ScalarField<T> out(g);
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      if (g.masked(i, j)) continue;
      const T dxx = detail::d2_axis<T>(
          i, g.nx, g.dx, bc, [&](int k) { return f.at(k, j); },
          [&](int k) { return !g.masked(k, j); });
      const T dyy = detail::d2_axis<T>(
          j, g.ny, g.dy, bc, [&](int k) { return f.at(i, k); },
          [&](int k) { return !g.masked(i, k); });
      out.at(i, j) = dxx + dyy;
    }
  }
  return out;
}

/// Bilinear interpolation of a vector field at an arbitrary point. Throws
/// if the point leaves the domain or the surrounding cell touches the mask.
template <typename T>
Vec2 interpolate_requires_real(const VectorField<T>&) = delete;

inline Vec2 interpolate(const RealVectorField& v, const Vec2& p) {
  const GridSpec& g = v.grid();
  if (!g.contains(p)) {
    throw DomainError("interpolate: point outside grid domain");
  }
  double fi = (p.x - g.x0) / g.dx;
  double fj = (p.y - g.y0) / g.dy;
  int i = static_cast<int>(fi);
  int j = static_cast<int>(fj);
  if (i >= g.nx - 1) i = g.nx - 2;
  if (j >= g.ny - 1) j = g.ny - 2;
  const double a = fi - i;
  const double b = fj - j;
  for (int dj = 0; dj <= 1; ++dj) {
    for (int di = 0; di <= 1; ++di) {
      if (g.masked(i + di, j + dj)) {
        throw MaskedRegionError("interpolate: cell touches masked region");
      }
    }
  }
  auto lerp2 = [&](auto&& comp) {
    return (1 - a) * (1 - b) * comp(i, j) + a * (1 - b) * comp(i + 1, j) +
           (1 - a) * b * comp(i, j + 1) + a * b * comp(i + 1, j + 1);
  };
  return {lerp2([&](int ii, int jj) { return v.x(ii, jj); }),
          lerp2([&](int ii, int jj) { return v.y(ii, jj); })};
}

}  // namespace qqm
