#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include "qqm/fd_ops.hpp"
#include "qqm/grid.hpp"
#include "qqm/quaternion.hpp"

namespace qqm {

struct Polyline {
  std::vector<Vec2> points;
  bool closed{false};

  void validate() const {
    if (points.size() < 2) {
      throw DomainError("Polyline: need at least 2 points");
    }
    if (closed) {
      const Vec2 gap = points.front() - points.back();
      if (gap.norm() > 1e-12) {
        throw DomainError("Polyline: closed path must end where it starts");
      }
    }
  }

  double length() const {
    double len = 0.0;
    for (std::size_t s = 0; s + 1 < points.size(); ++s) {
      len += (points[s + 1] - points[s]).norm();
    }
    return len;
  }

  Polyline reversed() const {
    Polyline r;
    r.points.assign(points.rbegin(), points.rend());
    r.closed = closed;
    return r;
  }

  static Polyline segment(Vec2 a, Vec2 b) { return {{a, b}, false}; }

  static Polyline circle(Vec2 center, double radius, int n_segments) {
    Polyline c;
    c.closed = true;
    c.points.reserve(n_segments + 1);
    for (int s = 0; s <= n_segments; ++s) {
      const double phi = 2.0 * std::numbers::pi * s / n_segments;
      c.points.push_back(
          {center.x + radius * std::cos(phi), center.y + radius * std::sin(phi)});
    }
    c.points.back() = c.points.front();
    return c;
  }
};

using VectorFn = std::function<Vec2(Vec2)>;

/// Midpoint-rule line integral of an analytic vector function. Each
/// polyline segment is split into `refinement` subsegments.
inline double line_integral(const VectorFn& v, const Polyline& path,
                            int refinement = 1) {
  path.validate();
  if (refinement < 1) {
    throw DomainError("line_integral: refinement must be >= 1");
  }
  double total = 0.0;
  for (std::size_t s = 0; s + 1 < path.points.size(); ++s) {
    const Vec2 a = path.points[s];
    const Vec2 d = (path.points[s + 1] - a) * (1.0 / refinement);
    for (int r = 0; r < refinement; ++r) {
      const Vec2 mid = a + d * (r + 0.5);
      total += v(mid).dot(d);
    }
  }
  return total;
}

/// Same, with the field known only on a grid (bilinear interpolation).
/// Throws if the path exits the domain or crosses the mask.
inline double line_integral(const RealVectorField& v, const Polyline& path,
                            int refinement = 1) {
  return line_integral(
      [&](Vec2 p) { return interpolate(v, p); }, path, refinement);
}

/// Quaternion-valued connection: position -> (Q_x, Q_y).
using ConnectionFn = std::function<std::array<Quaternion, 2>(Vec2)>;

/// Connection Q = alpha*i + beta*j built from a real vector potential and a
/// complex one.
inline ConnectionFn make_connection(
    const VectorFn& alpha, const std::function<std::array<Complex, 2>(Vec2)>& beta) {
  return [alpha, beta](Vec2 p) -> std::array<Quaternion, 2> {
    const Vec2 a = alpha(p);
    const auto b = beta(p);
    return {Quaternion{kImag * a.x, b[0]}, Quaternion{kImag * a.y, b[1]}};
  };
}

/// Path-ordered product of exponentials of the connection along the path.
/// The first path point is applied first; each successive factor multiplies
/// on the left:  U = exp(Q(m_N)*dl_N) ... exp(Q(m_1)*dl_1).
/// Midpoint sampling, `refinement` subsegments per polyline segment. The
/// sampled connection must be pure imaginary; the result has unit norm.
inline Quaternion path_ordered_product(const ConnectionFn& conn,
                                       const Polyline& path, int refinement) {
  path.validate();
  if (refinement < 1) {
    throw DomainError("path_ordered_product: refinement must be >= 1");
  }
  Quaternion u = Quaternion::one();
  for (std::size_t s = 0; s + 1 < path.points.size(); ++s) {
    const Vec2 a = path.points[s];
    const Vec2 d = (path.points[s + 1] - a) * (1.0 / refinement);
    for (int r = 0; r < refinement; ++r) {
      const Vec2 mid = a + d * (r + 0.5);
      const auto q = conn(mid);
      const Quaternion step = q[0] * d.x + q[1] * d.y;
      if (!is_pure_imaginary(step, 1e-12)) {
        throw DomainError(
            "path_ordered_product: connection sample is not pure imaginary");
      }
      u = quat_exp(step) * u;
    }
  }
  return u;
}

}  // namespace qqm
