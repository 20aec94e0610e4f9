#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "qqm/csv.hpp"
#include "qqm/fd_ops.hpp"
#include "qqm/path.hpp"
#include "test_util.hpp"

using namespace qqm;

namespace {

constexpr double kPi = std::numbers::pi;

GridSpec unit_grid(int n) { return GridSpec::cover(n, n, 0.0, 0.0, 1.0, 1.0); }

template <typename Fn>
double max_abs_over(const GridSpec& g, Fn err) {
  double m = 0.0;
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      if (g.masked(i, j)) continue;
      m = std::max(m, err(i, j));
    }
  }
  return m;
}

// measured convergence order between two resolutions differing by 2x
double order_of(double err_coarse, double err_fine) {
  return std::log2(err_coarse / err_fine);
}

}  // namespace

TEST_CASE("gradient is exact on linear fields and zero on constants") {
  const GridSpec g = unit_grid(17);
  const auto fx = RealField::sample(g, [](Vec2 p) { return p.x; });
  const auto grad = fd_gradient(fx);
  CHECK(max_abs_over(g, [&](int i, int j) {
          return std::max(std::abs(grad.x(i, j) - 1.0), std::abs(grad.y(i, j)));
        }) < 1e-13);

  const auto fc = RealField::sample(g, [](Vec2) { return 3.25; });
  const auto gc = fd_gradient(fc);
  CHECK(max_abs_over(g, [&](int i, int j) {
          return std::abs(gc.x(i, j)) + std::abs(gc.y(i, j));
        }) < 1e-12);
}

TEST_CASE("gradient converges at second order on sin(kx)") {
  const double k = 2.0 * kPi;
  auto err_at = [&](int n) {
    const GridSpec g = unit_grid(n);
    const auto f = RealField::sample(g, [&](Vec2 p) { return std::sin(k * p.x); });
    const auto grad = fd_gradient(f);
    return max_abs_over(g, [&](int i, int j) {
      return std::abs(grad.x(i, j) - k * std::cos(k * g.x(i)));
    });
  };
  const double e1 = err_at(33), e2 = err_at(65), e3 = err_at(129);
  CHECK(order_of(e1, e2) == doctest::Approx(2.0).epsilon(0.1));
  CHECK(order_of(e2, e3) == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("divergence, curl, laplacian basics") {
  const GridSpec g = unit_grid(33);

  const auto vconst =
      RealVectorField::sample(g, [](Vec2) { return 0.7; }, [](Vec2) { return -1.3; });
  CHECK(max_abs_over(g, [d = fd_divergence(vconst)](int i, int j) {
          return std::abs(d.at(i, j));
        }) < 1e-12);

  // curl of the rigid rotation field (-y, x) is 2 everywhere, exactly for
  // second-order stencils on a linear field
  const auto vrot = RealVectorField::sample(
      g, [](Vec2 p) { return -p.y; }, [](Vec2 p) { return p.x; });
  CHECK(max_abs_over(g, [c = fd_curl(vrot)](int i, int j) {
          return std::abs(c.at(i, j) - 2.0);
        }) < 1e-12);

  // phase offset keeps every derivative nonzero at the boundaries, so the
  // O(h^2) truncation term dominates at every node
  const double k = 2.0 * kPi;
  auto lap_err = [&](int n) {
    const GridSpec gg = unit_grid(n);
    const auto f =
        RealField::sample(gg, [&](Vec2 p) { return std::sin(k * p.x + 0.3); });
    const auto lap = fd_laplacian(f);
    return max_abs_over(gg, [&](int i, int j) {
      return std::abs(lap.at(i, j) + k * k * std::sin(k * gg.x(i) + 0.3));
    });
  };
  CHECK(order_of(lap_err(33), lap_err(65)) == doctest::Approx(2.0).epsilon(0.15));
  CHECK(order_of(lap_err(65), lap_err(129)) == doctest::Approx(2.0).epsilon(0.15));
}

TEST_CASE("curl of a gradient vanishes") {
  auto field = [](Vec2 p) {
    return std::sin(2 * kPi * p.x) * std::cos(kPi * p.y) + p.x * p.y;
  };

  // on a plain rectangle the per-axis difference operators commute, so the
  // discrete curl of a discrete gradient is zero to rounding
  {
    const GridSpec g = unit_grid(65);
    const auto c = fd_curl(fd_gradient(RealField::sample(g, field)));
    CHECK(max_abs_over(g, [&](int i, int j) { return std::abs(c.at(i, j)); }) <
          1e-10);
  }

  // mask-adjacent stencil switches break exact commutation; the residual
  // still vanishes under refinement
  auto err_at = [&](int n) {
    GridSpec g = GridSpec::cover(n, n, 0.0, 0.0, 1.0, 1.0);
    g.apply_mask([](Vec2 p) { return (p - Vec2{0.5, 0.5}).norm() <= 0.17; });
    const auto c = fd_curl(fd_gradient(RealField::sample(g, field)));
    return max_abs_over(g,
                        [&](int i, int j) { return std::abs(c.at(i, j)); });
  };
  const double e1 = err_at(41), e2 = err_at(81), e3 = err_at(161);
  CHECK(e2 < e1);
  CHECK(e3 < e2);
}

TEST_CASE("one-sided stencils next to a mask stay second order") {
  // disk mask in the middle of the domain
  auto masked_grid = [&](int n) {
    GridSpec g = GridSpec::cover(n, n, -1.0, -1.0, 2.0, 2.0);
    g.apply_mask([](Vec2 p) { return p.norm() <= 0.3; });
    return g;
  };

  // quadratic field: first derivatives exact for one-sided second-order
  {
    const GridSpec g = masked_grid(41);
    const auto f =
        RealField::sample(g, [](Vec2 p) { return p.x * p.x + 2.0 * p.y * p.y; });
    const auto grad = fd_gradient(f);
    CHECK(max_abs_over(g, [&](int i, int j) {
            return std::abs(grad.x(i, j) - 2.0 * g.x(i)) +
                   std::abs(grad.y(i, j) - 4.0 * g.y(j));
          }) < 1e-11);
  }

  // smooth field: O(h^2) convergence including mask-adjacent nodes
  auto err_at = [&](int n) {
    const GridSpec g = masked_grid(n);
    const auto f = RealField::sample(
        g, [](Vec2 p) { return std::sin(2.0 * p.x) * std::cos(1.5 * p.y); });
    const auto grad = fd_gradient(f);
    return max_abs_over(g, [&](int i, int j) {
      const Vec2 p = g.point(i, j);
      return std::abs(grad.x(i, j) -
                      2.0 * std::cos(2.0 * p.x) * std::cos(1.5 * p.y));
    });
  };
  CHECK(order_of(err_at(41), err_at(81)) == doctest::Approx(2.0).epsilon(0.2));
}

TEST_CASE("masked nodes are never read") {
  GridSpec g = unit_grid(21);
  g.apply_mask([](Vec2 p) { return (p - Vec2{0.5, 0.5}).norm() <= 0.2; });
  RealField f(g);
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      // poison masked nodes; any read would blow up the result
      f.at(i, j) = g.masked(i, j) ? 1e300 : g.x(i);
    }
  }
  const auto grad = fd_gradient(f);
  CHECK(max_abs_over(g, [&](int i, int j) {
          return std::abs(grad.x(i, j) - 1.0);
        }) < 1e-9);
}

TEST_CASE("grid validation") {
  GridSpec g;
  g.nx = 2;
  g.ny = 5;
  g.dx = g.dy = 0.1;
  CHECK_THROWS_AS(g.validate(), DomainError);
  g.nx = 5;
  g.dx = 0.0;
  CHECK_THROWS_AS(g.validate(), DomainError);
}

TEST_CASE("line integral: constants, orientation, Stokes loop") {
  const VectorFn unit_x = [](Vec2) { return Vec2{1.0, 0.0}; };
  const Polyline seg = Polyline::segment({0.0, 0.5}, {3.0, 0.5});
  CHECK(line_integral(unit_x, seg, 4) == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(line_integral(unit_x, seg.reversed(), 4) ==
        doctest::Approx(-3.0).epsilon(1e-14));

  // circulation of the ideal-vortex potential flux/(2 pi r) phi_hat around
  // the axis equals the flux enclosed, O(dl^2) in the chord length
  const double flux = 2.7;
  const VectorFn vortex = [&](Vec2 p) {
    const double r2 = p.x * p.x + p.y * p.y;
    return Vec2{-p.y, p.x} * (flux / (2.0 * kPi * r2));
  };
  auto loop_err = [&](int n) {
    return std::abs(line_integral(vortex, Polyline::circle({0, 0}, 1.0, n)) -
                    flux);
  };
  CHECK(loop_err(512) < 1e-4);
  CHECK(order_of(loop_err(256), loop_err(512)) ==
        doctest::Approx(2.0).epsilon(0.1));

  // closed path of reversed orientation negates
  const Polyline loop = Polyline::circle({0, 0}, 1.0, 64);
  CHECK(line_integral(vortex, loop) ==
        doctest::Approx(-line_integral(vortex, loop.reversed())).epsilon(1e-13));
}

TEST_CASE("line integral over a sampled field uses interpolation and masks") {
  GridSpec g = GridSpec::cover(41, 41, -1.0, -1.0, 2.0, 2.0);
  const auto v = RealVectorField::sample(
      g, [](Vec2 p) { return p.y; }, [](Vec2) { return 0.0; });
  const Polyline seg = Polyline::segment({-0.5, 0.25}, {0.5, 0.25});
  CHECK(line_integral(v, seg, 8) == doctest::Approx(0.25).epsilon(1e-12));

  CHECK_THROWS_AS(
      line_integral(v, Polyline::segment({-0.5, 0.0}, {5.0, 0.0}), 4),
      DomainError);

  g.apply_mask([](Vec2 p) { return p.norm() <= 0.2; });
  const auto vm = RealVectorField::sample(
      g, [](Vec2 p) { return p.y; }, [](Vec2) { return 0.0; });
  CHECK_THROWS_AS(line_integral(vm, Polyline::segment({-0.5, 0.0}, {0.5, 0.0}), 8),
                  MaskedRegionError);
}

TEST_CASE("path-ordered product: abelian exactness and inverses") {
  // abelian connection Q = i grad(Omega) with Omega = a.x + b.y
  const double ax = 0.8, by = -1.4;
  const ConnectionFn conn = make_connection(
      [&](Vec2) { return Vec2{ax, by}; },
      [](Vec2) { return std::array<Complex, 2>{Complex{0, 0}, Complex{0, 0}}; });

  Polyline path;
  path.points = {{0.0, 0.0}, {0.7, 0.2}, {1.0, 1.0}};
  const double omega_delta = ax * 1.0 + by * 1.0;  // Omega(end) - Omega(start)
  const Quaternion u = path_ordered_product(conn, path, 16);
  CHECK(std::abs(u.z - std::polar(1.0, omega_delta)) < 1e-12);
  CHECK(std::abs(u.zeta) < 1e-14);

  // path followed by its reversal is the identity
  Polyline there_and_back = path;
  for (auto it = path.points.rbegin() + 1; it != path.points.rend(); ++it) {
    there_and_back.points.push_back(*it);
  }
  const Quaternion round_trip = path_ordered_product(conn, there_and_back, 16);
  CHECK((round_trip - Quaternion::one()).norm() < 1e-10);
}

TEST_CASE("path-ordered product: unit norm and non-abelian refinement") {
  // smooth non-abelian connection mixing i and j directions
  const ConnectionFn conn = [](Vec2 p) -> std::array<Quaternion, 2> {
    const Quaternion qx{Complex{0.0, 0.6 * std::sin(p.y)},
                        Complex{0.4, 0.3 * p.x}};
    const Quaternion qy{Complex{0.0, 0.5 * p.x},
                        Complex{0.2 * std::cos(p.x), -0.25}};
    return {qx, qy};
  };
  Polyline path;
  path.points = {{0.0, 0.0}, {1.0, 0.3}, {1.5, 1.2}};

  const Quaternion ref = path_ordered_product(conn, path, 1 << 12);
  for (int refinement : {4, 8, 16, 32, 64}) {
    CHECK(path_ordered_product(conn, path, refinement).norm() ==
          doctest::Approx(1.0).epsilon(1e-12));
  }
  // doubling the refinement cuts the error by at least 3x (first-order
  // product integrator in the commutator terms)
  double prev_err = (path_ordered_product(conn, path, 8) - ref).norm();
  for (int refinement : {16, 32, 64, 128}) {
    const double err = (path_ordered_product(conn, path, refinement) - ref).norm();
    CHECK(prev_err / err >= 3.0);
    prev_err = err;
  }

  // a connection with a real part must be rejected
  const ConnectionFn bad = [](Vec2) -> std::array<Quaternion, 2> {
    return {Quaternion{Complex{0.1, 0.0}, {}}, Quaternion{}};
  };
  CHECK_THROWS_AS(path_ordered_product(bad, path, 4), DomainError);
}

TEST_CASE("csv export carries coordinates then components") {
  const GridSpec g = GridSpec::cover(3, 3, 0.0, 0.0, 1.0, 1.0);
  const auto f = RealField::sample(g, [](Vec2 p) { return p.x + 10.0 * p.y; });
  const std::string csv = field_csv(f, "value");
  CHECK(csv.substr(0, csv.find('\n')) == "x,y,value");
  CHECK(csv.find("0.5,0,0.5") != std::string::npos);
  CHECK(csv.find("1,1,11") != std::string::npos);
}
