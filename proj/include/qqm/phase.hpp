#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <utility>

#include "qqm/fd_ops.hpp"
#include "qqm/grid.hpp"
#include "qqm/quaternion.hpp"

namespace qqm {

/// One real angle field, analytically when possible. The gradient and
/// laplacian closures are optional: sampling falls back to finite
/// differences of the sampled values. Supplying the gradient directly is
/// the supported route for multivalued angles, where only the gradient is
/// globally defined.
struct AngleSpec {
  std::function<double(Vec2)> value;
  std::function<Vec2(Vec2)> gradient;
  std::function<double(Vec2)> laplacian;

  static AngleSpec constant(double c) {
    return {[c](Vec2) { return c; }, [](Vec2) { return Vec2{0.0, 0.0}; },
            [](Vec2) { return 0.0; }};
  }

  static AngleSpec linear(double c0, Vec2 slope) {
    return {[=](Vec2 p) { return c0 + slope.x * p.x + slope.y * p.y; },
            [=](Vec2) { return slope; }, [](Vec2) { return 0.0; }};
  }

  /// c0 + amp * sin(k.p + phase), with exact derivatives.
  static AngleSpec sinusoid(double c0, double amp, Vec2 k, double phase) {
    return {[=](Vec2 p) {
              return c0 + amp * std::sin(k.x * p.x + k.y * p.y + phase);
            },
            [=](Vec2 p) {
              const double c = amp * std::cos(k.x * p.x + k.y * p.y + phase);
              return Vec2{k.x * c, k.y * c};
            },
            [=](Vec2 p) {
              return -amp * (k.x * k.x + k.y * k.y) *
                     std::sin(k.x * p.x + k.y * p.y + phase);
            }};
  }
};

/// The three angles (theta, gamma, omega) of the unit phase
/// K = cos(theta) e^{i gamma} + sin(theta) e^{i omega} j.
struct PhaseTriple {
  AngleSpec theta, gamma, omega;
};

/// Phase angles and their first two derivatives sampled on a grid.
/// Analytic derivative closures are preferred; finite differences of the
/// sampled values are the fallback.
struct PhaseData {
  RealField theta, gamma, omega;
  RealVectorField grad_theta, grad_gamma, grad_omega;
  RealField lap_theta, lap_gamma, lap_omega;

  const GridSpec& grid() const { return theta.grid(); }

  static PhaseData build(const PhaseTriple& ph, const GridSpec& grid) {
    auto one = [&grid](const AngleSpec& a, RealField& val, RealVectorField& g,
                       RealField& lap) {
      if (!a.value) {
        throw DomainError("PhaseData: angle value closure is required");
      }
      val = RealField::sample(grid, a.value);
      g = a.gradient ? RealVectorField::sample(
                           grid, [&](Vec2 p) { return a.gradient(p).x; },
                           [&](Vec2 p) { return a.gradient(p).y; })
                     : fd_gradient(val);
      lap = a.laplacian ? RealField::sample(grid, a.laplacian)
                        : fd_laplacian(val);
    };
    PhaseData d;
    one(ph.theta, d.theta, d.grad_theta, d.lap_theta);
    one(ph.gamma, d.gamma, d.grad_gamma, d.lap_gamma);
    one(ph.omega, d.omega, d.grad_omega, d.lap_omega);
    return d;
  }

  double max_grad_theta() const {
    const GridSpec& g = grid();
    double m = 0.0;
    for (int j = 0; j < g.ny; ++j) {
      for (int i = 0; i < g.nx; ++i) {
        if (g.masked(i, j)) continue;
        m = std::max(m, Vec2{grad_theta.x(i, j), grad_theta.y(i, j)}.norm());
      }
    }
    return m;
  }
};

/// Sampled unit phase field K.
inline QuatField k_field(const PhaseData& ph) {
  const GridSpec& g = ph.grid();
  QuatField K{ComplexField(g), ComplexField(g)};
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      if (g.masked(i, j)) continue;
      const Quaternion k = k_from_angles(
          {ph.theta.at(i, j), ph.gamma.at(i, j), ph.omega.at(i, j)});
      K.z.at(i, j) = k.z;
      K.zeta.at(i, j) = k.zeta;
    }
  }
  return K;
}

/// Schematic derivatives of K: grad K = p e^{i gamma} + q e^{i omega} j and
/// lap K = u e^{i gamma} + v e^{i omega} j.
struct KDerivatives {
  ComplexVectorField p, qvec;
  ComplexField u, v;
};

inline KDerivatives k_derivatives_analytic(const PhaseData& ph) {
  const GridSpec& g = ph.grid();
  KDerivatives kd{ComplexVectorField(g), ComplexVectorField(g),
                  ComplexField(g), ComplexField(g)};
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      if (g.masked(i, j)) continue;
      const double ct = std::cos(ph.theta.at(i, j));
      const double st = std::sin(ph.theta.at(i, j));
      const Vec2 gt{ph.grad_theta.x(i, j), ph.grad_theta.y(i, j)};
      const Vec2 gg{ph.grad_gamma.x(i, j), ph.grad_gamma.y(i, j)};
      const Vec2 go{ph.grad_omega.x(i, j), ph.grad_omega.y(i, j)};

      kd.p.x(i, j) = Complex{-st * gt.x, ct * gg.x};
      kd.p.y(i, j) = Complex{-st * gt.y, ct * gg.y};
      kd.qvec.x(i, j) = Complex{ct * gt.x, st * go.x};
      kd.qvec.y(i, j) = Complex{ct * gt.y, st * go.y};

      kd.u.at(i, j) =
          Complex{-ct * (gg.dot(gg) + gt.dot(gt)) - st * ph.lap_theta.at(i, j),
                  ct * ph.lap_gamma.at(i, j) - 2.0 * st * gg.dot(gt)};
      kd.v.at(i, j) =
          Complex{-st * (go.dot(go) + gt.dot(gt)) + ct * ph.lap_theta.at(i, j),
                  st * ph.lap_omega.at(i, j) + 2.0 * ct * go.dot(gt)};
    }
  }
  return kd;
}

/// The proportionality factor between the two split equations. A constant
/// or a full complex field.
struct LambdaField {
  std::function<Complex(Vec2)> fn;

  static LambdaField constant(Complex c) {
    return {[c](Vec2) { return c; }};
  }
  static LambdaField of(std::function<Complex(Vec2)> f) {
    return {std::move(f)};
  }

  ComplexField sample(const GridSpec& grid) const {
    return ComplexField::sample(grid, fn);
  }
};

/// Connection pair Q = alpha i + beta j sampled on a grid, with
/// eta = Q.Q = -(|alpha|^2 + |beta|^2) <= 0.
struct PotentialPair {
  RealVectorField alpha;
  ComplexVectorField beta;
  RealField eta;

  const GridSpec& grid() const { return alpha.grid(); }

  static PotentialPair from_fields(RealVectorField a, ComplexVectorField b) {
    PotentialPair pot;
    RealField eta(a.grid());
    const GridSpec& g = a.grid();
    for (int j = 0; j < g.ny; ++j) {
      for (int i = 0; i < g.nx; ++i) {
        if (g.masked(i, j)) continue;
        eta.at(i, j) = -(a.x(i, j) * a.x(i, j) + a.y(i, j) * a.y(i, j) +
                         std::norm(b.x(i, j)) + std::norm(b.y(i, j)));
      }
    }
    pot.alpha = std::move(a);
    pot.beta = std::move(b);
    pot.eta = std::move(eta);
    return pot;
  }
};

/// Largest violation of the reality constraint (tan^2(theta) - |lambda|^2)
/// grad(theta) = 0 that makes the alpha of potentials_from_phase real.
inline double reality_check(const PhaseData& ph, const ComplexField& lambda) {
  const GridSpec& g = ph.grid();
  double worst = 0.0;
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      if (g.masked(i, j)) continue;
      const double ct = std::cos(ph.theta.at(i, j));
      const double st = std::sin(ph.theta.at(i, j));
      if (std::abs(ct) < 1e-9) {
        throw SingularConfigError(
            "reality_check: theta pinned at an odd multiple of pi/2", i, j);
      }
      const double tan2 = (st * st) / (ct * ct);
      const double gt_norm =
          Vec2{ph.grad_theta.x(i, j), ph.grad_theta.y(i, j)}.norm();
      worst = std::max(
          worst, std::abs(tan2 - std::norm(lambda.at(i, j))) * gt_norm);
    }
  }
  return worst;
}

/// Vector potentials determined by the phase angles and lambda:
///   alpha = [grad(gamma) + |l|^2 grad(omega)
///            + i (tan - |l|^2 cot)(theta) grad(theta)] / (1 + |l|^2)
///   beta  = l [2 grad(theta)/sin(2 theta) + i grad(gamma - omega)] / (1+|l|^2)
/// The imaginary part of alpha is certified zero by reality_check before
/// anything is computed; the grad(theta)/sin(2 theta) term is defined as 0
/// wherever grad(theta) vanishes.
inline PotentialPair potentials_from_phase(const PhaseData& ph,
                                           const ComplexField& lambda,
                                           double reality_tol = 1e-10) {
  const double violation = reality_check(ph, lambda);
  if (violation > reality_tol) {
    throw ConstraintError("potentials_from_phase: alpha would not be real",
                          violation);
  }
  const GridSpec& g = ph.grid();
  RealVectorField alpha(g);
  ComplexVectorField beta(g);
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      if (g.masked(i, j)) continue;
      const Complex lam = lambda.at(i, j);
      const double l2 = std::norm(lam);
      const double denom = 1.0 + l2;
      const Vec2 gt{ph.grad_theta.x(i, j), ph.grad_theta.y(i, j)};
      const Vec2 gg{ph.grad_gamma.x(i, j), ph.grad_gamma.y(i, j)};
      const Vec2 go{ph.grad_omega.x(i, j), ph.grad_omega.y(i, j)};

      alpha.x(i, j) = (gg.x + l2 * go.x) / denom;
      alpha.y(i, j) = (gg.y + l2 * go.y) / denom;

      Vec2 theta_term{0.0, 0.0};
      if (gt.norm() > 0.0) {
        const double s2t = std::sin(2.0 * ph.theta.at(i, j));
        if (std::abs(s2t) < 1e-9) {
          throw SingularConfigError(
              "potentials_from_phase: grad(theta) != 0 with sin(2 theta) ~ 0",
              i, j);
        }
        theta_term = gt * (2.0 / s2t);
      }
      const Vec2 gd = gg - go;
      const Complex factor = lam / denom;
      beta.x(i, j) = factor * Complex{theta_term.x, gd.x};
      beta.y(i, j) = factor * Complex{theta_term.y, gd.y};
    }
  }
  return PotentialPair::from_fields(std::move(alpha), std::move(beta));
}

/// A phase construction together with everything the residual operations
/// consume.
struct FamilyResult {
  PhaseData phase;
  QuatField K;
  PotentialPair pot;
  std::optional<ComplexField> lambda;  // engaged for the two-angle family
  std::function<Complex(Vec2)> lambda_fn;
};

/// The one-angle solution family K = e^{i omega} L with L a constant unit
/// quaternion: alpha = grad(omega), beta = 0. Reduces to the complex
/// geometric phase at L = 1.
inline FamilyResult family_simple(const AngleSpec& omega, const Quaternion& L,
                                  const GridSpec& grid) {
  if (std::abs(L.norm() - 1.0) > 1e-12) {
    throw DomainError("family_simple: L must be a unit quaternion");
  }
  // rewrite e^{i omega} L in phase-angle form
  const double theta0 = std::atan2(std::abs(L.zeta), std::abs(L.z));
  const double gamma0 = std::abs(L.z) > 0.0 ? std::arg(L.z) : 0.0;
  const double omega0 = std::abs(L.zeta) > 0.0 ? std::arg(L.zeta) : 0.0;

  auto shifted = [](const AngleSpec& a, double offset) {
    AngleSpec s = a;
    auto base = a.value;
    s.value = [base, offset](Vec2 p) { return base(p) + offset; };
    return s;
  };

  PhaseTriple ph{AngleSpec::constant(theta0), shifted(omega, gamma0),
                 shifted(omega, omega0)};
  FamilyResult out;
  out.phase = PhaseData::build(ph, grid);
  out.K = k_field(out.phase);
  out.pot = PotentialPair::from_fields(out.phase.grad_omega,
                                       ComplexVectorField(grid));
  out.lambda_fn = [](Vec2) { return Complex{0.0, 0.0}; };
  return out;
}

/// The two-angle family with constant theta:
///   lambda = -tan(theta) e^{i(gamma+omega)},
///   alpha  = cos^2 grad(gamma) + sin^2 grad(omega),
///   beta   = -i sin cos e^{i(gamma+omega)} grad(gamma - omega).
/// The certifying identity grad K = Q K holds pointwise.
inline FamilyResult family_ab(const PhaseTriple& ph, const GridSpec& grid) {
  FamilyResult out;
  out.phase = PhaseData::build(ph, grid);
  if (out.phase.max_grad_theta() > 1e-12) {
    throw DomainError("family_ab: theta must be constant");
  }
  const double theta = out.phase.theta.at(0, 0);
  const double ct = std::cos(theta);
  const double st = std::sin(theta);
  if (std::abs(st) < 1e-9 || std::abs(ct) < 1e-9) {
    throw DomainError(
        "family_ab: theta at a multiple of pi/2 degenerates to the complex "
        "case");
  }

  out.K = k_field(out.phase);

  const GridSpec& g = out.phase.grid();
  RealVectorField alpha(g);
  ComplexVectorField beta(g);
  ComplexField lambda(g);
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      if (g.masked(i, j)) continue;
      const Vec2 gg{out.phase.grad_gamma.x(i, j), out.phase.grad_gamma.y(i, j)};
      const Vec2 go{out.phase.grad_omega.x(i, j), out.phase.grad_omega.y(i, j)};
      alpha.x(i, j) = ct * ct * gg.x + st * st * go.x;
      alpha.y(i, j) = ct * ct * gg.y + st * st * go.y;
      const Complex phase_factor = std::polar(
          1.0, out.phase.gamma.at(i, j) + out.phase.omega.at(i, j));
      const Complex coeff = Complex{0.0, -1.0} * st * ct * phase_factor;
      beta.x(i, j) = coeff * (gg.x - go.x);
      beta.y(i, j) = coeff * (gg.y - go.y);
      lambda.at(i, j) = -(st / ct) * phase_factor;
    }
  }
  out.pot = PotentialPair::from_fields(std::move(alpha), std::move(beta));
  out.lambda = std::move(lambda);

  auto gamma_v = ph.gamma.value;
  auto omega_v = ph.omega.value;
  const double tant = st / ct;
  out.lambda_fn = [gamma_v, omega_v, tant](Vec2 p) {
    return -tant * std::polar(1.0, gamma_v(p) + omega_v(p));
  };
  return out;
}

/// Numeric curls of both potentials plus the closed-form curl of beta,
///   curl(beta) = -sin(2 theta) e^{i(gamma+omega)} (grad gamma x grad omega).
struct CurlFields {
  RealField curl_alpha;
  ComplexField curl_beta_numeric;
  ComplexField curl_beta_analytic;
};

inline CurlFields curl_fields(const PotentialPair& pot, const PhaseData& ph) {
  CurlFields out;
  out.curl_alpha = fd_curl(pot.alpha);
  out.curl_beta_numeric = fd_curl(pot.beta);
  const GridSpec& g = ph.grid();
  out.curl_beta_analytic = ComplexField(g);
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      if (g.masked(i, j)) continue;
      const Vec2 gg{ph.grad_gamma.x(i, j), ph.grad_gamma.y(i, j)};
      const Vec2 go{ph.grad_omega.x(i, j), ph.grad_omega.y(i, j)};
      out.curl_beta_analytic.at(i, j) =
          -std::sin(2.0 * ph.theta.at(i, j)) *
          std::polar(1.0, ph.gamma.at(i, j) + ph.omega.at(i, j)) *
          gg.cross(go);
    }
  }
  return out;
}

}  // namespace qqm
