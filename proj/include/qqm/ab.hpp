#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "qqm/path.hpp"
#include "qqm/phase.hpp"

namespace qqm {

/// Ideal long solenoid: field B inside radius R, zero outside, vector
/// potential flux/(2 pi r) in the azimuthal direction outside.
struct SolenoidConfig {
  double R{0.0};
  double B{0.0};
  double flux{0.0};  // pi R^2 B
  double charge{1.0};
  double hbar{1.0};
  Vec2 center{0.0, 0.0};

  static SolenoidConfig from_field(double R, double B, double charge = 1.0,
                                   double hbar = 1.0, Vec2 center = {}) {
    SolenoidConfig c;
    c.R = R;
    c.B = B;
    c.flux = std::numbers::pi * R * R * B;
    c.charge = charge;
    c.hbar = hbar;
    c.center = center;
    c.validate();
    return c;
  }

  static SolenoidConfig from_flux(double R, double flux, double charge = 1.0,
                                  double hbar = 1.0, Vec2 center = {}) {
    SolenoidConfig c;
    c.R = R;
    c.flux = flux;
    c.B = flux / (std::numbers::pi * R * R);
    c.charge = charge;
    c.hbar = hbar;
    c.center = center;
    c.validate();
    return c;
  }

  void validate() const {
    if (R <= 0.0 || hbar <= 0.0) {
      throw DomainError("SolenoidConfig: R and hbar must be positive");
    }
    const double expected = std::numbers::pi * R * R * B;
    if (std::abs(flux - expected) >
        1e-14 * std::max({1.0, std::abs(flux), std::abs(expected)})) {
      throw DomainError("SolenoidConfig: flux must equal pi R^2 B");
    }
  }

  /// |alpha| = q flux / (2 pi hbar r).
  double alpha_magnitude(double r) const {
    return charge * flux / (2.0 * std::numbers::pi * hbar * r);
  }
};

/// alpha = (q/hbar) A evaluated outside the solenoid; the interior is a
/// masked region.
inline Vec2 solenoid_alpha(const SolenoidConfig& cfg, Vec2 p) {
  const Vec2 d = p - cfg.center;
  const double r = d.norm();
  if (r <= cfg.R) {
    throw MaskedRegionError("solenoid_alpha: point inside the solenoid");
  }
  const double c = cfg.charge * cfg.flux /
                   (2.0 * std::numbers::pi * cfg.hbar * r * r);
  return {-c * d.y, c * d.x};
}

/// Two-path interference setup around the solenoid. The azimuth used for
/// the phase reconstruction takes values in (-pi, pi] with its branch line
/// on the ray opposite the reference point; source and screen are placed
/// so that neither interference path crosses the branch line.
struct ABSetup {
  SolenoidConfig solenoid;
  double theta{std::numbers::pi / 4.0};
  GridSpec grid;
  Vec2 source{-3.0, 0.0};
  Vec2 via_upper{0.0, 1.5};
  Vec2 via_lower{0.0, -1.5};
  Vec2 screen_a{3.0, -2.0};
  Vec2 screen_b{3.0, 2.0};
  int screen_samples{65};
  Vec2 reference{1.0, 0.0};  // angle reconstruction reference point
  int quad_steps{256};       // quadrature per reconstruction leg
  int base_refinement{64};   // initial subsegments per path segment
  int max_refinement{1 << 15};
  double holonomy_tol{1e-6};

  void validate() const {
    solenoid.validate();
    if (theta < 1e-6 || theta > std::numbers::pi / 2.0 - 1e-6) {
      throw DomainError("ABSetup: theta must stay inside (0, pi/2)");
    }
    if (screen_samples < 2) {
      throw DomainError("ABSetup: need at least 2 screen samples");
    }
    const double r_ref = (reference - solenoid.center).norm();
    if (r_ref <= solenoid.R) {
      throw DomainError("ABSetup: reference point inside the solenoid");
    }
  }

  Polyline upper_path(Vec2 target) const {
    return {{source, via_upper, target}, false};
  }
  Polyline lower_path(Vec2 target) const {
    return {{source, via_lower, target}, false};
  }
  Vec2 screen_point(int k) const {
    const double t = static_cast<double>(k) / (screen_samples - 1);
    return screen_a + (screen_b - screen_a) * t;
  }
  Vec2 screen_center() const {
    return screen_a + (screen_b - screen_a) * 0.5;
  }

  /// Default experiment: unit charge and hbar, flux set directly.
  static ABSetup standard(double flux = 2.0,
                          double theta = std::numbers::pi / 4.0, int n = 129) {
    ABSetup s;
    s.solenoid = SolenoidConfig::from_flux(0.5, flux);
    s.theta = theta;
    s.grid = GridSpec::cover(n, n, -4.0, -4.0, 8.0, 8.0);
    const double R = s.solenoid.R;
    s.grid.apply_mask([R](Vec2 p) { return p.norm() <= R; });
    s.validate();
    return s;
  }
};

/// Azimuth of p around the solenoid center, in (-pi, pi].
inline double azimuth(const ABSetup& setup, Vec2 p) {
  const Vec2 d = p - setup.solenoid.center;
  return std::atan2(d.y, d.x);
}

/// The phase-gradient choice reproducing alpha through
/// cos^2(theta) gGamma + sin^2(theta) gOmega:
///   gGamma = -|alpha| sin(phi)/cos^2(theta) x_hat,
///   gOmega =  |alpha| cos(phi)/sin^2(theta) y_hat.
struct ABPhaseGradients {
  VectorFn g_gamma;
  VectorFn g_omega;
};

inline ABPhaseGradients ab_phase_gradients(const ABSetup& setup) {
  setup.validate();
  const SolenoidConfig cfg = setup.solenoid;
  const double ct2 = std::pow(std::cos(setup.theta), 2);
  const double st2 = std::pow(std::sin(setup.theta), 2);
  ABPhaseGradients out;
  out.g_gamma = [cfg, ct2](Vec2 p) {
    const Vec2 d = p - cfg.center;
    const double r = d.norm();
    if (r <= cfg.R) {
      throw MaskedRegionError("ab_phase_gradients: masked point");
    }
    const double amag = cfg.alpha_magnitude(r);
    const double sinphi = d.y / r;
    return Vec2{-amag * sinphi / ct2, 0.0};
  };
  out.g_omega = [cfg, st2](Vec2 p) {
    const Vec2 d = p - cfg.center;
    const double r = d.norm();
    if (r <= cfg.R) {
      throw MaskedRegionError("ab_phase_gradients: masked point");
    }
    const double amag = cfg.alpha_magnitude(r);
    const double cosphi = d.x / r;
    return Vec2{0.0, amag * cosphi / st2};
  };
  return out;
}

/// Line-integrates a prescribed gradient from the reference point along the
/// fixed convention: radial segment at the reference azimuth, then the
/// azimuthal arc at the target radius (swept directly from the reference
/// azimuth, never across the branch line).
inline double reconstruct_angle(const VectorFn& grad, const ABSetup& setup,
                                Vec2 target) {
  const Vec2 c = setup.solenoid.center;
  const Vec2 dref = setup.reference - c;
  const Vec2 dtar = target - c;
  const double r_ref = dref.norm();
  const double r = dtar.norm();
  if (r <= setup.solenoid.R) {
    throw MaskedRegionError("reconstruct_angle: target inside the solenoid");
  }
  const double phi_ref = std::atan2(dref.y, dref.x);
  const double phi = std::atan2(dtar.y, dtar.x);
  const int n = setup.quad_steps;

  double total = 0.0;
  // radial leg at phi_ref
  {
    const Vec2 rhat{std::cos(phi_ref), std::sin(phi_ref)};
    const double dr = (r - r_ref) / n;
    for (int k = 0; k < n; ++k) {
      const double rm = r_ref + (k + 0.5) * dr;
      total += grad(c + rhat * rm).dot(rhat) * dr;
    }
  }
  // azimuthal arc at radius r
  {
    const double dphi = (phi - phi_ref) / n;
    for (int k = 0; k < n; ++k) {
      const double pm = phi_ref + (k + 0.5) * dphi;
      const Vec2 rhat{std::cos(pm), std::sin(pm)};
      const Vec2 phat{-std::sin(pm), std::cos(pm)};
      total += grad(c + rhat * r).dot(phat) * r * dphi;
    }
  }
  return total;
}

/// Circulation of a prescribed gradient around the solenoid: nonzero for
/// the phase-gradient choice above, which is the path-dependence defect
/// that makes the reconstructed angles convention-dependent.
inline double loop_closure_defect(const ABSetup& setup, const VectorFn& grad,
                                  double radius, int segments = 4096) {
  return line_integral(grad,
                       Polyline::circle(setup.solenoid.center, radius, segments));
}

/// Reconstructed angle sum Gamma + Omega at a point (the phase of the
/// complex potential's prefactor).
inline double reconstructed_phase_sum(const ABSetup& setup,
                                      const ABPhaseGradients& grads,
                                      Vec2 p) {
  return reconstruct_angle(grads.g_gamma, setup, p) +
         reconstruct_angle(grads.g_omega, setup, p);
}

/// beta = -i sin cos e^{i(Gamma+Omega)} (gGamma - gOmega) with the
/// reconstructed angle sum.
inline std::function<std::array<Complex, 2>(Vec2)> beta_field(
    const ABSetup& setup) {
  setup.validate();
  const ABPhaseGradients grads = ab_phase_gradients(setup);
  const double sc = std::sin(setup.theta) * std::cos(setup.theta);
  return [setup, grads, sc](Vec2 p) -> std::array<Complex, 2> {
    const double phase = reconstructed_phase_sum(setup, grads, p);
    const Complex coeff = Complex{0.0, -sc} * std::polar(1.0, phase);
    const Vec2 diff = grads.g_gamma(p) - grads.g_omega(p);
    return {coeff * diff.x, coeff * diff.y};
  };
}

/// Closed-form curl of beta under the prescribed gradients,
///   curl beta = 2 |alpha|^2 sin(2 phi)/sin(2 theta) e^{i(Gamma+Omega)}.
inline std::function<Complex(Vec2)> beta_curl_analytic(const ABSetup& setup) {
  setup.validate();
  const ABPhaseGradients grads = ab_phase_gradients(setup);
  const double s2t = std::sin(2.0 * setup.theta);
  return [setup, grads, s2t](Vec2 p) {
    const Vec2 d = p - setup.solenoid.center;
    const double r = d.norm();
    if (r <= setup.solenoid.R) {
      throw MaskedRegionError("beta_curl_analytic: masked point");
    }
    const double amag = setup.solenoid.alpha_magnitude(r);
    const double sin2phi = 2.0 * (d.x / r) * (d.y / r);
    const double phase = reconstructed_phase_sum(setup, grads, p);
    return 2.0 * amag * amag * sin2phi / s2t * std::polar(1.0, phase);
  };
}

/// Closed-form curl of the prescribed gGamma: c (r^2 - 2 y^2) / r^4 with
/// c = |alpha| r / cos^2(theta) constant; the nonzero value is the reason
/// no global single-valued Gamma exists.
inline double gamma_gradient_curl_analytic(const ABSetup& setup, Vec2 p) {
  const Vec2 d = p - setup.solenoid.center;
  const double r2 = d.dot(d);
  const double c = setup.solenoid.charge * setup.solenoid.flux /
                   (2.0 * std::numbers::pi * setup.solenoid.hbar *
                    std::pow(std::cos(setup.theta), 2));
  return c * (r2 - 2.0 * d.y * d.y) / (r2 * r2);
}

inline double omega_gradient_curl_analytic(const ABSetup& setup, Vec2 p) {
  const Vec2 d = p - setup.solenoid.center;
  const double r2 = d.dot(d);
  const double c = setup.solenoid.charge * setup.solenoid.flux /
                   (2.0 * std::numbers::pi * setup.solenoid.hbar *
                    std::pow(std::sin(setup.theta), 2));
  return c * (r2 - 2.0 * d.x * d.x) / (r2 * r2);
}

/// Closed-form correction accounting for the reconstruction convention:
/// the reconstructed angles match the prescribed gradients only along the
/// convention paths, so the measurable curl of the sampled beta is the
/// closed form PLUS this term. Radial mismatch of grad(Gamma+Omega)rec is
/// (c_gamma - c_omega)(sin 2phi - sin 2phi_ref)/(2 r).
inline Complex beta_curl_reconstruction_correction(const ABSetup& setup,
                                                   Vec2 p) {
  const Vec2 c = setup.solenoid.center;
  const Vec2 d = p - c;
  const double r = d.norm();
  const double phi = std::atan2(d.y, d.x);
  const Vec2 dref = setup.reference - c;
  const double phi_ref = std::atan2(dref.y, dref.x);

  const double base = setup.solenoid.charge * setup.solenoid.flux /
                      (2.0 * std::numbers::pi * setup.solenoid.hbar);
  const double cg = base / std::pow(std::cos(setup.theta), 2);
  const double co = base / std::pow(std::sin(setup.theta), 2);

  const ABPhaseGradients grads = ab_phase_gradients(setup);
  const Vec2 diff = grads.g_gamma(p) - grads.g_omega(p);

  // radial unit vector and the gradient mismatch of the reconstructed sum
  const Vec2 rhat = d * (1.0 / r);
  const double mismatch =
      (cg - co) * (std::sin(2.0 * phi) - std::sin(2.0 * phi_ref)) / (2.0 * r);
  const Vec2 grad_mismatch = rhat * mismatch;

  const double sc = std::sin(setup.theta) * std::cos(setup.theta);
  const double phase = reconstructed_phase_sum(setup, grads, p);
  const Complex cG = Complex{0.0, -sc} * std::polar(1.0, phase);

  // curl(beta_sampled) - curl(beta_closed_form)
  //   = i cG [grad_mismatch x diff] + cG (curl gGamma - curl gOmega)
  const Complex term1 = kImag * cG * grad_mismatch.cross(diff);
  const Complex term2 = cG * (gamma_gradient_curl_analytic(setup, p) -
                              omega_gradient_curl_analytic(setup, p));
  return term1 + term2;
}

/// Connection Q = alpha i + beta j for the holonomy products. The complex
/// limit (beta off) keeps only the abelian magnetic part.
inline ConnectionFn ab_connection(const ABSetup& setup, bool with_beta) {
  const SolenoidConfig cfg = setup.solenoid;
  if (!with_beta) {
    return [cfg](Vec2 p) -> std::array<Quaternion, 2> {
      const Vec2 a = solenoid_alpha(cfg, p);
      return {Quaternion{kImag * a.x, {0.0, 0.0}},
              Quaternion{kImag * a.y, {0.0, 0.0}}};
    };
  }
  const auto beta = beta_field(setup);
  return [cfg, beta](Vec2 p) -> std::array<Quaternion, 2> {
    const Vec2 a = solenoid_alpha(cfg, p);
    const auto b = beta(p);
    return {Quaternion{kImag * a.x, b[0]}, Quaternion{kImag * a.y, b[1]}};
  };
}

struct HolonomyPair {
  Quaternion k1;
  Quaternion k2;
  double witness{0.0};       // |K1 K2 - K2 K1|
  int refinement_used{0};
  double last_change{0.0};   // |K(2r) - K(r)| at acceptance
};

/// Path-ordered holonomies along both interference paths, refined by
/// doubling until both change by less than the configured tolerance.
inline HolonomyPair holonomy_pair(const ABSetup& setup, const ConnectionFn& conn,
                                  Vec2 target) {
  const Polyline p1 = setup.upper_path(target);
  const Polyline p2 = setup.lower_path(target);
  int refinement = setup.base_refinement;
  Quaternion k1 = path_ordered_product(conn, p1, refinement);
  Quaternion k2 = path_ordered_product(conn, p2, refinement);
  double change = std::numeric_limits<double>::infinity();
  while (refinement < setup.max_refinement) {
    const Quaternion k1f = path_ordered_product(conn, p1, 2 * refinement);
    const Quaternion k2f = path_ordered_product(conn, p2, 2 * refinement);
    change = std::max((k1f - k1).norm(), (k2f - k2).norm());
    k1 = k1f;
    k2 = k2f;
    refinement *= 2;
    if (change < setup.holonomy_tol) break;
  }
  if (change >= setup.holonomy_tol) {
    throw DomainError("holonomy_pair: no refinement convergence within cap");
  }
  HolonomyPair out;
  out.k1 = k1;
  out.k2 = k2;
  out.witness = (k1 * k2 - k2 * k1).norm();
  out.refinement_used = refinement;
  out.last_change = change;
  return out;
}

inline HolonomyPair holonomy_pair(const ABSetup& setup, bool with_beta = true) {
  return holonomy_pair(setup, ab_connection(setup, with_beta),
                       setup.screen_center());
}

struct InterferenceResult {
  std::vector<double> screen_coord;       // arc position along the screen
  std::vector<double> complex_intensity;
  std::vector<double> quaternionic_intensity;
  double fringe_shift_complex{0.0};       // best-fit two-beam phase offset
  double fringe_shift_quaternionic{0.0};
  double abelian_phase{0.0};              // loop phase from the alpha circulation
  double witness{0.0};                    // at the screen center
  double loop_defect_gamma{0.0};
  double loop_defect_omega{0.0};
  Quaternion k1_center, k2_center;
};

namespace detail {

/// Best-fit offset delta for a two-beam pattern I = c0 + A cos(psi) +
/// B sin(psi) with known geometric phase psi per sample; delta =
/// atan2(-B, A). Full normal equations: the basis is not orthogonal over an
/// arbitrary set of screen samples.
inline double fit_fringe_shift(const std::vector<double>& psi,
                               const std::vector<double>& intensity) {
  double s1 = 0, sc = 0, ss = 0, scc = 0, sss = 0, scs = 0;
  double sy = 0, syc = 0, sys = 0;
  for (std::size_t k = 0; k < psi.size(); ++k) {
    const double c = std::cos(psi[k]);
    const double s = std::sin(psi[k]);
    const double y = intensity[k];
    s1 += 1.0;
    sc += c;
    ss += s;
    scc += c * c;
    sss += s * s;
    scs += c * s;
    sy += y;
    syc += y * c;
    sys += y * s;
  }
  // solve [s1 sc ss; sc scc scs; ss scs sss] (c0, A, B) = (sy, syc, sys)
  const double m[3][3] = {{s1, sc, ss}, {sc, scc, scs}, {ss, scs, sss}};
  const double rhs[3] = {sy, syc, sys};
  const double det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                     m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                     m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
  if (std::abs(det) < 1e-14) {
    return 0.0;  // degenerate sampling; no resolvable fringe
  }
  auto det3 = [&](int col) {
    double t[3][3];
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) t[r][c] = (c == col) ? rhs[r] : m[r][c];
    }
    return t[0][0] * (t[1][1] * t[2][2] - t[1][2] * t[2][1]) -
           t[0][1] * (t[1][0] * t[2][2] - t[1][2] * t[2][0]) +
           t[0][2] * (t[1][0] * t[2][1] - t[1][1] * t[2][0]);
  };
  const double A = det3(1) / det;
  const double B = det3(2) / det;
  return std::atan2(-B, A);
}

}  // namespace detail

/// Two-path interference pattern with plane-wave kinematics: for each
/// screen point the complex pattern uses the abelian phase difference, the
/// quaternionic pattern uses the two holonomies.
inline InterferenceResult interference_pattern(const ABSetup& setup, double k,
                                               bool with_beta = true) {
  setup.validate();
  const ConnectionFn conn = ab_connection(setup, with_beta);
  const ABPhaseGradients grads = ab_phase_gradients(setup);
  const VectorFn alpha_fn = [cfg = setup.solenoid](Vec2 p) {
    return solenoid_alpha(cfg, p);
  };

  InterferenceResult out;
  std::vector<double> geometric_phase;
  out.screen_coord.reserve(setup.screen_samples);

  for (int s = 0; s < setup.screen_samples; ++s) {
    const Vec2 target = setup.screen_point(s);
    const Polyline p1 = setup.upper_path(target);
    const Polyline p2 = setup.lower_path(target);
    const double l1 = p1.length();
    const double l2 = p2.length();

    // abelian phases along each path
    const double a1 = line_integral(alpha_fn, p1, 512);
    const double a2 = line_integral(alpha_fn, p2, 512);
    const double delta = a2 - a1;

    const Complex beam1 = std::polar(1.0, k * l1);
    const Complex beam2 = std::polar(1.0, k * l2 + delta);
    out.complex_intensity.push_back(std::norm(beam1 + beam2));

    const HolonomyPair h = holonomy_pair(setup, conn, target);
    const Quaternion q1 = right_mul_complex(h.k1, std::polar(1.0, k * l1));
    const Quaternion q2 = right_mul_complex(h.k2, std::polar(1.0, k * l2));
    const double qi = (q1 + q2).norm_sq();
    if (qi < 0.0 || !std::isfinite(qi)) {
      throw DomainError("interference_pattern: intensity must be finite");
    }
    out.quaternionic_intensity.push_back(qi);

    out.screen_coord.push_back((target - setup.screen_a).norm());
    geometric_phase.push_back(k * (l1 - l2));

    if (s == setup.screen_samples / 2) {
      out.k1_center = h.k1;
      out.k2_center = h.k2;
      out.witness = h.witness;
    }
  }

  out.fringe_shift_complex =
      detail::fit_fringe_shift(geometric_phase, out.complex_intensity);
  out.fringe_shift_quaternionic =
      detail::fit_fringe_shift(geometric_phase, out.quaternionic_intensity);

  const double probe_radius = 2.0 * setup.solenoid.R;
  out.abelian_phase = line_integral(
      alpha_fn, Polyline::circle(setup.solenoid.center, probe_radius, 4096));
  out.loop_defect_gamma =
      loop_closure_defect(setup, grads.g_gamma, probe_radius);
  out.loop_defect_omega =
      loop_closure_defect(setup, grads.g_omega, probe_radius);
  return out;
}

enum class CurlComponentConvention { Modulus, RealPart, ImagPart };

struct RadialForceMap {
  RealField force;
  std::string metadata;
};

/// Qualitative radial Lorentz-force map F_r = q v * component(curl beta).
/// The physical reading of the complex curl is an open interpretation;
/// the output is labeled speculative.
inline RadialForceMap lorentz_radial_force(
    const ABSetup& setup, double azimuthal_speed,
    CurlComponentConvention convention = CurlComponentConvention::Modulus) {
  setup.validate();
  const auto curl = beta_curl_analytic(setup);
  RealField force(setup.grid);
  const GridSpec& g = setup.grid;
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      if (g.masked(i, j)) continue;
      const Complex c = curl(g.point(i, j));
      double comp = 0.0;
      switch (convention) {
        case CurlComponentConvention::Modulus:
          comp = std::abs(c);
          break;
        case CurlComponentConvention::RealPart:
          comp = c.real();
          break;
        case CurlComponentConvention::ImagPart:
          comp = c.imag();
          break;
      }
      force.at(i, j) = setup.solenoid.charge * azimuthal_speed * comp;
    }
  }
  RadialForceMap out;
  out.force = std::move(force);
  out.metadata =
      "speculative: qualitative Lorentz-force reading of the complex curl; "
      "the physical nature of this field is an open question";
  return out;
}

}  // namespace qqm
