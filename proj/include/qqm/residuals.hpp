#pragma once

#include <random>
#include <vector>

#include "qqm/phase.hpp"
#include "qqm/residual_report.hpp"

namespace qqm {

namespace detail {

/// Shared finite-difference ingredients for the constraint evaluations.
/// Every derivative here comes from the same second-order stencils, so the
/// quaternion-arithmetic route and the split-formula route agree to
/// rounding, while the truncation error of the certification itself is a
/// uniform O(h^2).
struct ResidualIngredients {
  QuatField K;
  ComplexVectorField gKz, gKzeta;
  ComplexField lKz, lKzeta;
  RealField div_alpha;
  ComplexField div_beta;
  ComplexVectorField gphi;

  static ResidualIngredients build(const PhaseData& ph,
                                   const PotentialPair& pot,
                                   const ComplexField& phi) {
    ResidualIngredients ing;
    ing.K = k_field(ph);
    ing.gKz = fd_gradient(ing.K.z);
    ing.gKzeta = fd_gradient(ing.K.zeta);
    ing.lKz = fd_laplacian(ing.K.z);
    ing.lKzeta = fd_laplacian(ing.K.zeta);
    ing.div_alpha = fd_divergence(pot.alpha);
    ing.div_beta = fd_divergence(pot.beta);
    ing.gphi = fd_gradient(phi);
    return ing;
  }
};

/// Left-form constraint residual at one node, evaluated with plain
/// quaternion arithmetic:
///   [lap K - (div Q) K - 2 Q.grad K + (Q.Q) K] phi + 2 (grad K - Q K).grad phi
inline Quaternion master_at(const ResidualIngredients& ing,
                            const PotentialPair& pot, const ComplexField& phi,
                            int i, int j) {
  const Quaternion K = ing.K.at(i, j);
  const Quaternion lapK{ing.lKz.at(i, j), ing.lKzeta.at(i, j)};
  const Quaternion divQ{kImag * ing.div_alpha.at(i, j), ing.div_beta.at(i, j)};
  const Quaternion Qx{kImag * pot.alpha.x(i, j), pot.beta.x(i, j)};
  const Quaternion Qy{kImag * pot.alpha.y(i, j), pot.beta.y(i, j)};
  const Quaternion gKx{ing.gKz.x(i, j), ing.gKzeta.x(i, j)};
  const Quaternion gKy{ing.gKz.y(i, j), ing.gKzeta.y(i, j)};

  Quaternion bracket = lapK - divQ * K - 2.0 * (Qx * gKx + Qy * gKy) +
                       pot.eta.at(i, j) * K;
  Quaternion grad_term = right_mul_complex(gKx - Qx * K, ing.gphi.x(i, j)) +
                         right_mul_complex(gKy - Qy * K, ing.gphi.y(i, j));
  return right_mul_complex(bracket, phi.at(i, j)) + 2.0 * grad_term;
}

}  // namespace detail

/// Residual of the full constraint equation that the phase and potentials
/// must satisfy for every complex solution phi. Vanishes at O(h^2) exactly
/// when grad K = Q K holds, which is the certifying identity of both
/// solution families.
inline ResidualReport master_residual(const PhaseData& ph,
                                      const PotentialPair& pot,
                                      const ComplexField& phi) {
  const auto ing = detail::ResidualIngredients::build(ph, pot, phi);
  const GridSpec& g = ph.grid();
  RealField mag(g);
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      if (g.masked(i, j)) continue;
      mag.at(i, j) = detail::master_at(ing, pot, phi, i, j).norm();
    }
  }
  return make_report("master", std::move(mag));
}

struct SplitResiduals {
  ResidualReport complex_part;
  ResidualReport quaternion_part;
  /// max over nodes of | |master| - sqrt(cqe^2 + qqe^2) |
  double recombination_gap{0.0};
};

/// The symplectic split of the master constraint: the pure complex sector
/// and the pure quaternionic sector, evaluated from the schematic-derivative
/// formulas. Their recombination reproduces the master residual pointwise.
inline SplitResiduals split_residuals(const PhaseData& ph,
                                      const PotentialPair& pot,
                                      const ComplexField& phi) {
  const auto ing = detail::ResidualIngredients::build(ph, pot, phi);
  const GridSpec& g = ph.grid();
  RealField mag_c(g), mag_q(g);
  double gap = 0.0;
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      if (g.masked(i, j)) continue;
      const Complex Kz = ing.K.z.at(i, j);
      const Complex Kzc = std::conj(ing.K.zeta.at(i, j));
      const double ax = pot.alpha.x(i, j), ay = pot.alpha.y(i, j);
      const Complex bx = pot.beta.x(i, j), by = pot.beta.y(i, j);
      const double eta = pot.eta.at(i, j);
      const Complex diva = ing.div_alpha.at(i, j);
      const Complex divb = ing.div_beta.at(i, j);
      const Complex f = phi.at(i, j);
      const Complex fx = ing.gphi.x(i, j), fy = ing.gphi.y(i, j);

      // complex sector
      const Complex c_phi =
          ing.lKz.at(i, j) - kImag * diva * Kz -
          2.0 * kImag * (ax * ing.gKz.x(i, j) + ay * ing.gKz.y(i, j)) +
          eta * Kz + divb * Kzc +
          2.0 * (bx * std::conj(ing.gKzeta.x(i, j)) +
                 by * std::conj(ing.gKzeta.y(i, j)));
      const Complex c_gx = ing.gKz.x(i, j) - kImag * ax * Kz + bx * Kzc;
      const Complex c_gy = ing.gKz.y(i, j) - kImag * ay * Kz + by * Kzc;
      const Complex cqe = c_phi * f + 2.0 * (c_gx * fx + c_gy * fy);

      // quaternionic sector
      const Complex q_phi =
          std::conj(ing.lKzeta.at(i, j)) + kImag * diva * Kzc +
          2.0 * kImag * (ax * std::conj(ing.gKzeta.x(i, j)) +
                         ay * std::conj(ing.gKzeta.y(i, j))) +
          eta * Kzc - std::conj(divb) * Kz -
          2.0 * (std::conj(bx) * ing.gKz.x(i, j) +
                 std::conj(by) * ing.gKz.y(i, j));
      const Complex q_gx =
          std::conj(ing.gKzeta.x(i, j)) + kImag * ax * Kzc - std::conj(bx) * Kz;
      const Complex q_gy =
          std::conj(ing.gKzeta.y(i, j)) + kImag * ay * Kzc - std::conj(by) * Kz;
      const Complex qqe = q_phi * f + 2.0 * (q_gx * fx + q_gy * fy);

      mag_c.at(i, j) = std::abs(cqe);
      mag_q.at(i, j) = std::abs(qqe);

      const double master_norm = detail::master_at(ing, pot, phi, i, j).norm();
      const double recombined =
          std::sqrt(std::norm(cqe) + std::norm(qqe));
      gap = std::max(gap, std::abs(master_norm - recombined));
    }
  }
  SplitResiduals out;
  out.complex_part = make_report("complex_sector", std::move(mag_c));
  out.quaternion_part = make_report("quaternion_sector", std::move(mag_q));
  out.recombination_gap = gap;
  return out;
}

struct CoefficientResiduals {
  ResidualReport phi_coeff_complex;        // proportionality of phi terms
  ResidualReport phi_coeff_quaternion;     // (lambda-cleared partner)
  ResidualReport gradphi_coeff_complex;    // proportionality of grad-phi terms
  ResidualReport gradphi_coeff_quaternion;
  // complex-valued residual fields behind the reports (for sign-resolved use)
  ComplexField r_phi_complex, r_phi_quaternion;
};

/// The coefficient-proportionality conditions between the two split sectors.
/// Evaluated with the analytic schematic derivatives; the partner relations
/// that the factor lambda divides are evaluated in lambda-cleared form so
/// the lambda -> 0 limit stays total.
inline CoefficientResiduals coefficient_constraints(const PhaseData& ph,
                                                    const PotentialPair& pot,
                                                    const ComplexField& lambda) {
  const KDerivatives kd = k_derivatives_analytic(ph);
  const RealField div_alpha = fd_divergence(pot.alpha);
  const ComplexField div_beta = fd_divergence(pot.beta);
  const GridSpec& g = ph.grid();
  CoefficientResiduals out;
  out.r_phi_complex = ComplexField(g);
  out.r_phi_quaternion = ComplexField(g);
  RealField m1(g), m2(g), m3(g), m4(g);
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      if (g.masked(i, j)) continue;
      const double ct = std::cos(ph.theta.at(i, j));
      const double st = std::sin(ph.theta.at(i, j));
      const Complex lam = lambda.at(i, j);
      const double eta = pot.eta.at(i, j);
      const double ax = pot.alpha.x(i, j), ay = pot.alpha.y(i, j);
      const Complex bx = pot.beta.x(i, j), by = pot.beta.y(i, j);
      const Complex px = kd.p.x(i, j), py = kd.p.y(i, j);
      const Complex qxc = std::conj(kd.qvec.x(i, j));
      const Complex qyc = std::conj(kd.qvec.y(i, j));

      const Complex r1 =
          kd.u.at(i, j) - kImag * ct * div_alpha.at(i, j) -
          2.0 * kImag * (ax * px + ay * py) + ct * eta +
          lam * (ct * std::conj(div_beta.at(i, j)) +
                 2.0 * (std::conj(bx) * px + std::conj(by) * py));
      const Complex r2 =
          lam * (std::conj(kd.v.at(i, j)) + kImag * st * div_alpha.at(i, j) +
                 2.0 * kImag * (ax * qxc + ay * qyc) + st * eta) -
          (st * div_beta.at(i, j) + 2.0 * (bx * qxc + by * qyc));
      const Complex n1x = px - kImag * ct * ax + lam * ct * std::conj(bx);
      const Complex n1y = py - kImag * ct * ay + lam * ct * std::conj(by);
      const Complex n2x = lam * (qxc + kImag * st * ax) - st * bx;
      const Complex n2y = lam * (qyc + kImag * st * ay) - st * by;

      out.r_phi_complex.at(i, j) = r1;
      out.r_phi_quaternion.at(i, j) = r2;
      m1.at(i, j) = std::abs(r1);
      m2.at(i, j) = std::abs(r2);
      m3.at(i, j) = std::sqrt(std::norm(n1x) + std::norm(n1y));
      m4.at(i, j) = std::sqrt(std::norm(n2x) + std::norm(n2y));
    }
  }
  out.phi_coeff_complex = make_report("phi_coeff_complex", std::move(m1));
  out.phi_coeff_quaternion = make_report("phi_coeff_quaternion", std::move(m2));
  out.gradphi_coeff_complex =
      make_report("gradphi_coeff_complex", std::move(m3));
  out.gradphi_coeff_quaternion =
      make_report("gradphi_coeff_quaternion", std::move(m4));
  return out;
}

/// The single scalar constraint that remains after the coefficient
/// conditions are imposed. For constant theta it collapses to
///   prefactor * [ (i lap(gamma-omega) - |grad(gamma-omega)|^2) phi
///                 + 2 i grad(gamma-omega) . grad(phi) ],
/// whose prefactor vanishes identically for the two-angle family's lambda.
inline ResidualReport reduced_residual(const PhaseData& ph,
                                       const ComplexField& lambda,
                                       const ComplexField& phi) {
  const GridSpec& g = ph.grid();
  const ComplexVectorField gphi = fd_gradient(phi);
  const bool const_theta = ph.max_grad_theta() < 1e-12;

  // |lambda| and its gradient, needed only on the varying-theta branch
  RealField abs_lambda(g);
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      if (!g.masked(i, j)) abs_lambda.at(i, j) = std::abs(lambda.at(i, j));
    }
  }
  RealVectorField grad_abs_lambda =
      const_theta ? RealVectorField(g) : fd_gradient(abs_lambda);

  RealField mag(g);
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      if (g.masked(i, j)) continue;
      const double theta = ph.theta.at(i, j);
      const double ct = std::cos(theta), st = std::sin(theta);
      const Complex eg = std::polar(1.0, ph.gamma.at(i, j));
      const Complex eo = std::polar(1.0, -ph.omega.at(i, j));
      const Complex lam = lambda.at(i, j);
      const double l2 = std::norm(lam);
      const double denom = 1.0 + l2;
      const Vec2 gd{ph.grad_gamma.x(i, j) - ph.grad_omega.x(i, j),
                    ph.grad_gamma.y(i, j) - ph.grad_omega.y(i, j)};
      const double lap_d = ph.lap_gamma.at(i, j) - ph.lap_omega.at(i, j);
      const Complex f = phi.at(i, j);
      const Complex gd_dot_gphi = gd.x * gphi.x(i, j) + gd.y * gphi.y(i, j);

      const Complex mid_pref = (l2 * ct * eg + lam * st * eo) / denom;
      const Complex bracket =
          (kImag * lap_d - gd.dot(gd)) * f + 2.0 * kImag * gd_dot_gphi;

      if (const_theta) {
        mag.at(i, j) = std::abs(mid_pref * bracket);
        continue;
      }

      const Vec2 gt{ph.grad_theta.x(i, j), ph.grad_theta.y(i, j)};
      const Vec2 gl{grad_abs_lambda.x(i, j), grad_abs_lambda.y(i, j)};
      const double abs_lam = abs_lambda.at(i, j);
      const double s2t = std::sin(2.0 * theta);

      Complex t1 = 2.0 * kImag * abs_lam / (denom * denom) *
                   (ct * eg - lam * st * eo) * gl.dot(gd);
      Complex t2 = -2.0 * kImag / denom * (l2 * st * eg - lam * ct * eo) *
                   gd.dot(gt);
      Complex t3{0.0, 0.0};
      const double gt2 = gt.dot(gt);
      if (gt2 > 0.0) {
        if (std::abs(s2t) < 1e-9) {
          throw SingularConfigError(
              "reduced_residual: grad(theta) != 0 with sin(2 theta) ~ 0", i,
              j);
        }
        t3 = -(ct * eg + lam * st * eo) *
             (1.0 + 4.0 / (s2t * s2t) * l2 / (denom * denom)) * gt2;
      }
      const Complex t4 = -(st * eg - lam * ct * eo) * ph.lap_theta.at(i, j);

      Complex last{0.0, 0.0};
      const Complex gt_dot_gphi = gt.x * gphi.x(i, j) + gt.y * gphi.y(i, j);
      if (std::abs(gt_dot_gphi) > 0.0) {
        if (std::abs(st * ct) < 1e-9) {
          throw SingularConfigError(
              "reduced_residual: grad(theta) != 0 with sin cos ~ 0", i, j);
        }
        last = -2.0 / denom * (l2 * ct * eg - lam * st * eo) * gt_dot_gphi /
               (st * ct);
      }

      const Complex res =
          (t1 + t2 + t3 + t4) * f + mid_pref * bracket + last;
      mag.at(i, j) = std::abs(res);
    }
  }
  return make_report("reduced_constraint", std::move(mag));
}

struct RightFormResiduals {
  ResidualReport master;           // phi K substituted into the wave equation
  ResidualReport complex_part;     // pure complex sector
  ResidualReport quaternion_part;  // pure quaternionic sector
  double recombination_gap{0.0};
};

/// Residuals for the right-factored wave function Phi = phi K. The sector
/// formulas couple both phi and conj(phi).
inline RightFormResiduals right_form_residual(const PhaseData& ph,
                                              const PotentialPair& pot,
                                              const ComplexField& phi) {
  const auto ing = detail::ResidualIngredients::build(ph, pot, phi);
  const GridSpec& g = ph.grid();
  RealField mag_m(g), mag_c(g), mag_q(g);
  double gap = 0.0;
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      if (g.masked(i, j)) continue;
      const Quaternion K = ing.K.at(i, j);
      const Quaternion lapK{ing.lKz.at(i, j), ing.lKzeta.at(i, j)};
      const Quaternion divQ{kImag * ing.div_alpha.at(i, j),
                            ing.div_beta.at(i, j)};
      const Quaternion Qx{kImag * pot.alpha.x(i, j), pot.beta.x(i, j)};
      const Quaternion Qy{kImag * pot.alpha.y(i, j), pot.beta.y(i, j)};
      const Quaternion gKx{ing.gKz.x(i, j), ing.gKzeta.x(i, j)};
      const Quaternion gKy{ing.gKz.y(i, j), ing.gKzeta.y(i, j)};
      const Complex f = phi.at(i, j);
      const Complex fx = ing.gphi.x(i, j), fy = ing.gphi.y(i, j);
      const double eta = pot.eta.at(i, j);

      // quaternion-arithmetic route
      const Quaternion a2 =
          left_mul_complex(f, lapK) -
          2.0 * (Qx * left_mul_complex(f, gKx) + Qy * left_mul_complex(f, gKy)) -
          quat_mul(divQ - Quaternion(eta), left_mul_complex(f, K)) +
          2.0 * (left_mul_complex(fx, gKx) + left_mul_complex(fy, gKy)) -
          2.0 * quat_mul(right_mul_complex(Qx, fx) + right_mul_complex(Qy, fy),
                         K);

      // sector formulas, written with both phi and conj(phi)
      const Complex Kz = ing.K.z.at(i, j);
      const Complex Kzc = std::conj(ing.K.zeta.at(i, j));
      const double ax = pot.alpha.x(i, j), ay = pot.alpha.y(i, j);
      const Complex bx = pot.beta.x(i, j), by = pot.beta.y(i, j);
      const Complex diva = ing.div_alpha.at(i, j);
      const Complex divb = ing.div_beta.at(i, j);

      const Complex a3 =
          (ing.lKz.at(i, j) - kImag * diva * Kz -
           2.0 * kImag * (ax * ing.gKz.x(i, j) + ay * ing.gKz.y(i, j)) +
           eta * Kz) *
              f +
          (divb * Kzc + 2.0 * (bx * std::conj(ing.gKzeta.x(i, j)) +
                               by * std::conj(ing.gKzeta.y(i, j)))) *
              std::conj(f) +
          2.0 * ((ing.gKz.x(i, j) - kImag * ax * Kz) * fx +
                 (ing.gKz.y(i, j) - kImag * ay * Kz) * fy) +
          2.0 * (bx * Kzc * std::conj(fx) + by * Kzc * std::conj(fy));

      const Complex a4 =
          (std::conj(ing.lKzeta.at(i, j)) + kImag * diva * Kzc +
           2.0 * kImag * (ax * std::conj(ing.gKzeta.x(i, j)) +
                          ay * std::conj(ing.gKzeta.y(i, j))) +
           eta * Kzc) *
              std::conj(f) -
          (std::conj(divb) * Kz + 2.0 * (std::conj(bx) * ing.gKz.x(i, j) +
                                         std::conj(by) * ing.gKz.y(i, j))) *
              f +
          2.0 * ((std::conj(ing.gKzeta.x(i, j)) + kImag * ax * Kzc) *
                     std::conj(fx) +
                 (std::conj(ing.gKzeta.y(i, j)) + kImag * ay * Kzc) *
                     std::conj(fy)) -
          2.0 * (std::conj(bx) * Kz * fx + std::conj(by) * Kz * fy);

      mag_m.at(i, j) = a2.norm();
      mag_c.at(i, j) = std::abs(a3);
      mag_q.at(i, j) = std::abs(a4);
      gap = std::max(gap, std::abs(a2.norm() - std::sqrt(std::norm(a3) +
                                                         std::norm(a4))));
    }
  }
  RightFormResiduals out;
  out.master = make_report("right_form_master", std::move(mag_m));
  out.complex_part = make_report("right_form_complex_sector", std::move(mag_c));
  out.quaternion_part =
      make_report("right_form_quaternion_sector", std::move(mag_q));
  out.recombination_gap = gap;
  return out;
}

/// Right-form transcription of the coefficient conditions. The two wave
/// function factorisations must generate the same proportionality
/// conditions; this assembles them from the right-form sector formulas so
/// the agreement can be checked against coefficient_constraints.
inline CoefficientResiduals coefficient_constraints_right(
    const PhaseData& ph, const PotentialPair& pot, const ComplexField& lambda) {
  const KDerivatives kd = k_derivatives_analytic(ph);
  const RealField div_alpha = fd_divergence(pot.alpha);
  const ComplexField div_beta = fd_divergence(pot.beta);
  const GridSpec& g = ph.grid();
  CoefficientResiduals out;
  out.r_phi_complex = ComplexField(g);
  out.r_phi_quaternion = ComplexField(g);
  RealField m1(g), m2(g), m3(g), m4(g);
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      if (g.masked(i, j)) continue;
      const double ct = std::cos(ph.theta.at(i, j));
      const double st = std::sin(ph.theta.at(i, j));
      const Complex lam = lambda.at(i, j);
      const double eta = pot.eta.at(i, j);
      const double ax = pot.alpha.x(i, j), ay = pot.alpha.y(i, j);
      const Complex bx = pot.beta.x(i, j), by = pot.beta.y(i, j);
      const Complex px = kd.p.x(i, j), py = kd.p.y(i, j);
      const Complex qxc = std::conj(kd.qvec.x(i, j));
      const Complex qyc = std::conj(kd.qvec.y(i, j));

      // phi coefficient of the complex sector vs. lambda times the phi
      // coefficient of the quaternionic sector
      const Complex phi_c = kd.u.at(i, j) - kImag * ct * div_alpha.at(i, j) -
                            2.0 * kImag * (ax * px + ay * py) + ct * eta;
      const Complex phi_q = -(ct * std::conj(div_beta.at(i, j)) +
                              2.0 * (std::conj(bx) * px + std::conj(by) * py));
      const Complex r1 = phi_c - lam * phi_q;

      // conj(phi) coefficients, lambda-cleared
      const Complex conjphi_c =
          st * div_beta.at(i, j) + 2.0 * (bx * qxc + by * qyc);
      const Complex conjphi_q = std::conj(kd.v.at(i, j)) +
                                kImag * st * div_alpha.at(i, j) +
                                2.0 * kImag * (ax * qxc + ay * qyc) + st * eta;
      const Complex r2 = lam * conjphi_q - conjphi_c;

      const Complex n1x = (px - kImag * ct * ax) - lam * (-ct * std::conj(bx));
      const Complex n1y = (py - kImag * ct * ay) - lam * (-ct * std::conj(by));
      const Complex n2x = lam * (qxc + kImag * st * ax) - st * bx;
      const Complex n2y = lam * (qyc + kImag * st * ay) - st * by;

      out.r_phi_complex.at(i, j) = r1;
      out.r_phi_quaternion.at(i, j) = r2;
      m1.at(i, j) = std::abs(r1);
      m2.at(i, j) = std::abs(r2);
      m3.at(i, j) = std::sqrt(std::norm(n1x) + std::norm(n1y));
      m4.at(i, j) = std::sqrt(std::norm(n2x) + std::norm(n2y));
    }
  }
  out.phi_coeff_complex = make_report("phi_coeff_complex_right", std::move(m1));
  out.phi_coeff_quaternion =
      make_report("phi_coeff_quaternion_right", std::move(m2));
  out.gradphi_coeff_complex =
      make_report("gradphi_coeff_complex_right", std::move(m3));
  out.gradphi_coeff_quaternion =
      make_report("gradphi_coeff_quaternion_right", std::move(m4));
  return out;
}

struct ProbeOutcome {
  double min_violation{0.0};
  std::vector<double> violations;
};

namespace detail {

struct ProbeSample {
  PhaseTriple phase;
  std::function<double(Vec2)> vartheta;       // phase of lambda
  std::function<Vec2(Vec2)> grad_vartheta;
};

inline AngleSpec random_trig_angle(std::mt19937_64& rng, double base,
                                   double amp_scale) {
  auto u01 = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  struct Mode {
    double a, kx, ky, phase;
  };
  std::vector<Mode> modes;
  for (int m = 1; m <= 3; ++m) {
    Mode mo;
    mo.a = amp_scale * (0.5 + 0.5 * u01()) / m;
    mo.kx = 0.8 + 2.4 * u01();
    mo.ky = 0.8 + 2.4 * u01();
    mo.phase = 2.0 * std::numbers::pi * u01();
    modes.push_back(mo);
  }
  AngleSpec a;
  a.value = [base, modes](Vec2 p) {
    double v = base;
    for (const auto& m : modes) v += m.a * std::sin(m.kx * p.x + m.ky * p.y + m.phase);
    return v;
  };
  a.gradient = [modes](Vec2 p) {
    Vec2 g{0.0, 0.0};
    for (const auto& m : modes) {
      const double c = m.a * std::cos(m.kx * p.x + m.ky * p.y + m.phase);
      g.x += m.kx * c;
      g.y += m.ky * c;
    }
    return g;
  };
  a.laplacian = [modes](Vec2 p) {
    double l = 0.0;
    for (const auto& m : modes) {
      l -= m.a * (m.kx * m.kx + m.ky * m.ky) *
           std::sin(m.kx * p.x + m.ky * p.y + m.phase);
    }
    return l;
  };
  return a;
}

/// Violation of the four real coefficient conditions for one configuration
/// with |lambda| = tan(theta).
inline double probe_violation(const PhaseTriple& ph,
                              const std::function<double(Vec2)>& vartheta,
                              const GridSpec& grid) {
  PhaseData data = PhaseData::build(ph, grid);
  auto theta_v = ph.theta.value;
  LambdaField lam = LambdaField::of([theta_v, vartheta](Vec2 p) {
    return std::tan(theta_v(p)) * std::polar(1.0, vartheta(p));
  });
  const ComplexField lam_s = lam.sample(grid);
  const PotentialPair pot = potentials_from_phase(data, lam_s);
  const CoefficientResiduals cr = coefficient_constraints(data, pot, lam_s);

  double worst = 0.0;
  const GridSpec& g = grid;
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      if (g.masked(i, j)) continue;
      const Complex r1 = cr.r_phi_complex.at(i, j);
      const Complex r2 = cr.r_phi_quaternion.at(i, j);
      worst = std::max({worst, std::abs(r1.real()), std::abs(r1.imag()),
                        std::abs(r2.real()), std::abs(r2.imag())});
    }
  }
  return worst;
}

}  // namespace detail

/// Randomized search for solutions with varying theta and |lambda| =
/// tan(theta): for each seeded random smooth configuration, reports the
/// largest violation among the four real coefficient conditions. A strictly
/// positive minimum over all samples is the numerical counterpart of the
/// claim that no such solutions exist.
inline ProbeOutcome no_solution_probe(int samples, unsigned seed,
                                      int grid_n = 48) {
  if (samples < 1) {
    throw DomainError("no_solution_probe: need at least one sample");
  }
  const GridSpec grid = GridSpec::cover(grid_n, grid_n, 0.0, 0.0, 1.0, 1.0);
  std::mt19937_64 rng(seed);
  ProbeOutcome out;
  out.min_violation = std::numeric_limits<double>::infinity();
  for (int s = 0; s < samples; ++s) {
    PhaseTriple ph;
    ph.theta = detail::random_trig_angle(rng, 0.75, 0.10);  // range in (0, pi/2)
    ph.gamma = detail::random_trig_angle(rng, 0.0, 0.30);
    ph.omega = detail::random_trig_angle(rng, 0.0, 0.30);
    const AngleSpec vt = detail::random_trig_angle(rng, 0.0, 0.40);
    const double v = detail::probe_violation(ph, vt.value, grid);
    out.violations.push_back(v);
    out.min_violation = std::min(out.min_violation, v);
  }
  return out;
}

/// Control configuration for the probe: constant theta and the lambda phase
/// locked to gamma + omega + pi, which is a genuine solution family. The
/// violation collapses to the finite-difference floor.
inline double no_solution_control(unsigned seed, int grid_n = 48) {
  const GridSpec grid = GridSpec::cover(grid_n, grid_n, 0.0, 0.0, 1.0, 1.0);
  std::mt19937_64 rng(seed);
  PhaseTriple ph;
  ph.theta = AngleSpec::constant(0.75);
  ph.gamma = detail::random_trig_angle(rng, 0.0, 0.30);
  ph.omega = detail::random_trig_angle(rng, 0.0, 0.30);
  auto gamma_v = ph.gamma.value;
  auto omega_v = ph.omega.value;
  auto vartheta = [gamma_v, omega_v](Vec2 p) {
    return gamma_v(p) + omega_v(p) + std::numbers::pi;
  };
  return detail::probe_violation(ph, vartheta, grid);
}

}  // namespace qqm
