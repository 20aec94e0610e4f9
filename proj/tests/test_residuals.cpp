#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "qqm/residuals.hpp"
#include "test_util.hpp"

using namespace qqm;

namespace {

constexpr double kPi = std::numbers::pi;

GridSpec unit_grid(int n) { return GridSpec::cover(n, n, 0.0, 0.0, 1.0, 1.0); }

AngleSpec angle_sum(const AngleSpec& a, const AngleSpec& b) {
  AngleSpec s;
  s.value = [=](Vec2 p) { return a.value(p) + b.value(p); };
  s.gradient = [=](Vec2 p) { return a.gradient(p) + b.gradient(p); };
  s.laplacian = [=](Vec2 p) { return a.laplacian(p) + b.laplacian(p); };
  return s;
}

PhaseTriple gentle_triple(double theta) {
  PhaseTriple ph;
  ph.theta = AngleSpec::constant(theta);
  ph.gamma = angle_sum(AngleSpec::linear(0.1, {0.45, 0.15}),
                       AngleSpec::sinusoid(0.0, 0.05, {2.0, 1.0}, 0.4));
  ph.omega = angle_sum(AngleSpec::linear(-0.2, {-0.2, 0.35}),
                       AngleSpec::sinusoid(0.0, 0.04, {1.0, 2.0}, 1.1));
  return ph;
}

ComplexField smooth_phi(const GridSpec& g) {
  return ComplexField::sample(g, [](Vec2 p) {
    return std::polar(1.0, 0.3 * p.x + 0.2 * p.y) *
           (1.0 + 0.2 * std::sin(2.0 * p.x) * std::cos(1.5 * p.y));
  });
}

ComplexField real_phi(const GridSpec& g) {
  return ComplexField::sample(g, [](Vec2 p) {
    return Complex{1.0 + 0.3 * std::sin(1.7 * p.x) * std::cos(1.1 * p.y), 0.0};
  });
}

template <typename Fn>
double max_over(const GridSpec& g, Fn f) {
  double m = 0.0;
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      if (!g.masked(i, j)) m = std::max(m, f(i, j));
    }
  }
  return m;
}

}  // namespace

TEST_CASE("master residual certifies both families at second order") {
  auto family1_err = [&](int n) {
    const GridSpec g = unit_grid(n);
    const AngleSpec omega = angle_sum(
        AngleSpec::linear(0.0, {0.5, 0.25}),
        AngleSpec::sinusoid(0.0, 0.05, {2.0, 1.0}, 0.3));
    const auto fam = family_simple(omega, Quaternion::unit_j(), g);
    return master_residual(fam.phase, fam.pot, smooth_phi(g)).max_abs;
  };
  const double f1a = family1_err(33), f1b = family1_err(65),
               f1c = family1_err(129);
  CHECK(std::log2(f1a / f1b) == doctest::Approx(2.0).epsilon(0.1));
  CHECK(std::log2(f1b / f1c) == doctest::Approx(2.0).epsilon(0.1));

  auto family2_err = [&](int n) {
    const GridSpec g = unit_grid(n);
    const auto fam = family_ab(gentle_triple(kPi / 5.0), g);
    return master_residual(fam.phase, fam.pot, smooth_phi(g)).max_abs;
  };
  const double f2a = family2_err(33), f2b = family2_err(65),
               f2c = family2_err(129);
  CHECK(std::log2(f2a / f2b) == doctest::Approx(2.0).epsilon(0.1));
  CHECK(std::log2(f2b / f2c) == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("master residual stays finite for a non-solution") {
  // Q = 0 with a curved K: the residual is dominated by lap K and does not
  // vanish under refinement
  auto err_at = [&](int n) {
    const GridSpec g = unit_grid(n);
    PhaseTriple ph;
    ph.theta = AngleSpec::sinusoid(0.6, 0.2, {2.0, 1.0}, 0.5);
    ph.gamma = AngleSpec::sinusoid(0.1, 0.4, {1.0, 2.0}, 1.3);
    ph.omega = AngleSpec::sinusoid(-0.3, 0.3, {2.0, 2.0}, 0.2);
    const PhaseData d = PhaseData::build(ph, g);
    PotentialPair zero = PotentialPair::from_fields(RealVectorField(g),
                                                    ComplexVectorField(g));
    return master_residual(d, zero, smooth_phi(g)).max_abs;
  };
  const double e1 = err_at(33), e2 = err_at(65);
  CHECK(e1 > 1.0);
  CHECK(e2 > 1.0);
  CHECK(std::abs(e1 - e2) / e1 < 0.1);  // saturates instead of converging
}

TEST_CASE("symplectic split recombines to the master residual") {
  const GridSpec g = unit_grid(49);
  const auto fam = family_ab(gentle_triple(kPi / 4.0), g);
  const auto phi = smooth_phi(g);
  const auto split = split_residuals(fam.phase, fam.pot, phi);
  CHECK(split.recombination_gap < 1e-12);

  const auto master = master_residual(fam.phase, fam.pot, phi);
  CHECK(split.complex_part.max_abs < 10.0 * master.max_abs + 1e-12);
  CHECK(split.quaternion_part.max_abs < 10.0 * master.max_abs + 1e-12);

  // a deliberately wrong configuration still recombines pointwise
  PotentialPair perturbed = fam.pot;
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      perturbed.alpha.x(i, j) += 0.3;
    }
  }
  CHECK(split_residuals(fam.phase, perturbed, phi).recombination_gap < 1e-12);
}

TEST_CASE("split parts vanish trivially for K = 1, Q = 0") {
  const GridSpec g = unit_grid(17);
  PhaseTriple ph{AngleSpec::constant(0.0), AngleSpec::constant(0.0),
                 AngleSpec::constant(0.0)};
  const PhaseData d = PhaseData::build(ph, g);
  PotentialPair zero =
      PotentialPair::from_fields(RealVectorField(g), ComplexVectorField(g));
  const auto split = split_residuals(d, zero, smooth_phi(g));
  CHECK(split.complex_part.max_abs == 0.0);
  CHECK(split.quaternion_part.max_abs == 0.0);
}

TEST_CASE("coefficient conditions hold for the two-angle family") {
  const GridSpec g = unit_grid(65);
  const auto fam = family_ab(gentle_triple(kPi / 5.0), g);
  const auto cr = coefficient_constraints(fam.phase, fam.pot, *fam.lambda);
  CHECK(cr.phi_coeff_complex.max_abs < 5e-3);
  CHECK(cr.phi_coeff_quaternion.max_abs < 5e-3);
  CHECK(cr.gradphi_coeff_complex.max_abs < 1e-13);
  CHECK(cr.gradphi_coeff_quaternion.max_abs < 1e-13);

  // the divergence terms carry the only discretisation error: O(h^2)
  const auto fam2 = family_ab(gentle_triple(kPi / 5.0), unit_grid(129));
  const auto cr2 =
      coefficient_constraints(fam2.phase, fam2.pot, *fam2.lambda);
  CHECK(std::log2(cr.phi_coeff_complex.max_abs /
                  cr2.phi_coeff_complex.max_abs) ==
        doctest::Approx(2.0).epsilon(0.25));
}

TEST_CASE("the potential formulas solve the grad-phi coefficient conditions") {
  // admissible configuration with varying theta and |lambda| = tan(theta)
  const GridSpec g = unit_grid(33);
  PhaseTriple ph;
  ph.theta = AngleSpec::sinusoid(0.75, 0.15, {2.0, 1.0}, 0.6);
  ph.gamma = AngleSpec::sinusoid(0.2, 0.35, {1.0, 2.0}, 1.9);
  ph.omega = AngleSpec::sinusoid(-0.4, 0.25, {2.0, 2.0}, 0.8);
  const PhaseData d = PhaseData::build(ph, g);
  auto theta_v = ph.theta.value;
  const auto lam = LambdaField::of([theta_v](Vec2 p) {
    return std::tan(theta_v(p)) * std::polar(1.0, 1.3 * p.x - 0.6 * p.y);
  });
  const auto lam_s = lam.sample(g);
  const auto pot = potentials_from_phase(d, lam_s);
  const auto cr = coefficient_constraints(d, pot, lam_s);
  // these relations are solved identically, with no finite differences left
  CHECK(cr.gradphi_coeff_complex.max_abs < 1e-13);
  CHECK(cr.gradphi_coeff_quaternion.max_abs < 1e-13);
}

TEST_CASE("perturbing alpha shows up linearly in the gradient condition") {
  const GridSpec g = unit_grid(33);
  const double theta = kPi / 5.0;
  const auto fam = family_ab(gentle_triple(theta), g);
  PotentialPair pot = fam.pot;
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      pot.alpha.x(i, j) += 0.1;
    }
  }
  const auto cr = coefficient_constraints(fam.phase, pot, *fam.lambda);
  CHECK(cr.gradphi_coeff_complex.max_abs ==
        doctest::Approx(0.1 * std::cos(theta)).epsilon(1e-10));
}

TEST_CASE("reduced constraint: prefactor kills the two-angle family") {
  const GridSpec g = unit_grid(33);
  const auto fam = family_ab(gentle_triple(kPi / 5.0), g);
  const auto rep = reduced_residual(fam.phase, *fam.lambda, smooth_phi(g));
  CHECK(rep.max_abs < 1e-12);
}

TEST_CASE("reduced constraint: locked angles give an identically zero bracket") {
  const GridSpec g = unit_grid(17);
  PhaseTriple ph;
  ph.theta = AngleSpec::constant(0.8);
  ph.gamma = AngleSpec::linear(0.5, {0.7, -0.3});
  ph.omega = AngleSpec::linear(-0.2, {0.7, -0.3});
  const PhaseData d = PhaseData::build(ph, g);
  const auto rep = reduced_residual(d, LambdaField::constant({0.6, 0.2}).sample(g),
                                    smooth_phi(g));
  CHECK(rep.max_abs < 1e-13);
}

TEST_CASE("reduced constraint: direct evaluation at lambda = 1") {
  const GridSpec g = unit_grid(17);
  PhaseTriple ph;
  const double theta = 0.6;
  ph.theta = AngleSpec::constant(theta);
  ph.gamma = AngleSpec::linear(0.0, {1.0, 0.0});  // gamma - omega = x
  ph.omega = AngleSpec::constant(0.0);
  const PhaseData d = PhaseData::build(ph, g);
  const auto phi = ComplexField::sample(g, [](Vec2) { return Complex{1, 0}; });
  const auto rep =
      reduced_residual(d, LambdaField::constant({1, 0}).sample(g), phi);
  // residual = -prefactor, so |residual| = |cos e^{i gamma} + sin| / 2
  CHECK(max_over(g, [&](int i, int j) {
          const Complex pref = (std::cos(theta) * std::polar(1.0, g.x(i)) +
                                std::sin(theta)) /
                               2.0;
          return std::abs(rep.magnitude.at(i, j) - std::abs(pref));
        }) < 1e-13);
  CHECK(rep.max_abs > 0.1);
}

TEST_CASE("no-solution probe: violations stay above the frozen floor") {
  const auto probe = no_solution_probe(10, 424242, 32);
  CHECK(probe.violations.size() == 10);
  CHECK(probe.min_violation > 1e-3);

  // control case collapses to the discretisation floor and refines at h^2
  const double c1 = no_solution_control(7, 24);
  const double c2 = no_solution_control(7, 48);
  CHECK(c2 < c1 / 3.0);
  CHECK(c2 < 5e-3);
  CHECK(c2 < 0.05 * probe.min_violation);

  CHECK_THROWS_AS(no_solution_probe(0, 1), DomainError);
}

TEST_CASE("right form: certifies the two-angle family for real phi") {
  auto err_at = [&](int n) {
    const GridSpec g = unit_grid(n);
    const auto fam = family_ab(gentle_triple(kPi / 4.0), g);
    return right_form_residual(fam.phase, fam.pot, real_phi(g));
  };
  const auto r1 = err_at(33);
  const auto r2 = err_at(65);
  CHECK(std::log2(r1.master.max_abs / r2.master.max_abs) ==
        doctest::Approx(2.0).epsilon(0.15));
  CHECK(r1.recombination_gap < 1e-12);
  CHECK(r2.recombination_gap < 1e-12);
}

TEST_CASE("right form: complex phi excites the conjugate-sector residual") {
  // the right-factored reduced equation couples phi - conj(phi); for a phi
  // with an imaginary part the residual persists under refinement
  auto err_at = [&](int n) {
    const GridSpec g = unit_grid(n);
    const auto fam = family_ab(gentle_triple(kPi / 4.0), g);
    return right_form_residual(fam.phase, fam.pot, smooth_phi(g)).master
        .max_abs;
  };
  const double e1 = err_at(33), e2 = err_at(65);
  CHECK(e1 > 0.05);
  CHECK(e2 > 0.05);
  CHECK(std::abs(e1 - e2) / e1 < 0.2);
}

TEST_CASE("right form: trivial configuration has zero residual") {
  const GridSpec g = unit_grid(17);
  PhaseTriple ph{AngleSpec::constant(0.0), AngleSpec::constant(0.0),
                 AngleSpec::constant(0.0)};
  const PhaseData d = PhaseData::build(ph, g);
  PotentialPair zero =
      PotentialPair::from_fields(RealVectorField(g), ComplexVectorField(g));
  const auto r = right_form_residual(d, zero, smooth_phi(g));
  CHECK(r.master.max_abs == 0.0);
  CHECK(r.complex_part.max_abs == 0.0);
  CHECK(r.quaternion_part.max_abs == 0.0);
}

TEST_CASE("left and right factorisations share the coefficient conditions") {
  const GridSpec g = unit_grid(33);
  const auto fam = family_ab(gentle_triple(kPi / 5.0), g);
  const auto left = coefficient_constraints(fam.phase, fam.pot, *fam.lambda);
  const auto right =
      coefficient_constraints_right(fam.phase, fam.pot, *fam.lambda);
  CHECK(max_over(g, [&](int i, int j) {
          return std::abs(left.r_phi_complex.at(i, j) -
                          right.r_phi_complex.at(i, j)) +
                 std::abs(left.r_phi_quaternion.at(i, j) -
                          right.r_phi_quaternion.at(i, j));
        }) < 1e-12);

  // also for a non-solution configuration: the conditions are the same
  // expressions, not just both zero
  PotentialPair pot = fam.pot;
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      pot.alpha.y(i, j) -= 0.25;
      pot.beta.x(i, j) += Complex{0.05, -0.1};
    }
  }
  const auto left_p = coefficient_constraints(fam.phase, pot, *fam.lambda);
  const auto right_p =
      coefficient_constraints_right(fam.phase, pot, *fam.lambda);
  CHECK(left_p.phi_coeff_complex.max_abs > 0.01);
  CHECK(max_over(g, [&](int i, int j) {
          return std::abs(left_p.r_phi_complex.at(i, j) -
                          right_p.r_phi_complex.at(i, j)) +
                 std::abs(left_p.r_phi_quaternion.at(i, j) -
                          right_p.r_phi_quaternion.at(i, j));
        }) < 1e-12);
}
