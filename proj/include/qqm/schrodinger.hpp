#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "qqm/fd_ops.hpp"
#include "qqm/phase.hpp"

namespace qqm {

/// Time-integration parameters. The integrator is an explicit classical
/// fourth-order one-step method on the coupled symplectic pair; stability
/// is checked against a conservative spectral estimate at setup. The
/// operator is not assumed anti-hermitian, so probability conservation is
/// measured, never imposed.
struct SimulationParams {
  double hbar{1.0};
  double mass{1.0};
  double dt{0.0};
  int steps{0};
  Boundary boundary{Boundary::Periodic};
  double norm_drift_tol{1e-6};
  double continuity_tol{1e-2};
  double instability_factor{10.0};

  void validate() const {
    if (hbar <= 0.0 || mass <= 0.0) {
      throw DomainError("SimulationParams: hbar and mass must be positive");
    }
    if (dt < 0.0 || steps < 0) {
      throw DomainError("SimulationParams: dt and steps must be nonnegative");
    }
  }
};

struct HamiltonianSpec {
  RealField V;
  PotentialPair Q;
};

/// Quaternion-valued wave function as its symplectic pair, plus time.
struct WaveState {
  ComplexField psi1;
  ComplexField psi2;
  double t{0.0};

  const GridSpec& grid() const { return psi1.grid(); }

  Quaternion at(int i, int j) const { return {psi1.at(i, j), psi2.at(i, j)}; }

  static WaveState from_quat_field(const QuatField& f, double t = 0.0) {
    return {f.z, f.zeta, t};
  }

  /// Psi = K phi with the complex factor on the right.
  static WaveState factorised(const QuatField& K, const ComplexField& phi,
                              double t = 0.0) {
    const GridSpec& g = K.z.grid();
    WaveState s{ComplexField(g), ComplexField(g), t};
    for (int j = 0; j < g.ny; ++j) {
      for (int i = 0; i < g.nx; ++i) {
        if (g.masked(i, j)) continue;
        const Quaternion v = right_mul_complex(K.at(i, j), phi.at(i, j));
        s.psi1.at(i, j) = v.z;
        s.psi2.at(i, j) = v.zeta;
      }
    }
    return s;
  }
};

inline RealField probability_density(const WaveState& s) {
  const GridSpec& g = s.grid();
  RealField rho(g);
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      if (g.masked(i, j)) continue;
      rho.at(i, j) = std::norm(s.psi1.at(i, j)) + std::norm(s.psi2.at(i, j));
    }
  }
  return rho;
}

inline double total_probability(const WaveState& s) {
  const GridSpec& g = s.grid();
  double sum = 0.0;
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      if (g.masked(i, j)) continue;
      sum += std::norm(s.psi1.at(i, j)) + std::norm(s.psi2.at(i, j));
    }
  }
  return sum * s.grid().dx * s.grid().dy;
}

struct ObservableSeries {
  std::vector<int> step;
  std::vector<double> t;
  std::vector<double> total_probability;
  std::vector<double> energy;
  std::vector<double> continuity_residual_max;
};

inline double continuity_residual(const ObservableSeries& series) {
  double worst = 0.0;
  for (double r : series.continuity_residual_max) {
    if (std::isfinite(r)) worst = std::max(worst, r);
  }
  return worst;
}

namespace detail {

/// Spatially discretised Hamiltonian application. The advective and
/// coupling groups (div X) psi + 2 X.grad(psi) are evaluated in the split
/// form X.D(psi) + D.(X psi), which is the same continuum operator at the
/// same order but makes the central-difference operator exactly
/// skew-adjoint. Probability conservation is then a measured property of
/// the time integrator, not a casualty of the spatial discretisation.
struct EvolutionContext {
  const HamiltonianSpec& ham;
  SimulationParams params;

  EvolutionContext(const HamiltonianSpec& h, const SimulationParams& p)
      : ham(h), params(p) {}

  /// (H Psi) as the symplectic pair, H = Pi^2/2m + V with
  /// Pi^2 = -hbar^2 [lap - (div Q) - 2 Q.grad + Q.Q].
  void apply_hamiltonian(const ComplexField& p1, const ComplexField& p2,
                         ComplexField& h1, ComplexField& h2) const {
    const GridSpec& g = p1.grid();
    const Boundary bc = params.boundary;
    const auto lap1 = fd_laplacian(p1, bc);
    const auto lap2 = fd_laplacian(p2, bc);
    const auto g1 = fd_gradient(p1, bc);
    const auto g2 = fd_gradient(p2, bc);

    // product fields alpha*psi and beta*conj(psi) for the divergence halves
    ComplexVectorField a_p1(g), a_p2(g), b_p1c(g), b_p2c(g);
    for (int j = 0; j < g.ny; ++j) {
      for (int i = 0; i < g.nx; ++i) {
        if (g.masked(i, j)) continue;
        const double ax = ham.Q.alpha.x(i, j), ay = ham.Q.alpha.y(i, j);
        const Complex bx = ham.Q.beta.x(i, j), by = ham.Q.beta.y(i, j);
        a_p1.x(i, j) = ax * p1.at(i, j);
        a_p1.y(i, j) = ay * p1.at(i, j);
        a_p2.x(i, j) = ax * p2.at(i, j);
        a_p2.y(i, j) = ay * p2.at(i, j);
        b_p1c.x(i, j) = bx * std::conj(p1.at(i, j));
        b_p1c.y(i, j) = by * std::conj(p1.at(i, j));
        b_p2c.x(i, j) = bx * std::conj(p2.at(i, j));
        b_p2c.y(i, j) = by * std::conj(p2.at(i, j));
      }
    }
    const auto div_a_p1 = fd_divergence(a_p1, bc);
    const auto div_a_p2 = fd_divergence(a_p2, bc);
    const auto div_b_p1c = fd_divergence(b_p1c, bc);
    const auto div_b_p2c = fd_divergence(b_p2c, bc);

    const double kin = -params.hbar * params.hbar / (2.0 * params.mass);
    for (int j = 0; j < g.ny; ++j) {
      for (int i = 0; i < g.nx; ++i) {
        if (g.masked(i, j)) continue;
        const double ax = ham.Q.alpha.x(i, j), ay = ham.Q.alpha.y(i, j);
        const Complex bx = ham.Q.beta.x(i, j), by = ham.Q.beta.y(i, j);
        const double eta = ham.Q.eta.at(i, j);

        const Complex adv1 = ax * g1.x(i, j) + ay * g1.y(i, j) +
                             div_a_p1.at(i, j);
        const Complex adv2 = ax * g2.x(i, j) + ay * g2.y(i, j) +
                             div_a_p2.at(i, j);
        const Complex cross1 = bx * std::conj(g2.x(i, j)) +
                               by * std::conj(g2.y(i, j)) +
                               div_b_p2c.at(i, j);
        const Complex cross2 = bx * std::conj(g1.x(i, j)) +
                               by * std::conj(g1.y(i, j)) +
                               div_b_p1c.at(i, j);

        const Complex d2_1 = lap1.at(i, j) - kImag * adv1 + cross1 +
                             eta * p1.at(i, j);
        const Complex d2_2 = lap2.at(i, j) - kImag * adv2 - cross2 +
                             eta * p2.at(i, j);

        h1.at(i, j) = kin * d2_1 + ham.V.at(i, j) * p1.at(i, j);
        h2.at(i, j) = kin * d2_2 + ham.V.at(i, j) * p2.at(i, j);
      }
    }
  }

  /// d/dt of the pair: the right-acting time phase splits the sectors with
  /// opposite signs, d psi1/dt = -(i/hbar)(H Psi)_1, d psi2/dt = +(i/hbar)(H Psi)_2.
  void rhs(const ComplexField& p1, const ComplexField& p2, ComplexField& r1,
           ComplexField& r2) const {
    apply_hamiltonian(p1, p2, r1, r2);
    const GridSpec& g = p1.grid();
    const Complex m1 = -kImag / params.hbar;
    const Complex m2 = kImag / params.hbar;
    for (int j = 0; j < g.ny; ++j) {
      for (int i = 0; i < g.nx; ++i) {
        if (g.masked(i, j)) continue;
        r1.at(i, j) *= m1;
        r2.at(i, j) *= m2;
      }
    }
  }

  double stability_scale() const {
    const GridSpec& g = ham.V.grid();
    double amax = 0.0, bmax = 0.0, etamax = 0.0, vmax = 0.0;
    for (int j = 0; j < g.ny; ++j) {
      for (int i = 0; i < g.nx; ++i) {
        if (g.masked(i, j)) continue;
        amax = std::max(
            amax, Vec2{ham.Q.alpha.x(i, j), ham.Q.alpha.y(i, j)}.norm());
        bmax = std::max(bmax, std::sqrt(std::norm(ham.Q.beta.x(i, j)) +
                                        std::norm(ham.Q.beta.y(i, j))));
        etamax = std::max(etamax, std::abs(ham.Q.eta.at(i, j)));
        vmax = std::max(vmax, std::abs(ham.V.at(i, j)));
      }
    }
    const double hb = params.hbar, m = params.mass;
    const double inv_h = 1.0 / g.dx + 1.0 / g.dy;
    return hb / (2.0 * m) * (4.0 / (g.dx * g.dx) + 4.0 / (g.dy * g.dy)) +
           2.0 * hb / m * (amax + bmax) * inv_h +
           hb / (2.0 * m) * etamax + vmax / hb;
  }
};

}  // namespace detail

/// Probability current j = (1/2m)[Psi* Pi Psi + (Psi* Pi Psi)*], real by the
/// q + q* construction.
inline RealVectorField probability_current(const WaveState& s,
                                           const HamiltonianSpec& ham,
                                           const SimulationParams& params) {
  const GridSpec& g = s.grid();
  const Boundary bc = params.boundary;
  const auto g1 = fd_gradient(s.psi1, bc);
  const auto g2 = fd_gradient(s.psi2, bc);
  RealVectorField jout(g);
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      if (g.masked(i, j)) continue;
      const Quaternion psi = s.at(i, j);
      const Quaternion psis = quat_conj(psi);
      const Quaternion Qx{kImag * ham.Q.alpha.x(i, j), ham.Q.beta.x(i, j)};
      const Quaternion Qy{kImag * ham.Q.alpha.y(i, j), ham.Q.beta.y(i, j)};
      const Quaternion dx_psi{g1.x(i, j), g2.x(i, j)};
      const Quaternion dy_psi{g1.y(i, j), g2.y(i, j)};
      const Quaternion pix =
          -params.hbar * right_mul_i(dx_psi - Qx * psi);
      const Quaternion piy =
          -params.hbar * right_mul_i(dy_psi - Qy * psi);
      jout.x(i, j) = (psis * pix).real_part() / params.mass;
      jout.y(i, j) = (psis * piy).real_part() / params.mass;
    }
  }
  return jout;
}

/// Expectation value Re of Psi*(H Psi) over the total probability.
inline double energy_expectation(const WaveState& s, const HamiltonianSpec& ham,
                                 const SimulationParams& params) {
  const GridSpec& g = s.grid();
  detail::EvolutionContext ctx(ham, params);
  ComplexField h1(g), h2(g);
  ctx.apply_hamiltonian(s.psi1, s.psi2, h1, h2);
  double num = 0.0, den = 0.0;
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      if (g.masked(i, j)) continue;
      const Quaternion psis = quat_conj(s.at(i, j));
      const Quaternion hval{h1.at(i, j), h2.at(i, j)};
      num += (psis * hval).real_part();
      den += std::norm(s.psi1.at(i, j)) + std::norm(s.psi2.at(i, j));
    }
  }
  return den > 0.0 ? num / den : 0.0;
}

struct EvolveResult {
  WaveState state;
  ObservableSeries series;
};

/// Advances the coupled symplectic pair. Records total probability, energy
/// and the continuity residual max |d rho/dt + div j| (centered in time) at
/// every interior step. Aborts with a diagnostic if the norm grows past the
/// configured factor.
inline EvolveResult evolve(const WaveState& initial, const HamiltonianSpec& ham,
                           const SimulationParams& params) {
  params.validate();
  const GridSpec& g = initial.grid();
  detail::EvolutionContext ctx(ham, params);

  const double scale = ctx.stability_scale();
  if (params.dt * scale > 2.6) {
    throw DomainError(
        "evolve: dt violates the stability bound (dt * spectral scale = " +
        std::to_string(params.dt * scale) + " > 2.6)");
  }

  EvolveResult out{initial, {}};
  WaveState& s = out.state;
  ObservableSeries& series = out.series;
  const double p0 = total_probability(s);

  auto record = [&](int step) {
    series.step.push_back(step);
    series.t.push_back(s.t);
    series.total_probability.push_back(total_probability(s));
    series.energy.push_back(energy_expectation(s, ham, params));
    series.continuity_residual_max.push_back(
        std::numeric_limits<double>::quiet_NaN());
  };
  record(0);

  ComplexField k1a(g), k1b(g), k2a(g), k2b(g), k3a(g), k3b(g), k4a(g), k4b(g);
  ComplexField tmpa(g), tmpb(g);
  RealField rho_prev(g);
  RealVectorField j_curr(g);
  bool have_prev = false;

  auto axpy = [&](const ComplexField& base1, const ComplexField& base2,
                  const ComplexField& d1, const ComplexField& d2, double w) {
    for (int j = 0; j < g.ny; ++j) {
      for (int i = 0; i < g.nx; ++i) {
        if (g.masked(i, j)) continue;
        tmpa.at(i, j) = base1.at(i, j) + w * d1.at(i, j);
        tmpb.at(i, j) = base2.at(i, j) + w * d2.at(i, j);
      }
    }
  };

  for (int step = 0; step < params.steps; ++step) {
    const RealField rho_before = probability_density(s);
    if (step > 0) {
      j_curr = probability_current(s, ham, params);
    }

    ctx.rhs(s.psi1, s.psi2, k1a, k1b);
    axpy(s.psi1, s.psi2, k1a, k1b, 0.5 * params.dt);
    ctx.rhs(tmpa, tmpb, k2a, k2b);
    axpy(s.psi1, s.psi2, k2a, k2b, 0.5 * params.dt);
    ctx.rhs(tmpa, tmpb, k3a, k3b);
    axpy(s.psi1, s.psi2, k3a, k3b, params.dt);
    ctx.rhs(tmpa, tmpb, k4a, k4b);

    const double w = params.dt / 6.0;
    for (int j = 0; j < g.ny; ++j) {
      for (int i = 0; i < g.nx; ++i) {
        if (g.masked(i, j)) continue;
        s.psi1.at(i, j) += w * (k1a.at(i, j) + 2.0 * k2a.at(i, j) +
                                2.0 * k3a.at(i, j) + k4a.at(i, j));
        s.psi2.at(i, j) += w * (k1b.at(i, j) + 2.0 * k2b.at(i, j) +
                                2.0 * k3b.at(i, j) + k4b.at(i, j));
      }
    }
    s.t += params.dt;
    record(step + 1);

    // centered continuity residual for the step we just left
    if (have_prev && params.dt > 0.0) {
      const auto div_j = fd_divergence(j_curr, params.boundary);
      const RealField rho_next = probability_density(s);
      double worst = 0.0;
      for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
          if (g.masked(i, j)) continue;
          const double drho =
              (rho_next.at(i, j) - rho_prev.at(i, j)) / (2.0 * params.dt);
          worst = std::max(worst, std::abs(drho + div_j.at(i, j)));
        }
      }
      series.continuity_residual_max[step] = worst;
    }
    rho_prev = rho_before;
    have_prev = true;

    const double p = series.total_probability.back();
    if (!std::isfinite(p) || p > params.instability_factor * std::max(p0, 1e-300)) {
      throw InstabilityError("evolve: norm growth indicates instability", step + 1,
                             p);
    }
  }
  return out;
}

/// Quaternion-valued vector field, for momentum images.
struct QuatVec2Field {
  QuatField x, y;
};

/// Pi Phi = -hbar (grad - Q) Phi |i, componentwise.
inline QuatVec2Field momentum_apply(const QuatField& Phi,
                                    const PotentialPair& Q, double hbar,
                                    Boundary bc = Boundary::OneSided) {
  const GridSpec& g = Phi.z.grid();
  const auto gz = fd_gradient(Phi.z, bc);
  const auto gzeta = fd_gradient(Phi.zeta, bc);
  QuatVec2Field out{{ComplexField(g), ComplexField(g)},
                    {ComplexField(g), ComplexField(g)}};
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      if (g.masked(i, j)) continue;
      const Quaternion phi = Phi.at(i, j);
      const Quaternion Qx{kImag * Q.alpha.x(i, j), Q.beta.x(i, j)};
      const Quaternion Qy{kImag * Q.alpha.y(i, j), Q.beta.y(i, j)};
      const Quaternion px =
          -hbar * right_mul_i(Quaternion{gz.x(i, j), gzeta.x(i, j)} - Qx * phi);
      const Quaternion py =
          -hbar * right_mul_i(Quaternion{gz.y(i, j), gzeta.y(i, j)} - Qy * phi);
      out.x.z.at(i, j) = px.z;
      out.x.zeta.at(i, j) = px.zeta;
      out.y.z.at(i, j) = py.z;
      out.y.zeta.at(i, j) = py.zeta;
    }
  }
  return out;
}

/// Pi . V for a quaternion vector field: -hbar (div V - Q . V) |i. Applying
/// it to momentum_apply output gives Pi^2.
inline QuatField momentum_contract(const QuatVec2Field& V,
                                   const PotentialPair& Q, double hbar,
                                   Boundary bc = Boundary::OneSided) {
  const GridSpec& g = V.x.z.grid();
  const auto dxz = fd_gradient(V.x.z, bc);
  const auto dxzeta = fd_gradient(V.x.zeta, bc);
  const auto dyz = fd_gradient(V.y.z, bc);
  const auto dyzeta = fd_gradient(V.y.zeta, bc);
  QuatField out{ComplexField(g), ComplexField(g)};
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      if (g.masked(i, j)) continue;
      const Quaternion div{dxz.x(i, j) + dyz.y(i, j),
                           dxzeta.x(i, j) + dyzeta.y(i, j)};
      const Quaternion Qx{kImag * Q.alpha.x(i, j), Q.beta.x(i, j)};
      const Quaternion Qy{kImag * Q.alpha.y(i, j), Q.beta.y(i, j)};
      const Quaternion qv = Qx * V.x.at(i, j) + Qy * V.y.at(i, j);
      const Quaternion r = -hbar * right_mul_i(div - qv);
      out.z.at(i, j) = r.z;
      out.zeta.at(i, j) = r.zeta;
    }
  }
  return out;
}

/// Product eigenmode of the hard-wall discrete Laplacian: walls sit one
/// spacing outside the grid, so sin(n pi (i+1)/(nx+1)) is an exact discrete
/// eigenvector.
inline ComplexField box_mode(const GridSpec& g, int n, int m) {
  ComplexField f(g);
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      f.at(i, j) = std::sin(n * std::numbers::pi * (i + 1) /
                            static_cast<double>(g.nx + 1)) *
                   std::sin(m * std::numbers::pi * (j + 1) /
                            static_cast<double>(g.ny + 1));
    }
  }
  return f;
}

/// Exact eigenvalue of box_mode under the hard-wall discrete kinetic
/// operator.
inline double box_mode_energy(const GridSpec& g, int n, int m, double hbar,
                              double mass) {
  const double sx = 2.0 / (g.dx * g.dx) *
                    (1.0 - std::cos(n * std::numbers::pi / (g.nx + 1)));
  const double sy = 2.0 / (g.dy * g.dy) *
                    (1.0 - std::cos(m * std::numbers::pi / (g.ny + 1)));
  return hbar * hbar / (2.0 * mass) * (sx + sy);
}

struct EnergyCheck {
  double eps_expectation{0.0};
  double eps_rotation{0.0};
  double e_reference{0.0};
  double hamiltonian_variance{0.0};
  bool eigenstate_warning{false};
};

/// Compares the energy of the factorised quaternionic state K phi with the
/// energy of phi under the complex Hamiltonian on the same grid. The
/// expectation value is the primary estimate; the phase-rotation rate of
/// the projection onto the initial state is the cross-check.
inline EnergyCheck energy_equality_check(const QuatField& K,
                                         const PotentialPair& Q,
                                         const RealField& V,
                                         const ComplexField& phi,
                                         const SimulationParams& params,
                                         int rotation_steps = 96) {
  const GridSpec& g = phi.grid();
  EnergyCheck out;

  // complex reference: Rayleigh quotient of the discrete complex H
  {
    const auto lap = fd_laplacian(phi, params.boundary);
    const double kin = -params.hbar * params.hbar / (2.0 * params.mass);
    double num = 0.0, den = 0.0, var = 0.0;
    ComplexField hphi(g);
    for (int j = 0; j < g.ny; ++j) {
      for (int i = 0; i < g.nx; ++i) {
        if (g.masked(i, j)) continue;
        hphi.at(i, j) = kin * lap.at(i, j) + V.at(i, j) * phi.at(i, j);
        num += (std::conj(phi.at(i, j)) * hphi.at(i, j)).real();
        den += std::norm(phi.at(i, j));
      }
    }
    out.e_reference = num / den;
    for (int j = 0; j < g.ny; ++j) {
      for (int i = 0; i < g.nx; ++i) {
        if (g.masked(i, j)) continue;
        var += std::norm(hphi.at(i, j) - out.e_reference * phi.at(i, j));
      }
    }
    out.hamiltonian_variance = var / den;
    out.eigenstate_warning =
        out.hamiltonian_variance >
        1e-8 * std::max(out.e_reference * out.e_reference, 1e-12);
  }

  const HamiltonianSpec ham{V, Q};
  const WaveState psi0 = WaveState::factorised(K, phi);
  out.eps_expectation = energy_expectation(psi0, ham, params);

  // phase-rotation cross-check: project onto the initial state after every
  // step and fit the unwrapped phase
  if (rotation_steps > 0 && params.dt > 0.0) {
    WaveState s = psi0;
    std::vector<double> phase(rotation_steps + 1, 0.0);
    double prev_arg = 0.0, unwrapped = 0.0;
    for (int n = 1; n <= rotation_steps; ++n) {
      SimulationParams one = params;
      one.steps = 1;
      s = evolve(s, ham, one).state;
      Complex c{0.0, 0.0};
      for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
          if (g.masked(i, j)) continue;
          c += (quat_conj(psi0.at(i, j)) * s.at(i, j)).z;
        }
      }
      double a = std::arg(c);
      double d = a - prev_arg;
      while (d > std::numbers::pi) d -= 2.0 * std::numbers::pi;
      while (d < -std::numbers::pi) d += 2.0 * std::numbers::pi;
      unwrapped += d;
      prev_arg = a;
      phase[n] = unwrapped;
    }
    // least-squares slope of phase(t) = -eps t / hbar
    double st = 0.0, stt = 0.0, sp = 0.0, stp = 0.0;
    const int n = rotation_steps + 1;
    for (int k = 0; k < n; ++k) {
      const double tk = k * params.dt;
      st += tk;
      stt += tk * tk;
      sp += phase[k];
      stp += tk * phase[k];
    }
    const double slope = (n * stp - st * sp) / (n * stt - st * st);
    out.eps_rotation = -params.hbar * slope;
  }
  return out;
}

}  // namespace qqm
