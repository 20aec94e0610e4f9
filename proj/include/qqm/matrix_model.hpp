#pragma once

#include <Eigen/Dense>
#include <random>
#include <vector>

#include "qqm/quaternion.hpp"

namespace qqm {

/// Finite model of the quaternionic eigenproblem (H + L j)(phi + chi j) =
/// eps (phi + chi j), with H hermitian and L arbitrary. eps is real in the
/// split-equation operations; the doubled-matrix oracle below returns the
/// full right spectrum, which is generally complex when L != 0.
struct MatrixModel {
  Eigen::MatrixXcd H;
  Eigen::MatrixXcd L;
  Eigen::VectorXcd phi;
  Eigen::VectorXcd chi;
  double eps{0.0};

  int dim() const { return static_cast<int>(H.rows()); }

  Eigen::MatrixXcd commutator() const { return H * L - L * H; }

  void validate(double herm_tol = 1e-12) const {
    if (H.rows() != H.cols() || L.rows() != L.cols() ||
        H.rows() != L.rows() || phi.size() != H.rows() ||
        chi.size() != H.rows()) {
      throw DomainError("MatrixModel: inconsistent dimensions");
    }
    const double herm = (H - H.adjoint()).norm();
    if (herm > herm_tol * std::max(1.0, H.norm())) {
      throw DomainError("MatrixModel: H must be hermitian (defect " +
                        std::to_string(herm) + ")");
    }
  }
};

struct SplitResidualCheck {
  double quaternionic;    // |(H + Lj)Phi - eps Phi| via quaternion arithmetic
  double pair_first;      // |(H - eps) phi - L conj(chi)|
  double pair_second;     // |(H - eps) chi + L conj(phi)|
  double identity_gap;    // | quaternionic^2 - (first^2 + second^2) | etc.
};

/// Evaluates the quaternionic eigen-residual through two independent
/// routes: entrywise quaternion matrix action, and the split pair of
/// complex equations. The two must agree exactly up to rounding.
inline SplitResidualCheck eigen_split_residual(const MatrixModel& mm) {
  mm.validate();
  const int n = mm.dim();

  // route 1: quaternion-entry matrix times quaternion vector
  std::vector<Quaternion> r_quat(n, Quaternion{});
  for (int r = 0; r < n; ++r) {
    Quaternion acc{};
    for (int c = 0; c < n; ++c) {
      const Quaternion entry{mm.H(r, c), mm.L(r, c)};
      const Quaternion vec{mm.phi(c), mm.chi(c)};
      acc += entry * vec;
    }
    acc -= mm.eps * Quaternion{mm.phi(r), mm.chi(r)};
    r_quat[r] = acc;
  }
  double quat_sq = 0.0;
  for (const auto& q : r_quat) quat_sq += q.norm_sq();

  // route 2: the split complex pair
  const Eigen::VectorXcd r1 =
      (mm.H - mm.eps * Eigen::MatrixXcd::Identity(n, n)) * mm.phi -
      mm.L * mm.chi.conjugate();
  const Eigen::VectorXcd r2 =
      (mm.H - mm.eps * Eigen::MatrixXcd::Identity(n, n)) * mm.chi +
      mm.L * mm.phi.conjugate();

  SplitResidualCheck out;
  out.quaternionic = std::sqrt(quat_sq);
  out.pair_first = r1.norm();
  out.pair_second = r2.norm();
  out.identity_gap = std::abs(quat_sq - (r1.squaredNorm() + r2.squaredNorm()));
  return out;
}

/// One right-eigenpair of the doubled complex encoding
///   [[H, -L], [L_conj, H_conj]] (phi; conj(chi)) = eps (phi; conj(chi)).
/// eps is complex in general: for commuting real-symmetric (H, L) the
/// right spectrum is h_k ± i l_k.
struct DoubledEigenPair {
  Complex eps;
  Eigen::VectorXcd phi;
  Eigen::VectorXcd chi;
};

/// Brute-force quaternionic eigensolve through the doubled complex matrix.
inline std::vector<DoubledEigenPair> doubled_eigensolve(
    const Eigen::MatrixXcd& H, const Eigen::MatrixXcd& L) {
  const int n = static_cast<int>(H.rows());
  Eigen::MatrixXcd M(2 * n, 2 * n);
  M.topLeftCorner(n, n) = H;
  M.topRightCorner(n, n) = -L;
  M.bottomLeftCorner(n, n) = L.conjugate();
  M.bottomRightCorner(n, n) = H.conjugate();

  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(M);
  if (solver.info() != Eigen::Success) {
    throw DomainError("doubled_eigensolve: eigensolver failed");
  }
  std::vector<DoubledEigenPair> out;
  out.reserve(2 * n);
  for (int k = 0; k < 2 * n; ++k) {
    DoubledEigenPair p;
    p.eps = solver.eigenvalues()(k);
    const Eigen::VectorXcd v = solver.eigenvectors().col(k);
    p.phi = v.head(n);
    p.chi = v.tail(n).conjugate();
    out.push_back(std::move(p));
  }
  return out;
}

/// Residual of one doubled eigenpair against the right-eigen equations
///   H phi - L conj(chi) = eps phi,  H chi + L conj(phi) = conj(eps) chi.
inline double right_eigen_residual(const Eigen::MatrixXcd& H,
                                   const Eigen::MatrixXcd& L,
                                   const DoubledEigenPair& p) {
  const Eigen::VectorXcd r1 = H * p.phi - L * p.chi.conjugate() - p.eps * p.phi;
  const Eigen::VectorXcd r2 =
      H * p.chi + L * p.phi.conjugate() - std::conj(p.eps) * p.chi;
  return std::sqrt(r1.squaredNorm() + r2.squaredNorm());
}

struct DecoupleResult {
  double squared_form_phi;   // |[(H-eps)^2 + L conj(L)] phi|
  double squared_form_chi;
  double first_order_phi;    // |[(H-eps) + L conj(L)] phi| (as printed; recorded)
  double first_order_chi;
  Complex relation_constant; // chi = c * conj(phi) when defined
};

namespace detail {

inline double commutator_defect(const MatrixModel& mm) {
  return mm.commutator().norm() /
         std::max(1.0, mm.H.norm() * mm.L.norm());
}

inline DecoupleResult decouple_eval(const Eigen::MatrixXcd& H,
                                    const Eigen::MatrixXcd& L, Complex eps,
                                    const Eigen::VectorXcd& phi,
                                    const Eigen::VectorXcd& chi, Complex theta) {
  const int n = static_cast<int>(H.rows());
  const Eigen::MatrixXcd shifted =
      H - eps * Eigen::MatrixXcd::Identity(n, n);
  const Eigen::MatrixXcd sq = shifted * shifted + L * L.conjugate();
  const Eigen::MatrixXcd first = shifted + L * L.conjugate();

  DecoupleResult out;
  out.squared_form_phi = (sq * phi - theta * chi.conjugate()).norm();
  out.squared_form_chi = (sq * chi + theta * phi.conjugate()).norm();
  out.first_order_phi = (first * phi - theta * chi.conjugate()).norm();
  out.first_order_chi = (first * chi + theta * phi.conjugate()).norm();

  int imax = 0;
  phi.cwiseAbs().maxCoeff(&imax);
  out.relation_constant = std::abs(phi(imax)) > 0.0
                              ? chi(imax) / std::conj(phi(imax))
                              : Complex{0.0, 0.0};
  return out;
}

}  // namespace detail

/// Commuting case: requires [H, L] ~ 0 and H real (the decoupling step
/// conjugates one equation, which is only compatible when H = conj(H)).
/// Evaluates the corrected second-order decoupled form and also records
/// the first-order form exactly as printed, without asserting it.
inline DecoupleResult decouple_commuting(const Eigen::MatrixXcd& H,
                                         const Eigen::MatrixXcd& L,
                                         const DoubledEigenPair& p,
                                         double comm_tol = 1e-10) {
  const double defect =
      (H * L - L * H).norm() / std::max(1.0, H.norm() * L.norm());
  if (defect > comm_tol) {
    throw DomainError("decouple_commuting: [H, L] defect " +
                      std::to_string(defect) + " exceeds tolerance");
  }
  if (H.imag().norm() > 1e-12 * std::max(1.0, H.norm())) {
    throw DomainError("decouple_commuting: H must be real symmetric");
  }
  return detail::decouple_eval(H, L, p.eps, p.phi, p.chi, Complex{0.0, 0.0});
}

/// Non-commuting case with scalar commutator [H, L] = theta * Id. In
/// finite dimension a nonzero scalar theta contradicts trace([H,L]) = 0,
/// so only the theta = 0 control is realisable; operator-valued
/// commutators are rejected with the deviation magnitude.
inline DecoupleResult decouple_noncommuting(const Eigen::MatrixXcd& H,
                                            const Eigen::MatrixXcd& L,
                                            const DoubledEigenPair& p,
                                            double scalar_tol = 1e-10) {
  const int n = static_cast<int>(H.rows());
  const Eigen::MatrixXcd comm = H * L - L * H;
  const Complex theta = comm.trace() / static_cast<double>(n);
  const double deviation =
      (comm - theta * Eigen::MatrixXcd::Identity(n, n)).norm() /
      std::max(1.0, H.norm() * L.norm());
  if (deviation > scalar_tol) {
    throw DomainError(
        "decouple_noncommuting: commutator is operator-valued (deviation " +
        std::to_string(deviation) + ")");
  }
  if (H.imag().norm() > 1e-12 * std::max(1.0, H.norm())) {
    throw DomainError("decouple_noncommuting: H must be real symmetric");
  }
  return detail::decouple_eval(H, L, p.eps, p.phi, p.chi, theta);
}

// --------------------------------------------------------------------------
// seeded random constructions
// --------------------------------------------------------------------------

inline double mm_uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
}

inline Eigen::MatrixXcd random_complex_matrix(int n, std::mt19937_64& rng,
                                              double scale = 1.0) {
  Eigen::MatrixXcd m(n, n);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      m(r, c) = Complex{mm_uniform(rng, -scale, scale),
                        mm_uniform(rng, -scale, scale)};
    }
  }
  return m;
}

inline Eigen::MatrixXcd random_hermitian(int n, std::mt19937_64& rng,
                                         double scale = 1.0) {
  const Eigen::MatrixXcd m = random_complex_matrix(n, rng, scale);
  return 0.5 * (m + m.adjoint());
}

inline Eigen::VectorXcd random_complex_vector(int n, std::mt19937_64& rng,
                                              double scale = 1.0) {
  Eigen::VectorXcd v(n);
  for (int r = 0; r < n; ++r) {
    v(r) = Complex{mm_uniform(rng, -scale, scale),
                   mm_uniform(rng, -scale, scale)};
  }
  return v;
}

inline MatrixModel random_matrix_model(int n, std::mt19937_64& rng) {
  MatrixModel mm;
  mm.H = random_hermitian(n, rng);
  mm.L = random_complex_matrix(n, rng);
  mm.phi = random_complex_vector(n, rng);
  mm.chi = random_complex_vector(n, rng);
  mm.eps = mm_uniform(rng, -2.0, 2.0);
  return mm;
}

/// Commuting real-symmetric pair: polynomials in a shared random real
/// symmetric matrix.
inline std::pair<Eigen::MatrixXcd, Eigen::MatrixXcd> commuting_real_pair(
    int n, std::mt19937_64& rng) {
  Eigen::MatrixXd s(n, n);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c <= r; ++c) {
      s(r, c) = s(c, r) = mm_uniform(rng, -1.0, 1.0);
    }
  }
  const Eigen::MatrixXd h = s + 0.3 * s * s;
  const Eigen::MatrixXd l =
      0.7 * s - 0.2 * s * s + 0.4 * Eigen::MatrixXd::Identity(n, n);
  return {h.cast<Complex>(), l.cast<Complex>()};
}

}  // namespace qqm
