#pragma once

#include <cmath>
#include <complex>
#include <ostream>

#include "qqm/errors.hpp"

namespace qqm {

using Complex = std::complex<double>;

inline constexpr Complex kImag{0.0, 1.0};

/// Quaternion in symplectic form q = z + zeta*j, where z and zeta are
/// complex and the units obey i*j = -j*i, i^2 = j^2 = -1. A complex
/// number c commutes past j as c*j = j*conj(c), which is what makes the
/// pair representation close under multiplication.
struct Quaternion {
  Complex z{0.0, 0.0};
  Complex zeta{0.0, 0.0};

  constexpr Quaternion() = default;
  constexpr Quaternion(Complex z_, Complex zeta_) : z(z_), zeta(zeta_) {}
  explicit constexpr Quaternion(double real) : z(real, 0.0), zeta(0.0, 0.0) {}

  static constexpr Quaternion one() { return {{1.0, 0.0}, {0.0, 0.0}}; }
  static constexpr Quaternion unit_i() { return {{0.0, 1.0}, {0.0, 0.0}}; }
  static constexpr Quaternion unit_j() { return {{0.0, 0.0}, {1.0, 0.0}}; }
  static constexpr Quaternion unit_k() { return {{0.0, 0.0}, {0.0, 1.0}}; }

  double norm_sq() const { return std::norm(z) + std::norm(zeta); }
  double norm() const { return std::sqrt(norm_sq()); }

  /// Scalar (real) part; the rest of the quaternion is its imaginary part.
  double real_part() const { return z.real(); }

  Quaternion operator-() const { return {-z, -zeta}; }
  Quaternion& operator+=(const Quaternion& o) {
    z += o.z;
    zeta += o.zeta;
    return *this;
  }
  Quaternion& operator-=(const Quaternion& o) {
    z -= o.z;
    zeta -= o.zeta;
    return *this;
  }
  Quaternion& operator*=(double s) {
    z *= s;
    zeta *= s;
    return *this;
  }
};

inline Quaternion operator+(Quaternion a, const Quaternion& b) { return a += b; }
inline Quaternion operator-(Quaternion a, const Quaternion& b) { return a -= b; }
inline Quaternion operator*(Quaternion a, double s) { return a *= s; }
inline Quaternion operator*(double s, Quaternion a) { return a *= s; }

/// Symplectic product: (a.z, a.zeta)(b.z, b.zeta)
///   = (a.z b.z - a.zeta conj(b.zeta), a.z b.zeta + a.zeta conj(b.z)).
inline Quaternion quat_mul(const Quaternion& a, const Quaternion& b) {
  return {a.z * b.z - a.zeta * std::conj(b.zeta),
          a.z * b.zeta + a.zeta * std::conj(b.z)};
}

inline Quaternion operator*(const Quaternion& a, const Quaternion& b) {
  return quat_mul(a, b);
}

/// q* = conj(z) - zeta*j. Anti-automorphism: (ab)* = b* a*.
inline Quaternion quat_conj(const Quaternion& a) {
  return {std::conj(a.z), -a.zeta};
}

/// Left multiplication by a complex scalar: c(z + zeta j) = cz + (c zeta)j.
inline Quaternion left_mul_complex(Complex c, const Quaternion& a) {
  return {c * a.z, c * a.zeta};
}

/// Right multiplication by a complex scalar: (z + zeta j)c = zc + (zeta conj(c))j.
inline Quaternion right_mul_complex(const Quaternion& a, Complex c) {
  return {a.z * c, a.zeta * std::conj(c)};
}

/// The right-acting imaginary unit a|i = a*i. Distinct from i*a because
/// the algebra is non-commutative: (z + zeta j)i = iz - (i zeta)j.
inline Quaternion right_mul_i(const Quaternion& a) {
  return {kImag * a.z, -kImag * a.zeta};
}

/// Multiplicative inverse q^-1 = q* / |q|^2. Throws on zero norm.
inline Quaternion quat_inverse(const Quaternion& a) {
  const double n2 = a.norm_sq();
  if (n2 <= 0.0) {
    throw DomainError("quat_inverse: zero-norm quaternion has no inverse");
  }
  Quaternion c = quat_conj(a);
  return {c.z / n2, c.zeta / n2};
}

inline bool is_pure_imaginary(const Quaternion& u, double tol = 1e-12) {
  return std::abs(u.real_part()) <= tol;
}

/// Exponential of a pure-imaginary quaternion:
///   exp(u) = cos|u| + (u/|u|) sin|u|,
/// with the |u| -> 0 limit handled by the truncated series. The result is
/// a unit quaternion. A non-pure argument is a caller bug and throws.
inline Quaternion quat_exp(const Quaternion& u, double purity_tol = 1e-12) {
  if (!is_pure_imaginary(u, purity_tol)) {
    throw DomainError("quat_exp: argument must be pure imaginary (real part " +
                      std::to_string(u.real_part()) + ")");
  }
  const double n = u.norm();
  double sinc;  // sin(n)/n
  if (n < 1e-8) {
    sinc = 1.0 - n * n / 6.0;
  } else {
    sinc = std::sin(n) / n;
  }
  Quaternion r = u * sinc;
  r.z += std::cos(n);
  return r;
}

/// Angles defining the unit phase quaternion
///   K = cos(theta) e^{i gamma} + sin(theta) e^{i omega} j.
struct UnitPhaseAngles {
  double theta{0.0};
  double gamma{0.0};
  double omega{0.0};
};

/// Constructs K from its three phase angles; |K| = 1 by construction.
inline Quaternion k_from_angles(const UnitPhaseAngles& a) {
  return {std::cos(a.theta) * std::polar(1.0, a.gamma),
          std::sin(a.theta) * std::polar(1.0, a.omega)};
}

inline std::ostream& operator<<(std::ostream& os, const Quaternion& q) {
  return os << "(" << q.z.real() << (q.z.imag() < 0 ? "" : "+") << q.z.imag()
            << "i) + (" << q.zeta.real() << (q.zeta.imag() < 0 ? "" : "+")
            << q.zeta.imag() << "i)j";
}

}  // namespace qqm
