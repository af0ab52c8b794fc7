#pragma once

// One elementary cell of the comb: a delta-delta' site at the left edge followed by
// a free segment of width l.
//
// Conventions (lengths in units of l, energies as in params.hpp):
//
//  * Plane-wave amplitudes (a, b) at a reference point mean psi = a + b and
//    psi' / (i xi) = a - b there.
//  * The transfer matrix T maps the amplitudes at the right end of the cell to the
//    amplitudes just left of its site.
//  * The normalized impedance is zeta = Z / z0 = psi' / (i xi psi) = (a - b) / (a + b),
//    with the characteristic impedance z0 = xi. A cell acts on it as
//      zeta_left = (Z11 - Z12 zeta_right) / (Z21 - Z22 zeta_right).
//  * Omega = -p / xi. With this value (T11 + T22) / 2 reproduces the Bloch dispersion
//    relation, T is exactly the plane-wave form of "jump back across the site after
//    propagating back across the segment", and the Z_ij Moebius map is that same
//    operator written in the (psi' / (i xi), psi) basis:
//      [[-Z12, Z11], [-Z22, Z21]] = C T C^-1,  C = [[1, -1], [1, 1]].

#include <array>
#include <cmath>
#include <complex>
#include <optional>

#include "ddcomb/errors.hpp"
#include "ddcomb/params.hpp"

namespace ddcomb {

using cplx = std::complex<double>;

enum class MatrixKind { Transfer, Impedance };

struct CellMatrix {
  cplx m11{}, m12{}, m21{}, m22{};
  MatrixKind kind = MatrixKind::Transfer;

  cplx det() const { return m11 * m22 - m12 * m21; }
  cplx half_trace() const { return 0.5 * (m11 + m22); }

  CellMatrix operator*(const CellMatrix& o) const {
    return CellMatrix{m11 * o.m11 + m12 * o.m21, m11 * o.m12 + m12 * o.m22, m21 * o.m11 + m22 * o.m21,
                      m21 * o.m12 + m22 * o.m22, kind};
  }

  std::array<cplx, 2> apply(const std::array<cplx, 2>& v) const {
    return {m11 * v[0] + m12 * v[1], m21 * v[0] + m22 * v[1]};
  }
};

inline CellMatrix identity_matrix(MatrixKind kind = MatrixKind::Transfer) {
  return CellMatrix{1.0, 0.0, 0.0, 1.0, kind};
}

inline CellMatrix power(CellMatrix m, int n) {
  CellMatrix acc = identity_matrix(m.kind);
  while (n > 0) {
    if (n & 1) acc = acc * m;
    m = m * m;
    n >>= 1;
  }
  return acc;
}

namespace detail {
inline void require_positive_energy(const EnergyPoint& e) {
  if (!(e.xi > 0.0)) throw ValidationError("cell matrices need eps > 0");
}
}  // namespace detail

/// Omega = -p / xi.
inline double omega(const EnergyPoint& e, const DimensionlessConfig& cfg) {
  detail::require_positive_energy(e);
  return -cfg.p / e.xi;
}

/// Characteristic impedance of the free segment in units where z0 = xi.
inline double characteristic_impedance(const EnergyPoint& e) { return e.xi; }

/// Normalized (unit-determinant) impedance matrix. ch(i xi) = cos xi, sh(i xi) = i sin xi.
inline CellMatrix impedance_matrix(const EnergyPoint& e, const DimensionlessConfig& cfg) {
  const double om = omega(e, cfg);
  const double b = cfg.beta_t;
  const double one_m_b2 = 1.0 - b * b;
  const double up = (1.0 + b) / (1.0 - b);
  const double down = (1.0 - b) / (1.0 + b);
  const cplx ch{std::cos(e.xi), 0.0};
  const cplx sh{0.0, std::sin(e.xi)};
  const cplx two_i_om{0.0, 2.0 * om / one_m_b2};
  return CellMatrix{two_i_om * ch - up * sh, two_i_om * sh - up * ch, down * ch, down * sh, MatrixKind::Impedance};
}

/// Unimodular transfer matrix of one cell.
inline CellMatrix transfer_matrix(const EnergyPoint& e, const DimensionlessConfig& cfg) {
  const double om = omega(e, cfg);
  const double b = cfg.beta_t;
  const double s = 1.0 / (1.0 - b * b);
  const double diag = 1.0 + b * b;
  const cplx em = std::polar(1.0, -e.xi);
  const cplx ep = std::polar(1.0, e.xi);
  const cplx i_om{0.0, om};
  return CellMatrix{s * (diag + i_om) * em, s * (i_om - 2.0 * b) * ep, -s * (i_om + 2.0 * b) * em,
                    s * (diag - i_om) * ep, MatrixKind::Transfer};
}

/// Z_ij from T via [[-Z12, Z11], [-Z22, Z21]] = C T C^-1.
inline CellMatrix impedance_from_transfer(const CellMatrix& t) {
  // C T C^-1 with C = [[1, -1], [1, 1]], C^-1 = 1/2 [[1, 1], [-1, 1]].
  const cplx k11 = 0.5 * (t.m11 - t.m21 - t.m12 + t.m22);
  const cplx k12 = 0.5 * (t.m11 - t.m21 + t.m12 - t.m22);
  const cplx k21 = 0.5 * (t.m11 + t.m21 - t.m12 - t.m22);
  const cplx k22 = 0.5 * (t.m11 + t.m21 + t.m12 + t.m22);
  return CellMatrix{k12, -k11, k22, -k21, MatrixKind::Impedance};
}

/// T from Z_ij via T = C^-1 [[-Z12, Z11], [-Z22, Z21]] C.
inline CellMatrix transfer_from_impedance(const CellMatrix& z) {
  const cplx k11 = -z.m12, k12 = z.m11, k21 = -z.m22, k22 = z.m21;
  // C^-1 K C
  const cplx t11 = 0.5 * (k11 + k12 + k21 + k22);
  const cplx t12 = 0.5 * (-k11 + k12 - k21 + k22);
  const cplx t21 = 0.5 * (-k11 - k12 + k21 + k22);
  const cplx t22 = 0.5 * (k11 - k12 - k21 + k22);
  return CellMatrix{t11, t12, t21, t22, MatrixKind::Transfer};
}

/// Impedance in projective form Z = num / den; den == 0 is the point at infinity.
struct ProjectiveImpedance {
  cplx num{1.0};
  cplx den{1.0};

  std::optional<cplx> value(double pole_tol = 1e-14) const {
    if (std::abs(den) < pole_tol * std::max(1.0, std::abs(num))) return std::nullopt;
    return num / den;
  }
};

/// Moebius action of a transfer matrix on a normalized impedance zeta = Z / z0.
inline ProjectiveImpedance transfer_action(const CellMatrix& t, const ProjectiveImpedance& zeta) {
  // (a, b) ~ ((den + num) / 2, (den - num) / 2)
  const cplx a = 0.5 * (zeta.den + zeta.num);
  const cplx b = 0.5 * (zeta.den - zeta.num);
  const cplx a2 = t.m11 * a + t.m12 * b;
  const cplx b2 = t.m21 * a + t.m22 * b;
  return ProjectiveImpedance{a2 - b2, a2 + b2};
}

/// Moebius action of an impedance matrix: zeta -> (Z11 - Z12 zeta) / (Z21 - Z22 zeta).
inline ProjectiveImpedance impedance_action(const CellMatrix& z, const ProjectiveImpedance& zeta) {
  return ProjectiveImpedance{z.m11 * zeta.den - z.m12 * zeta.num, z.m21 * zeta.den - z.m22 * zeta.num};
}

/// Carries an impedance across one cell (from its right end to just left of its site).
inline ProjectiveImpedance propagate_projective(const ProjectiveImpedance& z_in, const EnergyPoint& e,
                                                const DimensionlessConfig& cfg) {
  // The impedance scale z0 = xi cancels in the projective ratio.
  return impedance_action(impedance_matrix(e, cfg), z_in);
}

/// Absolute-impedance form of propagate_projective; nullopt signals an impedance pole.
inline std::optional<cplx> propagate_impedance(cplx z_in, const EnergyPoint& e, const DimensionlessConfig& cfg) {
  const double z0 = characteristic_impedance(e);
  const auto out = propagate_projective(ProjectiveImpedance{z_in / z0, 1.0}, e, cfg);
  const auto zeta = out.value();
  if (!zeta) return std::nullopt;
  return *zeta * z0;
}

}  // namespace ddcomb
