#pragma once

// Explicit surface-state wavefunction.
//
// With D_L provisionally 1, D1 = D_L / sin xi and D2 = D1 / eta(gamma) (the left-wall
// matching condition), and Q_n = D1 cos(n lambda) + D2 sin(n lambda), cell n holds
//
//   psi_n(x) = (Q_{n+1} / gamma) sin(xi (x - n)) - Q_n sin(xi (x - n - 1)),
//
// i.e. A_n = Q_{n+1} / gamma - Q_n cos xi and B_n = Q_n sin xi, and the right tail
// amplitude is D_R = Q_{N+1} sin(xi) / gamma. Q_n is real for a gap-valued lambda.
// D1 is singular at sin xi = 0; there the coefficients come from stepping the jump
// conditions instead.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "ddcomb/dispersion.hpp"
#include "ddcomb/errors.hpp"
#include "ddcomb/numerics.hpp"
#include "ddcomb/params.hpp"
#include "ddcomb/surface.hpp"

namespace ddcomb {

struct CellCoefficients {
  std::vector<double> a;  // A_n, n = 0..N
  std::vector<double> b;  // B_n, n = 0..N
  double d_left = 1.0;
  double d_right = 0.0;
  double d1 = 0.0;
  // D2 = D1 / eta(gamma) is imaginary in a gap; stored here is the real coefficient of
  // sinh(n mu) in Q_n = (+-1)^n [D1 cosh(n mu) + d2 sinh(n mu)].
  double d2 = 0.0;  // d1, d2 are NaN when the stepped form was used
};

/// Below this |sin xi| the closed form divides by ~0 and stepped_coefficients is used.
inline constexpr double kSinXiFloor = 1e-12;

/// Same coefficients by stepping the jump conditions from the left wall
/// (B_0 = D_L, xi A_0 = kappa D_L). Regular at sin xi = 0, where the closed form is not.
inline CellCoefficients stepped_coefficients(double eps, const DimensionlessConfig& cfg) {
  const auto e = EnergyPoint::at(eps, cfg.wall());
  const double s = std::sin(e.xi), c = std::cos(e.xi);
  const double g = gamma(cfg.beta_t);
  const double mix = -2.0 * cfg.p / (1.0 - cfg.beta_t * cfg.beta_t);
  CellCoefficients out;
  out.d_left = 1.0;
  out.a.assign(static_cast<std::size_t>(cfg.n_sites + 1), 0.0);
  out.b.assign(static_cast<std::size_t>(cfg.n_sites + 1), 0.0);
  out.a[0] = e.kappa_bar / e.xi;
  out.b[0] = out.d_left;
  for (int n = 0; n < cfg.n_sites; ++n) {
    const double an = out.a[static_cast<std::size_t>(n)], bn = out.b[static_cast<std::size_t>(n)];
    const double psi = an * s + bn * c;
    const double dpsi = e.xi * (an * c - bn * s);
    out.b[static_cast<std::size_t>(n + 1)] = g * psi;
    out.a[static_cast<std::size_t>(n + 1)] = (mix * psi + dpsi / g) / e.xi;
  }
  out.d_right = out.a.back() * s + out.b.back() * c;
  out.d1 = std::numeric_limits<double>::quiet_NaN();
  out.d2 = std::numeric_limits<double>::quiet_NaN();
  return out;
}

inline CellCoefficients cell_coefficients(double eps, const BlochPhase& lam, const DimensionlessConfig& cfg) {
  const double u = cfg.wall();
  const auto e = EnergyPoint::at(eps, u);
  if (!(eps > 0.0 && eps < u)) throw ValidationError("surface state must satisfy 0 < eps < u");
  if (!lam.in_gap()) throw ValidationError("surface state energy must lie inside a gap");
  const double s = std::sin(e.xi);
  const double c = std::cos(e.xi);
  if (std::abs(s) < kSinXiFloor) return stepped_coefficients(eps, cfg);

  const double g = gamma(cfg.beta_t);
  const double r = e.kappa_bar / e.xi;
  const double mu = lam.mu();
  const double sign = lam.regime == PhaseRegime::ZoneCenterGap ? 1.0 : -1.0;
  // sin(lambda) = sign * i sinh(mu), cos(lambda) = sign * cosh(mu).
  const double d1_den = g * c + g * r * s - sign * std::cosh(mu);
  const double inv_eta_im = d1_den / (sign * std::sinh(mu));

  CellCoefficients out;
  out.d_left = 1.0;
  out.d1 = out.d_left / s;
  // cos(n lambda) = sign^n cosh(n mu), sin(n lambda) = sign^n i sinh(n mu).
  out.d2 = out.d1 * inv_eta_im;
  const int n_sites = cfg.n_sites;
  auto q = [&](int n) {
    const double parity = (sign < 0.0 && (n % 2 != 0)) ? -1.0 : 1.0;
    return parity * (out.d1 * std::cosh(n * mu) + out.d2 * std::sinh(n * mu));
  };
  out.a.resize(static_cast<std::size_t>(n_sites + 1));
  out.b.resize(static_cast<std::size_t>(n_sites + 1));
  for (int n = 0; n <= n_sites; ++n) {
    out.a[static_cast<std::size_t>(n)] = q(n + 1) / g - q(n) * c;
    out.b[static_cast<std::size_t>(n)] = q(n) * s;
  }
  out.d_right = q(n_sites + 1) * s / g;
  return out;
}

inline CellCoefficients cell_coefficients(const SurfaceState& state, const DimensionlessConfig& cfg) {
  return cell_coefficients(state.eps, state.lambda, cfg);
}

enum class Side { Left, Right };

/// Piecewise-analytic surface-state wavefunction (x in units of l).
class Wavefunction {
 public:
  Wavefunction(double eps, const DimensionlessConfig& cfg, CellCoefficients coeffs)
      : eps_(eps), xi_(std::sqrt(eps)), kappa_(decay_rate(eps, cfg.wall())), n_sites_(cfg.n_sites),
        coeffs_(std::move(coeffs)) {}

  double eps() const { return eps_; }
  double xi() const { return xi_; }
  double kappa_bar() const { return kappa_; }
  int n_sites() const { return n_sites_; }
  double width() const { return n_sites_ + 1.0; }
  const CellCoefficients& coefficients() const { return coeffs_; }

  /// psi at x; at a site or wall the side selects the one-sided limit.
  double value(double x, Side side = Side::Right) const { return eval(x, side, false); }
  double derivative(double x, Side side = Side::Right) const { return eval(x, side, true); }

  /// Probability inside cell n, by adaptive quadrature over the cell.
  double cell_norm(int n, double rel_tol, int panels = 1) const {
    const double a = coeffs_.a[static_cast<std::size_t>(n)];
    const double b = coeffs_.b[static_cast<std::size_t>(n)];
    auto f = [&](double t) {
      const double v = a * std::sin(xi_ * t) + b * std::cos(xi_ * t);
      return v * v;
    };
    return numerics::adaptive_integrate(f, 0.0, 1.0, rel_tol, panels);
  }

  /// Integral of psi^2 over the whole axis; tails in closed form D^2 / (2 kappa).
  double norm(double rel_tol = 1e-12, int panels = 1) const {
    double total = (coeffs_.d_left * coeffs_.d_left + coeffs_.d_right * coeffs_.d_right) / (2.0 * kappa_);
    for (int n = 0; n <= n_sites_; ++n) total += cell_norm(n, rel_tol, panels);
    return total;
  }

  /// Multiplies every amplitude by `factor`.
  void scale(double factor) {
    for (auto& v : coeffs_.a) v *= factor;
    for (auto& v : coeffs_.b) v *= factor;
    coeffs_.d_left *= factor;
    coeffs_.d_right *= factor;
    coeffs_.d1 *= factor;
    coeffs_.d2 *= factor;
  }

 private:
  double eval(double x, Side side, bool deriv) const {
    const double l_end = width();
    const bool left_tail = x < 0.0 || (x == 0.0 && side == Side::Left);
    const bool right_tail = x > l_end || (x == l_end && side == Side::Right);
    if (left_tail) {
      const double v = coeffs_.d_left * std::exp(kappa_ * x);
      return deriv ? kappa_ * v : v;
    }
    if (right_tail) {
      const double v = coeffs_.d_right * std::exp(-kappa_ * (x - l_end));
      return deriv ? -kappa_ * v : v;
    }
    int n = static_cast<int>(std::floor(x));
    if (static_cast<double>(n) == x && side == Side::Left) --n;
    n = std::clamp(n, 0, n_sites_);
    const double t = x - n;
    const double a = coeffs_.a[static_cast<std::size_t>(n)];
    const double b = coeffs_.b[static_cast<std::size_t>(n)];
    if (deriv) return xi_ * (a * std::cos(xi_ * t) - b * std::sin(xi_ * t));
    return a * std::sin(xi_ * t) + b * std::cos(xi_ * t);
  }

  double eps_;
  double xi_;
  double kappa_;
  int n_sites_;
  CellCoefficients coeffs_;
};

/// Normalized wavefunction with D_L > 0.
inline Wavefunction normalized_wavefunction(const SurfaceState& state, const DimensionlessConfig& cfg,
                                            double rel_tol = 1e-12) {
  Wavefunction wf(state.eps, cfg, cell_coefficients(state, cfg));
  const double n = wf.norm(rel_tol);
  wf.scale((wf.coefficients().d_left < 0.0 ? -1.0 : 1.0) / std::sqrt(n));
  return wf;
}

struct WavefunctionSample {
  double x = 0.0;
  double psi = 0.0;
};

struct WavefunctionTable {
  std::vector<WavefunctionSample> samples;
  double eps = 0.0;
  double norm_constant = 0.0;  // D_L after normalization
  CellCoefficients coefficients;
  std::vector<std::string> notes;
};

/// Samples the normalized wavefunction on x_grid (sorted, units of l). Points outside
/// [-10, L + 10] are dropped with a note.
inline WavefunctionTable evaluate(const SurfaceState& state, const DimensionlessConfig& cfg,
                                  std::span<const double> x_grid) {
  if (!std::is_sorted(x_grid.begin(), x_grid.end())) throw ValidationError("x_grid must be sorted");
  const auto wf = normalized_wavefunction(state, cfg);
  WavefunctionTable out;
  out.eps = state.eps;
  out.coefficients = wf.coefficients();
  out.norm_constant = out.coefficients.d_left;
  const double lo = -10.0;
  const double hi = wf.width() + 10.0;
  std::size_t clipped = 0;
  out.samples.reserve(x_grid.size());
  for (double x : x_grid) {
    if (x < lo || x > hi) {
      ++clipped;
      continue;
    }
    out.samples.push_back({x, wf.value(x)});
  }
  if (clipped > 0) {
    std::ostringstream msg;
    msg << clipped << " grid points outside [" << lo << ", " << hi << "] dropped";
    out.notes.push_back(msg.str());
  }
  return out;
}

inline WavefunctionTable evaluate(double eps, const DimensionlessConfig& cfg, std::span<const double> x_grid) {
  const auto e = EnergyPoint::at(eps, cfg.wall());
  SurfaceState state;
  state.eps = eps;
  state.lambda = bloch_phase(e, cfg);
  return evaluate(state, cfg, x_grid);
}

}  // namespace ddcomb
