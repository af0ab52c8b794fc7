#pragma once

// Comb configuration and the dimensionless parameterization.
//
// Every inner formula works with lengths in units of the cell width l and
// energies in units of hbar^2 / (2 m l^2). In those units
//
//   p    = m alpha l / hbar^2        (site delta strength, p > 0 attractive)
//   bt   = m beta / hbar^2           (site delta-prime strength)
//   u    = 2 m U l^2 / hbar^2        (wall height)
//   eps  = 2 m E l^2 / hbar^2,  xi = k0 l = sqrt(eps),  kappa l = sqrt(u - eps)

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ddcomb/errors.hpp"

namespace ddcomb {

/// Reduced Planck constant in J*s (CODATA 2018, exact).
inline constexpr double kHbarSI = 1.054571817e-34;

/// Distance from beta_t = +-1 below which the site matching matrix is treated as singular.
inline constexpr double kBetaSingularityWindow = 1e-9;

/// Physical description of the comb. Sites sit at x = n*l, n = 1..N; walls at x = 0 and x = L.
struct CombConfig {
  int n_sites = 1;
  double cell_width = 1.0;
  double delta_strength = 0.0;        // alpha; potential carries -alpha*delta
  double delta_prime_strength = 0.0;  // beta
  double wall_left = 0.0;
  double wall_right = 0.0;
  double mass = 1.0;

  /// L = (N + 1) l.
  double system_width() const { return (n_sites + 1) * cell_width; }

  void validate() const {
    if (n_sites < 1) throw ValidationError("n_sites must be >= 1");
    if (!(cell_width > 0.0) || !std::isfinite(cell_width)) throw ValidationError("cell_width must be > 0");
    if (!(mass > 0.0) || !std::isfinite(mass)) throw ValidationError("mass must be > 0");
    if (!std::isfinite(delta_strength) || !std::isfinite(delta_prime_strength))
      throw ValidationError("site strengths must be finite");
    if (!(wall_left >= 0.0) || !(wall_right >= 0.0) || !std::isfinite(wall_left) || !std::isfinite(wall_right))
      throw ValidationError("wall heights must be finite and >= 0");
  }
};

struct DimensionlessConfig {
  int n_sites = 1;
  double p = 0.0;
  double beta_t = 0.0;
  double u_left = 0.0;
  double u_right = 0.0;

  void validate() const {
    if (n_sites < 1) throw ValidationError("n_sites must be >= 1");
    if (!std::isfinite(p) || !std::isfinite(beta_t)) throw ValidationError("p and beta must be finite");
    if (std::abs(beta_t - 1.0) < kBetaSingularityWindow || std::abs(beta_t + 1.0) < kBetaSingularityWindow)
      throw ValidationError("beta_t = +-1 makes the site matching matrix singular");
    if (!(u_left >= 0.0) || !(u_right >= 0.0) || !std::isfinite(u_left) || !std::isfinite(u_right))
      throw ValidationError("wall heights must be finite and >= 0");
  }

  /// |beta_t| > 1 is accepted (all formulas stay finite) but is outside the usual regime.
  bool unconventional_beta() const { return std::abs(beta_t) > 1.0; }

  bool symmetric_walls() const {
    return std::abs(u_left - u_right) <= 1e-12 * std::max(1.0, std::max(u_left, u_right));
  }

  /// Common wall height; the analytic surface-state equations exist only for equal walls.
  double wall() const {
    if (!symmetric_walls()) throw ValidationError("analytic surface-state equations require u_left == u_right");
    return u_left;
  }

  /// System width in units of l.
  double system_width() const { return n_sites + 1.0; }
};

/// Builds a symmetric-wall dimensionless configuration.
inline DimensionlessConfig make_symmetric(int n_sites, double p, double beta_t, double u) {
  DimensionlessConfig cfg{n_sites, p, beta_t, u, u};
  cfg.validate();
  return cfg;
}

inline DimensionlessConfig nondimensionalize(const CombConfig& config, double hbar = kHbarSI) {
  config.validate();
  const double h2 = hbar * hbar;
  const double l = config.cell_width;
  const double m = config.mass;
  DimensionlessConfig out;
  out.n_sites = config.n_sites;
  out.p = m * config.delta_strength * l / h2;
  out.beta_t = m * config.delta_prime_strength / h2;
  out.u_left = 2.0 * m * config.wall_left * l * l / h2;
  out.u_right = 2.0 * m * config.wall_right * l * l / h2;
  out.validate();
  return out;
}

/// Inverse of nondimensionalize for a chosen mass and cell width.
inline CombConfig dimensionalize(const DimensionlessConfig& cfg, double mass, double cell_width,
                                 double hbar = kHbarSI) {
  cfg.validate();
  const double h2 = hbar * hbar;
  CombConfig out;
  out.n_sites = cfg.n_sites;
  out.cell_width = cell_width;
  out.mass = mass;
  out.delta_strength = cfg.p * h2 / (mass * cell_width);
  out.delta_prime_strength = cfg.beta_t * h2 / mass;
  out.wall_left = cfg.u_left * h2 / (2.0 * mass * cell_width * cell_width);
  out.wall_right = cfg.u_right * h2 / (2.0 * mass * cell_width * cell_width);
  out.validate();
  return out;
}

/// gamma = (1 + bt) / (1 - bt): the factor by which psi jumps across a site.
inline double gamma(double beta_t) {
  if (std::abs(1.0 - beta_t) <= kBetaSingularityWindow) throw ValidationError("gamma is singular at beta_t = 1");
  return (1.0 + beta_t) / (1.0 - beta_t);
}

/// Decay rate kappa*l of the wall tail; NaN above the wall.
inline double decay_rate(double eps, double u) {
  return eps <= u ? std::sqrt(u - eps) : std::numeric_limits<double>::quiet_NaN();
}

struct EnergyPoint {
  double eps = 0.0;
  double xi = 0.0;
  double kappa_bar = std::numeric_limits<double>::quiet_NaN();

  static EnergyPoint at(double eps) {
    if (!(eps >= 0.0) || !std::isfinite(eps)) throw ValidationError("energy must be finite and >= 0");
    return EnergyPoint{eps, std::sqrt(eps), std::numeric_limits<double>::quiet_NaN()};
  }

  static EnergyPoint at(double eps, double u) {
    EnergyPoint e = at(eps);
    e.kappa_bar = decay_rate(eps, u);
    return e;
  }

  bool below_wall() const { return !std::isnan(kappa_bar); }
};

}  // namespace ddcomb
