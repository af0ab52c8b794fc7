#pragma once

// Surface (Tamm) states inside gaps, from two independent analytic equations.
//
// Classical matching form, with M = N + 1, r = kappa l / xi and
//   eta(g)    = sin(lambda) / (g cos xi + g r sin xi - cos lambda)
//   eta(1/g)  = g sin(lambda) / (cos xi + r sin xi - g cos lambda):
//
//   ctg(M lambda) = (eta(g) eta(1/g) - 1) / (eta(g) + eta(1/g)).
//
// Impedance form, obtained by carrying the right-wall impedance i r through the
// comb with the cell impedance map and matching the left-wall impedance -i r:
//
//   sin(lambda) ctg(M lambda) - cos(lambda)
//       = ((1 - bt^2) / 2) [(r^2 - 1) sin xi + 2 r cos xi] / [Omega - (1 + bt^2) r].
//
// The impedance form is regular at gap edges; the classical form is purely imaginary
// throughout a gap (both sides scale with sin(lambda)), so its imaginary part is the
// real-valued residual.

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ddcomb/cell.hpp"
#include "ddcomb/dispersion.hpp"
#include "ddcomb/errors.hpp"
#include "ddcomb/numerics.hpp"
#include "ddcomb/oracle.hpp"
#include "ddcomb/params.hpp"

namespace ddcomb {

enum class Method { Classical, Impedance, Oracle };

/// How the decay-rate ratio in the impedance equation is formed: kappa l / xi (Cell)
/// or kappa L / xi with L = (N + 1) l (System).
enum class KappaReading { Cell, System };

inline const char* to_string(Method m) {
  switch (m) {
    case Method::Classical: return "classical";
    case Method::Impedance: return "impedance";
    case Method::Oracle: return "oracle";
  }
  return "?";
}

inline const char* to_string(KappaReading k) { return k == KappaReading::Cell ? "cell" : "system"; }

struct SurfaceState {
  double eps = 0.0;
  BlochPhase lambda;
  int gap_index = 0;
  Method method = Method::Classical;
  double residual = 0.0;
};

/// eta(gamma) and eta(1/gamma). Inside a gap both are purely imaginary.
struct EtaPair {
  cplx eta_g;
  cplx eta_ginv;
};

inline constexpr double kPoleTolerance = 1e-13;

/// Complex cotangent, stable for large |Im z| (tends to -i sign(Im z)).
inline cplx complex_cot(cplx z) {
  const double x = z.real();
  const double y = z.imag();
  if (std::abs(y) > 350.0) return {0.0, y > 0.0 ? -1.0 : 1.0};
  const double den = std::cosh(2.0 * y) - std::cos(2.0 * x);
  return {std::sin(2.0 * x) / den, -std::sinh(2.0 * y) / den};
}

namespace detail {

struct GapInputs {
  double xi, r, gamma;
  cplx sin_l, cos_l;
  cplx cot_cells;  // ctg((N + 1) lambda)
};

inline GapInputs gap_inputs(const EnergyPoint& e, const DimensionlessConfig& cfg, const BlochPhase& lam) {
  if (!(e.xi > 0.0)) throw ValidationError("surface equations need eps > 0");
  if (!e.below_wall()) throw ValidationError("surface equations need eps below the wall");
  if (!lam.in_gap()) throw ValidationError("surface equations need eps strictly inside a gap");
  // lambda = i mu or pi + i mu: evaluate the trigonometric functions in closed form so
  // the vanishing components are exactly zero. ctg is pi-periodic.
  const double mu = lam.mu();
  const double sign = lam.regime == PhaseRegime::ZoneCenterGap ? 1.0 : -1.0;
  const cplx sin_l{0.0, sign * std::sinh(mu)};
  const cplx cos_l{sign * std::cosh(mu), 0.0};
  const cplx cot_cells = complex_cot(cplx{0.0, (cfg.n_sites + 1.0) * mu});
  return GapInputs{e.xi, e.kappa_bar / e.xi, gamma(cfg.beta_t), sin_l, cos_l, cot_cells};
}

inline EnergyPoint energy_for(double eps, const DimensionlessConfig& cfg) { return EnergyPoint::at(eps, cfg.wall()); }

inline double checked_component(cplx value, bool want_imag, const char* what) {
  const double keep = want_imag ? value.imag() : value.real();
  const double drop = want_imag ? value.real() : value.imag();
  if (std::abs(drop) > 1e-9 * std::max(1.0, std::abs(keep))) {
    std::ostringstream msg;
    msg << what << " lost its reality structure: " << value;
    throw NumericalError(msg.str());
  }
  return keep;
}

}  // namespace detail

/// nullopt when either denominator is within kPoleTolerance of zero.
inline std::optional<EtaPair> eta_pair(const EnergyPoint& e, const DimensionlessConfig& cfg, const BlochPhase& lam) {
  const auto in = detail::gap_inputs(e, cfg, lam);
  const double s = std::sin(in.xi);
  const double c = std::cos(in.xi);
  const cplx d1 = in.gamma * c + in.gamma * in.r * s - in.cos_l;
  const cplx d2 = c + in.r * s - in.gamma * in.cos_l;
  if (std::abs(d1) < kPoleTolerance || std::abs(d2) < kPoleTolerance) return std::nullopt;
  return EtaPair{in.sin_l / d1, in.gamma * in.sin_l / d2};
}

/// Classical-form residual. The eta fractions are cleared,
///   (eta eta' - 1) / (eta + eta') = (g s^2 - d1 d2) / (s (d2 + g d1)),
/// so the only pole left is eta + eta' = 0.
inline std::optional<double> classical_residual(const EnergyPoint& e, const DimensionlessConfig& cfg) {
  const auto lam = bloch_phase(e, cfg);
  const auto in = detail::gap_inputs(e, cfg, lam);
  const double s = std::sin(in.xi);
  const double c = std::cos(in.xi);
  const cplx d1 = in.gamma * c + in.gamma * in.r * s - in.cos_l;
  const cplx d2 = c + in.r * s - in.gamma * in.cos_l;
  const cplx den = in.sin_l * (d2 + in.gamma * d1);
  if (std::abs(den) < kPoleTolerance) return std::nullopt;
  const cplx rhs = (in.gamma * in.sin_l * in.sin_l - d1 * d2) / den;
  const cplx lhs = in.cot_cells;
  return detail::checked_component(lhs - rhs, /*want_imag=*/true, "classical residual");
}

inline std::optional<double> classical_residual(double eps, const DimensionlessConfig& cfg) {
  return classical_residual(detail::energy_for(eps, cfg), cfg);
}

/// Right-hand side of the impedance equation; nullopt at its pole.
inline std::optional<double> impedance_rhs(const EnergyPoint& e, const DimensionlessConfig& cfg,
                                           KappaReading reading = KappaReading::Cell) {
  const double xi = e.xi;
  double r = e.kappa_bar / xi;
  if (reading == KappaReading::System) r *= cfg.system_width();
  const double b2 = cfg.beta_t * cfg.beta_t;
  const double den = omega(e, cfg) - (1.0 + b2) * r;
  if (std::abs(den) < kPoleTolerance) return std::nullopt;
  return 0.5 * (1.0 - b2) * ((r * r - 1.0) * std::sin(xi) + 2.0 * r * std::cos(xi)) / den;
}

/// sin(lambda) ctg((N + 1) lambda) - cos(lambda), real inside a gap.
inline double impedance_lhs(const EnergyPoint& e, const DimensionlessConfig& cfg, const BlochPhase& lam) {
  const auto in = detail::gap_inputs(e, cfg, lam);
  const cplx v = in.sin_l * in.cot_cells - in.cos_l;
  return detail::checked_component(v, /*want_imag=*/false, "impedance left-hand side");
}

inline std::optional<double> impedance_residual(const EnergyPoint& e, const DimensionlessConfig& cfg,
                                                KappaReading reading = KappaReading::Cell) {
  const auto lam = bloch_phase(e, cfg);
  const double lhs = impedance_lhs(e, cfg, lam);
  const auto rhs = impedance_rhs(e, cfg, reading);
  if (!rhs) return std::nullopt;
  return lhs - *rhs;
}

inline std::optional<double> impedance_residual(double eps, const DimensionlessConfig& cfg,
                                                KappaReading reading = KappaReading::Cell) {
  return impedance_residual(detail::energy_for(eps, cfg), cfg, reading);
}

struct SurfaceSearchOptions {
  int samples_per_gap = 2000;
  double tol = 1e-13;
  KappaReading reading = KappaReading::Cell;
};

struct SurfaceSearch {
  std::vector<SurfaceState> states;
  std::vector<std::string> notes;
};

/// Search window of a gap below the wall: (lo, min(hi, u)); nullopt if the gap lies above u.
inline std::optional<Interval> gap_window(const Interval& gap, double u) {
  const double hi = std::min(gap.hi, u);
  if (!(hi > gap.lo)) return std::nullopt;
  return Interval{gap.lo, hi};
}

/// All surface states in the gaps of `bands` that lie below the wall.
inline SurfaceSearch find_surface_states(const DimensionlessConfig& cfg, const BandStructure& bands, Method method,
                                         const SurfaceSearchOptions& opt = {}) {
  cfg.validate();
  const double u = cfg.wall();
  if (bands.eps_max > u * (1.0 + 1e-12)) throw ValidationError("band structure must be computed with eps_max <= u");

  SurfaceSearch out;
  for (std::size_t g = 0; g < bands.gaps.size(); ++g) {
    const int index = static_cast<int>(g) + 1;
    const auto window = gap_window(bands.gaps[g], u);
    if (!window) continue;
    const auto xs = numerics::graded_samples(window->lo, window->hi, static_cast<std::size_t>(opt.samples_per_gap));

    auto emit = [&](double eps, double residual) {
      const auto e = EnergyPoint::at(eps, u);
      const auto lam = bloch_phase(e, cfg);
      if (!lam.in_gap() || !(eps < u)) return;
      out.states.push_back(SurfaceState{eps, lam, index, method, residual});
    };

    std::size_t poles = 0;
    if (method == Method::Oracle) {
      const auto scan = oracle::determinant_scan_on(cfg, xs, opt.tol);
      for (const auto& r : scan.roots) emit(r.eps, r.residual);
      for (double t : scan.suspected_tangent) {
        std::ostringstream msg;
        msg << "gap " << index << ": suspected tangent root near eps = " << t;
        out.notes.push_back(msg.str());
      }
    } else {
      auto f = [&](double eps) -> std::optional<double> {
        std::optional<double> v = method == Method::Classical ? classical_residual(eps, cfg)
                                                              : impedance_residual(eps, cfg, opt.reading);
        if (!v) ++poles;
        return v;
      };
      const auto roots = numerics::bracket_and_bisect_on(f, xs, {opt.tol, true});
      for (const auto& r : roots) emit(r.refined, r.f_at_refined);
    }
    if (poles > 0 && out.states.empty()) {
      std::ostringstream msg;
      msg << "gap " << index << ": " << poles << " pole-marked samples, no root found";
      out.notes.push_back(msg.str());
    }
  }
  std::sort(out.states.begin(), out.states.end(), [](const SurfaceState& a, const SurfaceState& b) {
    return a.gap_index != b.gap_index ? a.gap_index < b.gap_index : a.eps < b.eps;
  });
  return out;
}

}  // namespace ddcomb
