#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ddcomb/errors.hpp"
#include "ddcomb/numerics.hpp"
#include "ddcomb/params.hpp"

namespace ddcomb {

/// sin(xi) / xi, with a Taylor series below xi = 1e-4.
inline double sinc(double xi) {
  if (std::abs(xi) < 1e-4) {
    const double x2 = xi * xi;
    return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
  }
  return std::sin(xi) / xi;
}

/// X(eps) = cos(lambda) = ((1 + bt^2) cos xi - p sin(xi) / xi) / (1 - bt^2).
inline double bloch_cos(const EnergyPoint& e, const DimensionlessConfig& cfg) {
  const double b2 = cfg.beta_t * cfg.beta_t;
  return ((1.0 + b2) * std::cos(e.xi) - cfg.p * sinc(e.xi)) / (1.0 - b2);
}

enum class PhaseRegime {
  Band,           // lambda real in [0, pi]
  ZoneCenterGap,  // X > 1:  lambda = i mu
  ZoneEdgeGap,    // X < -1: lambda = pi + i mu
};

struct BlochPhase {
  std::complex<double> lambda{};
  PhaseRegime regime = PhaseRegime::Band;

  bool in_gap() const { return regime != PhaseRegime::Band; }
  /// Decay exponent per cell (Im lambda >= 0).
  double mu() const { return lambda.imag(); }
};

inline BlochPhase bloch_phase_from_cos(double x) {
  if (x > 1.0) return {{0.0, std::acosh(x)}, PhaseRegime::ZoneCenterGap};
  if (x < -1.0) return {{std::numbers::pi, std::acosh(-x)}, PhaseRegime::ZoneEdgeGap};
  return {{std::acos(x), 0.0}, PhaseRegime::Band};
}

inline BlochPhase bloch_phase(const EnergyPoint& e, const DimensionlessConfig& cfg) {
  return bloch_phase_from_cos(bloch_cos(e, cfg));
}

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double width() const { return hi - lo; }
  bool contains(double x) const { return x > lo && x < hi; }
};

struct BandStructure {
  std::vector<Interval> bands;
  std::vector<Interval> gaps;
  double eps_max = 0.0;
  double grid_spacing = 0.0;
  std::vector<std::string> notes;

  /// 1-based index of the gap strictly containing eps, in energy order.
  std::optional<int> gap_index(double eps) const {
    for (std::size_t i = 0; i < gaps.size(); ++i)
      if (gaps[i].contains(eps)) return static_cast<int>(i) + 1;
    return std::nullopt;
  }

  const Interval& gap(int index) const {
    if (index < 1 || index > static_cast<int>(gaps.size())) throw ValidationError("gap index out of range");
    return gaps[static_cast<std::size_t>(index - 1)];
  }
};

/// Tiles (0, eps_max] into allowed bands (|X| <= 1) and gaps. Edges are sign changes of
/// |X| - 1 on the scan grid, refined by bisection to edge_tol. Gaps are numbered from 1
/// in energy order, including a gap that touches eps = 0.
inline BandStructure find_bands(const DimensionlessConfig& cfg, double eps_max, int grid_points,
                                double edge_tol = 1e-13) {
  cfg.validate();
  if (!(eps_max > 0.0)) throw ValidationError("eps_max must be > 0");
  if (grid_points < 100) throw ValidationError("grid_points must be >= 100");

  auto excess = [&](double eps) { return std::abs(bloch_cos(EnergyPoint::at(eps), cfg)) - 1.0; };

  BandStructure out;
  out.eps_max = eps_max;
  out.grid_spacing = eps_max / (grid_points - 1);

  // Edges where the sign of |X| - 1 flips; zero counts as "allowed".
  std::vector<double> edges;
  double prev_x = 0.0;
  bool prev_gap = excess(0.0) > 0.0;
  const bool starts_in_gap = prev_gap;
  for (int i = 1; i < grid_points; ++i) {
    const double x = (i + 1 == grid_points) ? eps_max : eps_max * i / (grid_points - 1);
    const bool gap = excess(x) > 0.0;
    if (gap != prev_gap) {
      auto f = [&](double eps) { return excess(eps) > 0.0 ? 1.0 : -1.0; };
      const auto r = numerics::bisect(f, prev_x, x, prev_gap ? 1.0 : -1.0, edge_tol);
      edges.push_back(r ? r->refined : 0.5 * (prev_x + x));
    }
    prev_x = x;
    prev_gap = gap;
  }

  // An edge within edge_tol of eps_max would only leave a zero-width sliver.
  if (!edges.empty() && eps_max - edges.back() <= edge_tol) edges.pop_back();

  double lo = 0.0;
  bool gap = starts_in_gap;
  auto push = [&](double hi) {
    (gap ? out.gaps : out.bands).push_back({lo, hi});
    lo = hi;
    gap = !gap;
  };
  for (double edge : edges) push(edge);
  push(eps_max);

  for (const auto* list : {&out.bands, &out.gaps}) {
    for (const auto& iv : *list) {
      if (iv.width() < 2.0 * out.grid_spacing && iv.hi < eps_max && iv.lo > 0.0) {
        std::ostringstream msg;
        msg << "interval [" << iv.lo << ", " << iv.hi << "] is narrower than two grid spacings ("
            << out.grid_spacing << "); narrower features may be missed";
        out.notes.push_back(msg.str());
      }
    }
  }
  std::ostringstream res;
  res << "scan grid spacing " << out.grid_spacing;
  out.notes.push_back(res.str());
  return out;
}

}  // namespace ddcomb
