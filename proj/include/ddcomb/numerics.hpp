#pragma once

// Derivative-free root bracketing and adaptive Gauss-Kronrod quadrature.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <queue>
#include <span>
#include <sstream>
#include <type_traits>
#include <utility>
#include <vector>

#include "ddcomb/errors.hpp"

namespace ddcomb::numerics {

struct BracketedRoot {
  double lo = 0.0;
  double hi = 0.0;
  double refined = 0.0;
  double f_at_refined = 0.0;
};

namespace detail {

// Functions may return double or std::optional<double>; an empty optional marks a pole.
template <class F>
std::optional<double> eval(F& f, double x) {
  using R = std::invoke_result_t<F&, double>;
  if constexpr (std::is_same_v<std::decay_t<R>, std::optional<double>>) {
    auto v = f(x);
    if (v && !std::isfinite(*v)) return std::nullopt;
    return v;
  } else {
    const double v = f(x);
    if (!std::isfinite(v)) return std::nullopt;
    return v;
  }
}

inline bool opposite(double a, double b) { return (a < 0.0 && b > 0.0) || (a > 0.0 && b < 0.0); }

}  // namespace detail

/// Bisects a sign-change bracket until its width is <= tol or it can no longer shrink.
/// Returns nullopt if a pole marker is hit inside the bracket.
template <class F>
std::optional<BracketedRoot> bisect(F&& f, double lo, double hi, double f_lo, double tol) {
  BracketedRoot r{lo, hi, 0.5 * (lo + hi), 0.0};
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (r.lo + r.hi);
    if (mid <= r.lo || mid >= r.hi) break;
    const auto fm = detail::eval(f, mid);
    if (!fm) return std::nullopt;
    if (*fm == 0.0) {
      r.refined = mid;
      r.f_at_refined = 0.0;
      return r;
    }
    if (detail::opposite(*fm, f_lo)) {
      r.hi = mid;
    } else {
      r.lo = mid;
      f_lo = *fm;
    }
    if (r.hi - r.lo <= tol) break;
  }
  r.refined = 0.5 * (r.lo + r.hi);
  const auto fr = detail::eval(f, r.refined);
  if (!fr) return std::nullopt;
  r.f_at_refined = *fr;
  return r;
}

struct BracketOptions {
  double tol = 1e-10;
  // A sign change whose refined |f| exceeds both bracket-end values is a pole, not a root.
  bool reject_poles = true;
};

/// Samples f at the given increasing abscissae, skips pole-marked intervals, and bisects
/// every sign-change bracket. Output ordered by lo.
template <class F>
std::vector<BracketedRoot> bracket_and_bisect_on(F&& f, std::span<const double> xs, BracketOptions opt = {}) {
  std::vector<BracketedRoot> roots;
  if (xs.size() < 2) return roots;
  std::vector<std::optional<double>> fs(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) fs[i] = detail::eval(f, xs[i]);

  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    const auto& a = fs[i];
    const auto& b = fs[i + 1];
    if (!a || !b) continue;
    if (*a == 0.0) {
      roots.push_back({xs[i], xs[i], xs[i], 0.0});
      continue;
    }
    if (*b == 0.0) {
      if (i + 2 == xs.size()) roots.push_back({xs[i + 1], xs[i + 1], xs[i + 1], 0.0});
      continue;
    }
    if (!detail::opposite(*a, *b)) continue;
    auto r = bisect(f, xs[i], xs[i + 1], *a, opt.tol);
    if (!r) continue;
    if (opt.reject_poles && std::abs(r->f_at_refined) > std::min(std::abs(*a), std::abs(*b))) continue;
    roots.push_back(*r);
  }
  return roots;
}

/// Uniform-grid variant: n_samples points spanning [lo, hi].
template <class F>
std::vector<BracketedRoot> bracket_and_bisect(F&& f, double lo, double hi, std::size_t n_samples, double tol,
                                              bool reject_poles = true) {
  if (!(lo < hi)) throw ValidationError("bracket_and_bisect needs lo < hi");
  if (n_samples < 2) throw ValidationError("bracket_and_bisect needs at least 2 samples");
  if (!(tol > 0.0)) throw ValidationError("bracket_and_bisect needs tol > 0");
  std::vector<double> xs(n_samples);
  for (std::size_t i = 0; i < n_samples; ++i)
    xs[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n_samples - 1);
  xs.back() = hi;
  return bracket_and_bisect_on(std::forward<F>(f), std::span<const double>(xs), {tol, reject_poles});
}

/// Sample abscissae on the open interval (lo, hi): a uniform interior grid plus points
/// graded geometrically towards both ends, so roots hugging an end are still bracketed.
inline std::vector<double> graded_samples(double lo, double hi, std::size_t n_uniform, int grading_decades = 10) {
  const double w = hi - lo;
  std::vector<double> ts;
  ts.reserve(n_uniform + 2 * static_cast<std::size_t>(grading_decades));
  for (int k = grading_decades + 2; k >= 3; --k) ts.push_back(std::pow(10.0, -k));
  for (std::size_t i = 0; i < n_uniform; ++i) ts.push_back((static_cast<double>(i) + 0.5) / static_cast<double>(n_uniform));
  for (int k = 3; k <= grading_decades + 2; ++k) ts.push_back(1.0 - std::pow(10.0, -k));
  std::sort(ts.begin(), ts.end());
  std::vector<double> xs;
  xs.reserve(ts.size());
  for (double t : ts) {
    const double x = lo + w * t;
    if (x > lo && x < hi && (xs.empty() || x > xs.back())) xs.push_back(x);
  }
  return xs;
}

// ---------------------------------------------------------------------------
// Adaptive Gauss-Kronrod (7, 15).
// ---------------------------------------------------------------------------

namespace detail {

inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851, 0.864864423359769072789712788640926,
    0.741531185599394439863864773280788, 0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204, 0.104790010322250183839876322541518,
    0.140653259715525918745189590510238, 0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights for the 7-point rule living on the odd Kronrod nodes (indices 1, 3, 5, 7).
inline constexpr std::array<double, 4> kGaussWeights = {0.129484966168869693270611432679082,
                                                     0.279705391489276667901467771423780,
                                                     0.381830050505118944950369775488975,
                                                     0.417959183673469387755102040816327};

struct Panel {
  double a, b, value, error;
  int depth;
  bool operator<(const Panel& o) const { return error < o.error; }
};

template <class F>
Panel gk15(F& f, double a, double b, int depth) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double kronrod = fc * kKronrodWeights[7];
  double gauss = fc * kGaussWeights[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kKronrodNodes[j];
    const double s = f(c - dx) + f(c + dx);
    kronrod += kKronrodWeights[j] * s;
    if (j % 2 == 1) gauss += kGaussWeights[j / 2] * s;
  }
  return Panel{a, b, kronrod * h, std::abs((kronrod - gauss) * h), depth};
}

}  // namespace detail

/// Integrates f over [a, b] to relative accuracy rel_tol. Panels are split worst-first;
/// a panel needing more than 40 halvings raises NumericalError naming that subinterval.
template <class F>
double adaptive_integrate(F&& f, double a, double b, double rel_tol, int initial_panels = 1) {
  if (!(a < b)) throw ValidationError("adaptive_integrate needs a < b");
  if (!(rel_tol > 0.0)) throw ValidationError("adaptive_integrate needs rel_tol > 0");
  initial_panels = std::max(1, initial_panels);
  std::priority_queue<detail::Panel> queue;
  double total = 0.0;
  double error = 0.0;
  const double w = (b - a) / initial_panels;
  for (int i = 0; i < initial_panels; ++i) {
    const double pa = a + i * w;
    const double pb = (i + 1 == initial_panels) ? b : a + (i + 1) * w;
    auto panel = detail::gk15(f, pa, pb, 0);
    total += panel.value;
    error += panel.error;
    queue.push(panel);
  }
  constexpr int kMaxDepth = 40;
  // Floor for integrals that vanish identically.
  const double abs_floor = 1e-300;
  while (error > std::max(rel_tol * std::abs(total), abs_floor)) {
    auto worst = queue.top();
    if (worst.depth >= kMaxDepth) {
      std::ostringstream msg;
      msg << "adaptive_integrate did not converge; worst subinterval [" << worst.a << ", " << worst.b
          << "] error " << worst.error;
      throw NumericalError(msg.str());
    }
    queue.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    auto left = detail::gk15(f, worst.a, mid, worst.depth + 1);
    auto right = detail::gk15(f, mid, worst.b, worst.depth + 1);
    total += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    queue.push(left);
    queue.push(right);
  }
  return total;
}

}  // namespace ddcomb::numerics
