#pragma once

// Brute-force bound states: the full linear matching system of the N-site comb and
// the zeros of its determinant. Uses only the per-cell ansatz
//   psi_n(x) = A_n sin(xi (x - n)) + B_n cos(xi (x - n)),   n < x < n + 1,
// the exponential wall tails and the site jump conditions; no dispersion relation,
// transfer matrix or surface equation enters.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "ddcomb/errors.hpp"
#include "ddcomb/numerics.hpp"
#include "ddcomb/params.hpp"

namespace ddcomb::oracle {

/// Unknowns [D_L, A_0, B_0, ..., A_N, B_N, D_R]; rows: two at x = 0, two per site, two at x = L.
struct MatchingSystem {
  int dim = 0;
  Eigen::MatrixXd matrix;

  static constexpr int d_left() { return 0; }
  static constexpr int a(int n) { return 1 + 2 * n; }
  static constexpr int b(int n) { return 2 + 2 * n; }
  int d_right() const { return dim - 1; }
};

inline MatchingSystem build_matching_matrix(const EnergyPoint& e, const DimensionlessConfig& cfg) {
  cfg.validate();
  const double u_min = std::min(cfg.u_left, cfg.u_right);
  if (!(e.eps > 0.0 && e.eps < u_min)) throw ValidationError("matching system needs 0 < eps < min(u_left, u_right)");

  const int n_sites = cfg.n_sites;
  const double xi = e.xi;
  const double kl = std::sqrt(cfg.u_left - e.eps);
  const double kr = std::sqrt(cfg.u_right - e.eps);
  const double bt = cfg.beta_t;
  const double up = (1.0 + bt) / (1.0 - bt);
  const double down = (1.0 - bt) / (1.0 + bt);
  // -alpha~ l / (1 - bt^2) = -2p / (1 - bt^2): the psi -> psi' entry of the jump matrix.
  const double mix = -2.0 * cfg.p / (1.0 - bt * bt);
  const double s = std::sin(xi);
  const double c = std::cos(xi);

  MatchingSystem sys;
  sys.dim = 2 * n_sites + 4;
  sys.matrix = Eigen::MatrixXd::Zero(sys.dim, sys.dim);
  auto& m = sys.matrix;
  using S = MatchingSystem;
  int row = 0;

  // x = 0: D_L = B_0, kappa_L D_L = xi A_0
  m(row, S::d_left()) = 1.0;
  m(row, S::b(0)) = -1.0;
  ++row;
  m(row, S::d_left()) = kl;
  m(row, S::a(0)) = -xi;
  ++row;

  // Site at x = n + 1 joins cell n (left) to cell n + 1 (right):
  //   psi(+)  = up * psi(-)
  //   psi'(+) = mix * psi(-) + down * psi'(-)
  for (int n = 0; n < n_sites; ++n) {
    // psi(-) = A_n s + B_n c,  psi'(-) = xi (A_n c - B_n s)
    m(row, S::b(n + 1)) = 1.0;
    m(row, S::a(n)) = -up * s;
    m(row, S::b(n)) = -up * c;
    ++row;
    m(row, S::a(n + 1)) = xi;
    m(row, S::a(n)) = -(mix * s + down * xi * c);
    m(row, S::b(n)) = -(mix * c - down * xi * s);
    ++row;
  }

  // x = L: psi_N(L) = D_R, psi_N'(L) = -kappa_R D_R
  const int last = n_sites;
  m(row, S::a(last)) = s;
  m(row, S::b(last)) = c;
  m(row, sys.d_right()) = -1.0;
  ++row;
  m(row, S::a(last)) = xi * c;
  m(row, S::b(last)) = -xi * s;
  m(row, sys.d_right()) = kr;
  return sys;
}

struct SignedLogDet {
  int sign = 0;
  double log_abs = -std::numeric_limits<double>::infinity();
};

/// Determinant as sign and log-magnitude: rows are scaled to unit max-norm, then
/// factored with partial pivoting.
inline SignedLogDet signed_log_det(const Eigen::MatrixXd& m) {
  Eigen::MatrixXd scaled = m;
  double log_scale = 0.0;
  for (Eigen::Index i = 0; i < scaled.rows(); ++i) {
    const double r = scaled.row(i).cwiseAbs().maxCoeff();
    if (r == 0.0) return {};
    scaled.row(i) /= r;
    log_scale += std::log(r);
  }
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(scaled);
  const auto& packed = lu.matrixLU();
  SignedLogDet out;
  out.sign = static_cast<int>(lu.permutationP().determinant());
  out.log_abs = log_scale;
  for (Eigen::Index i = 0; i < packed.rows(); ++i) {
    const double d = packed(i, i);
    if (d == 0.0) return {};
    if (d < 0.0) out.sign = -out.sign;
    out.log_abs += std::log(std::abs(d));
  }
  return out;
}

inline SignedLogDet matching_determinant(double eps, const DimensionlessConfig& cfg) {
  return signed_log_det(build_matching_matrix(EnergyPoint::at(eps), cfg).matrix);
}

/// Null vector of the matching matrix at (near) a root, by inverse iteration.
/// Normalized so the largest entry has magnitude 1 and D_L >= 0.
inline Eigen::VectorXd null_vector(double eps, const DimensionlessConfig& cfg) {
  const auto sys = build_matching_matrix(EnergyPoint::at(eps), cfg);
  const double norm = sys.matrix.cwiseAbs().rowwise().sum().maxCoeff();
  // Tiny shift keeps the factorization regular when eps is an exact root.
  Eigen::MatrixXd shifted = sys.matrix;
  shifted.diagonal().array() += 1e-14 * norm;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(shifted);
  Eigen::VectorXd v = Eigen::VectorXd::Ones(sys.dim);
  for (int it = 0; it < 6; ++it) {
    Eigen::VectorXd w = lu.solve(v);
    const double scale = w.cwiseAbs().maxCoeff();
    if (!(scale > 0.0) || !std::isfinite(scale)) throw NumericalError("inverse iteration broke down");
    v = w / scale;
  }
  if (v(0) < 0.0) v = -v;
  return v;
}

/// ||M v||_inf / (||M||_inf ||v||_inf).
inline double null_residual(double eps, const DimensionlessConfig& cfg, const Eigen::VectorXd& v) {
  const auto sys = build_matching_matrix(EnergyPoint::at(eps), cfg);
  const double norm = sys.matrix.cwiseAbs().rowwise().sum().maxCoeff();
  return (sys.matrix * v).cwiseAbs().maxCoeff() / (norm * v.cwiseAbs().maxCoeff());
}

struct OracleRoot {
  double eps = 0.0;
  double residual = 0.0;  // null-vector back-substitution residual
};

struct OracleScan {
  std::vector<OracleRoot> roots;
  std::vector<double> suspected_tangent;  // |det| dips without crossing
};

/// Roots of the matching determinant among the sample points xs (increasing, inside (0, u)).
inline OracleScan determinant_scan_on(const DimensionlessConfig& cfg, std::span<const double> xs, double tol = 1e-13) {
  OracleScan out;
  if (xs.size() < 2) return out;
  std::vector<SignedLogDet> dets(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) dets[i] = matching_determinant(xs[i], cfg);

  auto sign_of = [&](double eps) { return static_cast<double>(matching_determinant(eps, cfg).sign); };
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    if (dets[i].sign == 0) {
      out.roots.push_back({xs[i], 0.0});
      continue;
    }
    if (dets[i + 1].sign == 0 || dets[i].sign == dets[i + 1].sign) continue;
    const auto r = numerics::bisect(sign_of, xs[i], xs[i + 1], dets[i].sign, tol);
    if (!r) continue;
    out.roots.push_back({r->refined, 0.0});
  }
  for (auto& root : out.roots) root.residual = null_residual(root.eps, cfg, null_vector(root.eps, cfg));

  // Tangent roots: local minima of log|det| far below the median without a sign change.
  std::vector<double> logs;
  logs.reserve(dets.size());
  for (const auto& d : dets)
    if (d.sign != 0) logs.push_back(d.log_abs);
  if (logs.size() >= 3) {
    std::vector<double> sorted = logs;
    std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
    const double threshold = sorted[sorted.size() / 2] + std::log(1e-8);
    for (std::size_t i = 1; i + 1 < xs.size(); ++i) {
      const auto &l = dets[i - 1], &c = dets[i], &r = dets[i + 1];
      if (l.sign == 0 || c.sign == 0 || r.sign == 0) continue;
      if (l.sign != c.sign || c.sign != r.sign) continue;
      if (c.log_abs < l.log_abs && c.log_abs < r.log_abs && c.log_abs < threshold)
        out.suspected_tangent.push_back(xs[i]);
    }
  }
  return out;
}

inline OracleScan determinant_scan(const DimensionlessConfig& cfg, double eps_lo, double eps_hi, int grid,
                                   double tol = 1e-13) {
  cfg.validate();
  const double u_min = std::min(cfg.u_left, cfg.u_right);
  if (!(eps_lo > 0.0 && eps_lo < eps_hi && eps_hi < u_min))
    throw ValidationError("determinant_scan needs 0 < eps_lo < eps_hi < min(u_left, u_right)");
  if (grid < 2) throw ValidationError("determinant_scan needs grid >= 2");
  std::vector<double> xs(static_cast<std::size_t>(grid));
  for (int i = 0; i < grid; ++i) xs[static_cast<std::size_t>(i)] = eps_lo + (eps_hi - eps_lo) * i / (grid - 1.0);
  xs.back() = eps_hi;
  return determinant_scan_on(cfg, xs, tol);
}

}  // namespace ddcomb::oracle
