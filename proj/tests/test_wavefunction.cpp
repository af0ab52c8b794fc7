#include <gtest/gtest.h>

#include "ddcomb/dispersion.hpp"
#include "ddcomb/oracle.hpp"
#include "ddcomb/surface.hpp"
#include "ddcomb/wavefunction.hpp"
#include "test_support.hpp"

using namespace ddcomb;
namespace ts = testsupport;

namespace {

std::vector<SurfaceState> states_of(const DimensionlessConfig& cfg) {
  return find_surface_states(cfg, find_bands(cfg, cfg.wall(), 20000), Method::Classical).states;
}

/// Coefficient vector laid out like the oracle's unknowns.
Eigen::VectorXd as_vector(const CellCoefficients& c) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(2 * c.a.size() + 2));
  v(0) = c.d_left;
  for (std::size_t n = 0; n < c.a.size(); ++n) {
    v(static_cast<Eigen::Index>(1 + 2 * n)) = c.a[n];
    v(static_cast<Eigen::Index>(2 + 2 * n)) = c.b[n];
  }
  v(v.size() - 1) = c.d_right;
  return v;
}

}  // namespace

TEST(CellCoefficients, ReproduceOracleNullVector) {
  for (double bt : {0.0, 0.2, -0.2}) {
    const auto cfg = make_symmetric(3, 1.0, bt, 50.0);
    for (const auto& s : states_of(cfg)) {
      const Eigen::VectorXd ours = as_vector(cell_coefficients(s, cfg));
      const Eigen::VectorXd ref = oracle::null_vector(s.eps, cfg);
      const Eigen::VectorXd scaled = ours / ours.cwiseAbs().maxCoeff();
      EXPECT_LT((scaled - ref).cwiseAbs().maxCoeff(), 1e-6) << "bt=" << bt << " eps=" << s.eps;
    }
  }
}

TEST(CellCoefficients, ClosedFormEqualsSteppedForm) {
  for (const auto& cfg : {make_symmetric(10, 2.0, -0.3, 80.0), make_symmetric(7, 0.5, 0.5, 30.0)}) {
    for (const auto& s : states_of(cfg)) {
      const auto a = cell_coefficients(s, cfg);
      const auto b = stepped_coefficients(s.eps, cfg);
      const auto va = as_vector(a), vb = as_vector(b);
      EXPECT_LT((va - vb).cwiseAbs().maxCoeff(), 1e-8 * va.cwiseAbs().maxCoeff()) << s.eps;
      EXPECT_TRUE(std::isnan(b.d1));
    }
  }
}

TEST(CellCoefficients, Validation) {
  const auto cfg = make_symmetric(3, 1.0, 0.0, 50.0);
  const auto band = EnergyPoint::at(2.0, 50.0);
  EXPECT_THROW(cell_coefficients(2.0, bloch_phase(band, cfg), cfg), ValidationError);
  EXPECT_THROW(cell_coefficients(60.0, bloch_phase_from_cos(2.0), cfg), ValidationError);
}

TEST(Wavefunction, NormalizedAndPositiveLeftTail) {
  const auto cfg = make_symmetric(3, 1.0, 0.2, 50.0);
  for (const auto& s : states_of(cfg)) {
    const auto wf = normalized_wavefunction(s, cfg);
    EXPECT_GT(wf.coefficients().d_left, 0.0);
    EXPECT_NEAR(wf.norm(), 1.0, 1e-10);
    const auto& c = wf.coefficients();
    double closed = (c.d_left * c.d_left + c.d_right * c.d_right) / (2.0 * wf.kappa_bar());
    for (std::size_t n = 0; n < c.a.size(); ++n) closed += ts::cell_square_integral(c.a[n], c.b[n], wf.xi());
    EXPECT_NEAR(closed, 1.0, 1e-10);
  }
}

TEST(Wavefunction, JumpAndWallConditions) {
  const auto cfg = make_symmetric(10, 2.0, -0.3, 80.0);
  const double g = ddcomb::gamma(cfg.beta_t), mix = -2.0 * cfg.p / (1.0 - cfg.beta_t * cfg.beta_t);
  for (const auto& s : states_of(cfg)) {
    const auto wf = normalized_wavefunction(s, cfg);
    for (int site = 1; site <= cfg.n_sites; ++site) {
      const double lo = wf.value(site, Side::Left), dlo = wf.derivative(site, Side::Left);
      EXPECT_NEAR(wf.value(site, Side::Right), g * lo, 1e-9);
      EXPECT_NEAR(wf.derivative(site, Side::Right), mix * lo + dlo / g, 1e-9);
    }
    for (double x : {0.0, wf.width()}) {
      EXPECT_NEAR(wf.value(x, Side::Left), wf.value(x, Side::Right), 1e-10);
      EXPECT_NEAR(wf.derivative(x, Side::Left), wf.derivative(x, Side::Right), 1e-10);
    }
    // decaying tails
    EXPECT_LT(std::abs(wf.value(-3.0)), std::abs(wf.value(-1.0)));
    EXPECT_LT(std::abs(wf.value(wf.width() + 3.0)), std::abs(wf.value(wf.width() + 1.0)) + 1e-300);
  }
}

TEST(Wavefunction, SatisfiesSchroedingerInsideCells) {
  const auto cfg = make_symmetric(3, 1.0, 0.2, 50.0);
  const auto s = states_of(cfg).front();
  const auto wf = normalized_wavefunction(s, cfg);
  const double h = 1e-4;
  for (double x : {0.3, 1.5, 2.77, 3.6}) {
    const double d2 = (wf.value(x + h) - 2.0 * wf.value(x) + wf.value(x - h)) / (h * h);
    EXPECT_NEAR(-d2, s.eps * wf.value(x), 1e-5 * s.eps);
  }
}

TEST(Evaluate, GridAndClipping) {
  const auto cfg = make_symmetric(3, 1.0, 0.0, 50.0);
  const auto s = states_of(cfg).front();
  std::vector<double> xs{-20.0, -1.0, 0.0, 0.5, 2.0, 4.0, 5.0, 30.0};
  const auto t = evaluate(s, cfg, xs);
  ASSERT_EQ(t.samples.size(), 6u);
  EXPECT_EQ(t.samples.front().x, -1.0);
  EXPECT_EQ(t.notes.size(), 1u);
  EXPECT_GT(t.norm_constant, 0.0);
  const auto wf = normalized_wavefunction(s, cfg);
  for (const auto& p : t.samples) EXPECT_DOUBLE_EQ(p.psi, wf.value(p.x));
  const auto by_eps = evaluate(s.eps, cfg, std::vector<double>{0.5});
  EXPECT_DOUBLE_EQ(by_eps.samples[0].psi, wf.value(0.5));
  EXPECT_THROW(evaluate(s, cfg, std::vector<double>{1.0, 0.0}), ValidationError);
}
