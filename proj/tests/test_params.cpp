#include <gtest/gtest.h>

#include "ddcomb/params.hpp"

using namespace ddcomb;

TEST(Params, FreeCombHasZeroStrengths) {
  CombConfig c;
  c.n_sites = 4;
  c.mass = 2.0;
  c.cell_width = 3.0;
  c.wall_left = c.wall_right = 7.0;
  const auto d = nondimensionalize(c, 1.0);
  EXPECT_EQ(d.p, 0.0);
  EXPECT_EQ(d.beta_t, 0.0);
  EXPECT_DOUBLE_EQ(d.u_left, 2.0 * 2.0 * 7.0 * 9.0);
}

TEST(Params, UnitScalingGivesUnitP) {
  const double hbar = 1.7, l = 0.6;
  CombConfig c;
  c.mass = hbar * hbar / (l * l);
  c.cell_width = l;
  c.delta_strength = hbar * hbar / (c.mass * l);
  const auto d = nondimensionalize(c, hbar);
  EXPECT_NEAR(d.p, 1.0, 1e-15);
  EXPECT_EQ(d.beta_t, 0.0);
}

TEST(Params, ElectronOneEvNanometre) {
  // hand evaluation of m alpha l / hbar^2 with CODATA 2018 values
  const double me = 9.1093837015e-31, ev = 1.602176634e-19;
  CombConfig c;
  c.mass = me;
  c.cell_width = 1e-9;
  c.delta_strength = ev * 1e-9;
  c.wall_left = c.wall_right = 5.0 * ev;
  const auto d = nondimensionalize(c);
  EXPECT_NEAR(d.p, 13.123421196457826, 1e-9 * 13.12);
  // 2 m U l^2 / hbar^2 = U / (hbar^2 / 2m) with hbar^2 / 2m = 0.0380998211 eV nm^2
  EXPECT_NEAR(d.u_left, 5.0 / 0.038099821114859614, 1e-9 * d.u_left);
}

TEST(Params, RoundTrip) {
  const DimensionlessConfig d{5, 1.3, -0.27, 42.0, 40.0};
  const auto c = dimensionalize(d, 3e-31, 2e-9);
  const auto back = nondimensionalize(c);
  EXPECT_EQ(back.n_sites, 5);
  EXPECT_NEAR(back.p, d.p, 1e-13);
  EXPECT_NEAR(back.beta_t, d.beta_t, 1e-14);
  EXPECT_NEAR(back.u_left, d.u_left, 1e-12);
  EXPECT_NEAR(back.u_right, d.u_right, 1e-12);
  EXPECT_DOUBLE_EQ(c.system_width(), 6 * 2e-9);
}

TEST(Params, Gamma) {
  EXPECT_EQ(ddcomb::gamma(0.0), 1.0);
  EXPECT_NEAR(ddcomb::gamma(1.0 / 3.0), 2.0, 1e-15);
  EXPECT_NEAR(ddcomb::gamma(-1.0 / 3.0), 0.5, 1e-15);
  for (double b : {0.1, 0.45, 0.8, 2.5}) EXPECT_NEAR(ddcomb::gamma(b) * ddcomb::gamma(-b), 1.0, 1e-14);
  EXPECT_THROW(ddcomb::gamma(1.0), ValidationError);
}

TEST(Params, Validation) {
  EXPECT_THROW(make_symmetric(0, 1.0, 0.0, 10.0), ValidationError);
  EXPECT_THROW(make_symmetric(3, 1.0, 1.0, 10.0), ValidationError);
  EXPECT_THROW(make_symmetric(3, 1.0, -1.0 + 1e-10, 10.0), ValidationError);
  EXPECT_THROW(make_symmetric(3, 1.0, 0.0, -1.0), ValidationError);
  EXPECT_THROW(make_symmetric(3, std::nan(""), 0.0, 1.0), ValidationError);
  EXPECT_NO_THROW(make_symmetric(3, 1.0, 1.0 + 1e-6, 10.0));
  EXPECT_TRUE(make_symmetric(3, 1.0, 1.5, 10.0).unconventional_beta());
  CombConfig c;
  c.mass = 0.0;
  EXPECT_THROW(c.validate(), ValidationError);
  EXPECT_THROW(nondimensionalize(c), ValidationError);
  const DimensionlessConfig asym{3, 1.0, 0.0, 10.0, 12.0};
  EXPECT_FALSE(asym.symmetric_walls());
  EXPECT_THROW(asym.wall(), ValidationError);
}

TEST(Params, EnergyPoint) {
  const auto e = EnergyPoint::at(9.0, 25.0);
  EXPECT_EQ(e.xi, 3.0);
  EXPECT_EQ(e.kappa_bar, 4.0);
  EXPECT_TRUE(e.below_wall());
  for (double eps : {0.1, 3.7, 24.9}) {
    const auto p = EnergyPoint::at(eps, 25.0);
    EXPECT_NEAR(p.kappa_bar * p.kappa_bar + eps, 25.0, 1e-14);
  }
  EXPECT_FALSE(EnergyPoint::at(30.0, 25.0).below_wall());
  EXPECT_THROW(EnergyPoint::at(-1.0), ValidationError);
}
