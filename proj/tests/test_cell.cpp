#include <gtest/gtest.h>

#include <numbers>

#include "ddcomb/cell.hpp"
#include "ddcomb/dispersion.hpp"
#include "test_support.hpp"

using namespace ddcomb;
namespace ts = testsupport;
constexpr double pi = std::numbers::pi;

namespace {

void expect_close(cplx a, cplx b, double tol, const char* what) {
  EXPECT_LE(std::abs(a - b), tol * std::max(1.0, std::abs(b))) << what << ": " << a << " vs " << b;
}

DimensionlessConfig comb(double p, double b) { return make_symmetric(1, p, b, 0.0); }

}  // namespace

TEST(ImpedanceMatrix, FreeCellAtXiPi) {
  const auto z = impedance_matrix(EnergyPoint::at(pi * pi), comb(0.0, 0.0));
  expect_close(z.m21, -1.0, 1e-15, "Z21");
  expect_close(z.m22, 0.0, 1e-15, "Z22");
}

TEST(ImpedanceMatrix, DiracLimit) {
  for (double eps : {0.7, 4.0, 23.0}) {
    const double xi = std::sqrt(eps), om = -1.3 / xi;
    const cplx i{0.0, 1.0};
    const auto z = impedance_matrix(EnergyPoint::at(eps), comb(1.3, 0.0));
    expect_close(z.m21, std::cos(xi), 1e-15, "Z21");
    expect_close(z.m22, i * std::sin(xi), 1e-15, "Z22");
    expect_close(z.m11, 2.0 * i * om * std::cos(xi) - i * std::sin(xi), 1e-15, "Z11");
    expect_close(z.m12, 2.0 * i * om * i * std::sin(xi) - std::cos(xi), 1e-15, "Z12");
  }
}

TEST(ImpedanceMatrix, NormalizedFromRawEntries) {
  const double b = 0.2, eps = 2.0, xi = std::sqrt(eps), om = -1.0 / xi;
  const cplx i{0.0, 1.0}, ch = std::cos(xi), sh = i * std::sin(xi);
  // raw entries with det (1 - b^2)^2, each divided by (1 - b^2)
  const double n = 1.0 - b * b;
  const cplx r11 = 2.0 * i * om * ch - (1 + b) * (1 + b) * sh;
  const cplx r12 = 2.0 * i * om * sh - (1 + b) * (1 + b) * ch;
  const cplx r21 = (1 - b) * (1 - b) * ch;
  const cplx r22 = (1 - b) * (1 - b) * sh;
  EXPECT_NEAR(std::abs(r11 * r22 - r12 * r21 - n * n), 0.0, 1e-14);
  const auto z = impedance_matrix(EnergyPoint::at(eps), comb(1.0, b));
  expect_close(z.m11, r11 / n, 1e-14, "Z11");
  expect_close(z.m12, r12 / n, 1e-14, "Z12");
  expect_close(z.m21, r21 / n, 1e-14, "Z21");
  expect_close(z.m22, r22 / n, 1e-14, "Z22");
  expect_close(z.det(), 1.0, 1e-14, "det Z");
}

TEST(TransferMatrix, FreePropagationQuarterWave) {
  const auto t = transfer_matrix(EnergyPoint::at(pi * pi / 4.0), comb(0.0, 0.0));
  expect_close(t.m11, cplx(0.0, -1.0), 1e-15, "T11");
  expect_close(t.m12, 0.0, 1e-15, "T12");
  expect_close(t.m21, 0.0, 1e-15, "T21");
  expect_close(t.m22, cplx(0.0, 1.0), 1e-15, "T22");
}

TEST(TransferMatrix, MatchesPlaneWaveConstruction) {
  ts::Rng rng(7);
  for (int k = 0; k < 2000; ++k) {
    const double eps = rng.uniform(0.01, 100.0), p = rng.uniform(0.0, 3.0), b = rng.uniform(-0.8, 0.8);
    const auto t = transfer_matrix(EnergyPoint::at(eps), comb(p, b));
    const auto ref = ts::plane_wave_transfer(eps, p, b);
    expect_close(t.m11, ref[0], 1e-11, "T11");
    expect_close(t.m12, ref[1], 1e-11, "T12");
    expect_close(t.m21, ref[2], 1e-11, "T21");
    expect_close(t.m22, ref[3], 1e-11, "T22");
  }
}

TEST(TransferMatrix, DiracLimit) {
  for (double eps : {0.3, 5.0, 60.0}) {
    const auto t = transfer_matrix(EnergyPoint::at(eps), comb(2.0, 0.0));
    const auto ref = ts::dirac_transfer(eps, 2.0);
    expect_close(t.m11, ref[0], 1e-14, "T11");
    expect_close(t.m12, ref[1], 1e-14, "T12");
    expect_close(t.m21, ref[2], 1e-14, "T21");
    expect_close(t.m22, ref[3], 1e-14, "T22");
  }
}

TEST(TransferMatrix, UnimodularAndTraceIsDispersion) {
  ts::Rng rng(3);
  for (int k = 0; k < 1000; ++k) {
    const auto cfg = comb(rng.uniform(0.0, 3.0), rng.uniform(-0.8, 0.8));
    const auto e = EnergyPoint::at(rng.uniform(0.05, 100.0));
    const auto t = transfer_matrix(e, cfg);
    expect_close(t.det(), 1.0, 1e-12, "det T");
    expect_close(t.half_trace(), bloch_cos(e, cfg), 1e-12, "trace");
  }
}

TEST(TransferImpedance, ConversionRoundTrip) {
  const auto cfg = comb(1.0, 0.3);
  const auto e = EnergyPoint::at(3.0);
  const auto t = transfer_matrix(e, cfg);
  const auto z = impedance_matrix(e, cfg);
  const auto t2 = transfer_from_impedance(z);
  expect_close(t2.m11, t.m11, 1e-14, "T11");
  expect_close(t2.m12, t.m12, 1e-14, "T12");
  expect_close(t2.m21, t.m21, 1e-14, "T21");
  expect_close(t2.m22, t.m22, 1e-14, "T22");
  const auto z2 = impedance_from_transfer(t);
  expect_close(z2.m11, z.m11, 1e-14, "Z11");
  expect_close(z2.m12, z.m12, 1e-14, "Z12");
  expect_close(z2.m21, z.m21, 1e-14, "Z21");
  expect_close(z2.m22, z.m22, 1e-14, "Z22");
  EXPECT_EQ(z2.kind, MatrixKind::Impedance);
  EXPECT_EQ(t2.kind, MatrixKind::Transfer);
}

TEST(PropagateImpedance, MatchedLoadIsReflectionless) {
  for (double eps : {0.5, 2.0, 9.0, 40.0}) {
    const auto e = EnergyPoint::at(eps);
    const auto z = propagate_impedance(e.xi, e, comb(0.0, 0.0));
    ASSERT_TRUE(z);
    expect_close(*z, e.xi, 1e-14, "matched load");
  }
}

TEST(PropagateImpedance, AgreesWithTransferAction) {
  const auto cfg = comb(1.0, 0.2);
  const auto e = EnergyPoint::at(2.0);
  const auto z = propagate_impedance(0.5 * e.xi, e, cfg);
  ASSERT_TRUE(z);
  const auto via_t = transfer_action(transfer_matrix(e, cfg), {0.5, 1.0}).value();
  ASSERT_TRUE(via_t);
  expect_close(*z / e.xi, *via_t, 1e-12, "zeta");
}

TEST(PropagateImpedance, IsThePsiRatioCarriedBackwards) {
  // zeta = psi' / (i xi psi); carry (psi, psi') back across the free segment and the site.
  const double p = 0.8, b = -0.35, eps = 6.5, xi = std::sqrt(eps);
  const cplx zeta_in{0.3, -0.7};
  const ts::Mat2 forward = ts::mul(ts::free_segment(xi), ts::site_jump(p, b));
  const ts::Mat2 back = ts::inverse(forward);
  const cplx psi = 1.0, dpsi = zeta_in * cplx(0.0, xi);
  const cplx psi0 = back[0] * psi + back[1] * dpsi, dpsi0 = back[2] * psi + back[3] * dpsi;
  const cplx expected = dpsi0 / (cplx(0.0, xi) * psi0);
  const auto z = propagate_impedance(zeta_in * xi, EnergyPoint::at(eps), comb(p, b));
  ASSERT_TRUE(z);
  expect_close(*z / xi, expected, 1e-13, "zeta");
}

TEST(PropagateImpedance, PoleIsReported) {
  // choose zeta_in so that Z21 - Z22 zeta = 0
  const auto cfg = comb(1.0, 0.2);
  const auto e = EnergyPoint::at(2.0);
  const auto z = impedance_matrix(e, cfg);
  const cplx zeta = z.m21 / z.m22;
  EXPECT_FALSE(propagate_impedance(zeta * e.xi, e, cfg));
  const auto pr = propagate_projective({zeta, 1.0}, e, cfg);
  EXPECT_GT(std::abs(pr.num), 0.1);
}

TEST(CellMatrix, Power) {
  const auto t = transfer_matrix(EnergyPoint::at(7.0), comb(1.0, 0.1));
  CellMatrix acc = identity_matrix();
  for (int k = 0; k < 5; ++k) acc = acc * t;
  const auto p5 = power(t, 5);
  expect_close(p5.m11, acc.m11, 1e-13, "11");
  expect_close(p5.m12, acc.m12, 1e-13, "12");
  expect_close(p5.m21, acc.m21, 1e-13, "21");
  expect_close(p5.m22, acc.m22, 1e-13, "22");
}

TEST(Omega, SignAndDomain) {
  EXPECT_DOUBLE_EQ(omega(EnergyPoint::at(4.0), comb(1.0, 0.0)), -0.5);
  EXPECT_THROW(omega(EnergyPoint::at(0.0), comb(1.0, 0.0)), ValidationError);
}
