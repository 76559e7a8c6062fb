#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "thermosense/exact_oracle.hpp"
#include "thermosense/sector_ensemble.hpp"
#include "thermosense/thermo_metrology.hpp"

using namespace thermosense;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

// Reference values below come from an independent dense diagonalization
// (Kronecker-product Pauli construction) and from an 80-digit evaluation of
// the two-sector partition function.

TEST(LogPartition, TwoSpinsMatchesOracle) {
  for (double h : {0.0, 0.4, 1.7}) {
    const ChainSpec s = ChainSpec::xx(2, 1.0, h, 3.0);
    EXPECT_LT(rel(log_partition(s), oracle::log_partition(s)), 1e-12) << h;
  }
}

TEST(LogPartition, InfiniteTemperatureLimit) {
  for (int n : {4, 50, 1000})
    EXPECT_NEAR(log_partition(ChainSpec::xx(n, 1.0, 0.3, 1e-9)), n * std::log(2.0), 1e-6);
}

TEST(LogPartition, XyEightSpinsReference) {
  EXPECT_LT(rel(log_partition(ChainSpec::xy(8, 1.0, 0.5, 1.0, 10.0)), 85.776716787952878), 1e-10);
}

TEST(FreeEnergy, XyTenSpinsReference) {
  EXPECT_LT(rel(free_energy(ChainSpec::xy(10, 1.0, 1.2, 0.3, 50.0)), -12.236765642998698), 1e-10);
}

TEST(LargeChain, HighPrecisionReference) {
  const ChainSpec s = ChainSpec::xx(10000, 1.0, 0.5, 100.0);
  EXPECT_LT(rel(log_partition(s), 718025.79440046954), 1e-12);
  EXPECT_LT(rel(magnetization_z(s), 3333.5349750720731), 1e-11);
  EXPECT_LT(rel(qfi_h(s).value, 735185.88578703118), 1e-9);
  EXPECT_LT(rel(qfi_j(s).value, 183897.3094134999), 1e-9);

  const ChainSpec cold = ChainSpec::xx(1000, 1.0, 0.8, 1000.0);
  EXPECT_LT(rel(log_partition(cold), 854240.3311542151), 1e-12);
  EXPECT_LT(rel(magnetization_z(cold), 590.30376564549482), 1e-11);
  EXPECT_LT(rel(qfi_h(cold).value, 1000982.0431894714), 1e-9);
  EXPECT_LT(rel(qfi_j(cold).value, 640836.94196080846), 1e-9);
}

TEST(LargeChain, GappedParamagnetKeepsExponentiallySmallQfi) {
  const ChainSpec s = ChainSpec::xx(64, 1.0, 1.2, 100.0);
  EXPECT_LT(rel(qfi_h(s).value, 3.0701586668279525e-13), 1e-9);
  EXPECT_LT(rel(qfi_j(s).value, 3.0548700896844158e-13), 1e-9);
  EXPECT_EQ(magnetization_z(s), 64.0);
}

TEST(Magnetization, ZeroFieldAndSaturation) {
  EXPECT_NEAR(magnetization_z(ChainSpec::xx(40, 1.0, 0.0, 7.0)), 0.0, 1e-12);
  EXPECT_NEAR(magnetization_z(ChainSpec::xx(40, 1.0, 2.0, 1e3)), 40.0, 1e-6);
}

TEST(Magnetization, XyTenSpinsReference) {
  EXPECT_NEAR(magnetization_z(ChainSpec::xy(10, 1.0, 0.9, 0.6, 20.0)), 5.9407761503536607, 1e-9);
}

TEST(Magnetization, OddInField) {
  for (double h : {0.2, 0.9, 1.6}) {
    const ChainSpec s = ChainSpec::xy(12, 1.0, h, 0.4, 6.0);
    EXPECT_NEAR(magnetization_z(s), -magnetization_z(s.with_field(-h)), 1e-10);
  }
}

TEST(Magnetization, ModeSumAgreesAtLargeN) {
  const ChainSpec s = ChainSpec::xx(2000, 1.0, 0.37, 50.0);
  EXPECT_LT(rel(magnetization_z_modes(mode_table(s)), magnetization_z(s)), 1e-12);
}

TEST(Susceptibility, MatchesQfiOverBeta) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 20; ++i) {
    const ChainSpec s = ChainSpec::xx(2 * (2 + static_cast<int>(rng() % 200)), 0.5 + uniform01(rng),
                                      2.0 * uniform01(rng), 0.1 + 50.0 * uniform01(rng));
    const double q = qfi_h(s).value;
    if (q == 0.0) continue;
    EXPECT_LT(rel(susceptibility_h(s), q / s.beta), 1e-12);
  }
}

TEST(Susceptibility, HighTemperatureLeadingOrder) {
  const ChainSpec s = ChainSpec::xx(100, 1.0, 0.3, 1e-6);
  EXPECT_LT(rel(susceptibility_h(s), s.beta * 100), 1e-5);
}

TEST(Susceptibility, FiniteDifferenceAtLargeN) {
  const ChainSpec s = ChainSpec::xx(10000, 1.0, 0.5, 100.0);
  const double d = 1e-5;
  const double fd = (magnetization_z(s.with_field(0.5 + d)) - magnetization_z(s.with_field(0.5 - d))) / (2 * d);
  EXPECT_LT(rel(fd, susceptibility_h(s)), 1e-6);
}

TEST(QfiField, InfiniteTemperatureLimit) {
  const ChainSpec s = ChainSpec::xx(30, 1.0, 0.4, 1e-5);
  EXPECT_LT(rel(qfi_h(s).value, s.beta * s.beta * 30), 1e-8);
}

TEST(QfiField, ReferenceValues) {
  EXPECT_LT(rel(qfi_h(ChainSpec::xx(8, 1.0, 0.6, 30.0)).value, 374.32497186838492), 1e-8);
  EXPECT_LT(rel(qfi_h(ChainSpec::xy(8, 1.0, 0.99, 1.0, 100.0)).value, 7.1335725904689014), 1e-6);
  EXPECT_LT(rel(qfi_h(ChainSpec::xy(6, 1.0, 0.9, 1.0, 50.0)).value, 4.8049961237949708), 1e-6);
}

TEST(QfiField, ReportShape) {
  const ChainSpec s = ChainSpec::xx(20, 1.0, 0.5, 10.0);
  const SensitivityReport r = qfi_h(s);
  EXPECT_EQ(r.parameter, Parameter::Field);
  EXPECT_EQ(r.provenance, Provenance::ExactFreeFermion);
  EXPECT_GE(r.value, 0.0);
  EXPECT_DOUBLE_EQ(r.per_spin * 20, r.value);
}

TEST(QfiCoupling, ReferenceAndLimits) {
  EXPECT_LT(rel(qfi_j(ChainSpec::xx(8, 0.7, 1.0, 30.0)).value, 5.482817460051626e-05), 1e-8);
  const ChainSpec hot = ChainSpec::xx(24, 1.0, 0.3, 1e-5);
  EXPECT_LT(rel(qfi_j(hot).value, hot.beta * hot.beta * 12), 1e-8);
  EXPECT_THROW(qfi_j(ChainSpec::xy(8, 1.0, 0.5, 0.5, 1.0)), std::invalid_argument);
}

TEST(QfiCoupling, ZeroFieldEvenInCouplingSign) {
  // at h = 0 the spectrum is symmetric under p -> pi - p, so only |J| matters
  const ChainSpec s = ChainSpec::xx(16, 0.8, 0.0, 5.0);
  const double modes = qfi_j_modes(mode_table(s));
  const ModeTable t = mode_table(s);
  double mirrored = 0.0;
  for (const auto& m : t.modes) {
    const double n = 1.0 / (1.0 + std::exp(-s.beta * m.energy));  // J -> -J
    mirrored += std::cos(m.momentum) * std::cos(m.momentum) * n * (1 - n);
  }
  EXPECT_LT(rel(4 * s.beta * s.beta * mirrored, modes), 1e-12);
}

TEST(ModeSums, PerModeBounds) {
  const ModeTable t = mode_table(ChainSpec::xx(40, 1.0, 0.7, 9.0));
  for (double f : qfi_h_per_mode(t)) {
    EXPECT_GE(f, 0.0);
    EXPECT_LE(f, 81.0 * (1 + 1e-15));
  }
  const ModeTable y = mode_table(ChainSpec::xy(40, 1.0, 0.7, 0.5, 9.0));
  for (double f : qfi_h_per_mode(y)) EXPECT_GE(f, 0.0);
}

TEST(ModeSums, ConvergeToExactAtLargeN) {
  const ChainSpec xx = ChainSpec::xx(4000, 1.0, 0.6, 40.0);
  EXPECT_LT(rel(qfi_h_modes(mode_table(xx)), qfi_h(xx).value), 1e-10);
  EXPECT_LT(rel(qfi_j_modes(mode_table(xx)), qfi_j(xx).value), 1e-10);
  // a single momentum grid ignores the parity projection: ~1e-10 at this size
  const ChainSpec xy = ChainSpec::xy(4000, 1.0, 0.6, 0.5, 40.0);
  EXPECT_LT(rel(qfi_h_modes(mode_table(xy)), qfi_h(xy).value), 1e-9);
  // 60-digit parity-projected reference
  EXPECT_LT(rel(qfi_h(xy).value, 3125.0000000000000002), 1e-13);
}

TEST(ThermodynamicIdentity, ThreeRoutesAgree) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 10; ++i) {
    const ChainSpec s = ChainSpec::xx(2 * (10 + static_cast<int>(rng() % 91)), 0.5 + uniform01(rng),
                                      1.2 * uniform01(rng), 0.5 + 9.5 * uniform01(rng));
    const double h = s.field, d = 1e-3;
    auto m = [&](double x) { return magnetization_z(s.with_field(x)); };
    auto l = [&](double x) { return log_partition(s.with_field(x)); };
    const double chi = (m(h - 2 * d) - 8 * m(h - d) + 8 * m(h + d) - m(h + 2 * d)) / (12 * d);
    const double curv =
        (-l(h - 2 * d) + 16 * l(h - d) - 30 * l(h) + 16 * l(h + d) - l(h + 2 * d)) / (12 * d * d);
    const double f = qfi_h(s).value;
    EXPECT_LT(rel(s.beta * chi, f), 1e-6);
    EXPECT_LT(rel(curv, f), 1e-6);
  }
}

TEST(Extensivity, PerSpinQfiIndependentOfN) {
  const double ref = qfi_h(ChainSpec::xx(100000, 1.0, 0.5, 100.0)).per_spin;
  for (int n : {1000, 10000})
    EXPECT_LT(rel(qfi_h(ChainSpec::xx(n, 1.0, 0.5, 100.0)).per_spin, ref), 1e-3);
}

TEST(ParamagneticEnhancement, WarmerIsMoreSensitive) {
  EXPECT_GT(qfi_h(ChainSpec::xx(10000, 1.0, 1.2, 50.0)).value,
            qfi_h(ChainSpec::xx(10000, 1.0, 1.2, 1000.0)).value);
}

TEST(PeakLocation, FerromagneticSideOfCrossover) {
  for (double beta : {100.0, 400.0}) {
    double best = -1.0, arg = 0.0;
    for (int i = 0; i <= 1000; ++i) {
      const double h = 0.9 + 2e-4 * i;
      const double f = qfi_h(ChainSpec::xx(4000, 1.0, h, beta)).value;
      if (f > best) { best = f; arg = h; }
    }
    EXPECT_GT(arg, 1.0 - 2.0 / beta);
    EXPECT_LT(arg, 1.0);
  }
}

TEST(Approximation, DefaultConstantValue) {
  EXPECT_NEAR(qfi_h_approx(ChainSpec::xx(10000, 1.0, 0.0, 100.0), 0.64).value, 6.4e5, 1e-6);
}

TEST(Approximation, MinimumAtZeroField) {
  const double at0 = qfi_h_approx(ChainSpec::xx(1000, 1.0, 0.0, 100.0)).value;
  for (double h : {-0.6, -0.1, 0.05, 0.5})
    EXPECT_GT(qfi_h_approx(ChainSpec::xx(1000, 1.0, h, 100.0)).value, at0);
}

TEST(Approximation, AgreesWithExactInsideWindow) {
  const ChainSpec s = ChainSpec::xx(10000, 1.0, 0.5, 100.0);
  EXPECT_LT(rel(qfi_h_approx(s).value, qfi_h(s).value), 0.1);
  EXPECT_LT(rel(qfi_j_approx(s).value, qfi_j(s).value), 0.1);
}

TEST(Approximation, DomainAndWindow) {
  EXPECT_THROW(qfi_h_approx(ChainSpec::xx(100, 1.0, 1.0, 100.0)), std::domain_error);
  EXPECT_THROW(qfi_j_approx(ChainSpec::xx(100, 1.0, 1.3, 100.0)), std::domain_error);
  EXPECT_TRUE(qfi_h_approx(ChainSpec::xx(100, 1.0, 0.5, 100.0)).within_validity_window);
  const SensitivityReport r = qfi_h_approx(ChainSpec::xx(100, 1.0, 0.995, 100.0));
  EXPECT_FALSE(r.within_validity_window);
  EXPECT_EQ(r.provenance, Provenance::LowTempApprox);
}

TEST(Approximation, CouplingFormRatio) {
  for (double h : {0.0, 0.3, 0.8}) {
    const ChainSpec s = ChainSpec::xx(500, 1.3, h, 100.0);
    EXPECT_NEAR(qfi_j_approx(s).value, qfi_h_approx(s).value * h * h / (1.3 * 1.3), 1e-9);
  }
}

TEST(FitC, SinglePointIsExactInversion) {
  FitSweep sw{{100.0}, {10000}, {0.0}, 1.0};
  const CFitResult r = fit_c(sw);
  EXPECT_LT(rel(r.c, qfi_h(ChainSpec::xx(10000, 1.0, 0.0, 100.0)).value / (100.0 * 10000)), 1e-14);
  EXPECT_EQ(r.points, 1u);
}

TEST(FitC, RejectsPointsOutsideWindow) {
  EXPECT_THROW(fit_c(FitSweep{{100.0}, {500}, {0.2}, 1.0}), std::invalid_argument);
  EXPECT_THROW(fit_c(FitSweep{{20.0}, {10000}, {0.2}, 1.0}), std::invalid_argument);
  EXPECT_THROW(fit_c(FitSweep{{100.0}, {10000}, {0.99}, 1.0}), std::invalid_argument);
  EXPECT_NO_THROW(fit_c(FitSweep{{100.0}, {500}, {0.2}, 1.0}, false));
}

TEST(FitC, StableAcrossTemperatureSubsets) {
  std::vector<double> ratios;
  for (int i = 0; i <= 9; ++i) ratios.push_back(0.1 * i);
  const CFitResult all = fit_c(FitSweep{{100.0, 200.0}, {10000, 100000}, ratios, 1.0});
  const CFitResult b100 = fit_c(FitSweep{{100.0}, {10000, 100000}, ratios, 1.0});
  const CFitResult b200 = fit_c(FitSweep{{200.0}, {10000, 100000}, ratios, 1.0});
  EXPECT_NEAR(all.c, 0.64, 0.05);
  EXPECT_LT(std::abs(b100.c - b200.c), 0.02);
  // the low-temperature limit of the mode sum is 2/pi
  EXPECT_NEAR(all.c, 2.0 / std::numbers::pi, 2e-3);
  EXPECT_EQ(all.points, 40u);
}
