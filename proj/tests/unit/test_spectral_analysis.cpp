#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "sbadmm/errors.hpp"
#include "sbadmm/spectral_analysis.hpp"

using namespace sbadmm;
using namespace sbadmm::testing;

namespace {

std::vector<double> log_band(double lo, double hi, int n) {
  std::vector<double> d;
  for (int i = 0; i < n; ++i) d.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1)));
  return d;
}

}  // namespace

TEST(DeltaSpectrum, ConstantRatio) {
  const GridShape s{3, 3};
  const auto d = delta_spectrum(BccbSpectrum::constant(s, 1.0), BccbSpectrum::constant(s, 2.0), 0.1);
  for (double v : d.deltas) EXPECT_DOUBLE_EQ(v, 2.0);
  EXPECT_DOUBLE_EQ(d.delta_min, 2.0);
  EXPECT_DOUBLE_EQ(d.delta_max, 2.0);
}

TEST(DeltaSpectrum, ZeroLambdaGivesInfinity) {
  const GridShape s{1, 4};
  BccbSpectrum lambda = BccbSpectrum::constant(s, 1.0);
  lambda.eigenvalues[2] = 0.0;
  const auto d = delta_spectrum(lambda, BccbSpectrum::constant(s, 1.0), 0.1);
  EXPECT_EQ(d.delta_max, kInfinity);
  EXPECT_EQ(d.deltas[2], kInfinity);
}

TEST(DeltaSpectrum, BothZeroIsRankDeficient) {
  const GridShape s{1, 4};
  const auto zero = BccbSpectrum::constant(s, 0.0);
  const auto omega = bccb_spectrum_of_gram(DifferenceOperator{MaskMode::periodic, 1}, s);
  EXPECT_THROW(delta_spectrum(zero, omega, 0.1), RankDeficiencyError);
}

TEST(DeltaSpectrum, GaussianOverLaplacianMatchesDivision) {
  const GridShape s{8, 8};
  const auto k = ConvolutionKernel::gaussian(5, 1.0);
  const auto lam = naive_gram_eigenvalues(dense_convolution(k, s), s);
  const auto om = naive_gram_eigenvalues(dense_difference(s, MaskMode::periodic, 2), s);
  const auto d = delta_spectrum(bccb_spectrum_of_gram(k, s),
                                bccb_spectrum_of_gram(DifferenceOperator{MaskMode::periodic, 2}, s),
                                0.0625);
  for (std::size_t i = 0; i < lam.size(); ++i) {
    EXPECT_NEAR(d.deltas[i], om[i] / lam[i], 1e-6 * std::max(1.0, om[i] / lam[i]));
  }
  EXPECT_EQ(d.delta_min, 0.0);
}

TEST(Rates, S1Examples) {
  const double a = 0.0625;
  for (double delta : {0.0, 0.3, 7.0, 1e6, kInfinity}) EXPECT_NEAR(rate_s1(delta, a, a), 0.5, 1e-15);
  EXPECT_NEAR(rate_s1(0.0, 0.3, a), a / (0.3 + a), 1e-15);
  EXPECT_NEAR(rate_s1(kInfinity, 0.3, a), 0.3 / (0.3 + a), 1e-15);
}

TEST(Rates, S2Examples) {
  const double a = 0.0625;
  for (double delta : {0.0, 0.3, 7.0, 1e6, kInfinity}) EXPECT_NEAR(rate_s2(delta, 1.0, a), 0.5, 1e-15);
  EXPECT_NEAR(rate_s2(0.0, 3.0, a), 0.75, 1e-15);
  EXPECT_NEAR(rate_s2(kInfinity, 3.0, a), 0.25, 1e-15);
}

TEST(Rates, S3Examples) {
  const double a = 0.0625;
  EXPECT_DOUBLE_EQ(rate_s3(a, a), 0.5);
  EXPECT_NEAR(rate_s3(a / 20, a), 1.0 / 21.0, 1e-15);
  EXPECT_NEAR(rate_s3(20 * a, a), 20.0 / 21.0, 1e-15);
}

TEST(Rates, MatchFormulas) {
  std::mt19937_64 rng(61);
  std::uniform_real_distribution<double> lg(-8.0, 8.0);
  for (int trial = 0; trial < 100; ++trial) {
    const double delta = std::exp2(lg(rng)), p = std::exp2(lg(rng)), a = std::exp2(lg(rng) / 2);
    EXPECT_NEAR(rate_s1(delta, p, a), s1_formula(delta, p, a), 1e-13);
    EXPECT_NEAR(rate_s2(delta, p, a), s2_formula(delta, p, a), 1e-13);
  }
}

TEST(Rates, S1SignStructure) {
  std::mt19937_64 rng(62);
  std::uniform_real_distribution<double> lg(-6.0, 6.0);
  for (int trial = 0; trial < 200; ++trial) {
    const double a = std::exp2(lg(rng) / 2), eta = std::exp2(lg(rng)), delta = std::exp2(lg(rng));
    const double s3 = rate_s3(eta, a);
    const double gap = rate_s1(delta, eta, a) - s3;
    if (std::abs(eta - a) < 1e-9 * a) continue;
    EXPECT_EQ(gap > 0.0, a > eta) << "eta=" << eta << " alpha=" << a << " delta=" << delta;
    EXPECT_NE(gap, 0.0);
    const double h = 1e-3 * delta;
    const double slope = rate_s1(delta + h, eta, a) - rate_s1(delta, eta, a);
    if (std::abs(slope) > 1e-15) EXPECT_EQ(slope > 0.0, eta > a);
  }
}

TEST(Rates, S1DominanceRegimes) {
  const double a = 0.0625;
  const auto deltas = log_band(1e-4, 1e4, 200);
  for (double eta : {a / 20, a / 3, 3 * a, 20 * a}) {
    double sup = 0.0;
    for (double d : deltas) {
      sup = std::max(sup, rate_s1(d, eta, a));
      if (eta > a) EXPECT_LE(rate_s1(d, eta, a), rate_s3(eta, a));
    }
    if (eta <= a) EXPECT_GE(sup, rate_s3(eta, a));
    EXPECT_NEAR(rate_s1(kInfinity, eta, a), rate_s3(eta, a), 1e-15);
  }
}

TEST(Rates, StayInsideUnitInterval) {
  std::mt19937_64 rng(63);
  std::uniform_real_distribution<double> lg(-10.0, 10.0);
  for (int trial = 0; trial < 200; ++trial) {
    const double a = std::exp2(lg(rng) / 2), p = std::exp2(lg(rng)), delta = std::exp2(lg(rng));
    for (double r : {rate_s1(delta, p, a), rate_s2(delta, p, a), rate_s3(p, a)}) {
      EXPECT_GT(r, 0.0);
      EXPECT_LT(r, 1.0);
    }
  }
}

TEST(Optimum, BlurLaplacianGivesAlpha) {
  const auto s = delta_spectrum_from_values({0.0, 1.0, 50.0, kInfinity}, 0.0625);
  EXPECT_EQ(gamma_of(s), 16.0);
  EXPECT_EQ(optimal_eta_sb(s).eta_star, 0.0625);
  EXPECT_EQ(optimal_rho_al(s), 1.0);
}

TEST(Optimum, BandLimitedMatchesGridSearch) {
  const double a = 1.0 / 16;
  const auto deltas = log_band(1.0 / 256, 1.0 / 64, 257);
  const auto s = delta_spectrum_from_values(deltas, a);
  EXPECT_DOUBLE_EQ(gamma_of(s), 1.0 / 64);
  const double eta = optimal_eta_sb(s).eta_star;
  const double rho = optimal_rho_al(s);
  EXPECT_NEAR(eta, 2.0, 1e-12);
  EXPECT_NEAR(rho, 1.0 / 32, 1e-12);
  const double eta_search =
      grid_search_minimax(deltas, [&](double d, double p) { return s1_formula(d, p, a); });
  const double rho_search =
      grid_search_minimax(deltas, [&](double d, double p) { return s2_formula(d, p, a); });
  EXPECT_NEAR(eta, eta_search, 1e-6);
  EXPECT_NEAR(rho, rho_search, 1e-6);
}

TEST(Optimum, DegenerateMedian) {
  const double a = 0.25;
  const auto s = delta_spectrum_from_values({4.0, 4.0}, a);
  EXPECT_DOUBLE_EQ(gamma_of(s), 4.0);
  EXPECT_DOUBLE_EQ(optimal_eta_sb(s).eta_star, a);
  EXPECT_DOUBLE_EQ(optimal_rho_al(s), 1.0);
}

TEST(Optimum, RandomBandsMatchGridSearch) {
  std::mt19937_64 rng(64);
  std::uniform_real_distribution<double> lg(-8.0, 8.0);
  for (int trial = 0; trial < 100; ++trial) {
    const double a = std::exp2(lg(rng) / 4);
    double lo = std::exp2(lg(rng)), hi = std::exp2(lg(rng));
    if (lo > hi) std::swap(lo, hi);
    const auto deltas = log_band(lo, hi, 9);
    const auto s = delta_spectrum_from_values(deltas, a);
    const double eta = optimal_eta_sb(s).eta_star;
    const double eta_search =
        grid_search_minimax(deltas, [&](double d, double p) { return s1_formula(d, p, a); }, -30, 30);
    const double worst_opt = [&] {
      double m = 0;
      for (double d : deltas) m = std::max(m, s1_formula(d, eta, a));
      return m;
    }();
    const double worst_search = [&] {
      double m = 0;
      for (double d : deltas) m = std::max(m, s1_formula(d, eta_search, a));
      return m;
    }();
    EXPECT_LE(worst_opt, worst_search + 1e-9);
  }
}

TEST(Optimum, InfiniteGammaRejected) {
  // gamma = inf needs two infinite entries among {delta_min, delta_max, 1/alpha}.
  const auto s = delta_spectrum_from_values({kInfinity}, 0.1);
  EXPECT_THROW(optimal_eta_sb(s), ParameterError);
}

TEST(Predict, CaseThreeIsUniform) {
  const double a = 0.0625;
  const auto s = delta_spectrum_from_values({0.0, 0.1, 3.0, kInfinity}, a);
  const RateReport r = predict(RateCase::III_matched, {20.0, 20 * a, a}, s);
  for (double v : r.rates) EXPECT_NEAR(v, 20.0 / 21.0, 1e-15);
  EXPECT_NEAR(r.spectral_radius, 20.0 / 21.0, 1e-15);
}

TEST(Predict, OverAndUnderEstimatedEta) {
  const double a = 0.0625;
  const auto s = delta_spectrum_from_values({0.0, 0.1, 3.0, kInfinity}, a);
  const RateReport over = predict(RateCase::I_sb, {1.0, 20 * a, a}, s);
  EXPECT_NEAR(over.spectral_radius, 20.0 / 21.0, 1e-15);
  const RateReport under = predict(RateCase::I_sb, {1.0, a / 20, a}, s);
  EXPECT_NEAR(under.spectral_radius, 20.0 / 21.0, 1e-15);
  EXPECT_GT(under.spectral_radius, rate_s3(a / 20, a));
}

TEST(Predict, CaseConstraintsNamed) {
  const double a = 0.0625;
  const auto s = delta_spectrum_from_values({0.0, 1.0}, a);
  try {
    predict(RateCase::III_matched, {2.0, a, a}, s);
    FAIL();
  } catch (const ParameterError& e) {
    EXPECT_NE(std::string(e.what()).find("rho = eta/alpha"), std::string::npos) << e.what();
  }
  EXPECT_THROW(predict(RateCase::I_sb, {2.0, a, a}, s), ParameterError);
  EXPECT_THROW(predict(RateCase::II_al, {2.0, 2 * a, a}, s), ParameterError);
  EXPECT_THROW(predict(RateCase::II_al, {2.0, a, 2 * a}, s), ParameterError);
}

TEST(Predict, ParseCase) {
  EXPECT_EQ(parse_rate_case("III"), RateCase::III_matched);
  EXPECT_EQ(parse_rate_case("1"), RateCase::I_sb);
  EXPECT_EQ(parse_rate_case("al"), RateCase::II_al);
  EXPECT_THROW(parse_rate_case("IV"), Error);
}

TEST(Compare, Regimes) {
  const double a = 0.0625;
  const auto s = delta_spectrum_from_values({0.0, 0.5, 8.0, kInfinity}, a);
  const Comparison under = compare_sb_vs_admm(a / 20, a, s);
  EXPECT_EQ(under.faster, Faster::admm_matched);
  EXPECT_NEAR(under.rho_recommended, 1.0 / 20, 1e-15);
  EXPECT_EQ(compare_sb_vs_admm(20 * a, a, s).faster, Faster::tie);
  const Comparison equal = compare_sb_vs_admm(a, a, s);
  EXPECT_EQ(equal.faster, Faster::tie);
  EXPECT_DOUBLE_EQ(equal.sb_radius, 0.5);
  EXPECT_DOUBLE_EQ(equal.admm_radius, 0.5);
}

TEST(EmpiricalRate, GeometricSequence) {
  std::vector<double> e;
  for (int k = 0; k < 40; ++k) e.push_back(3.0 * std::pow(0.8, k));
  EXPECT_NEAR(empirical_rate(e), 0.8, 1e-12);
  EXPECT_THROW(empirical_rate({1.0, 0.5}), ParameterError);
}
