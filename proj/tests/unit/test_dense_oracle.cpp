#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "sbadmm/dense_oracle.hpp"
#include "sbadmm/errors.hpp"

using namespace sbadmm;
using namespace sbadmm::testing;

namespace {

RestorationProblem row_problem(double alpha) {
  const GridShape s{1, 4};
  const ConvolutionKernel k({1, 2}, {0.75, 0.25}, 0, 0);
  ImageGrid y({1, 4}, std::vector<double>{1.0, 0.2, -0.4, 0.7});
  return RestorationProblem(std::move(y), k, DifferenceOperator{MaskMode::periodic, 1},
                            Potential::quadratic(alpha));
}

double max_rate(const DeltaSpectrum& s, RateCase c, const RateParameters& p) {
  return predict(c, p, s).spectral_radius;
}

}  // namespace

TEST(Densify, MatchesExplicitMatrices) {
  std::mt19937_64 rng(71);
  const auto p = random_problem({3, 4}, rng, Potential::quadratic(0.1));
  const DenseOperators d = densify(p);
  EXPECT_LT((d.A - dense_convolution(p.blur(), p.shape())).norm(), 1e-14);
  EXPECT_LT((d.C - dense_difference(p.shape(), MaskMode::periodic, 2)).norm(), 1e-14);
  EXPECT_EQ((d.y - to_vector(p.y())).norm(), 0.0);
}

TEST(DenseOracle, RowCaseThree) {
  const double a = 0.0625;
  const auto p = row_problem(a);
  for (double eta : {a / 4, a, 3 * a, 20 * a}) {
    const DenseTransition t = dense_transition_oracle(p, RateCase::III_matched, {eta / a, eta, a});
    EXPECT_NEAR(t.radius_H, eta / (eta + a), 1e-10);
  }
}

TEST(DenseOracle, RowCaseOne) {
  const double a = 0.0625;
  const auto p = row_problem(a);
  const auto s = delta_spectrum(p.lambda(), p.omega(), a);
  for (double eta : {a / 20, a / 2, 2 * a, 20 * a}) {
    const DenseTransition t = dense_transition_oracle(p, RateCase::I_sb, {1.0, eta, a});
    EXPECT_NEAR(t.radius_H, max_rate(s, RateCase::I_sb, {1.0, eta, a}), 1e-10);
  }
}

TEST(DenseOracle, ClosedFormStepIsAffineMap) {
  std::mt19937_64 rng(72);
  const double a = 0.2;
  const auto p = random_problem({3, 3}, rng, Potential::quadratic(a));
  for (RateParameters prm : {RateParameters{1.0, 0.5, a}, RateParameters{2.5, a, a},
                             RateParameters{3.0, 3.0 * a, a}}) {
    const RateCase c = prm.rho == 1.0 ? RateCase::I_sb
                       : prm.eta == a ? RateCase::II_al
                                      : RateCase::III_matched;
    const DenseTransition t = dense_transition_oracle(p, c, prm);
    SolverState s = canonical_init(p, prm.rho, prm.eta);
    s.x = random_grid(p.shape(), rng);
    s.u = random_grid(p.shape(), rng);
    s.v = random_field(p.shape(), 2, rng);
    Eigen::VectorXd w(static_cast<long>(s.u.size() + s.v.size()));
    w << to_vector(s.u), to_vector(s.v);
    const SolverState n = quadratic_closed_form_step(s, p, prm.rho, prm.eta);
    Eigen::VectorXd got(w.size());
    got << to_vector(n.u), to_vector(n.v);
    EXPECT_LT((got - (t.G * w + t.offset)).cwiseAbs().maxCoeff(), 1e-12);
    const Eigen::VectorXd x = t.s + t.P * to_vector(s.u) + t.Q * to_vector(s.v);
    EXPECT_LT((to_vector(n.x) - x).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(DenseOracle, RandomGridsMatchAnalytic) {
  std::mt19937_64 rng(73);
  std::uniform_int_distribution<std::size_t> dim(2, 4);
  std::uniform_real_distribution<double> lg(-3.0, 3.0);
  for (int trial = 0; trial < 12; ++trial) {
    const GridShape shape{dim(rng), dim(rng)};
    const double a = std::exp2(lg(rng) - 3);
    const auto p = random_problem(shape, rng, Potential::quadratic(a));
    const auto s = delta_spectrum(p.lambda(), p.omega(), a);
    const double q = std::exp2(lg(rng));
    const RateParameters cases[] = {{1.0, q * a, a}, {q, a, a}, {q, q * a, a}};
    const RateCase kinds[] = {RateCase::I_sb, RateCase::II_al, RateCase::III_matched};
    for (int c = 0; c < 3; ++c) {
      const DenseTransition t = dense_transition_oracle(p, kinds[c], cases[c]);
      EXPECT_NEAR(t.radius_H, max_rate(s, kinds[c], cases[c]), 1e-9)
          << to_string(kinds[c]) << " q=" << q << " alpha=" << a;
    }
  }
}

TEST(DenseOracle, Preconditions) {
  std::mt19937_64 rng(74);
  const auto masked = random_problem({3, 3}, rng, Potential::quadratic(0.1), false);
  EXPECT_THROW(dense_transition_oracle(masked, RateCase::I_sb, {1.0, 0.1, 0.1}), ParameterError);
  const auto big = random_problem({17, 16}, rng, Potential::quadratic(0.1));
  EXPECT_THROW(dense_transition_oracle(big, RateCase::I_sb, {1.0, 0.1, 0.1}), ShapeError);
  const auto p = row_problem(0.1);
  EXPECT_THROW(dense_transition_oracle(p, RateCase::III_matched, {2.0, 0.1, 0.1}), ParameterError);
  const auto l1 = random_problem({3, 3}, rng, Potential::l1(0.1));
  EXPECT_THROW(dense_transition_oracle(l1, RateCase::I_sb, {1.0, 0.1, 0.1}), ParameterError);
}

TEST(SpectralRadius, KnownMatrix) {
  Eigen::MatrixXd m(2, 2);
  m << 0.0, -2.0, 0.5, 0.0;  // eigenvalues +-i
  EXPECT_NEAR(spectral_radius(m), 1.0, 1e-14);
}
