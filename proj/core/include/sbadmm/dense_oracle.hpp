#pragma once

#include <Eigen/Dense>

#include "sbadmm/algorithms.hpp"
#include "sbadmm/spectral_analysis.hpp"

namespace sbadmm {

/// Explicit matrices of a (small) restoration problem. C stacks the
/// direction planes; masked rows are zero rows.
struct DenseOperators {
  Eigen::MatrixXd A;
  Eigen::MatrixXd C;
  Eigen::VectorXd y;
};

DenseOperators densify(const RestorationProblem& problem);

/// Quadratic-case transition quantities built from dense matrices:
///   s = H^{-1} A'y, P = (rho-1) H^{-1} A', Q = (eta-alpha) H^{-1} C'
/// with H = rho A'A + eta C'C, the split-variable transition
///   [u; v] <- G [u; v] + offset,
/// and the x-error transition of the requested case (H1, H2 or H3).
struct DenseTransition {
  RateCase rate_case = RateCase::I_sb;
  Eigen::VectorXd s;
  Eigen::MatrixXd P;
  Eigen::MatrixXd Q;
  Eigen::MatrixXd G;
  Eigen::VectorXd offset;
  Eigen::MatrixXd H;
  double radius_G = 0.0;
  double radius_H = 0.0;
};

inline constexpr std::size_t kDenseOracleMaxPixels = 256;

/// Ground-truth oracle for the circulant rate formulas. Requires at most
/// 256 pixels (16x16), periodic operators and case-consistent parameters.
DenseTransition dense_transition_oracle(const RestorationProblem& problem,
                                        RateCase rate_case,
                                        const RateParameters& params);

/// Largest eigenvalue modulus of a general square matrix.
double spectral_radius(const Eigen::MatrixXd& m);

}  // namespace sbadmm
