#include "sbadmm/dense_oracle.hpp"

#include "sbadmm/errors.hpp"

namespace sbadmm {

DenseOperators densify(const RestorationProblem& problem) {
  const std::size_t n = problem.shape().size();
  const std::size_t dirs = problem.diff().directions;
  DenseOperators ops;
  ops.A.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  ops.C.resize(static_cast<Eigen::Index>(dirs * n), static_cast<Eigen::Index>(n));
  ops.y.resize(static_cast<Eigen::Index>(n));
  ImageGrid unit(problem.shape());
  for (std::size_t j = 0; j < n; ++j) {
    unit[j] = 1.0;
    const ImageGrid a = problem.forward(unit);
    const GradientField c = problem.diff_forward(unit);
    for (std::size_t i = 0; i < n; ++i) {
      ops.A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = a[i];
    }
    for (std::size_t i = 0; i < c.size(); ++i) {
      ops.C(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = c[i];
    }
    unit[j] = 0.0;
  }
  for (std::size_t i = 0; i < n; ++i) ops.y(static_cast<Eigen::Index>(i)) = problem.y()[i];
  return ops;
}

double spectral_radius(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) throw ShapeError("spectral_radius: non-square matrix");
  Eigen::EigenSolver<Eigen::MatrixXd> solver(m, false);
  if (solver.info() != Eigen::Success) {
    throw SolverError("eigendecomposition did not converge");
  }
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

DenseTransition dense_transition_oracle(const RestorationProblem& problem,
                                        RateCase rate_case,
                                        const RateParameters& params) {
  if (problem.shape().size() > kDenseOracleMaxPixels) {
    throw ShapeError("dense oracle is limited to 256 pixels");
  }
  if (!problem.exactly_circulant()) {
    throw ParameterError("dense oracle needs periodic operators");
  }
  if (problem.potential().kind() != PotentialKind::quadratic) {
    throw ParameterError("dense oracle needs a quadratic potential");
  }
  if (params.alpha != problem.alpha()) {
    throw ParameterError("rate parameters use a different alpha than the problem");
  }
  require_case_parameters(rate_case, params);
  const double rho = params.rho, eta = params.eta, alpha = params.alpha;

  const DenseOperators ops = densify(problem);
  const Eigen::Index n = ops.A.cols();
  const Eigen::Index m = ops.C.rows();
  const Eigen::MatrixXd hessian =
      rho * ops.A.transpose() * ops.A + eta * ops.C.transpose() * ops.C;
  Eigen::LLT<Eigen::MatrixXd> llt(hessian);
  if (llt.info() != Eigen::Success) {
    throw SolverError("dense oracle: rho A'A + eta C'C is singular");
  }

  DenseTransition t;
  t.rate_case = rate_case;
  t.s = llt.solve(ops.A.transpose() * ops.y);
  t.P = (rho - 1.0) * llt.solve(Eigen::MatrixXd(ops.A.transpose()));
  t.Q = (eta - alpha) * llt.solve(Eigen::MatrixXd(ops.C.transpose()));

  const double wu = rho / (rho + 1.0), ku = 1.0 / (rho + 1.0);
  const double wv = eta / (eta + alpha), kv = alpha / (eta + alpha);
  t.G.resize(n + m, n + m);
  t.G.topLeftCorner(n, n) = wu * ops.A * t.P + ku * Eigen::MatrixXd::Identity(n, n);
  t.G.topRightCorner(n, m) = wu * ops.A * t.Q;
  t.G.bottomLeftCorner(m, n) = wv * ops.C * t.P;
  t.G.bottomRightCorner(m, m) = wv * ops.C * t.Q + kv * Eigen::MatrixXd::Identity(m, m);
  t.offset.resize(n + m);
  t.offset.head(n) = wu * ops.A * t.s;
  t.offset.tail(m) = wv * ops.C * t.s;

  const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(n, n);
  switch (rate_case) {
    case RateCase::I_sb:
      t.H = wv * t.Q * ops.C + kv * identity;
      break;
    case RateCase::II_al:
      t.H = wu * t.P * ops.A + ku * identity;
      break;
    case RateCase::III_matched:
      t.H = wv * (t.P * ops.A + t.Q * ops.C) + kv * identity;
      break;
  }
  t.radius_G = spectral_radius(t.G);
  t.radius_H = spectral_radius(t.H);
  return t;
}

}  // namespace sbadmm
