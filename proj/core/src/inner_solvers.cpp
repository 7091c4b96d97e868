#include "sbadmm/inner_solvers.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>

#include "sbadmm/errors.hpp"
#include "sbadmm/fft.hpp"

namespace sbadmm {

const char* to_string(InnerMode m) {
  return m == InnerMode::pcg ? "pcg" : "exact";
}

InnerMode parse_inner_mode(const std::string& text) {
  if (text == "exact" || text == "circulant_exact") return InnerMode::circulant_exact;
  if (text == "pcg") return InnerMode::pcg;
  throw ConfigError("unknown inner mode '" + text + "' (expected exact|pcg)");
}

const char* to_string(PreconditionerKind p) {
  return p == PreconditionerKind::none ? "none" : "circulant";
}

PreconditionerKind parse_preconditioner(const std::string& text) {
  if (text == "none") return PreconditionerKind::none;
  if (text == "circulant") return PreconditionerKind::circulant;
  throw ConfigError("unknown preconditioner '" + text + "'");
}

void InnerSolveConfig::validate() const {
  if (mode == InnerMode::pcg && pcg_iterations < 1) {
    throw ParameterError("pcg_iterations must be >= 1");
  }
  if (!(pcg_tolerance >= 0.0)) {
    throw ParameterError("pcg_tolerance must be nonnegative");
  }
}

BccbSpectrum combined_hessian_spectrum(const BccbSpectrum& lambda,
                                       const BccbSpectrum& omega, double rho,
                                       double eta) {
  if (lambda.shape != omega.shape) throw ShapeError("spectrum shapes differ");
  BccbSpectrum h{lambda.shape, std::vector<double>(lambda.eigenvalues.size()),
                 GramLabel::custom, lambda.approximate || omega.approximate};
  for (std::size_t i = 0; i < h.eigenvalues.size(); ++i) {
    h.eigenvalues[i] = rho * lambda.eigenvalues[i] + eta * omega.eigenvalues[i];
  }
  return h;
}

ImageGrid circulant_solve(const BccbSpectrum& lambda, const BccbSpectrum& omega,
                          double rho, double eta, const ImageGrid& rhs) {
  if (!(rho > 0.0) || !(eta > 0.0)) {
    throw ParameterError("circulant_solve: rho and eta must be positive");
  }
  if (lambda.shape != rhs.shape() || omega.shape != rhs.shape()) {
    throw ShapeError("circulant_solve: spectrum and rhs shapes differ");
  }
  const double singular_tol = kRankTolerance * (rho + eta);
  const std::size_t w = rhs.width();
  for (std::size_t i = 0; i < rhs.size(); ++i) {
    const double h = rho * lambda.eigenvalues[i] + eta * omega.eigenvalues[i];
    if (!(h > singular_tol)) throw SingularHessianError(i / w, i % w, h);
  }
  ComplexGrid f = dft2(rhs.shape(), rhs.values());
  for (std::size_t i = 0; i < f.size(); ++i) {
    f[i] /= rho * lambda.eigenvalues[i] + eta * omega.eigenvalues[i];
  }
  return ImageGrid(rhs.shape(), idft2_real(rhs.shape(), f));
}

CirculantPreconditioner::CirculantPreconditioner(BccbSpectrum hessian_spectrum,
                                                 double floor)
    : spectrum_(std::move(hessian_spectrum)) {
  const double top = spectrum_.max();
  if (!(top > 0.0)) throw SolverError("preconditioner spectrum is identically zero");
  const double lo = floor * top;
  for (double& e : spectrum_.eigenvalues) e = std::max(e, lo);
}

ImageGrid CirculantPreconditioner::apply(const ImageGrid& r) const {
  if (r.shape() != spectrum_.shape) throw ShapeError("preconditioner shape");
  ComplexGrid f = dft2(r.shape(), r.values());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] /= spectrum_.eigenvalues[i];
  return ImageGrid(r.shape(), idft2_real(r.shape(), f));
}

namespace {

void require_finite(const ImageGrid& g, int step, const char* what) {
  if (!g.all_finite()) {
    throw SolverError(std::string("pcg: non-finite ") + what + " at step " +
                      std::to_string(step));
  }
}

}  // namespace

PcgResult pcg_solve(const LinearMap& hessian,
                    const CirculantPreconditioner* preconditioner,
                    const ImageGrid& rhs, const InnerSolveConfig& config,
                    const ImageGrid& warm_start) {
  config.validate();
  if (warm_start.shape() != rhs.shape()) {
    throw ShapeError("pcg: warm start and rhs shapes differ");
  }
  require_finite(rhs, 0, "right-hand side");
  require_finite(warm_start, 0, "warm start");

  PcgResult result{warm_start, 0, {}, {}};
  ImageGrid& x = result.x;
  ImageGrid r = rhs;
  axpy(-1.0, hessian(x), r);
  double rnorm = norm(r);
  result.residual_norms.push_back(rnorm);
  const double bnorm = norm(rhs);
  const double stop = config.pcg_tolerance * bnorm;

  auto precondition = [&](const ImageGrid& v) {
    return preconditioner ? preconditioner->apply(v) : v;
  };

  ImageGrid z = precondition(r);
  ImageGrid p = z;
  double rz = dot(r, z);
  for (int step = 1; step <= config.pcg_iterations; ++step) {
    if (rnorm == 0.0 || (config.pcg_tolerance > 0.0 && rnorm <= stop)) break;
    const ImageGrid hp = hessian(p);
    require_finite(hp, step, "Hessian product");
    const double curvature = dot(p, hp);
    if (!(curvature > 0.0)) {
      throw SolverError("pcg: breakdown (curvature " + std::to_string(curvature) +
                        ") at step " + std::to_string(step));
    }
    const double step_size = rz / curvature;
    axpy(step_size, p, x);
    axpy(-step_size, hp, r);
    require_finite(x, step, "iterate");
    result.energy_decrease.push_back(0.5 * step_size * rz);
    rnorm = norm(r);
    result.residual_norms.push_back(rnorm);
    result.iterations = step;

    z = precondition(r);
    const double rz_next = dot(r, z);
    const double beta = rz_next / rz;
    rz = rz_next;
    p = linear_combination(1.0, z, beta, p);
  }
  return result;
}

void write_residual_history_csv(const std::filesystem::path& path,
                                const PcgResult& result) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  out << "step,residual_norm\n";
  for (std::size_t i = 0; i < result.residual_norms.size(); ++i) {
    out << i << ',' << result.residual_norms[i] << '\n';
  }
}

}  // namespace sbadmm
