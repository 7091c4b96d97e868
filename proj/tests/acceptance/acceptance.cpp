// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria (0 when everything passes).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>

#include "cli.hpp"
#include "oracles.hpp"
#include "sbadmm/dense_oracle.hpp"
#include "sbadmm/experiments.hpp"
#include "sbadmm/spectral_analysis.hpp"

using namespace sbadmm;
using namespace sbadmm::testing;

namespace {

struct Outcome {
  bool pass = true;
  std::vector<std::string> lines;

  void check(bool ok, const std::string& what) {
    pass = pass && ok;
    lines.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
  }
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

InnerSolveConfig exact_inner() {
  InnerSolveConfig c;
  c.mode = InnerMode::circulant_exact;
  return c;
}

ExperimentConfig periodic_default() {
  ExperimentConfig c;
  c.mask_mode = MaskMode::periodic;
  return c;
}

// 1. rho = 1 two-split ADMM and split Bregman coincide.
Outcome sb_admm_reduction() {
  Outcome o;
  std::mt19937_64 rng(1001);
  const auto p = random_problem({16, 16}, rng, Potential::quadratic(0.0625));
  const double eta = 0.37;
  SolverState a = canonical_init(p, 1.0, eta), b = a;
  double dev = 0.0;
  for (int k = 0; k < 30; ++k) {
    a = admm2_step(a, p, 1.0, eta, exact_inner());
    b = sb_step(b, p, eta, exact_inner());
    dev = std::max({dev, max_abs_difference(a.x, b.x), max_abs_difference(a.v, b.v),
                    max_abs_difference(a.e, b.e)});
  }
  o.check(dev <= 1e-12, "max |x,v,e deviation| over 30 iterations = " + fmt(dev) + " <= 1e-12");
  return o;
}

// 2. u + rho d = y and alpha v + eta e = 0 along admm2 runs.
Outcome elimination_identities() {
  Outcome o;
  std::mt19937_64 rng(1002);
  std::uniform_real_distribution<double> lg(-4.0, 4.0);
  const double alpha = 0.0625;
  const auto p = random_problem({16, 16}, rng, Potential::quadratic(alpha), false);
  double worst_u = 0.0, worst_v = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    const double rho = std::exp2(lg(rng)), eta = alpha * std::exp2(lg(rng));
    SolverState s = canonical_init(p, rho, eta);
    for (int k = 0; k < 100; ++k) {
      s = admm2_step(s, p, rho, eta, InnerSolveConfig{});
      const ImageGrid gap = linear_combination(1.0, s.u, rho, s.d);
      const double ru = norm(linear_combination(1.0, gap, -1.0, p.y())) / norm(p.y());
      const double scale = alpha * norm(s.v) + eta * norm(s.e);
      const double rv = scale > 0.0 ? norm(linear_combination(alpha, s.v, eta, s.e)) / scale : 0.0;
      worst_u = std::max(worst_u, ru);
      worst_v = std::max(worst_v, rv);
    }
  }
  o.check(worst_u <= 1e-10, "max relative |u + rho d - y| = " + fmt(worst_u) + " <= 1e-10");
  o.check(worst_v <= 1e-10, "max relative |alpha v + eta e| = " + fmt(worst_v) + " <= 1e-10");
  return o;
}

struct PeriodicDefault {
  GeneratedProblem gen;
  Reference dense;
};

// 3. (rho, eta) = (1, alpha) solves the quadratic problem in one step.
Outcome one_iteration(const PeriodicDefault& pd) {
  Outcome o;
  const auto& p = pd.gen.problem;
  const SolverState s =
      admm2_step(canonical_init(p, 1.0, p.alpha()), p, 1.0, p.alpha(), exact_inner());
  const double rel = norm(linear_combination(1.0, s.x, -1.0, pd.dense.x)) / norm(pd.dense.x);
  o.check(rel <= 1e-8, "||x1 - xhat|| / ||xhat|| = " + fmt(rel) + " <= 1e-8");
  return o;
}

// 4. Dense eigendecomposition radii against the analytic rate maxima.
Outcome dense_vs_analytic() {
  Outcome o;
  std::mt19937_64 rng(1004);
  const double alphas[] = {1.0 / 64, 1.0 / 16, 0.25, 1.0, 4.0};
  const double qs[] = {1.0 / 20, 0.5, 1.0, 2.0, 20.0};
  double worst = 0.0;
  int count = 0;
  for (double a : alphas) {
    const auto p = random_problem({4, 4}, rng, Potential::quadratic(a));
    const auto s = delta_spectrum(p.lambda(), p.omega(), a);
    for (double q : qs) {
      const RateParameters params[] = {{1.0, q * a, a}, {q, a, a}, {q, q * a, a}};
      const RateCase cases[] = {RateCase::I_sb, RateCase::II_al, RateCase::III_matched};
      for (int c = 0; c < 3; ++c) {
        const double dense = dense_transition_oracle(p, cases[c], params[c]).radius_H;
        const double analytic = predict(cases[c], params[c], s).spectral_radius;
        worst = std::max(worst, std::abs(dense - analytic));
        ++count;
      }
    }
  }
  o.check(worst <= 1e-9, std::to_string(count) + " (case, eta-or-rho, alpha) combinations on 4x4, "
                             "max |dense - analytic| = " + fmt(worst) + " <= 1e-9");
  return o;
}

// 5. Late-iteration error ratios against predicted radii.
Outcome empirical_rates(const PeriodicDefault& pd) {
  Outcome o;
  const auto& p = pd.gen.problem;
  const double a = p.alpha();
  const auto spectrum = delta_spectrum(p.lambda(), p.omega(), a);
  const ImageGrid& xhat = pd.dense.x;

  const auto x_rate = [&](double rho, double eta, int iters) {
    std::vector<double> errors;
    SolverState s = canonical_init(p, rho, eta);
    errors.push_back(norm(linear_combination(1.0, s.x, -1.0, xhat)));
    for (int k = 0; k < iters; ++k) {
      s = quadratic_closed_form_step(s, p, rho, eta);
      errors.push_back(norm(linear_combination(1.0, s.x, -1.0, xhat)));
    }
    return empirical_rate(errors);
  };

  const double r1 = x_rate(1.0, 20 * a, 300);
  const double p1 = predict(RateCase::I_sb, {1.0, 20 * a, a}, spectrum).spectral_radius;
  const double e1 = std::abs(r1 - p1) / p1;
  o.check(e1 <= 0.05, "case I eta=20a: measured " + fmt(r1) + " vs predicted " + fmt(p1) +
                          ", rel diff " + fmt(e1) + " <= 0.05");

  const double r3 = x_rate(20.0, 20 * a, 300);
  const double p3 = predict(RateCase::III_matched, {20.0, 20 * a, a}, spectrum).spectral_radius;
  const double e3 = std::abs(r3 - p3) / p3;
  o.check(e3 <= 0.05, "case III eta=20a: measured " + fmt(r3) + " vs predicted " + fmt(p3) +
                          ", rel diff " + fmt(e3) + " <= 0.05");

  // Split-variable error for case III with eta = a/4.
  const double eta = a / 4, rho = eta / a;
  const ImageGrid uhat = p.forward(xhat);
  const GradientField vhat = p.diff_forward(xhat);
  const auto w_error = [&](const SolverState& s) {
    const double du = squared_norm(linear_combination(1.0, s.u, -1.0, uhat));
    const double dv = squared_norm(linear_combination(1.0, s.v, -1.0, vhat));
    return std::sqrt(du + dv);
  };
  std::vector<double> errors;
  SolverState s = canonical_init(p, rho, eta);
  errors.push_back(w_error(s));
  for (int k = 0; k < 16; ++k) {
    s = quadratic_closed_form_step(s, p, rho, eta);
    errors.push_back(w_error(s));
  }
  const double rw = empirical_rate(errors);
  const double ew = std::abs(rw - 0.2) / 0.2;
  o.check(ew <= 0.10, "case III eta=a/4: split-variable rate " + fmt(rw) + " vs 1/5, rel diff " +
                          fmt(ew) + " <= 0.10");
  return o;
}

std::string cli_value(const std::string& text, const std::string& key) {
  const auto pos = text.find(key + " = ");
  if (pos == std::string::npos) return {};
  const auto start = pos + key.size() + 3;
  return text.substr(start, text.find('\n', start) - start);
}

// 6. Recommended parameters.
Outcome recommendation() {
  Outcome o;
  const std::string out_dir =
      (std::filesystem::temp_directory_path() / "sbadmm_acceptance_recommend").string();
  {
    std::ostringstream out, err;
    const int code = cli::run_cli({"recommend", "--output-dir", out_dir}, out, err);
    const std::string eta = cli_value(out.str(), "eta_star");
    const std::string rho = cli_value(out.str(), "rho_star");
    o.check(code == 0 && eta == "0.0625" && rho == "1",
            "default spectrum: recommend prints eta_star = " + eta + ", rho_star = " + rho +
                " (want 0.0625 = alpha and 1 exactly)");
    const auto gen = make_problem(ExperimentConfig{});
    const auto s = delta_spectrum(gen.problem.lambda(), gen.problem.omega(), 0.0625);
    o.check(optimal_eta_sb(s).eta_star == 0.0625 && optimal_rho_al(s) == 1.0,
            "default spectrum: library eta_star == alpha and rho_star == 1 bit-exact");
  }
  {
    const double a = 1.0 / 16;
    std::vector<double> deltas;
    for (int i = 0; i <= 256; ++i) deltas.push_back(std::exp2(-8.0 + 2.0 * i / 256));
    const double eta_oracle =
        grid_search_minimax(deltas, [&](double d, double q) { return s1_formula(d, q, a); });
    const double rho_oracle =
        grid_search_minimax(deltas, [&](double d, double q) { return s2_formula(d, q, a); });
    std::ostringstream out, err;
    const int code = cli::run_cli(
        {"recommend", "--alpha", "1/16", "--delta-band", "0.00390625,0.015625", "--output-dir",
         out_dir},
        out, err);
    const double eta = std::stod("0" + cli_value(out.str(), "eta_star"));
    const double rho = std::stod("0" + cli_value(out.str(), "rho_star"));
    o.check(code == 0 && std::abs(eta - eta_oracle) <= 1e-6 && std::abs(eta - 2.0) <= 1e-12,
            "band [1/256, 1/64]: eta_star = " + fmt(eta) + ", grid search " + fmt(eta_oracle));
    o.check(code == 0 && std::abs(rho - rho_oracle) <= 1e-6 && std::abs(rho - 1.0 / 32) <= 1e-12,
            "band [1/256, 1/64]: rho_star = " + fmt(rho) + ", grid search " + fmt(rho_oracle));
  }
  return o;
}

// 7. Qualitative penalty-grid orderings on the default masked problem.
Outcome figure2() {
  Outcome o;
  ExperimentConfig c;
  c.output_dir = std::filesystem::temp_directory_path() / "sbadmm_acceptance_figure2";
  const Figure2Result r = figure2_protocol(c);
  const double a = c.alpha;
  const auto find = [&](double rho, double eta) -> const Figure2Run& {
    for (const auto& run : r.runs) {
      if (std::abs(run.rho - rho) <= 1e-12 * rho && std::abs(run.eta - eta) <= 1e-12 * eta) {
        return run;
      }
    }
    throw std::runtime_error("missing grid entry");
  };
  const auto its = [](const Figure2Run& run) {
    return run.iterations_to_tolerance ? *run.iterations_to_tolerance : -1;
  };

  bool all_decrease = true;
  std::string counts;
  for (const auto& run : r.runs) {
    all_decrease = all_decrease && run.error.empty() &&
                   run.trace.back().rel_cost_err < run.trace.records.front().rel_cost_err;
    counts += " " + run.label + "=" + std::to_string(its(run));
  }
  o.lines.push_back("     iterations to rel_cost_err <= 1e-6:" + counts);
  o.check(all_decrease, "(a) every setting ends below its initial rel_cost_err");

  const int best = its(find(1.0, a));
  bool first = best >= 0;
  for (const auto& run : r.runs) {
    if (&run != &find(1.0, a)) first = first && (its(run) < 0 || best < its(run));
  }
  o.check(first, "(b) (1, a) reaches 1e-6 first (" + std::to_string(best) + " iterations)");

  const int slow = its(find(1.0, a / 20)), fast = its(find(1.0 / 20, a / 20));
  o.check(fast >= 0 && (slow < 0 || fast < slow),
          "(c) (1/20, a/20) = " + std::to_string(fast) + " < (1, a/20) = " + std::to_string(slow));

  const int n1 = its(find(1.0, 20 * a)), n2 = its(find(20.0, 20 * a));
  const double spread =
      (n1 < 0 || n2 < 0) ? 1.0 : std::abs(n1 - n2) / static_cast<double>(std::max(n1, n2));
  o.check(spread <= 0.20, "(d) (1, 20a) = " + std::to_string(n1) + " vs (20, 20a) = " +
                              std::to_string(n2) + ", |diff| / max = " + fmt(spread) + " <= 0.20");
  return o;
}

// 8. Randomized property suites.
Outcome properties() {
  Outcome o;
  std::mt19937_64 rng(1008);
  std::uniform_int_distribution<std::size_t> dim(2, 12), tap(1, 5);
  std::uniform_real_distribution<double> pos(0.05, 4.0), zdist(-5.0, 5.0), pert(-1e-3, 1e-3);
  constexpr int kCases = 100;

  double adj = 0.0;
  for (int t = 0; t < kCases; ++t) {
    const GridShape s{dim(rng), dim(rng)};
    for (Boundary b : {Boundary::periodic, Boundary::masked}) {
      const auto k = random_kernel(std::min(tap(rng), s.height), std::min(tap(rng), s.width), b, rng);
      const ImageGrid x = random_grid(s, rng), r = random_grid(s, rng);
      const double l = dot(blur_forward(k, x), r), rr = dot(x, blur_adjoint(k, r));
      adj = std::max(adj, std::abs(l - rr) / std::max(1.0, std::abs(l)));
    }
    for (MaskMode m : {MaskMode::periodic, MaskMode::masked}) {
      const std::size_t dirs = 1 + static_cast<std::size_t>(t) % kMaxDirections;
      const ImageGrid x = random_grid(s, rng);
      GradientField g = random_field(s, dirs, rng);
      g.set_mask(difference_mask(s, m, dirs));
      const double l = dot(finite_diff_forward(x, m, dirs), g), rr = dot(x, finite_diff_adjoint(g, m));
      adj = std::max(adj, std::abs(l - rr) / std::max(1.0, std::abs(l)));
    }
  }
  o.check(adj <= 1e-12, "adjoint identities, " + std::to_string(4 * kCases) +
                            " random cases, max relative gap " + fmt(adj) + " <= 1e-12");

  int optimality_violations = 0, expansions = 0;
  for (int t = 0; t < kCases; ++t) {
    const double alpha = pos(rng), th = pos(rng), eta = pos(rng);
    for (const Potential& p : {Potential::quadratic(alpha), Potential::l1(alpha),
                               Potential::huber(alpha, th), Potential::fair(alpha, th)}) {
      const double z = zdist(rng), v = p.prox(z, eta);
      const auto f = [&](double w) { return p.value(w) + 0.5 * eta * (z - w) * (z - w); };
      for (int k = 0; k < 100; ++k) {
        if (f(v) > f(v + pert(rng)) + 1e-12 * std::max(1.0, f(v))) ++optimality_violations;
      }
      const double z2 = zdist(rng);
      if (std::abs(p.prox(z, eta) - p.prox(z2, eta)) > std::abs(z - z2) + 1e-12) ++expansions;
    }
  }
  o.check(optimality_violations == 0,
          "prox optimality, " + std::to_string(4 * kCases) + " random (z, eta) x 100 perturbations, " +
              std::to_string(optimality_violations) + " violations");
  o.check(expansions == 0, "prox nonexpansiveness, " + std::to_string(4 * kCases) +
                               " random pairs, " + std::to_string(expansions) + " violations");

  int sign_errors = 0, slope_errors = 0, sign_cases = 0;
  std::uniform_real_distribution<double> lg(-6.0, 6.0);
  while (sign_cases < kCases) {
    const double a = std::exp2(lg(rng) / 2), eta = std::exp2(lg(rng)), d = std::exp2(lg(rng));
    if (std::abs(eta - a) < 1e-6 * a) continue;
    ++sign_cases;
    const double gap = rate_s1(d, eta, a) - rate_s3(eta, a);
    if ((gap > 0.0) != (a > eta) || gap == 0.0) ++sign_errors;
    const double slope = rate_s1(d * (1 + 1e-3), eta, a) - rate_s1(d, eta, a);
    if (slope != 0.0 && (slope > 0.0) != (eta > a)) ++slope_errors;
  }
  o.check(sign_errors == 0 && slope_errors == 0,
          "s1 sign structure, " + std::to_string(kCases) + " random (delta, eta, alpha): " +
              std::to_string(sign_errors) + " sign and " + std::to_string(slope_errors) +
              " monotonicity violations");

  int rank_errors = 0;
  for (int t = 0; t < kCases; ++t) {
    const GridShape s{dim(rng), dim(rng)};
    const auto omega = bccb_spectrum_of_gram(DifferenceOperator{MaskMode::periodic, 2}, s);
    const auto id = bccb_spectrum_of_gram(ConvolutionKernel::identity(), s);
    const auto blur = bccb_spectrum_of_gram(random_kernel(tap(rng), tap(rng), Boundary::periodic, rng), s);
    const auto zero = BccbSpectrum::constant(s, 0.0);
    if (!split_operator_rank_check(id, zero).full_rank) ++rank_errors;
    if (split_operator_rank_check(zero, omega).full_rank) ++rank_errors;
    if (!split_operator_rank_check(blur, omega).full_rank) ++rank_errors;
  }
  o.check(rank_errors == 0, "rank check on identity/zero, zero/Laplacian, low-pass/Laplacian, " +
                                std::to_string(kCases) + " random grids each, " +
                                std::to_string(rank_errors) + " errors");
  return o;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main() {
  int failures = 0;
  const auto report = [&](int id, const std::string& title, double limit,
                          const std::function<Outcome()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = body();
    } catch (const std::exception& e) {
      o.check(false, std::string("exception: ") + e.what());
    }
    const double secs = seconds_since(t0);
    if (limit > 0.0) o.check(secs < limit, "runtime " + fmt(secs) + " s < " + fmt(limit) + " s");
    std::cout << (o.pass ? "PASS" : "FAIL") << " " << id << " " << title << " (" << fmt(secs)
              << " s)\n";
    for (const auto& l : o.lines) std::cout << "     " << l << "\n";
    std::cout.flush();
    if (!o.pass) ++failures;
  };

  report(1, "SB / two-split ADMM reduction at rho = 1", 5.0, sb_admm_reduction);
  report(2, "elimination identities", 0.0, elimination_identities);

  std::optional<PeriodicDefault> pd;
  const auto setup = [&] {
    if (!pd) {
      GeneratedProblem gen = make_problem(periodic_default());
      Reference dense = reference_solution(gen.problem, ReferenceMethod::dense);
      pd.emplace(PeriodicDefault{std::move(gen), std::move(dense)});
    }
    return std::cref(*pd);
  };
  report(3, "one-iteration optimum at (1, alpha)", 0.0, [&] { return one_iteration(setup()); });
  report(4, "analytic radii against dense eigendecomposition", 0.0, dense_vs_analytic);
  report(5, "empirical asymptotic rates", 30.0, [&] { return empirical_rates(setup()); });
  report(6, "parameter recommendation", 0.0, recommendation);
  report(7, "penalty-grid qualitative orderings", 120.0, figure2);
  report(8, "randomized property suites", 0.0, properties);

  std::cout << (failures == 0 ? "ALL CRITERIA PASS" : std::to_string(failures) + " CRITERIA FAIL")
            << "\n";
  return failures;
}
