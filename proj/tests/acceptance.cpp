// Acceptance suite: one line per criterion, nonzero exit if any fails.
//
//  1. pointwise residual rate on seeded affine instances
//  2. ergodic residual/error rates (including the boundary relaxation)
//  3. relative-error equality of the proximal view, every iteration
//  4. ||delta x|| monotonicity, plus a power check on a diverging run
//  5. closed-form divergence instance exactness and thresholds
//  6. iterate convergence at the boundary relaxation with beta > 0
//  7. resolvent equivalence against brute-force proximal minimization
//  8. weighted-Lasso iteration-count trends over the parameter grid
//  9. strong-convexity-transfer sweep trend
// 10. transported-error nonnegativity and sampled enlargement membership
// 11. distance-generating-function identity suite

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "prsplit/counterexample.hpp"
#include "prsplit/diagnostics.hpp"
#include "prsplit/hpe.hpp"
#include "prsplit/lasso.hpp"
#include "prsplit/synthetic.hpp"
#include "prox_oracle.hpp"

using namespace prsplit;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail) {
  std::printf("[%s] criterion %2d: %-34s %s\n", pass ? "PASS" : "FAIL", id, name.c_str(),
              detail.c_str());
  if (!pass) ++g_failures;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct CheckTally {
  long runs = 0;
  long failed = 0;
  double worst_margin = std::numeric_limits<double>::infinity();
  std::string worst_context;

  void absorb(const DiagnosticReport& rep, const std::string& check, const std::string& ctx) {
    const CheckResult* c = rep.find(check);
    if (!c || !c->applicable) return;
    ++runs;
    if (!c->pass) ++failed;
    if (c->worst_margin < worst_margin) {
      worst_margin = c->worst_margin;
      worst_context = ctx;
    }
  }
  std::string summary() const {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "runs=%ld failed=%ld worst_margin=%.3e %s", runs, failed,
                  worst_margin, worst_context.c_str());
    return buf;
  }
};

// test-only dense solve: Gaussian elimination with partial pivoting
Vector solve_dense(Matrix M, Vector rhs) {
  const int n = static_cast<int>(M.rows());
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(M(r, col)) > std::abs(M(piv, col))) piv = r;
    M.row(col).swap(M.row(piv));
    std::swap(rhs[col], rhs[piv]);
    for (int r = col + 1; r < n; ++r) {
      const double f = M(r, col) / M(col, col);
      M.row(r) -= f * M.row(col);
      rhs[r] -= f * rhs[col];
    }
  }
  Vector sol(n);
  for (int r = n - 1; r >= 0; --r) {
    double acc = rhs[r];
    for (int c = r + 1; c < n; ++c) acc -= M(r, c) * sol[c];
    sol[r] = acc / M(r, r);
  }
  return sol;
}

}  // namespace

int main() {
  // ------------------------------------------------------------------ 1,2,3,4,10
  // One sweep over 50 seeded affine instances with a known solution, at
  // theta in {0.5, 1, 1.5} * theta0 (criterion 1-scope) plus 2*theta0
  // (criterion 2/boundary). Every run feeds the full per-iteration battery.
  CheckTally pointwise, erg_res, erg_eps, hpe_eq, dx_mono, eps_p, eps_pp;
  long enlargement_checks = 0, enlargement_refuted = 0;
  const auto t_sweep = Clock::now();
  double t_criterion1 = 0.0;
  const double betas[] = {0.02, 0.1, 0.5, 1.0, 2.0};
  const double gammas[] = {0.5, 1.0, 1.6};
  const double spreads[] = {2.0, 8.0, 20.0};
  for (int i = 0; i < 50; ++i) {
    const double beta = betas[i % 5];
    const double gamma = gammas[i % 3];
    const auto inst =
        make_affine_instance(9000 + static_cast<std::uint64_t>(i), 6, beta, gamma, spreads[i % 3]);
    const double b = common_modulus(inst.A, inst.B);
    const double theta0 = 1.0 + gamma * b / 2.0;
    for (double factor : {0.5, 1.0, 1.5, 2.0}) {
      PRConfig cfg;
      cfg.gamma = gamma;
      cfg.theta = factor * theta0;
      cfg.beta = b;
      cfg.x0 = Vector::Zero(6);
      cfg.tol = 1e-300;  // run to the floating-point fixed point or the cap
      cfg.max_iter = 10000;
      cfg.record_trace = false;
      cfg.x_star = inst.x_star;
      const auto t_run = Clock::now();
      const auto out = solve_with_diagnostics(inst.A, inst.B, cfg);
      if (factor < 2.0) t_criterion1 += seconds_since(t_run);

      char ctx[96];
      std::snprintf(ctx, sizeof(ctx), "(i=%d beta=%g gamma=%g theta=%g*theta0)", i, beta, gamma,
                    factor);
      if (factor < 2.0) pointwise.absorb(out.report, "pointwise-rate-bound", ctx);
      erg_res.absorb(out.report, "ergodic-rate-residual-bound", ctx);
      erg_eps.absorb(out.report, "ergodic-rate-eps-bound", ctx);
      hpe_eq.absorb(out.report, "hpe-error-equality", ctx);
      dx_mono.absorb(out.report, "delta-x-monotone", ctx);
      eps_p.absorb(out.report, "eps-prime-nonneg", ctx);
      eps_pp.absorb(out.report, "eps-dprime-nonneg", ctx);

      // sampled enlargement membership of the final ergodic certificate
      if (i % 10 == 0 && (factor == 1.0 || factor == 2.0)) {
        RngStream rng = RngStream::substream(777000 + static_cast<std::uint64_t>(i),
                                             static_cast<std::uint64_t>(factor * 10));
        const auto& erg = out.result.ergodic;
        enlargement_checks += 2;
        if (!eps_enlargement_check(inst.A, erg.u_bar(), erg.a_bar(), erg.eps_prime(b), 200, rng,
                                   2.0))
          ++enlargement_refuted;
        if (!eps_enlargement_check(inst.B, erg.v_bar(), erg.b_bar(), erg.eps_double_prime(b), 200,
                                   rng, 2.0))
          ++enlargement_refuted;
      }
    }
  }
  const double sweep_time = seconds_since(t_sweep);

  report(1, "pointwise rate (50 instances)",
         pointwise.failed == 0 && pointwise.runs == 150 && t_criterion1 < 30.0,
         pointwise.summary() + " time=" + std::to_string(t_criterion1) + "s");
  report(2, "ergodic rates incl. boundary",
         erg_res.failed == 0 && erg_eps.failed == 0 && erg_res.runs == 200,
         erg_res.summary() + " | eps: " + erg_eps.summary());

  // criterion 3 also covers the runs of criteria 6 and the lasso battery below;
  // tallied further before reporting.

  // ------------------------------------------------------------------ 4 (power)
  bool power_ok = false;
  {
    DivergenceInstance di{0.0, 0.0, 1};
    const auto A = counterexample_operator_A(di);
    const auto B = counterexample_operator_B(di);
    PRConfig cfg;
    cfg.theta = 2.5;  // uncertified: factor -1.5
    cfg.x0 = Vector::Constant(2, 1.0);
    cfg.max_iter = 200;
    cfg.record_trace = false;
    const auto out = solve_with_diagnostics(A, B, cfg);
    const auto* c = out.report.find("delta-x-monotone-uncertified");
    power_ok = c && c->applicable && !c->pass;
  }

  // ------------------------------------------------------------------ 5
  {
    bool ok = true;
    std::string detail;
    double worst_dev = 0.0;
    RngStream x0rng(31337);
    for (auto [b, bb] : std::vector<std::pair<double, double>>{
             {0.0, 0.0}, {0.0, 1.0}, {1.0, 1.0}, {0.5, 2.0}}) {
      const DivergenceInstance di{b, bb, 1};
      const double thr = divergence_threshold(di);
      if (classify(di, thr - 1e-6) != Classification::converges) ok = false;
      if (classify(di, thr) == Classification::converges) ok = false;
      for (double theta : {0.8, 1.5, thr - 1e-6, thr, thr + 0.5}) {
        Vector x0(2);
        x0 << 0.5 + x0rng.uniform01(), 0.5 + x0rng.uniform01();
        const auto out = simulate(di, theta, x0, 60);
        worst_dev = std::max(worst_dev, out.max_closed_form_dev);
        if (out.max_closed_form_dev > 1e-12) ok = false;
      }
    }
    for (double bb : {0.0, 1.0, 5.0})
      if (divergence_threshold({0.0, bb, 1}) != 2.0) ok = false;
    char buf[96];
    std::snprintf(buf, sizeof(buf), "worst per-step deviation=%.3e, thresholds exact", worst_dev);
    report(5, "divergence instance exactness", ok, buf);
  }

  // ------------------------------------------------------------------ 6
  {
    const double gamma = 1.0;
    const auto inst = make_affine_instance(4242, 8, 1.0, gamma);
    const double b = common_modulus(inst.A, inst.B);
    PRConfig cfg;
    cfg.gamma = gamma;
    cfg.theta = 2.0 * (1.0 + gamma * b / 2.0);
    cfg.beta = b;
    cfg.x0 = Vector::Zero(8);
    cfg.tol = 1e-8;
    cfg.max_iter = 100000;
    cfg.record_trace = false;
    cfg.x_star = inst.x_star;
    const auto out = solve_with_diagnostics(inst.A, inst.B, cfg);
    hpe_eq.absorb(out.report, "hpe-error-equality", "(boundary run)");
    dx_mono.absorb(out.report, "delta-x-monotone", "(boundary run)");
    const bool converged = out.result.reason == StopReason::tolerance;
    // solution characterization: u* = J_{gA}(x*), a* in A(u*) cap -B(u*)
    const Vector x_lim = out.result.final_state.x;
    const Vector u_lim = inst.A.resolvent(gamma, x_lim);
    const Vector a_lim = (x_lim - u_lim) / gamma;
    const bool char_ok = verify_inclusion(inst.A, u_lim, a_lim, 1e-6, gamma) &&
                         verify_inclusion(inst.B, u_lim, Vector(-a_lim), 1e-6, gamma);
    char buf[128];
    std::snprintf(buf, sizeof(buf), "theta=2*theta0=%.3f iters=%d |dx|=%.2e inclusion at 1e-6: %s",
                  cfg.theta, out.result.iterations,
                  out.result.final_state.delta_x_norm(cfg.theta), char_ok ? "yes" : "NO");
    report(6, "boundary convergence (beta>0)", converged && char_ok, buf);
  }

  // ------------------------------------------------------------------ 7
  {
    RngStream rng(220);
    double worst_ls = 0.0, worst_l1 = 0.0;
    for (int t = 0; t < 100; ++t) {
      // least-squares side vs independent dense normal-equations solve
      Matrix Cd(12, 7);
      for (int i = 0; i < 12; ++i)
        for (int j = 0; j < 7; ++j) Cd(i, j) = rng.uniform01() < 0.5 ? 0.0 : rng.normal();
      Vector b(12), x(7);
      for (int i = 0; i < 12; ++i) b[i] = rng.normal();
      for (int j = 0; j < 7; ++j) x[j] = 2.0 * rng.normal();
      const Matrix gram = Cd.transpose() * Cd;
      const double alpha =
          Eigen::SelfAdjointEigenSolver<Matrix>(gram).eigenvalues().minCoeff();
      const double aprime = std::max(0.0, alpha) * 0.5 * rng.uniform01();
      const double gamma = 0.3 + 2.0 * rng.uniform01();
      const auto op = least_squares_operator(Cd.sparseView(), b, aprime, gamma);
      const Vector u = op.resolvent(gamma, x);
      const Matrix M = Matrix::Identity(7, 7) + gamma * (gram - aprime * Matrix::Identity(7, 7));
      const Vector oracle = solve_dense(M, x + gamma * Cd.transpose() * b);
      worst_ls = std::max(worst_ls, (u - oracle).norm());

      // weighted-l1 side vs 1-D scalar minimization
      Vector w(5), y(5);
      for (int i = 0; i < 5; ++i) w[i] = rng.uniform01();
      for (int i = 0; i < 5; ++i) y[i] = 4.0 * rng.normal();
      const double ap2 = rng.uniform01();
      const Vector ul1 = resolvent_weighted_l1(w, ap2, gamma, y);
      for (int i = 0; i < 5; ++i) {
        const double oracle1 = test_oracle::prox_weighted_abs(w[i], ap2, gamma, y[i]);
        worst_l1 = std::max(worst_l1, std::abs(ul1[i] - oracle1));
      }
    }
    char buf[96];
    std::snprintf(buf, sizeof(buf), "worst |dev|: least-squares=%.2e weighted-l1=%.2e", worst_ls,
                  worst_l1);
    report(7, "resolvent oracle equivalence", worst_ls <= 1e-8 && worst_l1 <= 1e-8, buf);
  }

  // ------------------------------------------------------------------ 8
  {
    const auto t0 = Clock::now();
    ExperimentConfig ec;
    ec.instances = 20;
    ec.base_seed = 2024;
    const auto table = run_table(ec);
    const double elapsed = seconds_since(t0);

    auto cell = [&](const std::string& theta, GammaRule g, AlphaRule a) -> const ResultRow& {
      for (const auto& c : table.cells)
        if (c.theta_label == theta && c.gamma_rule == g && c.alpha_rule == a) return c;
      throw std::logic_error("cell not found: " + theta);
    };
    bool monotone = true;
    for (GammaRule g : {GammaRule::one, GammaRule::inv_sqrt_alpha_kappa}) {
      for (AlphaRule a : {AlphaRule::zero, AlphaRule::half_alpha}) {
        const double m1 = cell("1", g, a).mean_iterations;
        const double m125 = cell("1.25", g, a).mean_iterations;
        const double m15 = cell("1.5", g, a).mean_iterations;
        const double m175 = cell("1.75", g, a).mean_iterations;
        if (!(m1 > m125 && m125 > m15 && m15 > m175)) monotone = false;
      }
    }
    bool speedup = true;
    for (AlphaRule a : {AlphaRule::zero, AlphaRule::half_alpha}) {
      const double slow = cell("1", GammaRule::one, a).mean_iterations;
      const double fast = cell("1", GammaRule::inv_sqrt_alpha_kappa, a).mean_iterations;
      if (!(slow >= 1.5 * fast)) speedup = false;
    }
    const auto& cens = cell("2+g*a/2", GammaRule::one, AlphaRule::zero);
    const auto& conv = cell("2+g*a/2", GammaRule::one, AlphaRule::half_alpha);
    const bool censoring = cens.censored >= (8 * ec.instances) / 10 &&
                           (conv.n - conv.censored) >= (8 * ec.instances) / 10;
    char buf[200];
    std::snprintf(buf, sizeof(buf),
                  "monotone=%d speedup(>=1.5x)=%d censored(a'=0)=%d/%d converged(a'=a/2)=%d/%d "
                  "time=%.1fs",
                  monotone, speedup, cens.censored, cens.n, conv.n - conv.censored, conv.n,
                  elapsed);
    report(8, "lasso grid trends", monotone && speedup && censoring && elapsed < 300.0, buf);
  }

  // ------------------------------------------------------------------ 9
  {
    int le_half = 0, le_full = 0;
    const int n = 20;
    for (int i = 0; i < n; ++i) {
      const auto inst = generate_instance(instance_seed(777, i));
      const auto pts = run_sweep(inst, 2.0, 1.0, {0.0, 0.25, 0.5, 0.75, 1.0});
      if (pts[2].iterations <= pts[0].iterations) ++le_half;
      if (pts[4].iterations <= pts[0].iterations) ++le_full;
    }
    char buf[96];
    std::snprintf(buf, sizeof(buf), "iters(a/2)<=iters(0): %d/%d, iters(a)<=iters(0): %d/%d",
                  le_half, n, le_full, n);
    report(9, "transfer sweep trend", le_half >= (8 * n) / 10 && le_full >= (8 * n) / 10, buf);
  }

  // ------------------------------------------------- certified lasso battery
  // (feeds criteria 3 and 10 with a run on the benchmark problem class)
  {
    const auto inst = generate_instance(606);
    const Vector uref = reference_solution(inst);
    const double aprime = inst.alpha / 2.0;
    const MonotoneOperator A = lasso_operator_f(inst, aprime, 1.0);
    const MonotoneOperator B = lasso_operator_g(inst, aprime);
    PRConfig cfg;
    cfg.theta = 1.5;
    cfg.beta = lasso_beta(inst, aprime);
    cfg.x0 = Vector::Zero(inst.cols());
    cfg.tol = 1e-7;
    cfg.max_iter = 2000;
    cfg.record_trace = false;
    cfg.x_star = augmented_solution_point(inst, uref, aprime, 1.0, Partition::fg);
    const auto out = solve_with_diagnostics(A, B, cfg);
    hpe_eq.absorb(out.report, "hpe-error-equality", "(lasso run)");
    dx_mono.absorb(out.report, "delta-x-monotone", "(lasso run)");
    eps_p.absorb(out.report, "eps-prime-nonneg", "(lasso run)");
    eps_pp.absorb(out.report, "eps-dprime-nonneg", "(lasso run)");
    lasso_battery_all_pass = out.report.all_pass();

    RngStream rng(404);
    const auto& erg = out.result.ergodic;
    enlargement_checks += 2;
    if (!eps_enlargement_check(A, erg.u_bar(), erg.a_bar(), erg.eps_prime(cfg.beta), 200, rng,
                               2.0))
      ++enlargement_refuted;
    if (!eps_enlargement_check(B, erg.v_bar(), erg.b_bar(), erg.eps_double_prime(cfg.beta), 200,
                               rng, 2.0))
      ++enlargement_refuted;
  }

  report(3, "relative-error equality", hpe_eq.failed == 0 && hpe_eq.runs >= 200,
         hpe_eq.summary());
  report(4, "delta-x monotonicity (+ power)", dx_mono.failed == 0 && power_ok,
         dx_mono.summary() + (power_ok ? " | diverging run violates it (power confirmed)"
                                       : " | POWER CHECK FAILED"));
  {
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "eps' worst=%.3e eps'' worst=%.3e | enlargement samples: %ld pairs, %ld refuted",
                  eps_p.worst_margin, eps_pp.worst_margin, enlargement_checks,
                  enlargement_refuted);
    report(10, "transported-error nonnegativity",
           eps_p.failed == 0 && eps_pp.failed == 0 && enlargement_refuted == 0, buf);
  }

  // ------------------------------------------------------------------ 11
  {
    const auto rep = bregman_identity_suite(515, 500, 6, 1e-10);
    bool ok = true;
    double worst = std::numeric_limits<double>::infinity();
    for (const auto& c : rep.checks) {
      if (!c.pass) ok = false;
      worst = std::min(worst, c.worst_margin);
    }
    char buf[96];
    std::snprintf(buf, sizeof(buf), "5 identities x 500 trials, worst margin=%.3e", worst);
    report(11, "Bregman identity suite", ok, buf);
  }

  std::printf("acceptance: %d criterion failure(s); instance sweep %.1fs total\n", g_failures,
              sweep_time);
  return g_failures == 0 ? 0 : 1;
}
