#include <catch2/catch_amalgamated.hpp>

#include "prsplit/counterexample.hpp"
#include "prsplit/diagnostics.hpp"
#include "prsplit/splitting.hpp"
#include "prsplit/synthetic.hpp"

using namespace prsplit;

TEST_CASE("regime classification") {
  SECTION("beta=0, theta=1: interior") {
    const auto r = classify_regime(1.0, 0.0, 1.0);
    CHECK(r.theta0 == 1.0);
    CHECK(r.theta_tilde == 1.0);
    CHECK(r.sigma == 0.0);
    CHECK(r.regime == Regime::pointwise_ergodic);
  }
  SECTION("beta=2, theta=4: boundary with sigma=1") {
    const auto r = classify_regime(1.0, 2.0, 4.0);
    CHECK(r.theta0 == 2.0);
    CHECK(r.theta_tilde == 2.0);
    CHECK(r.sigma == 1.0);
    CHECK(r.regime == Regime::ergodic_boundary);
  }
  SECTION("beta=0, theta=2.5: uncertified") {
    CHECK(classify_regime(1.0, 0.0, 2.5).regime == Regime::uncertified);
  }
  SECTION("theta = theta0 exactly: sigma = 0, interior") {
    const auto r = classify_regime(1.0, 1.0, 1.5);
    CHECK(r.sigma == 0.0);
    CHECK(r.regime == Regime::pointwise_ergodic);
  }
  CHECK_THROWS_AS(classify_regime(1.0, 0.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(classify_regime(1.0, 0.0, -1.0), std::invalid_argument);
}

TEST_CASE("single step") {
  SECTION("A = B = 0: any x is a fixed point") {
    const auto zero = zero_operator(3);
    PRConfig cfg;
    cfg.x0 = Vector::Constant(3, 1.0);
    cfg.theta = 1.7;
    const auto s = pr_step(zero, zero, cfg, cfg.x0);
    CHECK((s.x - cfg.x0).norm() == 0.0);
    CHECK(s.r_norm == 0.0);
  }
  SECTION("A = B = I, gamma=1, theta=1, x=1: u=1/2, v=0, x+=1/2") {
    const auto id = scaled_identity_operator(1.0, 1);
    PRConfig cfg;
    cfg.beta = 1.0;
    cfg.x0 = Vector::Constant(1, 1.0);
    const auto s = pr_step(id, id, cfg, cfg.x0);
    CHECK(s.u[0] == Catch::Approx(0.5).margin(1e-15));
    CHECK(s.v[0] == Catch::Approx(0.0).margin(1e-15));
    CHECK(s.x[0] == Catch::Approx(0.5).margin(1e-15));
    CHECK(s.a[0] == Catch::Approx(0.5).margin(1e-15));  // a = x_prev - u
    CHECK(s.b[0] == Catch::Approx(0.0).margin(1e-15));  // b = 2u - v - x_prev
  }
  SECTION("two-block instance at theta=2 flips the first block") {
    DivergenceInstance di{0.0, 0.0, 1};
    const auto A = counterexample_operator_A(di);
    const auto B = counterexample_operator_B(di);
    PRConfig cfg;
    cfg.theta = 2.0;
    cfg.x0 = Vector(2);
    cfg.x0 << 0.8, -0.4;
    const auto s = pr_step(A, B, cfg, cfg.x0);
    CHECK(s.x[0] == Catch::Approx(-0.8).margin(1e-15));
    CHECK(s.x[1] == Catch::Approx(-0.4).margin(1e-15));
  }
}

TEST_CASE("full runs") {
  SECTION("A = B = 0 terminates immediately") {
    const auto zero = zero_operator(2);
    PRConfig cfg;
    cfg.x0 = Vector::Constant(2, 3.0);
    const auto res = run(zero, zero, cfg);
    CHECK(res.iterations == 1);
    CHECK(res.reason == StopReason::tolerance);
    CHECK(res.final_state.delta_x_norm(cfg.theta) == 0.0);
  }
  SECTION("A = B = I: geometric decay x_k = 2^{-k} x_0") {
    const auto id = scaled_identity_operator(1.0, 1);
    PRConfig cfg;
    cfg.beta = 1.0;
    cfg.x0 = Vector::Constant(1, 1.0);
    cfg.tol = 1e-5;
    cfg.max_iter = 100;
    const auto res = run(id, id, cfg);
    CHECK(res.reason == StopReason::tolerance);
    CHECK(std::abs(res.final_state.x[0]) < 1e-4);
    double expect = 1.0;
    for (const auto& row : res.trace) {
      // delta x_k = theta * ||v-u|| = 2^{-k} x0 here
      CHECK(row.delta_x_norm == Catch::Approx(expect / 2.0).epsilon(1e-12));
      expect /= 2.0;
    }
  }
  SECTION("divergence guard triggers on a diverging instance") {
    DivergenceInstance di{1.0, 1.0, 1};
    const auto A = counterexample_operator_A(di);
    const auto B = counterexample_operator_B(di);
    PRConfig cfg;
    cfg.theta = 4.5;  // factor -1.25 on the first block
    cfg.beta = 1.0;
    cfg.x0 = Vector::Constant(2, 1.0);
    cfg.max_iter = 5000;
    const auto res = run(A, B, cfg);
    CHECK(res.reason == StopReason::divergence_guard);
    CHECK(res.final_state.x.norm() >= cfg.overflow_bound);
  }
  SECTION("oscillating instance exhausts max_iter with constant delta-x") {
    DivergenceInstance di{0.0, 0.0, 1};
    const auto A = counterexample_operator_A(di);
    const auto B = counterexample_operator_B(di);
    PRConfig cfg;
    cfg.theta = 2.0;
    cfg.x0 = Vector::Constant(2, 1.0);
    cfg.max_iter = 60;
    const auto res = run(A, B, cfg);
    CHECK(res.reason == StopReason::max_iter);
    for (const auto& row : res.trace)
      CHECK(row.delta_x_norm == Catch::Approx(res.trace.front().delta_x_norm).epsilon(1e-12));
  }
}

TEST_CASE("ergodic accumulator") {
  SECTION("k = 1 has zero transported error") {
    ErgodicAverages erg;
    PRState s;
    s.k = 1;
    s.u = Vector::Constant(1, 2.0);
    s.v = Vector::Constant(1, 1.0);
    s.a = Vector::Constant(1, 0.3);
    s.b = Vector::Constant(1, -0.3);
    s.x_tilde = Vector::Constant(1, 0.0);
    s.r_norm = 1.0;
    erg.update(s);
    CHECK(std::abs(erg.eps_prime(0.0)) <= 1e-15);
    CHECK(std::abs(erg.eps_double_prime(0.0)) <= 1e-15);
  }
  SECTION("hand-computed two-step value") {
    // u1=0, u2=2, a1=0, a2=1, beta=0: eps'_2 = 0.5
    ErgodicAverages erg;
    PRState s1, s2;
    for (PRState* s : {&s1, &s2}) {
      s->v = Vector::Zero(1);
      s->b = Vector::Zero(1);
      s->x_tilde = Vector::Zero(1);
      s->r_norm = 0.0;
    }
    s1.k = 1;
    s1.u = Vector::Constant(1, 0.0);
    s1.a = Vector::Constant(1, 0.0);
    s2.k = 2;
    s2.u = Vector::Constant(1, 2.0);
    s2.a = Vector::Constant(1, 1.0);
    erg.update(s1);
    erg.update(s2);
    CHECK(erg.u_bar()[0] == Catch::Approx(1.0));
    CHECK(erg.a_bar()[0] == Catch::Approx(0.5));
    CHECK(erg.eps_prime(0.0) == Catch::Approx(0.5).margin(1e-14));
  }
}

TEST_CASE("certificate battery passes across regimes on affine instances") {
  for (std::uint64_t seed : {101ULL, 202ULL}) {
    for (double gamma : {0.7, 1.3}) {
      const double beta = 0.9;
      const auto inst = make_affine_instance(seed, 7, beta, gamma);
      const double b = common_modulus(inst.A, inst.B);
      const double theta0 = 1.0 + gamma * b / 2.0;
      for (double f : {0.5, 1.0, 1.5, 2.0}) {
        PRConfig cfg;
        cfg.gamma = gamma;
        cfg.theta = f * theta0;
        cfg.beta = b;
        cfg.x0 = Vector::Zero(7);
        cfg.tol = 1e-10;
        cfg.max_iter = 3000;
        cfg.record_trace = false;
        cfg.x_star = inst.x_star;
        const auto out = solve_with_diagnostics(inst.A, inst.B, cfg);
        INFO("seed=" << seed << " gamma=" << gamma << " theta=" << cfg.theta);
        for (const auto& c : out.report.checks) {
          INFO(c.name << " worst=" << c.worst_margin << " observed=" << c.observed
                      << " allowed=" << c.allowed << " at k=" << c.k_at_worst);
          CHECK((!c.applicable || c.pass));
        }
        // iterates actually converge to the constructed solution
        CHECK(out.result.reason == StopReason::tolerance);
        CHECK((out.result.final_state.u - inst.u_star).norm() < 1e-6);
      }
    }
  }
}

TEST_CASE("injected certificate bug is caught") {
  const auto inst = make_affine_instance(55, 6, 1.0, 1.0);
  PRConfig cfg;
  cfg.beta = common_modulus(inst.A, inst.B);
  cfg.theta = 1.0;
  cfg.x0 = Vector::Zero(6);
  cfg.tol = 1e-8;
  cfg.max_iter = 200;
  cfg.record_trace = false;
  RunVerifier::Options opt;
  opt.flip_b_sign = true;
  const auto out = solve_with_diagnostics(inst.A, inst.B, cfg, opt);
  const auto* aug = out.report.find("augmented-residual");
  REQUIRE(aug != nullptr);
  CHECK_FALSE(aug->pass);
  const auto* incl = out.report.find("inclusion-b");
  REQUIRE(incl != nullptr);
  CHECK_FALSE(incl->pass);
}

TEST_CASE("delta-x monotonicity check has power") {
  // an uncertified diverging run must violate it
  DivergenceInstance di{0.0, 0.0, 1};
  const auto A = counterexample_operator_A(di);
  const auto B = counterexample_operator_B(di);
  PRConfig cfg;
  cfg.theta = 2.5;  // factor -1.5: diverges
  cfg.x0 = Vector::Constant(2, 1.0);
  cfg.max_iter = 100;
  cfg.record_trace = false;
  const auto out = solve_with_diagnostics(A, B, cfg);
  const auto* c = out.report.find("delta-x-monotone-uncertified");
  REQUIRE(c != nullptr);
  CHECK_FALSE(c->pass);
}
