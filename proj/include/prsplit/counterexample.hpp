#pragma once

// Closed-form two-block instance on which the relaxed iteration provably
// stops converging once theta crosses a threshold.
//
// On X = X1 x X2 take A0 = 0 and B0 = N_{0} x {0} (normal cone of {0} on the
// first block), then A = A0 + beta*I and B = B0 + beta_bar*I with
// beta_bar >= beta >= 0 and gamma = 1. The resolvents are
//   J_A(x) = x / (1 + beta),    J_B(x) = (0, x_2 / (1 + beta_bar)),
// so one relaxed step multiplies the blocks by
//   f1 = (1 + beta - theta) / (1 + beta),
//   f2 = 1 - (beta + beta_bar) theta / ((1 + beta)(1 + beta_bar)).
// Both factors are < 1 for theta > 0 (f2 = 1 when beta = beta_bar = 0, a
// constant block); the iteration stops converging exactly when a factor
// reaches -1, i.e. when
//   theta >= min( 2 (1 + beta),  2 + 2 (1 + beta*beta_bar) / (beta + beta_bar) ),
// with the convention 1/0 = infinity.

#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "prsplit/splitting.hpp"

namespace prsplit {

struct DivergenceInstance {
  double beta = 0.0;      // modulus of A = A0 + beta I
  double beta_bar = 0.0;  // modulus of B = B0 + beta_bar I, beta_bar >= beta
  int block_dim = 1;

  void validate() const {
    if (beta < 0.0 || beta_bar < beta)
      throw std::invalid_argument("DivergenceInstance: need beta_bar >= beta >= 0");
    if (block_dim < 1) throw std::invalid_argument("DivergenceInstance: block_dim < 1");
  }
};

inline std::pair<double, double> iteration_factors(const DivergenceInstance& inst, double theta) {
  inst.validate();
  if (theta <= 0.0) throw std::invalid_argument("iteration_factors: theta <= 0");
  const double f1 = (1.0 + inst.beta - theta) / (1.0 + inst.beta);
  const double f2 =
      1.0 - (inst.beta + inst.beta_bar) * theta / ((1.0 + inst.beta) * (1.0 + inst.beta_bar));
  return {f1, f2};
}

// Smallest theta at which some block factor reaches -1 (gamma = 1).
inline double divergence_threshold(const DivergenceInstance& inst) {
  inst.validate();
  const double t1 = 2.0 * (1.0 + inst.beta);
  const double s = inst.beta + inst.beta_bar;
  const double t2 = s > 0.0 ? 2.0 + 2.0 * (1.0 + inst.beta * inst.beta_bar) / s
                            : std::numeric_limits<double>::infinity();
  return std::min(t1, t2);
}

// General-gamma variant obtained by the substitution beta -> gamma*beta.
// Only gamma = 1 is backed by the closed-form derivation above; other values
// are an extrapolation and are flagged as such wherever reported.
inline double divergence_threshold_gamma(const DivergenceInstance& inst, double gamma) {
  if (gamma <= 0.0) throw std::invalid_argument("divergence_threshold_gamma: gamma <= 0");
  DivergenceInstance scaled = inst;
  scaled.beta = gamma * inst.beta;
  scaled.beta_bar = gamma * inst.beta_bar;
  return divergence_threshold(scaled);
}

enum class Classification { converges, oscillates, diverges };

inline const char* classification_name(Classification c) {
  switch (c) {
    case Classification::converges: return "converges";
    case Classification::oscillates: return "oscillates";
    default: return "diverges";
  }
}

// From the factor magnitudes. A factor of exactly +1 is a constant block
// (trivially convergent); -1 oscillates; below -1 diverges geometrically.
inline Classification classify(const DivergenceInstance& inst, double theta) {
  const auto [f1, f2] = iteration_factors(inst, theta);
  const double fmin = std::min(f1, f2);
  if (fmin < -1.0 - 1e-12) return Classification::diverges;
  if (fmin <= -1.0 + 1e-12) return Classification::oscillates;
  return Classification::converges;
}

inline MonotoneOperator counterexample_operator_A(const DivergenceInstance& inst) {
  inst.validate();
  return scaled_identity_operator(inst.beta, 2 * inst.block_dim);
}

// B = B0 + beta_bar I with J_{gB}(x) = (0, x_2 / (1 + g beta_bar)).
inline MonotoneOperator counterexample_operator_B(const DivergenceInstance& inst) {
  inst.validate();
  const int d = inst.block_dim;
  const double bb = inst.beta_bar;
  MonotoneOperator op;
  op.resolvent = [d, bb](double g, const Vector& x) {
    Vector u = Vector::Zero(x.size());
    u.tail(x.size() - d) = x.tail(x.size() - d) / (1.0 + g * bb);
    return u;
  };
  op.modulus = bb;
  op.dim = 2 * d;
  return op;
}

struct CounterexampleRun {
  SolveResult result;
  Classification classification = Classification::converges;
  double f1 = 0.0, f2 = 0.0;
  double threshold = 0.0;
  std::vector<Vector> iterates;          // x_1, ..., x_K as produced by the solver
  double max_closed_form_dev = 0.0;      // worst relative deviation from f^k * x0
};

// Runs the instance through the generic splitting path (gamma = 1) and
// compares every iterate against the closed-form factor powers.
inline CounterexampleRun simulate(const DivergenceInstance& inst, double theta, const Vector& x0,
                                  int k_max, double tol = 1e-9) {
  inst.validate();
  if (x0.size() != 2 * inst.block_dim)
    throw std::invalid_argument("simulate: x0 must have twice the block dimension");

  CounterexampleRun out;
  std::tie(out.f1, out.f2) = iteration_factors(inst, theta);
  out.threshold = divergence_threshold(inst);
  out.classification = classify(inst, theta);

  PRConfig cfg;
  cfg.gamma = 1.0;
  cfg.theta = theta;
  cfg.beta = std::min(inst.beta, inst.beta_bar);
  cfg.x0 = x0;
  cfg.tol = tol;
  cfg.max_iter = k_max;
  const MonotoneOperator A = counterexample_operator_A(inst);
  const MonotoneOperator B = counterexample_operator_B(inst);
  out.result = run(A, B, cfg, [&](const PRState& s, const ErgodicAverages&) {
    out.iterates.push_back(s.x);
  });

  const int d = inst.block_dim;
  double p1 = 1.0, p2 = 1.0;
  for (std::size_t k = 0; k < out.iterates.size(); ++k) {
    p1 *= out.f1;
    p2 *= out.f2;
    Vector expect(2 * d);
    expect.head(d) = p1 * x0.head(d);
    expect.tail(d) = p2 * x0.tail(d);
    const double dev =
        (out.iterates[k] - expect).norm() / std::max(1.0, expect.norm());
    out.max_closed_form_dev = std::max(out.max_closed_form_dev, dev);
  }
  return out;
}

}  // namespace prsplit
