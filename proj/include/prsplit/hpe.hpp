#pragma once

// Residual bounds of the inexact proximal-point (HPE) view.
//
// One HPE step produces r_k = grad (dw)_{z_k}(z_{k-1}) / lambda_k in
// T^{[eps_k]}(z_tilde_k) subject to
//   (dw)_{z_k}(z_tilde_k) + lambda_k eps_k <= sigma (dw)_{z_{k-1}}(z_tilde_k).
// The splitting iteration is such an instance with lambda_k = 1, eps_k = 0,
// sigma = (theta/theta_tilde - 1)^2 and m = M = 1/theta, so the generic
// bounds below specialize to the rate bounds evaluated in splitting.hpp.
//
// Known wrinkle: the general per-index residual bound carries the factor
// (1 + sqrt(sigma)); a variant stated elsewhere with (1 + sigma) is not used
// here. The specialized pointwise rate equals sqrt(2 theta) times the
// generic evaluation (the final loosening step of its derivation); the
// diagnostics cross-check both facts.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "prsplit/bregman.hpp"

namespace prsplit {

struct HPEParams {
  double sigma = 0.0;             // relative error parameter, in [0, 1]
  double m = 1.0, M = 1.0;        // seminorm bounds of the distance generator
  double dw0 = 0.0;               // inf over solutions of (dw)_{z0}(z*)
  std::vector<double> lambdas;    // step sizes; empty means lambda == 1

  double tau() const { return std::sqrt(2.0) * M / std::sqrt(m); }
  double lambda(int i, int /*k*/) const {
    return lambdas.empty() ? 1.0 : lambdas.at(static_cast<std::size_t>(i) - 1);
  }

  static HPEParams for_splitting(double theta, double theta_tilde, double dist0) {
    HPEParams p;
    const double ratio = theta / theta_tilde - 1.0;
    p.sigma = ratio * ratio;
    p.m = p.M = 1.0 / theta;
    p.dw0 = dist0 * dist0 / (2.0 * theta);
    return p;
  }
};

struct HPEBoundRow {
  double r_bound;    // on ||r_i||_*
  double eps_bound;  // on eps_i
};

// Per-index bounds valid for some i <= k:
//   ||r_i||_* <= tau (1+sqrt(sigma)) sqrt( dw0/(1-sigma) * lambda_i^{alpha-2} / sum_j lambda_j^alpha )
//   eps_i     <= sigma dw0/(1-sigma) * lambda_i^{alpha-1} / sum_j lambda_j^alpha
// alpha = 1 and alpha = 2 are the two instantiations used in practice.
inline std::vector<HPEBoundRow> general_hpe_bounds(const HPEParams& p, int k, int alpha) {
  if (p.sigma >= 1.0) throw std::domain_error("general_hpe_bounds: requires sigma < 1");
  if (p.sigma < 0.0) throw std::invalid_argument("general_hpe_bounds: sigma < 0");
  if (k < 1) throw std::invalid_argument("general_hpe_bounds: k < 1");
  if (alpha != 1 && alpha != 2) throw std::invalid_argument("general_hpe_bounds: alpha must be 1 or 2");
  double lambda_pow_sum = 0.0;
  for (int j = 1; j <= k; ++j) lambda_pow_sum += std::pow(p.lambda(j, k), alpha);
  const double tau = p.tau();
  std::vector<HPEBoundRow> rows;
  rows.reserve(static_cast<std::size_t>(k));
  for (int i = 1; i <= k; ++i) {
    const double li = p.lambda(i, k);
    HPEBoundRow row;
    row.r_bound = tau * (1.0 + std::sqrt(p.sigma)) *
                  std::sqrt(p.dw0 / (1.0 - p.sigma) * std::pow(li, alpha - 2) / lambda_pow_sum);
    row.eps_bound = p.sigma * p.dw0 / (1.0 - p.sigma) * std::pow(li, alpha - 1) / lambda_pow_sum;
    rows.push_back(row);
  }
  return rows;
}

// Aggregated (ergodic) certificate after k steps with lambda == 1:
//   r^a_k = (0, 0, u_bar - v_bar),  eps^a_k = (1/k) sum <r_i, z_tilde_i - z_tilde_bar>,
// with guarantees
//   ||r^a_k||_* <= 2 tau sqrt(dw0) / k,
//   eps^a_k     <= 3 (M/m) (2 dw0 + rho_k) / k,   rho_k = max_i (dw)_{z_i}(z_tilde_i),
// plus rho_k <= sigma dw0 / (1 - sigma) whenever sigma < 1. The pair also
// dominates the split certificate: eps^a_k >= gamma (eps'_k + eps''_k).
struct ErgodicHpeCertificate {
  double r_a_norm = 0.0;      // ||u_bar - v_bar|| = dual norm of r^a_k
  double eps_a = 0.0;
  double rho_k = 0.0;
  double r_bound = 0.0;
  double eps_bound = 0.0;
  double rho_bound = kNaN;     // NaN when sigma == 1 (no finite bound applies)
  bool rho_bound_applies = false;
};

inline ErgodicHpeCertificate ergodic_hpe_certificate(const ErgodicAverages& erg,
                                                     const HPEParams& p, double theta,
                                                     double theta_tilde) {
  if (erg.k < 1) throw std::invalid_argument("ergodic_hpe_certificate: empty run");
  ErgodicHpeCertificate c;
  const int k = erg.k;
  c.r_a_norm = (erg.u_bar() - erg.v_bar()).norm();
  c.eps_a = erg.eps_ergodic();
  // (dw)_{z_i}(z_tilde_i) = (theta - theta_tilde)^2 ||u_i - v_i||^2 / (2 theta)
  const double gap = theta - theta_tilde;
  c.rho_k = gap * gap * erg.max_r_norm * erg.max_r_norm / (2.0 * theta);
  c.r_bound = 2.0 * p.tau() * std::sqrt(p.dw0) / k;
  c.eps_bound = 3.0 * (p.M / p.m) * (2.0 * p.dw0 + c.rho_k) / k;
  if (p.sigma < 1.0) {
    c.rho_bound = p.sigma * p.dw0 / (1.0 - p.sigma);
    c.rho_bound_applies = true;
  }
  return c;
}

// Sampling test of the relaxed graph membership t in T^{[eps]}(z):
//   <t - t', z - z'> >= -eps  for every (z', t') in Gr(T).
// A finite sample can only refute membership, never prove it.
inline bool eps_enlargement_check(const Vector& z, const Vector& t, double eps,
                                  const std::vector<std::pair<Vector, Vector>>& graph_samples,
                                  double* worst = nullptr) {
  bool ok = true;
  double min_margin = std::numeric_limits<double>::infinity();
  for (const auto& [zp, tp] : graph_samples) {
    const double val = (t - tp).dot(z - zp);
    const double slack = 1e-9 * (1.0 + (t - tp).norm() * (z - zp).norm() + std::abs(eps));
    min_margin = std::min(min_margin, val + eps);
    if (val < -eps - slack) ok = false;
  }
  if (worst) *worst = min_margin;
  return ok;
}

inline bool eps_enlargement_check(const MonotoneOperator& op, const Vector& z, const Vector& t,
                                  double eps, int n_samples, RngStream& rng, double scale = 1.0,
                                  double* worst = nullptr) {
  std::vector<std::pair<Vector, Vector>> samples;
  samples.reserve(static_cast<std::size_t>(n_samples));
  for (int i = 0; i < n_samples; ++i) samples.push_back(sample_graph(op, rng, scale));
  return eps_enlargement_check(z, t, eps, samples, worst);
}

// Step-size selection gamma = D0 / S, where D0 bounds the distance from x0 to
// the solution set and S bounds ||a*|| over a* in A(u*) cap -B(u*).
struct GammaSelection {
  double D0 = 0.0;
  double S = 0.0;
};

inline double recommended_gamma(const GammaSelection& sel) {
  if (sel.S <= 0.0) throw std::invalid_argument("recommended_gamma: S <= 0");
  if (sel.D0 <= 0.0) throw std::invalid_argument("recommended_gamma: D0 <= 0");
  return sel.D0 / sel.S;
}

}  // namespace prsplit
