#pragma once

// Relaxed Peaceman-Rachford splitting for 0 in (A + B)(u) with A, B maximal
// beta-strongly monotone:
//
//     u_k = J_{gA}(x_{k-1})
//     v_k = J_{gB}(2 u_k - x_{k-1})
//     x_k = x_{k-1} + theta (v_k - u_k)
//
// Every step also extracts the residual certificate
//     a_k = (x_{k-1} - u_k)/g in A(u_k),
//     b_k = (2 u_k - v_k - x_{k-1})/g in B(v_k),
//     u_k - v_k = g (a_k + b_k) in g A(u_k) + g B(v_k),
// and the running ergodic averages whose aggregated pair
// (a_bar + b_bar, eps' + eps'') certifies the averaged iterate.
//
// theta = 1 is Douglas-Rachford, theta = 2 is Peaceman-Rachford. With
// theta0 = 1 + g*beta/2, convergence is certified for theta < 2*theta0
// (pointwise + ergodic rates) and at theta = 2*theta0 (ergodic rate; iterate
// convergence needs beta > 0). Beyond that the iteration may diverge.

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "prsplit/operators.hpp"

namespace prsplit {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

enum class Regime { pointwise_ergodic, ergodic_boundary, uncertified };

struct RegimeInfo {
  Regime regime;
  double theta0;        // 1 + gamma*beta/2
  double theta_tilde;   // min(theta, theta0)
  double sigma;         // (theta/theta_tilde - 1)^2
};

inline const char* regime_name(Regime r) {
  switch (r) {
    case Regime::pointwise_ergodic: return "pointwise+ergodic";
    case Regime::ergodic_boundary: return "ergodic-only-boundary";
    default: return "uncertified";
  }
}

inline RegimeInfo classify_regime(double gamma, double beta, double theta) {
  if (theta <= 0.0) throw std::invalid_argument("classify_regime: theta <= 0");
  if (gamma <= 0.0) throw std::invalid_argument("classify_regime: gamma <= 0");
  if (beta < 0.0) throw std::invalid_argument("classify_regime: beta < 0");
  RegimeInfo info;
  info.theta0 = 1.0 + gamma * beta / 2.0;
  info.theta_tilde = std::min(theta, info.theta0);
  const double ratio = theta / info.theta_tilde - 1.0;
  info.sigma = ratio * ratio;
  const double two_theta0 = 2.0 * info.theta0;
  const double tol = 1e-12 * std::max(1.0, two_theta0);
  if (theta < two_theta0 - tol)
    info.regime = Regime::pointwise_ergodic;
  else if (theta <= two_theta0 + tol)
    info.regime = Regime::ergodic_boundary;
  else
    info.regime = Regime::uncertified;
  return info;
}

inline double common_modulus(const MonotoneOperator& A, const MonotoneOperator& B) {
  return std::min(A.modulus, B.modulus);
}

struct PRConfig {
  double gamma = 1.0;
  double theta = 1.0;
  double beta = 0.0;  // common modulus used for certification (min of the operators')
  Vector x0;
  double tol = 1e-5;          // stop when ||x_k - x_{k-1}|| <= tol
  int max_iter = 500;
  double overflow_bound = 1e12;  // divergence guard on ||x_k||
  bool record_trace = true;
  std::optional<Vector> x_star;  // known solution; enables the bound columns

  void validate() const {
    if (gamma <= 0.0) throw std::invalid_argument("PRConfig: gamma <= 0");
    if (theta <= 0.0) throw std::invalid_argument("PRConfig: theta <= 0");
    if (beta < 0.0) throw std::invalid_argument("PRConfig: beta < 0");
    if (tol <= 0.0) throw std::invalid_argument("PRConfig: tol <= 0");
    if (max_iter < 1) throw std::invalid_argument("PRConfig: max_iter < 1");
    if (x0.size() == 0) throw std::invalid_argument("PRConfig: empty x0");
  }
  RegimeInfo regime() const { return classify_regime(gamma, beta, theta); }
};

struct PRState {
  int k = 0;
  Vector x_prev, x;   // x_{k-1}, x_k
  Vector u, v;        // u_k, v_k
  Vector a, b;        // a_k in A(u_k), b_k in B(v_k)
  Vector x_tilde;     // x_{k-1} + theta_tilde (v_k - u_k)
  double r_norm = 0;  // ||u_k - v_k||

  // ||x_k - x_{k-1}|| evaluated as theta*||v-u||; avoids the cancellation of
  // subtracting nearly equal iterates late in a run.
  double delta_x_norm(double theta) const { return theta * r_norm; }
};

inline PRState pr_step(const MonotoneOperator& A, const MonotoneOperator& B, const PRConfig& cfg,
                       const Vector& x_prev, int k = 1) {
  const double g = cfg.gamma;
  const double theta_tilde = cfg.regime().theta_tilde;
  PRState s;
  s.k = k;
  s.x_prev = x_prev;
  s.u = A.resolvent(g, x_prev);
  s.v = B.resolvent(g, Vector(2.0 * s.u - x_prev));
  const Vector dv = s.v - s.u;
  s.x = x_prev + cfg.theta * dv;
  s.x_tilde = x_prev + theta_tilde * dv;
  s.a = (x_prev - s.u) / g;
  s.b = (2.0 * s.u - s.v - x_prev) / g;
  s.r_norm = dv.norm();
  return s;
}

// Running sums for the ergodic iterate. Everything needed for
//   u_bar, v_bar, a_bar, b_bar, eps', eps''
// and for the aggregated HPE residual eps^a is O(1) state; no history kept.
struct ErgodicAverages {
  int k = 0;
  Vector sum_u, sum_v, sum_a, sum_b, sum_x_tilde;
  double sum_au = 0.0;   // sum <a_i, u_i>
  double sum_bv = 0.0;   // sum <b_i, v_i>
  double sum_uu = 0.0;   // sum ||u_i||^2
  double sum_vv = 0.0;   // sum ||v_i||^2
  double sum_r_xtilde = 0.0;  // sum <u_i - v_i, x_tilde_i>
  double max_r_norm = 0.0;    // max_i ||u_i - v_i||, feeds rho_k

  void update(const PRState& s) {
    if (k == 0) {
      const auto n = s.u.size();
      sum_u = Vector::Zero(n);
      sum_v = Vector::Zero(n);
      sum_a = Vector::Zero(n);
      sum_b = Vector::Zero(n);
      sum_x_tilde = Vector::Zero(n);
    }
    ++k;
    sum_u += s.u;
    sum_v += s.v;
    sum_a += s.a;
    sum_b += s.b;
    sum_x_tilde += s.x_tilde;
    sum_au += s.a.dot(s.u);
    sum_bv += s.b.dot(s.v);
    sum_uu += s.u.squaredNorm();
    sum_vv += s.v.squaredNorm();
    sum_r_xtilde += (s.u - s.v).dot(s.x_tilde);
    max_r_norm = std::max(max_r_norm, s.r_norm);
  }

  Vector u_bar() const { return sum_u / k; }
  Vector v_bar() const { return sum_v / k; }
  Vector a_bar() const { return sum_a / k; }
  Vector b_bar() const { return sum_b / k; }

  // eps'_k = (1/k) sum <a_i - beta u_i, u_i - u_bar>
  //        = (1/k)[sum <a_i,u_i> - beta sum ||u_i||^2] - <a_bar - beta u_bar, u_bar>
  double eps_prime(double beta) const {
    const Vector ub = u_bar();
    return (sum_au - beta * sum_uu) / k - (a_bar() - beta * ub).dot(ub);
  }
  double eps_double_prime(double beta) const {
    const Vector vb = v_bar();
    return (sum_bv - beta * sum_vv) / k - (b_bar() - beta * vb).dot(vb);
  }
  // Magnitudes of the terms whose cancellation produces eps'; used to scale
  // the nonnegativity tolerance.
  double eps_prime_scale(double beta) const {
    const Vector ub = u_bar();
    return (std::abs(sum_au) + beta * sum_uu) / k + std::abs((a_bar() - beta * ub).dot(ub));
  }
  double eps_double_prime_scale(double beta) const {
    const Vector vb = v_bar();
    return (std::abs(sum_bv) + beta * sum_vv) / k + std::abs((b_bar() - beta * vb).dot(vb));
  }

  // eps^a_k = (1/k) sum <r_i, z_tilde_i - z_tilde_bar> with r_i = (0,0,u_i-v_i):
  // only the x-slot of the augmented point contributes.
  double eps_ergodic() const {
    return sum_r_xtilde / k - (sum_u - sum_v).dot(sum_x_tilde) / (double(k) * double(k));
  }
};

enum class StopReason { tolerance, max_iter, divergence_guard };

inline const char* stop_reason_name(StopReason r) {
  switch (r) {
    case StopReason::tolerance: return "tolerance";
    case StopReason::max_iter: return "max_iter";
    default: return "divergence_guard";
  }
}

struct TraceRow {
  int k = 0;
  double delta_x_norm = kNaN;
  double residual_norm = kNaN;  // ||u_k - v_k||
  double eps_prime = kNaN;
  double eps_double_prime = kNaN;
  double pointwise_bound = kNaN;          // NaN when x* unknown or theta >= 2 theta0
  double ergodic_residual_bound = kNaN;   // NaN when x* unknown or theta > 2 theta0
  double ergodic_eps_bound = kNaN;
};

struct SolveResult {
  PRState final_state;
  int iterations = 0;
  StopReason reason = StopReason::max_iter;
  RegimeInfo regime{};
  ErgodicAverages ergodic;
  std::vector<TraceRow> trace;
  double dist0 = kNaN;  // ||x0 - x*|| when x* was supplied
};

// Called after every step with the fresh state and the averages including it.
using StepObserver = std::function<void(const PRState&, const ErgodicAverages&)>;

// Certified rate on the k-th residual for theta < 2*theta0:
//   ||u_k - v_k|| <= sqrt(2) ||x0 - x*|| / (sqrt(k) sqrt(2 theta_tilde - theta)).
inline double pointwise_residual_bound(int k, double dist0, double theta, double theta_tilde) {
  if (k < 1) throw std::invalid_argument("pointwise_residual_bound: k < 1");
  if (dist0 < 0.0) throw std::invalid_argument("pointwise_residual_bound: dist0 < 0");
  const double gap = 2.0 * theta_tilde - theta;
  if (gap <= 0.0)
    throw std::domain_error("pointwise_residual_bound: requires theta < 2*theta_tilde");
  return std::sqrt(2.0) * dist0 / (std::sqrt(double(k)) * std::sqrt(gap));
}

// Certified rates on the ergodic residual pair for theta <= 2*theta0:
//   ||u_bar_k - v_bar_k||  <= 2 ||x0 - x*|| / (k theta),
//   eps'_k + eps''_k       <= 3 (1 + 2 (1 - theta_tilde/theta)^2) ||x0 - x*||^2 / (k gamma theta).
struct ErgodicBoundPair {
  double residual;
  double eps;
};
inline ErgodicBoundPair ergodic_rate_bounds(int k, double dist0, double theta, double theta_tilde,
                                            double gamma) {
  if (k < 1) throw std::invalid_argument("ergodic_rate_bounds: k < 1");
  if (dist0 < 0.0) throw std::invalid_argument("ergodic_rate_bounds: dist0 < 0");
  ErgodicBoundPair b;
  b.residual = 2.0 * dist0 / (double(k) * theta);
  const double slack = 1.0 - theta_tilde / theta;
  b.eps = 3.0 * (1.0 + 2.0 * slack * slack) * dist0 * dist0 / (double(k) * gamma * theta);
  return b;
}

inline SolveResult run(const MonotoneOperator& A, const MonotoneOperator& B, const PRConfig& cfg,
                       const StepObserver& observer = {}) {
  cfg.validate();
  SolveResult res;
  res.regime = cfg.regime();
  const bool have_star = cfg.x_star.has_value();
  if (have_star) res.dist0 = (cfg.x0 - *cfg.x_star).norm();
  const bool pointwise_ok = have_star && res.regime.regime == Regime::pointwise_ergodic;
  const bool ergodic_ok = have_star && res.regime.regime != Regime::uncertified;

  Vector x = cfg.x0;
  PRState s;
  for (int k = 1; k <= cfg.max_iter; ++k) {
    s = pr_step(A, B, cfg, x, k);
    res.ergodic.update(s);
    if (observer) observer(s, res.ergodic);

    if (cfg.record_trace) {
      TraceRow row;
      row.k = k;
      row.delta_x_norm = s.delta_x_norm(cfg.theta);
      row.residual_norm = s.r_norm;
      row.eps_prime = res.ergodic.eps_prime(cfg.beta);
      row.eps_double_prime = res.ergodic.eps_double_prime(cfg.beta);
      if (pointwise_ok)
        row.pointwise_bound =
            pointwise_residual_bound(k, res.dist0, cfg.theta, res.regime.theta_tilde);
      if (ergodic_ok) {
        const auto eb = ergodic_rate_bounds(k, res.dist0, cfg.theta, res.regime.theta_tilde, cfg.gamma);
        row.ergodic_residual_bound = eb.residual;
        row.ergodic_eps_bound = eb.eps;
      }
      res.trace.push_back(row);
    }

    res.iterations = k;
    if (s.delta_x_norm(cfg.theta) <= cfg.tol) {
      res.reason = StopReason::tolerance;
      res.final_state = s;
      return res;
    }
    if (s.x.norm() >= cfg.overflow_bound) {
      res.reason = StopReason::divergence_guard;
      res.final_state = s;
      return res;
    }
    x = s.x;
  }
  res.reason = StopReason::max_iter;
  res.final_state = s;
  return res;
}

}  // namespace prsplit
