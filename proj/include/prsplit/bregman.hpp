#pragma once

// The augmented (u, v, x) space behind the splitting iteration.
//
// The iteration solves 0 in (L_t + g C)(z) over z = (u, v, x), where
//
//   L_t(u, v, x) = ( (1-t) u + t v - x,  (t-2) u + (1-t) v + x,  u - v ),
//   C(u, v, x)   = A(u) x B(v) x {0},
//
// and proximity is measured with the degenerate distance generating function
//   w(u, v, x) = ||x||^2 / (2 theta)
// under the seminorm ||(u, v, x)|| = ||x||. Its Bregman distance is
//   dw_z(z') = ||x' - x||^2 / (2 theta),  with m = M = 1/theta,
// and the dual seminorm satisfies ||(0, 0, x)||_* = ||x||.

#include <cmath>
#include <limits>
#include <stdexcept>

#include "prsplit/splitting.hpp"

namespace prsplit {

struct AugmentedVec {
  Vector u, v, x;

  AugmentedVec() = default;
  AugmentedVec(Vector u_, Vector v_, Vector x_)
      : u(std::move(u_)), v(std::move(v_)), x(std::move(x_)) {}

  static AugmentedVec zero(int dim) {
    return {Vector::Zero(dim), Vector::Zero(dim), Vector::Zero(dim)};
  }

  AugmentedVec operator+(const AugmentedVec& o) const { return {u + o.u, v + o.v, x + o.x}; }
  AugmentedVec operator-(const AugmentedVec& o) const { return {u - o.u, v - o.v, x - o.x}; }
  AugmentedVec operator*(double s) const { return {s * u, s * v, s * x}; }

  double dot(const AugmentedVec& o) const { return u.dot(o.u) + v.dot(o.v) + x.dot(o.x); }
  double norm2() const { return std::sqrt(u.squaredNorm() + v.squaredNorm() + x.squaredNorm()); }

  // Seminorm ||z|| = ||x||.
  double seminorm() const { return x.norm(); }
  // Dual seminorm: finite only on points supported in the x slot.
  double dual_seminorm(double tol = 0.0) const {
    if (u.lpNorm<Eigen::Infinity>() > tol || v.lpNorm<Eigen::Infinity>() > tol)
      return std::numeric_limits<double>::infinity();
    return x.norm();
  }
};

inline AugmentedVec augmented_from_state(const PRState& s) { return {s.u, s.v, s.x}; }
inline AugmentedVec augmented_tilde_from_state(const PRState& s) { return {s.u, s.v, s.x_tilde}; }

struct QuadSeminormW {
  double theta;

  explicit QuadSeminormW(double theta_) : theta(theta_) {
    if (theta <= 0.0) throw std::invalid_argument("QuadSeminormW: theta <= 0");
  }

  double m() const { return 1.0 / theta; }
  double M() const { return 1.0 / theta; }

  double w(const AugmentedVec& z) const { return z.x.squaredNorm() / (2.0 * theta); }
  AugmentedVec grad_w(const AugmentedVec& z) const {
    return {Vector::Zero(z.u.size()), Vector::Zero(z.v.size()), Vector(z.x / theta)};
  }

  // (dw)_z(z') = w(z') - w(z) - <grad w(z), z'-z> = ||x'-x||^2/(2 theta)
  double dw(const AugmentedVec& z, const AugmentedVec& zp) const {
    return (zp.x - z.x).squaredNorm() / (2.0 * theta);
  }
  // grad (dw)_z(z') = grad w(z') - grad w(z)
  AugmentedVec grad_dw(const AugmentedVec& z, const AugmentedVec& zp) const {
    return {Vector::Zero(z.u.size()), Vector::Zero(z.v.size()), Vector((zp.x - z.x) / theta)};
  }
};

// The linear map L_t.
inline AugmentedVec apply_relaxation_matrix(double theta_tilde, const AugmentedVec& z) {
  const double t = theta_tilde;
  return {Vector((1.0 - t) * z.u + t * z.v - z.x),
          Vector((t - 2.0) * z.u + (1.0 - t) * z.v + z.x),
          Vector(z.u - z.v)};
}

// L_t(z_tilde_k) + g (a_k, b_k, 0). By construction this equals
// (0, 0, u_k - v_k); the first two slots are the certificate residual that a
// correct step drives to rounding level.
inline AugmentedVec augmented_residual(const PRState& s, double theta_tilde, double gamma) {
  AugmentedVec r = apply_relaxation_matrix(theta_tilde, augmented_tilde_from_state(s));
  r.u += gamma * s.a;
  r.v += gamma * s.b;
  return r;
}

// One HPE error-condition evaluation. For this iteration the relative error
// inequality holds with equality:
//   dw_{z_k}(z_tilde_k) = sigma * dw_{z_{k-1}}(z_tilde_k).
// Both sides are formed from the stored iterates; the pass tolerance carries
// an absolute floor covering the cancellation of x_tilde - x when the
// residual has shrunk to rounding level relative to ||x||.
struct HpeErrorReport {
  double lhs = 0.0;       // dw_{z_k}(z_tilde_k)
  double rhs = 0.0;       // sigma * dw_{z_{k-1}}(z_tilde_k)
  double rel_err = 0.0;
  double margin = 0.0;    // allowed deviation minus observed; >= 0 iff pass
  bool pass = true;
};

inline HpeErrorReport hpe_error_check(const PRState& s, const QuadSeminormW& w, double sigma,
                                      double rel_tol = 1e-9) {
  HpeErrorReport rep;
  const double lhs_n = (s.x_tilde - s.x).norm();            // sqrt(2 theta dw_{z_k}(z~))
  const double rhs_n = (s.x_tilde - s.x_prev).norm();       // sqrt(2 theta dw_{z_{k-1}}(z~))
  rep.lhs = lhs_n * lhs_n / (2.0 * w.theta);
  rep.rhs = sigma * rhs_n * rhs_n / (2.0 * w.theta);
  const double eps = std::numeric_limits<double>::epsilon();
  // A few ulps of the iterates; the differences above cancel against ||x||.
  const double delta = 32.0 * eps * (1.0 + s.x.norm() + s.x_prev.norm() + s.x_tilde.norm());
  const double floor_sq = delta * (lhs_n + std::sqrt(sigma) * rhs_n + delta) / (2.0 * w.theta);
  const double diff = std::abs(rep.lhs - rep.rhs);
  const double scale = std::max(rep.lhs, rep.rhs);
  rep.rel_err = diff / std::max(scale, floor_sq);
  rep.margin = rel_tol * scale + floor_sq - diff;
  rep.pass = rep.margin >= 0.0;
  return rep;
}

}  // namespace prsplit
