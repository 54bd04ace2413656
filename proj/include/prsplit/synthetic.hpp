#pragma once

// Seeded affine strongly monotone test instances with a known solution.
//
// A(z) = M_A z + q_A and B(z) = M_B z + q_B where each M is a random
// symmetric matrix with smallest eigenvalue exactly beta plus a random skew
// part (so the operators are not subdifferentials). q_B is chosen so that
// B(u*) = -A(u*) at a random u*, which makes
//   u* the solution of 0 in (A+B)(u),  a* = A(u*),  x* = u* + gamma a*
// available in closed form for rate-bound verification.

#include "prsplit/operators.hpp"
#include "prsplit/rng.hpp"

namespace prsplit {

struct AffineInstance {
  MonotoneOperator A, B;
  Vector u_star, a_star, x_star;
  double beta = 0.0;
  double gamma = 1.0;
  int dim = 0;
};

inline Matrix random_strongly_monotone_matrix(RngStream& rng, int dim, double beta,
                                              double spread, double skew) {
  Matrix G(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) G(i, j) = rng.normal();
  const Matrix Q = Eigen::HouseholderQR<Matrix>(G).householderQ();
  Vector eigs(dim);
  eigs[0] = beta;
  for (int i = 1; i < dim; ++i) eigs[i] = beta + spread * rng.uniform01();
  Matrix M = Q * eigs.asDiagonal() * Q.transpose();
  if (skew > 0.0) {
    Matrix K(dim, dim);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) K(i, j) = rng.normal();
    M += skew * 0.5 * (K - K.transpose());
  }
  return M;
}

inline AffineInstance make_affine_instance(std::uint64_t seed, int dim, double beta, double gamma,
                                           double spread = 3.0, double skew = 0.5) {
  RngStream rng = RngStream::substream(seed, 0xaff1);
  AffineInstance inst;
  inst.dim = dim;
  inst.beta = beta;
  inst.gamma = gamma;

  const Matrix Ma = random_strongly_monotone_matrix(rng, dim, beta, spread, skew);
  const Matrix Mb = random_strongly_monotone_matrix(rng, dim, beta, spread, skew);
  Vector qa(dim), ustar(dim);
  for (int i = 0; i < dim; ++i) qa[i] = rng.normal();
  for (int i = 0; i < dim; ++i) ustar[i] = rng.normal();

  inst.u_star = ustar;
  inst.a_star = Ma * ustar + qa;
  const Vector qb = -inst.a_star - Mb * ustar;

  inst.A = affine_operator(Ma, qa, gamma);
  inst.B = affine_operator(Mb, qb, gamma);
  inst.x_star = ustar + gamma * inst.a_star;
  return inst;
}

}  // namespace prsplit
