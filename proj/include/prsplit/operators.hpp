#pragma once

// Maximal monotone operators exposed through their resolvents.
//
// An operator T is represented by the map x -> J_{gT}(x) = (I + g T)^{-1}(x)
// for arbitrary g > 0, together with its strong-monotonicity modulus and,
// when T is single valued, a direct point evaluation. Set-valued operators
// (subdifferentials) only carry the resolvent; graph membership t in T(u) is
// tested through the fixed-point identity
//     t in T(u)  <=>  J_{gT}(u + g t) = u.

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cmath>
#include <functional>
#include <memory>
#include <stdexcept>
#include <utility>

#include "prsplit/rng.hpp"

namespace prsplit {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

struct MonotoneOperator {
  // x -> J_{gamma T}(x); must be defined for every gamma > 0 accepted by T.
  std::function<Vector(double gamma, const Vector&)> resolvent;
  // Strong-monotonicity modulus (0 = plain monotone).
  double modulus = 0.0;
  // Direct evaluation T(x); empty for set-valued operators.
  std::function<Vector(const Vector&)> point_eval;
  // Ambient dimension.
  int dim = 0;

  bool single_valued() const { return static_cast<bool>(point_eval); }
};

// T = 0. Resolvent is the identity.
inline MonotoneOperator zero_operator(int dim) {
  MonotoneOperator op;
  op.resolvent = [](double, const Vector& x) { return x; };
  op.modulus = 0.0;
  op.point_eval = [dim](const Vector&) { return Vector(Vector::Zero(dim)); };
  op.dim = dim;
  return op;
}

// T = beta * I with beta >= 0. J_{gT}(x) = x / (1 + g beta).
inline MonotoneOperator scaled_identity_operator(double beta, int dim) {
  if (beta < 0.0) throw std::invalid_argument("scaled_identity_operator: beta < 0");
  MonotoneOperator op;
  op.resolvent = [beta](double g, const Vector& x) { return Vector(x / (1.0 + g * beta)); };
  op.modulus = beta;
  op.point_eval = [beta](const Vector& x) { return Vector(beta * x); };
  op.dim = dim;
  return op;
}

inline double soft_threshold(double x, double t) {
  if (x > t) return x - t;
  if (x < -t) return x + t;
  return 0.0;
}

// T = subdifferential of the componentwise absolute value (the l1 norm).
// Set valued; the resolvent is the soft-threshold map.
inline MonotoneOperator abs_subgradient_operator(int dim) {
  MonotoneOperator op;
  op.resolvent = [](double g, const Vector& x) {
    Vector u(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) u[i] = soft_threshold(x[i], g);
    return u;
  };
  op.modulus = 0.0;
  op.dim = dim;
  return op;
}

// Affine operator T(z) = M z + q with modulus lambda_min((M + M^T)/2).
// The factorization of I + gamma_hint * M is built at construction; calls
// with a different gamma fall back to a fresh factorization.
inline MonotoneOperator affine_operator(const Matrix& M, const Vector& q, double gamma_hint) {
  if (M.rows() != M.cols() || M.rows() != q.size())
    throw std::invalid_argument("affine_operator: inconsistent dimensions");
  const int n = static_cast<int>(M.rows());
  const Matrix sym = 0.5 * (M + M.transpose());
  const double modulus = Eigen::SelfAdjointEigenSolver<Matrix>(sym).eigenvalues().minCoeff();
  if (modulus < 0.0) throw std::invalid_argument("affine_operator: M is not monotone");

  auto lu = std::make_shared<Eigen::PartialPivLU<Matrix>>(Matrix::Identity(n, n) + gamma_hint * M);
  MonotoneOperator op;
  op.resolvent = [M, q, gamma_hint, lu, n](double g, const Vector& x) {
    if (g == gamma_hint) return Vector(lu->solve(x - g * q));
    Eigen::PartialPivLU<Matrix> fresh(Matrix::Identity(n, n) + g * M);
    return Vector(fresh.solve(x - g * q));
  };
  op.modulus = modulus;
  op.point_eval = [M, q](const Vector& z) { return Vector(M * z + q); };
  op.dim = n;
  return op;
}

// T = base + alpha * I, through the resolvent identity
//   J_{g(T + aI)}(x) = J_{(g/(1+ga)) T}(x / (1+ga)),   valid while 1+ga > 0.
inline Vector resolvent_shifted(const MonotoneOperator& base, double alpha, double gamma,
                                const Vector& x) {
  const double s = 1.0 + gamma * alpha;
  if (s <= 0.0) throw std::domain_error("resolvent_shifted: 1 + gamma*alpha <= 0");
  return base.resolvent(gamma / s, Vector(x / s));
}

struct ShiftSpec {
  MonotoneOperator base;
  double shift = 0.0;  // may be negative as long as base.modulus + shift >= 0
};

inline MonotoneOperator shift_operator(const ShiftSpec& spec) {
  MonotoneOperator op;
  const MonotoneOperator base = spec.base;
  const double alpha = spec.shift;
  op.resolvent = [base, alpha](double g, const Vector& x) {
    return resolvent_shifted(base, alpha, g, x);
  };
  op.modulus = std::max(0.0, base.modulus + alpha);
  if (base.point_eval) {
    op.point_eval = [base, alpha](const Vector& z) { return Vector(base.point_eval(z) + alpha * z); };
  }
  op.dim = base.dim;
  return op;
}

inline MonotoneOperator shift_operator(const MonotoneOperator& base, double alpha) {
  return shift_operator(ShiftSpec{base, alpha});
}

// A = grad f - alpha_shift * I for f(u) = 0.5 || C u - b ||^2.
// J_{gA}(x) solves (I + g (C^T C - alpha_shift I)) u = x + g C^T b; the
// Cholesky factor for gamma_hint is cached at construction.
// `modulus` is lambda_min(C^T C) - alpha_shift; pass a negative sentinel to
// have it computed from a dense eigendecomposition of the Gram matrix.
inline MonotoneOperator least_squares_operator(const SparseMatrix& C, const Vector& b,
                                               double alpha_shift, double gamma_hint,
                                               double modulus = -1.0) {
  if (C.rows() != b.size()) throw std::invalid_argument("least_squares_operator: C rows != b size");
  const int n = static_cast<int>(C.cols());
  const Matrix dense = Matrix(C);
  auto gram = std::make_shared<Matrix>(dense.transpose() * dense);
  auto ctb = std::make_shared<Vector>(dense.transpose() * b);
  if (modulus < 0.0)
    modulus = Eigen::SelfAdjointEigenSolver<Matrix>(*gram).eigenvalues().minCoeff() - alpha_shift;
  if (modulus < 0.0)
    throw std::invalid_argument("least_squares_operator: alpha_shift exceeds lambda_min(C^T C)");

  auto factor = [gram, alpha_shift, n](double g) {
    Matrix sys = Matrix::Identity(n, n) + g * (*gram - alpha_shift * Matrix::Identity(n, n));
    Eigen::LLT<Matrix> llt(sys);
    if (llt.info() != Eigen::Success)
      throw std::domain_error("least_squares_operator: I + gamma (C^T C - alpha' I) not positive definite");
    return llt;
  };
  auto llt = std::make_shared<Eigen::LLT<Matrix>>(factor(gamma_hint));

  MonotoneOperator op;
  op.resolvent = [ctb, llt, factor, gamma_hint](double g, const Vector& x) {
    const Vector rhs = x + g * (*ctb);
    if (g == gamma_hint) return Vector(llt->solve(rhs));
    return Vector(factor(g).solve(rhs));
  };
  op.modulus = modulus;
  op.point_eval = [gram, ctb, alpha_shift](const Vector& u) {
    return Vector(*gram * u - *ctb - alpha_shift * u);
  };
  op.dim = n;
  return op;
}

// Componentwise resolvent of B = W d|.|_1 + alpha_shift * I with W = diag(w) >= 0:
//   u_i = soft(x_i / (1 + g a'), g w_i / (1 + g a')).
inline Vector resolvent_weighted_l1(const Vector& w_diag, double alpha_shift, double gamma,
                                    const Vector& x) {
  const double s = 1.0 + gamma * alpha_shift;
  if (s <= 0.0) throw std::domain_error("resolvent_weighted_l1: 1 + gamma*alpha' <= 0");
  Vector u(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (w_diag[i] < 0.0) throw std::invalid_argument("resolvent_weighted_l1: negative weight");
    u[i] = soft_threshold(x[i] / s, gamma * w_diag[i] / s);
  }
  return u;
}

// B = subdifferential of u -> ||W u||_1 shifted by alpha_shift * I. Set valued.
inline MonotoneOperator weighted_l1_operator(const Vector& w_diag, double alpha_shift) {
  for (Eigen::Index i = 0; i < w_diag.size(); ++i)
    if (w_diag[i] < 0.0) throw std::invalid_argument("weighted_l1_operator: negative weight");
  if (alpha_shift < 0.0) throw std::invalid_argument("weighted_l1_operator: alpha_shift < 0");
  MonotoneOperator op;
  op.resolvent = [w_diag, alpha_shift](double g, const Vector& x) {
    return resolvent_weighted_l1(w_diag, alpha_shift, g, x);
  };
  op.modulus = alpha_shift;
  op.dim = static_cast<int>(w_diag.size());
  return op;
}

// Graph-membership test via the resolvent fixed-point identity.
inline bool verify_inclusion(const MonotoneOperator& op, const Vector& u, const Vector& t,
                             double tol = 1e-8, double gamma = 1.0) {
  const Vector w = op.resolvent(gamma, Vector(u + gamma * t));
  return (w - u).norm() <= tol;
}

inline double inclusion_residual(const MonotoneOperator& op, const Vector& u, const Vector& t,
                                 double gamma = 1.0) {
  return (op.resolvent(gamma, Vector(u + gamma * t)) - u).norm();
}

// Sample a point of Gr(T): draw y, set z = J_{gT}(y), t = (y - z)/g in T(z).
// Works for any operator, set valued or not.
inline std::pair<Vector, Vector> sample_graph(const MonotoneOperator& op, RngStream& rng,
                                              double scale = 1.0, double gamma = 1.0) {
  Vector y(op.dim);
  for (int i = 0; i < op.dim; ++i) y[i] = scale * rng.normal();
  Vector z = op.resolvent(gamma, y);
  Vector t = (y - z) / gamma;
  return {std::move(z), std::move(t)};
}

}  // namespace prsplit
