#pragma once

// Weighted-Lasso benchmark:  min_u 0.5 ||C u - b||^2 + ||W u||_1
// with C a sparse 300x200 Gaussian matrix (10 nonzeros per row), b Gaussian
// and W diagonal uniform on [0, 1]. The problem is split as
//   A = grad f - a' I,   B = d g + a' I,        0 <= a' <= alpha,
// (or the swap), where alpha = lambda_min(C^T C); both operators are then
// beta-strongly monotone with beta = min(alpha - a', a').
//
// The harness reproduces three experiments: the (theta, gamma, a') iteration
// table, the a' sweep at fixed (theta, gamma), and the partition swap.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "prsplit/operators.hpp"
#include "prsplit/rng.hpp"
#include "prsplit/splitting.hpp"

namespace prsplit {

struct LassoInstance {
  SparseMatrix C;     // rows x cols, compressed row layout
  Vector b;           // rows
  Vector w_diag;      // cols, entries in [0, 1]
  double alpha = 0.0;  // lambda_min(C^T C)
  double kappa = 0.0;  // lambda_max(C^T C)
  std::uint64_t seed = 0;  // seed that actually produced the data
  int retries = 0;         // regenerations due to numerically singular Gram
  Matrix gram;        // C^T C, dense (cheap at this scale)
  Vector ctb;         // C^T b

  int rows() const { return static_cast<int>(C.rows()); }
  int cols() const { return static_cast<int>(C.cols()); }
};

// Smallest and largest eigenvalue of a symmetric matrix.
inline std::pair<double, double> spectral_bounds(const Matrix& sym) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  return {ev(0), ev(ev.size() - 1)};
}

// Deterministic instance from a seed. Substreams: 1 = sparsity pattern,
// 2 = matrix values, 3 = right-hand side, 4 = weights. Sparsity is exactly
// `nnz_per_row` uniformly chosen positions per row (nnz = rows * nnz_per_row).
// If lambda_min(C^T C) falls below the rank tolerance the seed is bumped by
// one and the instance regenerated (bounded retries, recorded).
inline LassoInstance generate_instance(std::uint64_t seed, int rows = 300, int cols = 200,
                                       int nnz_per_row = 10, int max_retries = 32) {
  if (nnz_per_row > cols) throw std::invalid_argument("generate_instance: nnz_per_row > cols");
  for (int attempt = 0; attempt <= max_retries; ++attempt) {
    const std::uint64_t s = seed + static_cast<std::uint64_t>(attempt);
    RngStream pos_rng = RngStream::substream(s, 1);
    RngStream val_rng = RngStream::substream(s, 2);
    RngStream b_rng = RngStream::substream(s, 3);
    RngStream w_rng = RngStream::substream(s, 4);

    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<std::size_t>(rows) * nnz_per_row);
    std::vector<int> idx(static_cast<std::size_t>(cols));
    for (int r = 0; r < rows; ++r) {
      for (int j = 0; j < cols; ++j) idx[static_cast<std::size_t>(j)] = j;
      // partial Fisher-Yates: the first nnz_per_row entries are the pattern
      for (int j = 0; j < nnz_per_row; ++j) {
        const auto pick = static_cast<std::size_t>(pos_rng.uniform_int(j, cols - 1));
        std::swap(idx[static_cast<std::size_t>(j)], idx[pick]);
      }
      std::sort(idx.begin(), idx.begin() + nnz_per_row);
      for (int j = 0; j < nnz_per_row; ++j)
        triplets.emplace_back(r, idx[static_cast<std::size_t>(j)], val_rng.normal());
    }

    LassoInstance inst;
    inst.C.resize(rows, cols);
    inst.C.setFromTriplets(triplets.begin(), triplets.end());
    inst.C.makeCompressed();
    inst.b = Vector(rows);
    for (int i = 0; i < rows; ++i) inst.b[i] = b_rng.normal();
    inst.w_diag = Vector(cols);
    for (int i = 0; i < cols; ++i) inst.w_diag[i] = w_rng.uniform01();

    const Matrix dense = Matrix(inst.C);
    inst.gram = dense.transpose() * dense;
    inst.ctb = dense.transpose() * inst.b;
    std::tie(inst.alpha, inst.kappa) = spectral_bounds(inst.gram);
    inst.seed = s;
    inst.retries = attempt;
    if (inst.alpha > 1e-10 * std::max(1.0, inst.kappa)) return inst;
  }
  throw std::runtime_error("generate_instance: could not draw a full-rank instance");
}

enum class Partition { fg, gf };  // fg: A = grad f - a'I; gf: the swap

inline const char* partition_name(Partition p) { return p == Partition::fg ? "fg" : "gf"; }

inline double lasso_beta(const LassoInstance& inst, double alpha_prime) {
  return std::min(inst.alpha - alpha_prime, alpha_prime);
}

inline MonotoneOperator lasso_operator_f(const LassoInstance& inst, double alpha_prime,
                                         double gamma) {
  return least_squares_operator(inst.C, inst.b, alpha_prime, gamma, inst.alpha - alpha_prime);
}

inline MonotoneOperator lasso_operator_g(const LassoInstance& inst, double alpha_prime) {
  return weighted_l1_operator(inst.w_diag, alpha_prime);
}

struct LassoSolveSpec {
  double theta = 1.0;
  double gamma = 1.0;
  double alpha_prime = 0.0;
  Partition partition = Partition::fg;
  double tol = 1e-5;
  int max_iter = 500;
  bool record_trace = false;
  std::optional<Vector> x_star;  // proxy solution, when rate bounds are wanted
};

inline SolveResult solve_lasso(const LassoInstance& inst, const LassoSolveSpec& spec,
                               const StepObserver& observer = {}) {
  if (spec.alpha_prime < 0.0 || spec.alpha_prime > inst.alpha * (1.0 + 1e-12))
    throw std::invalid_argument("solve_lasso: alpha_prime outside [0, alpha]");
  const MonotoneOperator f_side = lasso_operator_f(inst, spec.alpha_prime, spec.gamma);
  const MonotoneOperator g_side = lasso_operator_g(inst, spec.alpha_prime);
  const MonotoneOperator& A = spec.partition == Partition::fg ? f_side : g_side;
  const MonotoneOperator& B = spec.partition == Partition::fg ? g_side : f_side;

  PRConfig cfg;
  cfg.gamma = spec.gamma;
  cfg.theta = spec.theta;
  cfg.beta = lasso_beta(inst, spec.alpha_prime);
  cfg.x0 = Vector::Zero(inst.cols());
  cfg.tol = spec.tol;
  cfg.max_iter = spec.max_iter;
  cfg.record_trace = spec.record_trace;
  cfg.x_star = spec.x_star;
  return run(A, B, cfg, observer);
}

// High-accuracy minimizer, used as solution proxy for diagnostics.
inline Vector reference_solution(const LassoInstance& inst, double tol = 1e-12,
                                 int max_iter = 200000) {
  LassoSolveSpec spec;
  spec.theta = 1.0;
  spec.gamma = 1.0 / std::sqrt(inst.alpha * inst.kappa);
  spec.tol = tol;
  spec.max_iter = max_iter;
  spec.record_trace = false;
  const SolveResult res = solve_lasso(inst, spec);
  return res.final_state.u;
}

// x*(gamma, partition) = u* + gamma a* with a* = +-(C^T(C u* - b) - a' u*).
inline Vector augmented_solution_point(const LassoInstance& inst, const Vector& u_star,
                                       double alpha_prime, double gamma, Partition partition) {
  Vector a_star = inst.gram * u_star - inst.ctb - alpha_prime * u_star;
  if (partition == Partition::gf) a_star = -a_star;
  return u_star + gamma * a_star;
}

// Max componentwise violation of 0 in C^T(C u - b) + W d|.|_1 (u).
// Meaningful at points with exact zero components, i.e. the iterate coming
// out of the soft-threshold resolvent (v for the fg partition, u for gf); a
// linear-solve iterate never has exact zeros and gets charged full kink
// weight on components that are merely near zero.
inline double optimality_residual(const LassoInstance& inst, const Vector& u,
                                  double zero_tol = 1e-10) {
  const Vector s = inst.gram * u - inst.ctb;
  double worst = 0.0;
  for (int i = 0; i < inst.cols(); ++i) {
    const double w = inst.w_diag[i];
    double viol;
    if (std::abs(u[i]) > zero_tol)
      viol = std::abs(s[i] + w * (u[i] > 0 ? 1.0 : -1.0));
    else
      viol = std::max(0.0, std::abs(s[i]) - w);
    worst = std::max(worst, viol);
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Experiment grid.

enum class GammaRule { one, inv_sqrt_alpha_kappa };
enum class AlphaRule { zero, half_alpha };

inline const char* gamma_rule_name(GammaRule g) {
  return g == GammaRule::one ? "1" : "1/sqrt(alpha*kappa)";
}
inline const char* alpha_rule_name(AlphaRule a) { return a == AlphaRule::zero ? "0" : "alpha/2"; }

inline double resolve_gamma(GammaRule rule, const LassoInstance& inst) {
  return rule == GammaRule::one ? 1.0 : 1.0 / std::sqrt(inst.alpha * inst.kappa);
}
inline double resolve_alpha_prime(AlphaRule rule, const LassoInstance& inst) {
  return rule == AlphaRule::zero ? 0.0 : inst.alpha / 2.0;
}

// theta cell: either a fixed value or the boundary value 2 + gamma*alpha/2.
struct ThetaCell {
  bool boundary = false;
  double value = 1.0;
  std::string label() const {
    if (boundary) return "2+g*a/2";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", value);
    return buf;
  }
  double resolve(double gamma, const LassoInstance& inst) const {
    return boundary ? 2.0 + gamma * inst.alpha / 2.0 : value;
  }
};

inline std::vector<ThetaCell> default_theta_cells() {
  return {{false, 1.0}, {false, 1.25}, {false, 1.5}, {false, 1.75}, {false, 2.0}, {true, 0.0}};
}

struct ExperimentConfig {
  std::vector<ThetaCell> thetas = default_theta_cells();
  std::vector<GammaRule> gammas = {GammaRule::one, GammaRule::inv_sqrt_alpha_kappa};
  std::vector<AlphaRule> alphas = {AlphaRule::zero, AlphaRule::half_alpha};
  Partition partition = Partition::fg;
  int instances = 20;
  std::uint64_t base_seed = 2024;
  double tol = 1e-5;
  int max_iter = 500;
  int threads = 0;  // 0 = hardware concurrency
};

// Stream splitting for instance i of a batch.
inline std::uint64_t instance_seed(std::uint64_t base_seed, int index) {
  return splitmix64(base_seed ^ splitmix64(0x1a550ULL + static_cast<std::uint64_t>(index)));
}

struct RunRecord {
  std::string theta_label;
  double theta = 0.0;
  double gamma = 0.0;
  double alpha_prime = 0.0;
  Partition partition = Partition::fg;
  std::uint64_t instance_seed = 0;
  int iterations = 0;
  bool censored = false;  // hit max_iter instead of the tolerance
  double final_residual = 0.0;  // final ||u_k - v_k||
};

struct ResultRow {  // one table cell
  std::string theta_label;
  GammaRule gamma_rule = GammaRule::one;
  AlphaRule alpha_rule = AlphaRule::zero;
  int n = 0;
  double mean_iterations = 0.0;  // censored runs counted at max_iter
  int censored = 0;
  std::vector<int> per_instance_iterations;
};

inline void parallel_over(int n_tasks, int threads, const std::function<void(int)>& fn) {
  if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
  threads = std::max(1, std::min(threads, n_tasks));
  if (threads == 1) {
    for (int i = 0; i < n_tasks; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < n_tasks; i = next.fetch_add(1)) fn(i);
    });
  for (auto& th : pool) th.join();
}

struct TableResult {
  std::vector<ResultRow> cells;     // grid order: theta x gamma x alpha
  std::vector<RunRecord> records;   // instance-sorted within each cell
};

inline TableResult run_table(const ExperimentConfig& cfg) {
  const int n_inst = cfg.instances;
  std::vector<LassoInstance> insts(static_cast<std::size_t>(n_inst));
  parallel_over(n_inst, cfg.threads, [&](int i) {
    insts[static_cast<std::size_t>(i)] = generate_instance(instance_seed(cfg.base_seed, i));
  });

  struct Cell {
    ThetaCell theta;
    GammaRule grule;
    AlphaRule arule;
  };
  std::vector<Cell> cells;
  for (const auto& th : cfg.thetas)
    for (const auto& g : cfg.gammas)
      for (const auto& a : cfg.alphas) cells.push_back({th, g, a});

  const int n_tasks = static_cast<int>(cells.size()) * n_inst;
  std::vector<RunRecord> records(static_cast<std::size_t>(n_tasks));
  parallel_over(n_tasks, cfg.threads, [&](int task) {
    const int ci = task / n_inst;
    const int ii = task % n_inst;
    const Cell& cell = cells[static_cast<std::size_t>(ci)];
    const LassoInstance& inst = insts[static_cast<std::size_t>(ii)];
    LassoSolveSpec spec;
    spec.gamma = resolve_gamma(cell.grule, inst);
    spec.alpha_prime = resolve_alpha_prime(cell.arule, inst);
    spec.theta = cell.theta.resolve(spec.gamma, inst);
    spec.partition = cfg.partition;
    spec.tol = cfg.tol;
    spec.max_iter = cfg.max_iter;
    const SolveResult res = solve_lasso(inst, spec);
    RunRecord rec;
    rec.theta_label = cell.theta.label();
    rec.theta = spec.theta;
    rec.gamma = spec.gamma;
    rec.alpha_prime = spec.alpha_prime;
    rec.partition = cfg.partition;
    rec.instance_seed = inst.seed;
    rec.iterations = res.iterations;
    rec.censored = res.reason != StopReason::tolerance;
    rec.final_residual = res.final_state.r_norm;
    records[static_cast<std::size_t>(task)] = rec;
  });

  TableResult out;
  out.records = std::move(records);
  for (std::size_t ci = 0; ci < cells.size(); ++ci) {
    ResultRow row;
    row.theta_label = cells[ci].theta.label();
    row.gamma_rule = cells[ci].grule;
    row.alpha_rule = cells[ci].arule;
    row.n = n_inst;
    for (int ii = 0; ii < n_inst; ++ii) {
      const RunRecord& rec = out.records[ci * static_cast<std::size_t>(n_inst) +
                                         static_cast<std::size_t>(ii)];
      row.per_instance_iterations.push_back(rec.iterations);
      // censored runs (including divergence-guard stops) count at the cap
      row.mean_iterations += rec.censored ? cfg.max_iter : rec.iterations;
      if (rec.censored) ++row.censored;
    }
    row.mean_iterations /= n_inst;
    out.cells.push_back(std::move(row));
  }
  return out;
}

struct SweepPoint {
  double alpha_frac = 0.0;   // alpha' as a fraction of alpha
  double alpha_prime = 0.0;
  int iterations = 0;
  bool censored = false;
};

inline std::vector<SweepPoint> run_sweep(const LassoInstance& inst, double theta, double gamma,
                                         const std::vector<double>& alpha_fracs, double tol = 1e-5,
                                         int max_iter = 2000) {
  std::vector<SweepPoint> out;
  for (double frac : alpha_fracs) {
    if (frac < 0.0 || frac > 1.0)
      throw std::invalid_argument("run_sweep: alpha fraction outside [0, 1]");
    LassoSolveSpec spec;
    spec.theta = theta;
    spec.gamma = gamma;
    spec.alpha_prime = frac * inst.alpha;
    spec.tol = tol;
    spec.max_iter = max_iter;
    const SolveResult res = solve_lasso(inst, spec);
    SweepPoint p;
    p.alpha_frac = frac;
    p.alpha_prime = spec.alpha_prime;
    p.iterations = res.iterations;
    p.censored = res.reason != StopReason::tolerance;
    out.push_back(p);
  }
  return out;
}

}  // namespace prsplit
