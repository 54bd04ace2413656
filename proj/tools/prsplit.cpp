// Command-line front end: run single solves with certificate traces, the
// Lasso experiment grid and sweep, the divergence-instance scan, and the
// runtime verification battery.
//
// Configuration is a flat `key = value` file (see config.hpp); command-line
// flags override file values. Environment variables are never read.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "prsplit/config.hpp"
#include "prsplit/counterexample.hpp"
#include "prsplit/csv.hpp"
#include "prsplit/diagnostics.hpp"
#include "prsplit/lasso.hpp"
#include "prsplit/synthetic.hpp"

namespace {

using namespace prsplit;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitDivergence = 2;
constexpr int kExitMaxIter = 3;
// verify: failed checks
constexpr int kExitCheckFailed = 2;

struct CommonOpts {
  std::string config_path;
  std::string out_path;  // empty = stdout
  std::string format = "csv";
};

void write_output(const std::string& out_path, const std::string& text) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw std::runtime_error("cannot open output file: " + out_path);
  out << text;
}

KeyValueConfig load_config(const std::string& path) {
  if (path.empty()) return {};
  return KeyValueConfig::from_file(path);
}

// flag wins if it was passed; otherwise the config value; otherwise the default
double merge(const CLI::Option* opt, double flag_value, const KeyValueConfig& cfg,
             const std::string& key, double fallback) {
  if (opt && opt->count() > 0) return flag_value;
  return cfg.get_double(key, fallback);
}
long merge(const CLI::Option* opt, long flag_value, const KeyValueConfig& cfg,
           const std::string& key, long fallback) {
  if (opt && opt->count() > 0) return flag_value;
  return cfg.get_long(key, fallback);
}
std::string merge(const CLI::Option* opt, const std::string& flag_value, const KeyValueConfig& cfg,
                  const std::string& key, const std::string& fallback) {
  if (opt && opt->count() > 0) return flag_value;
  return cfg.get_string(key, fallback);
}

Partition parse_partition(const std::string& s) {
  if (s == "fg") return Partition::fg;
  if (s == "gf") return Partition::gf;
  throw std::runtime_error("partition must be 'fg' or 'gf', got '" + s + "'");
}

std::vector<double> parse_fracs(const std::string& s) {
  std::vector<double> out;
  std::string cur;
  auto flush = [&] {
    if (cur.empty()) return;
    out.push_back(std::stod(cur));
    cur.clear();
  };
  for (char c : s) {
    if (c == ',') flush();
    else if (!std::isspace(static_cast<unsigned char>(c))) cur.push_back(c);
  }
  flush();
  if (out.empty()) throw std::runtime_error("empty fraction list");
  return out;
}

std::string trace_csv(const SolveResult& res) {
  csv::Writer w;
  w.header({"k", "delta_x_norm", "residual_norm", "eps_prime", "eps_double_prime",
            "pointwise_bound", "ergodic_residual_bound", "ergodic_eps_bound"});
  for (const auto& row : res.trace) {
    w.field(row.k)
        .field(row.delta_x_norm)
        .field(row.residual_norm)
        .field(row.eps_prime)
        .field(row.eps_double_prime)
        .field(row.pointwise_bound)
        .field(row.ergodic_residual_bound)
        .field(row.ergodic_eps_bound);
    w.end_row();
  }
  return w.str();
}

int exit_code_for(StopReason reason) {
  switch (reason) {
    case StopReason::tolerance: return kExitOk;
    case StopReason::divergence_guard: return kExitDivergence;
    default: return kExitMaxIter;
  }
}

// ---------------------------------------------------------------------- solve

int cmd_solve(const CommonOpts& common, const KeyValueConfig& cfg, CLI::App* sub,
              const std::string& problem_flag, double theta_f, double gamma_f, double aprime_f,
              double afrac_f, double tol_f, long maxit_f, long seed_f, long dim_f, double beta_f,
              double betabar_f, const std::string& partition_f, bool no_bounds) {
  const std::string problem =
      merge(sub->get_option_no_throw("--problem"), problem_flag, cfg, "problem", "");
  if (problem.empty())
    throw std::runtime_error("solve: a problem must be named (lasso | counterexample | affine-qp)");
  const double theta = merge(sub->get_option_no_throw("--theta"), theta_f, cfg, "theta", 1.0);
  const double gamma = merge(sub->get_option_no_throw("--gamma"), gamma_f, cfg, "gamma", 1.0);
  const double tol = merge(sub->get_option_no_throw("--tol"), tol_f, cfg, "tol", 1e-5);
  const long max_iter = merge(sub->get_option_no_throw("--max-iter"), maxit_f, cfg, "max_iter", 500);
  const auto seed =
      static_cast<std::uint64_t>(merge(sub->get_option_no_throw("--seed"), seed_f, cfg, "seed", 1));

  MonotoneOperator A, B;
  PRConfig pr;
  pr.gamma = gamma;
  pr.theta = theta;
  pr.tol = tol;
  pr.max_iter = static_cast<int>(max_iter);
  std::string note;

  if (problem == "lasso") {
    const double aprime_cfg =
        merge(sub->get_option_no_throw("--alpha-prime"), aprime_f, cfg, "alpha_prime", 0.0);
    const double afrac =
        merge(sub->get_option_no_throw("--alpha-frac"), afrac_f, cfg, "alpha_frac", -1.0);
    const Partition partition = parse_partition(
        merge(sub->get_option_no_throw("--partition"), partition_f, cfg, "partition", "fg"));
    const LassoInstance inst = generate_instance(seed);
    const double aprime = afrac >= 0.0 ? afrac * inst.alpha : aprime_cfg;
    if (aprime < 0.0 || aprime > inst.alpha)
      throw std::runtime_error("solve: alpha_prime outside [0, alpha]");
    const MonotoneOperator f_side = lasso_operator_f(inst, aprime, gamma);
    const MonotoneOperator g_side = lasso_operator_g(inst, aprime);
    A = partition == Partition::fg ? f_side : g_side;
    B = partition == Partition::fg ? g_side : f_side;
    pr.beta = lasso_beta(inst, aprime);
    pr.x0 = Vector::Zero(inst.cols());
    if (!no_bounds) {
      const Vector uref = reference_solution(inst);
      pr.x_star = augmented_solution_point(inst, uref, aprime, gamma, partition);
      note = "solution proxy: reference solve at tol 1e-12";
    }
  } else if (problem == "counterexample") {
    DivergenceInstance di;
    di.beta = merge(sub->get_option_no_throw("--beta"), beta_f, cfg, "beta", 0.0);
    di.beta_bar = merge(sub->get_option_no_throw("--beta-bar"), betabar_f, cfg, "beta_bar", di.beta);
    A = counterexample_operator_A(di);
    B = counterexample_operator_B(di);
    pr.beta = std::min(di.beta, di.beta_bar);
    pr.x0 = Vector::Constant(2 * di.block_dim, 1.0);
    if (gamma != 1.0)
      note = "counterexample thresholds are derived for gamma = 1; run uses gamma = " +
             std::to_string(gamma);
  } else if (problem == "affine-qp") {
    const long dim = merge(sub->get_option_no_throw("--dim"), dim_f, cfg, "dim", 8);
    const double beta = merge(sub->get_option_no_throw("--beta"), beta_f, cfg, "beta", 1.0);
    const AffineInstance inst = make_affine_instance(seed, static_cast<int>(dim), beta, gamma);
    A = inst.A;
    B = inst.B;
    pr.beta = common_modulus(inst.A, inst.B);
    pr.x0 = Vector::Zero(inst.dim);
    pr.x_star = inst.x_star;
  } else {
    throw std::runtime_error("solve: unknown problem '" + problem + "'");
  }

  const SolveResult res = run(A, B, pr);
  write_output(common.out_path, trace_csv(res));

  const RegimeInfo reg = pr.regime();
  std::cerr << "problem=" << problem << " theta=" << theta << " gamma=" << gamma
            << " beta=" << pr.beta << " regime=" << regime_name(reg.regime)
            << " theta0=" << reg.theta0 << " sigma=" << reg.sigma
            << " iterations=" << res.iterations << " reason=" << stop_reason_name(res.reason)
            << "\n";
  if (!note.empty()) std::cerr << "note: " << note << "\n";
  return exit_code_for(res.reason);
}

// ----------------------------------------------------------------- lasso-table

int cmd_lasso_table(const CommonOpts& common, const KeyValueConfig& cfg, CLI::App* sub,
                    long instances_f, long seed_f, double tol_f, long maxit_f,
                    const std::string& partition_f, long threads_f) {
  ExperimentConfig ec;
  ec.instances = static_cast<int>(
      merge(sub->get_option_no_throw("--instances"), instances_f, cfg, "instances", 20));
  ec.base_seed =
      static_cast<std::uint64_t>(merge(sub->get_option_no_throw("--seed"), seed_f, cfg, "seed", 2024));
  ec.tol = merge(sub->get_option_no_throw("--tol"), tol_f, cfg, "tol", 1e-5);
  ec.max_iter =
      static_cast<int>(merge(sub->get_option_no_throw("--max-iter"), maxit_f, cfg, "max_iter", 500));
  ec.partition = parse_partition(
      merge(sub->get_option_no_throw("--partition"), partition_f, cfg, "partition", "fg"));
  ec.threads =
      static_cast<int>(merge(sub->get_option_no_throw("--threads"), threads_f, cfg, "threads", 0));

  const TableResult table = run_table(ec);

  const std::string format =
      merge(sub->get_option_no_throw("--format"), common.format, cfg, "format", "csv");
  if (format == "csv") {
    csv::Writer w;
    w.header({"theta", "gamma", "alpha_prime", "partition", "instance_seed", "iterations",
              "censored", "final_residual"});
    for (const auto& r : table.records) {
      w.field(r.theta)
          .field(r.gamma)
          .field(r.alpha_prime)
          .field(std::string(partition_name(r.partition)))
          .field(static_cast<unsigned long long>(r.instance_seed))
          .field(r.iterations)
          .field(r.censored ? 1 : 0)
          .field(r.final_residual);
      w.end_row();
    }
    write_output(common.out_path, w.str());
  } else if (format == "json") {
    json cells = json::array();
    for (const auto& c : table.cells) {
      json cell;
      cell["theta"] = c.theta_label;
      cell["gamma"] = gamma_rule_name(c.gamma_rule);
      cell["alpha_prime"] = alpha_rule_name(c.alpha_rule);
      cell["instances"] = c.n;
      cell["mean_iterations"] = c.mean_iterations;
      cell["censored"] = c.censored;
      cell["display"] = c.censored == c.n ? ("> " + std::to_string(ec.max_iter))
                                          : csv::format_double(c.mean_iterations);
      cells.push_back(cell);
    }
    json doc;
    doc["partition"] = partition_name(ec.partition);
    doc["instances"] = ec.instances;
    doc["base_seed"] = ec.base_seed;
    doc["max_iter"] = ec.max_iter;
    doc["tol"] = ec.tol;
    doc["cells"] = cells;
    write_output(common.out_path, doc.dump(2) + "\n");
  } else {
    throw std::runtime_error("format must be csv or json");
  }

  // one line per cell to keep long runs observable
  for (const auto& c : table.cells) {
    std::fprintf(stderr, "cell theta=%-8s gamma=%-20s alpha'=%-8s mean=%.2f censored=%d/%d\n",
                 c.theta_label.c_str(), gamma_rule_name(c.gamma_rule),
                 alpha_rule_name(c.alpha_rule), c.mean_iterations, c.censored, c.n);
  }
  return kExitOk;
}

// ----------------------------------------------------------------- lasso-sweep

int cmd_lasso_sweep(const CommonOpts& common, const KeyValueConfig& cfg, CLI::App* sub,
                    long seed_f, double theta_f, double gamma_f, const std::string& fracs_f,
                    double tol_f, long maxit_f) {
  const auto seed =
      static_cast<std::uint64_t>(merge(sub->get_option_no_throw("--seed"), seed_f, cfg, "seed", 1));
  const double theta = merge(sub->get_option_no_throw("--theta"), theta_f, cfg, "theta", 2.0);
  const std::string gamma_s =
      merge(sub->get_option_no_throw("--gamma"), std::to_string(gamma_f), cfg, "gamma", "1");
  const double tol = merge(sub->get_option_no_throw("--tol"), tol_f, cfg, "tol", 1e-5);
  const long max_iter =
      merge(sub->get_option_no_throw("--max-iter"), maxit_f, cfg, "max_iter", 2000);
  const std::string fracs_s = merge(sub->get_option_no_throw("--alpha-fracs"), fracs_f, cfg,
                                    "alpha_fracs", "0,0.25,0.5,0.75,1");

  const LassoInstance inst = generate_instance(seed);
  const double gamma =
      gamma_s == "auto" ? 1.0 / std::sqrt(inst.alpha * inst.kappa) : std::stod(gamma_s);
  const auto points =
      run_sweep(inst, theta, gamma, parse_fracs(fracs_s), tol, static_cast<int>(max_iter));

  csv::Writer w;
  w.header({"alpha_frac", "alpha_prime", "iterations", "censored"});
  for (const auto& p : points) {
    w.field(p.alpha_frac).field(p.alpha_prime).field(p.iterations).field(p.censored ? 1 : 0);
    w.end_row();
  }
  write_output(common.out_path, w.str());
  std::cerr << "instance seed=" << inst.seed << " alpha=" << inst.alpha << " kappa=" << inst.kappa
            << " gamma=" << gamma << " theta=" << theta << "\n";
  return kExitOk;
}

// -------------------------------------------------------------- counterexample

int cmd_counterexample(const CommonOpts& common, const KeyValueConfig& cfg, CLI::App* sub,
                       double beta_f, double betabar_f, double tmin_f, double tmax_f,
                       double tstep_f, double gamma_f) {
  DivergenceInstance di;
  di.beta = merge(sub->get_option_no_throw("--beta"), beta_f, cfg, "beta", 0.0);
  di.beta_bar = merge(sub->get_option_no_throw("--beta-bar"), betabar_f, cfg, "beta_bar", di.beta);
  const double tmin = merge(sub->get_option_no_throw("--theta-min"), tmin_f, cfg, "theta_min", 1.5);
  const double tmax = merge(sub->get_option_no_throw("--theta-max"), tmax_f, cfg, "theta_max", 4.5);
  const double tstep =
      merge(sub->get_option_no_throw("--theta-step"), tstep_f, cfg, "theta_step", 0.25);
  const double gamma = merge(sub->get_option_no_throw("--gamma"), gamma_f, cfg, "gamma", 1.0);
  if (tstep <= 0.0 || tmax < tmin) throw std::runtime_error("counterexample: bad theta grid");

  const bool extrapolated = gamma != 1.0;
  csv::Writer w;
  std::vector<std::string> head = {"theta", "f1", "f2", "threshold", "classification"};
  if (extrapolated) head.push_back("threshold_gamma_extrapolated");
  w.header(head);
  const double threshold = divergence_threshold(di);
  for (double t = tmin; t <= tmax + 1e-12; t += tstep) {
    const auto [f1, f2] = iteration_factors(di, t);
    w.field(t).field(f1).field(f2).field(threshold).field(
        std::string(classification_name(classify(di, t))));
    if (extrapolated) w.field(divergence_threshold_gamma(di, gamma));
    w.end_row();
  }
  write_output(common.out_path, w.str());
  if (extrapolated)
    std::cerr << "note: threshold_gamma_extrapolated substitutes beta -> gamma*beta; only gamma=1 "
                 "is backed by the closed-form derivation\n";
  return kExitOk;
}

// ----------------------------------------------------------------------- verify

void print_report(const DiagnosticReport& rep, const std::string& context) {
  for (const auto& c : rep.checks) {
    if (!c.applicable) {
      std::printf("[skip] %-36s %s\n", c.name.c_str(), context.c_str());
      continue;
    }
    std::printf("[%s] %-36s %s evals=%-7ld worst_margin=% .3e observed=% .6e allowed=% .6e k=%d\n",
                c.pass ? "pass" : "FAIL", c.name.c_str(), context.c_str(), c.evaluations,
                c.worst_margin, c.observed, c.allowed, c.k_at_worst);
  }
}

int cmd_verify(const KeyValueConfig& cfg, CLI::App* sub, long seed_f, long trials_f,
               bool inject_bug) {
  const auto seed =
      static_cast<std::uint64_t>(merge(sub->get_option_no_throw("--seed"), seed_f, cfg, "seed", 7));
  const long trials =
      merge(sub->get_option_no_throw("--trials"), trials_f, cfg, "trials", 200);

  DiagnosticReport all;

  // Distance-generating-function identities.
  {
    auto rep = bregman_identity_suite(seed, static_cast<int>(trials));
    print_report(rep, "(random triples/chains)");
    all.merge(rep);
  }

  // Quadratic form of the relaxation matrix + augmented monotonicity.
  {
    const AffineInstance inst = make_affine_instance(seed + 1, 6, 0.7, 1.0);
    auto rep = relaxation_matrix_suite(inst.A, inst.B, common_modulus(inst.A, inst.B), seed + 2,
                                       static_cast<int>(trials));
    print_report(rep, "(affine graph samples)");
    all.merge(rep);
  }

  // Full per-iteration battery across the certified regimes and the boundary.
  {
    const double beta = 0.8, gamma = 1.0;
    const AffineInstance inst = make_affine_instance(seed + 3, 8, beta, gamma);
    const double theta0 = 1.0 + gamma * common_modulus(inst.A, inst.B) / 2.0;
    for (double factor : {0.6, 1.0, 1.4, 2.0}) {
      PRConfig pr;
      pr.gamma = gamma;
      pr.theta = factor * theta0;
      pr.beta = common_modulus(inst.A, inst.B);
      pr.x0 = Vector::Zero(inst.dim);
      pr.tol = 1e-11;
      pr.max_iter = 20000;
      pr.record_trace = false;
      pr.x_star = inst.x_star;
      RunVerifier::Options opt;
      opt.flip_b_sign = inject_bug;
      auto out = solve_with_diagnostics(inst.A, inst.B, pr, opt);
      char ctx[64];
      std::snprintf(ctx, sizeof(ctx), "(affine, theta=%.2f*theta0)", factor);
      print_report(out.report, ctx);
      all.merge(out.report);

      // sampled enlargement test of the ergodic certificate
      if (!inject_bug) {
        RngStream rng = RngStream::substream(seed + 4, static_cast<std::uint64_t>(factor * 100));
        const auto& erg = out.result.ergodic;
        double worst_a = 0, worst_b = 0;
        const bool ok_a = eps_enlargement_check(inst.A, erg.u_bar(), erg.a_bar(),
                                                erg.eps_prime(pr.beta), 200, rng, 2.0, &worst_a);
        const bool ok_b = eps_enlargement_check(inst.B, erg.v_bar(), erg.b_bar(),
                                                erg.eps_double_prime(pr.beta), 200, rng, 2.0, &worst_b);
        CheckResult c;
        c.name = "ergodic-enlargement-sampling";
        c.applicable = true;
        c.evaluations = 400;
        c.pass = ok_a && ok_b;
        c.worst_margin = std::min(worst_a, worst_b);
        all.checks.push_back(c);
        std::printf("[%s] %-36s %s evals=400     worst_margin=% .3e\n", c.pass ? "pass" : "FAIL",
                    c.name.c_str(), ctx, c.worst_margin);
      }
    }
  }

  // Closed-form factor match of the divergence instance.
  {
    CheckResult c;
    c.name = "counterexample-factor-match";
    c.applicable = true;
    for (auto [beta, beta_bar] : std::vector<std::pair<double, double>>{
             {0.0, 0.0}, {0.0, 1.0}, {1.0, 1.0}, {0.5, 2.0}}) {
      DivergenceInstance di{beta, beta_bar, 1};
      for (double theta : {1.0, 1.9, 2.0, 2.5, 3.0, 4.0}) {
        auto runout = simulate(di, theta, Vector::Constant(2, 1.0), 60);
        ++c.evaluations;
        const double margin = 1e-12 - runout.max_closed_form_dev;
        if (margin < c.worst_margin) {
          c.worst_margin = margin;
          c.observed = runout.max_closed_form_dev;
          c.allowed = 1e-12;
        }
        if (margin < 0) c.pass = false;
      }
    }
    std::printf("[%s] %-36s %s evals=%-7ld worst_margin=% .3e\n", c.pass ? "pass" : "FAIL",
                c.name.c_str(), "(closed form)", c.evaluations, c.worst_margin);
    all.checks.push_back(c);
  }

  for (const auto& n : all.notes) std::printf("note: %s\n", n.c_str());

  const auto failures = all.failures();
  if (failures.empty()) {
    std::printf("verify: all %zu checks passed\n", all.checks.size());
    return kExitOk;
  }
  std::printf("verify: %zu check(s) FAILED:\n", failures.size());
  for (const auto& f : failures) std::printf("  %s\n", f.c_str());
  return kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"relaxed splitting solver with residual certificates"};
  app.require_subcommand(1);

  CommonOpts common;

  // solve
  auto* solve = app.add_subcommand("solve", "run one solve and write the certificate trace CSV");
  std::string problem, partition = "fg";
  double theta = 1.0, gamma = 1.0, aprime = 0.0, afrac = -1.0, tol = 1e-5, beta = 0.0,
         betabar = 0.0;
  long maxit = 500, seed = 1, dim = 8;
  bool no_bounds = false;
  solve->add_option("--config", common.config_path, "flat key=value config file");
  solve->add_option("--out", common.out_path, "output path (default stdout)");
  solve->add_option("--problem", problem, "lasso | counterexample | affine-qp");
  solve->add_option("--theta", theta, "relaxation parameter");
  solve->add_option("--gamma", gamma, "resolvent step size");
  solve->add_option("--alpha-prime", aprime, "lasso strong-convexity transfer");
  solve->add_option("--alpha-frac", afrac, "alpha' as a fraction of alpha (overrides --alpha-prime)");
  solve->add_option("--tol", tol, "stopping tolerance on ||x_k - x_{k-1}||");
  solve->add_option("--max-iter", maxit, "iteration cap");
  solve->add_option("--seed", seed, "instance seed");
  solve->add_option("--dim", dim, "affine-qp dimension");
  solve->add_option("--beta", beta, "modulus (counterexample / affine-qp)");
  solve->add_option("--beta-bar", betabar, "second modulus (counterexample)");
  solve->add_option("--partition", partition, "lasso partition: fg | gf");
  solve->add_flag("--no-bounds", no_bounds, "skip the reference solve and bound columns (lasso)");

  // lasso-table
  auto* table = app.add_subcommand("lasso-table", "iteration-count grid over (theta, gamma, alpha')");
  long instances = 20, threads = 0;
  table->add_option("--config", common.config_path);
  table->add_option("--out", common.out_path);
  table->add_option("--format", common.format, "csv (per-run records) | json (cell summary)");
  table->add_option("--instances", instances);
  table->add_option("--seed", seed);
  table->add_option("--tol", tol);
  table->add_option("--max-iter", maxit);
  table->add_option("--partition", partition);
  table->add_option("--threads", threads);

  // lasso-sweep
  auto* sweep = app.add_subcommand("lasso-sweep", "iterations vs alpha' on one instance");
  std::string fracs = "0,0.25,0.5,0.75,1";
  sweep->add_option("--config", common.config_path);
  sweep->add_option("--out", common.out_path);
  sweep->add_option("--seed", seed);
  sweep->add_option("--theta", theta);
  sweep->add_option("--gamma", gamma, "step size, or 'auto' in the config for 1/sqrt(alpha*kappa)");
  sweep->add_option("--alpha-fracs", fracs, "comma list of alpha'/alpha values in [0,1]");
  sweep->add_option("--tol", tol);
  sweep->add_option("--max-iter", maxit);

  // counterexample
  auto* ce = app.add_subcommand("counterexample", "factor scan of the divergence instance");
  double tmin = 1.5, tmax = 4.5, tstep = 0.25;
  ce->add_option("--config", common.config_path);
  ce->add_option("--out", common.out_path);
  ce->add_option("--beta", beta);
  ce->add_option("--beta-bar", betabar);
  ce->add_option("--theta-min", tmin);
  ce->add_option("--theta-max", tmax);
  ce->add_option("--theta-step", tstep);
  ce->add_option("--gamma", gamma, "report the extrapolated general-gamma threshold");

  // verify
  auto* verify = app.add_subcommand("verify", "run the invariant battery over seeded instances");
  long trials = 200;
  bool inject_bug = false;
  verify->add_option("--config", common.config_path);
  verify->add_option("--seed", seed);
  verify->add_option("--trials", trials);
  verify->add_flag("--inject-bug", inject_bug,
                   "test hook: negate b_k before checking; the battery must fail");

  CLI11_PARSE(app, argc, argv);

  try {
    const KeyValueConfig cfg = load_config(common.config_path);
    if (*solve)
      return cmd_solve(common, cfg, solve, problem, theta, gamma, aprime, afrac, tol, maxit, seed,
                       dim, beta, betabar, partition, no_bounds);
    if (*table)
      return cmd_lasso_table(common, cfg, table, instances, seed, tol, maxit, partition, threads);
    if (*sweep) return cmd_lasso_sweep(common, cfg, sweep, seed, theta, gamma, fracs, tol, maxit);
    if (*ce) return cmd_counterexample(common, cfg, ce, beta, betabar, tmin, tmax, tstep, gamma);
    if (*verify) return cmd_verify(cfg, verify, seed, trials, inject_bug);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitConfig;
}
