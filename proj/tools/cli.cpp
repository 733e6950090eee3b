#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <locale>
#include <memory>
#include <ostream>
#include <sstream>

#include "vgfkit/hierclass.hpp"
#include "vgfkit/mset_io.hpp"
#include "vgfkit/parallel.hpp"
#include "vgfkit/prox.hpp"
#include "vgfkit/solver.hpp"
#include "vgfkit/synthetic.hpp"
#include "vgfkit/vgf.hpp"

namespace vgfkit::cli {
namespace {

std::string num(double v) {
  std::ostringstream ss;
  ss.imbue(std::locale::classic());
  ss << std::setprecision(12) << v;
  return ss.str();
}

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw ParseError("cannot write '" + path + "'", 0);
  return f;
}

void write_trace_header(std::ostream& out) { out << "iter,gap,objective,step\n"; }

void write_trace_row(std::ostream& out, const TraceRow& r) {
  out << r.iter << ',' << num(r.gap) << ',' << num(r.objective) << ',' << num(r.step) << '\n';
  out.flush();
}

struct TreeArgs {
  std::string hierarchy;
  bool flat = false;
};

void add_tree_options(CLI::App* cmd, TreeArgs& t) {
  auto* h = cmd->add_option("--hierarchy", t.hierarchy, "edge list 'parent child'");
  auto* f = cmd->add_flag("--flat", t.flat, "flat classes 1..m");
  h->excludes(f);
}

CategoryTree resolve_tree(const TreeArgs& t, int flat_classes) {
  if (!t.hierarchy.empty()) return load_hierarchy_file(t.hierarchy);
  if (!t.flat) throw InvalidInput("one of --hierarchy or --flat is required");
  if (flat_classes < 1) throw InvalidInput("no classes found for --flat");
  return CategoryTree::flat(flat_classes);
}

int max_label(const std::vector<int>& labels) {
  return labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end());
}

struct Globals {
  int threads = 1;
  std::uint64_t seed = 0;
  bool force = false;
};

// eval -----------------------------------------------------------------------

struct EvalArgs {
  std::string mset, matrix;
};

int cmd_eval(const EvalArgs& a, const Globals& g, std::ostream& out) {
  const MSet s = read_mset_file(a.mset);
  const Matrix x = read_matrix_file(a.matrix);
  const double nrm = vgf_norm(s, x, g.force);
  const SupportResult r = omega_with_argmax(s, x);
  out << "omega " << num(r.value) << '\n';
  out << "norm " << num(nrm) << '\n';
  out << "argmax\n";
  write_matrix(out, r.argmax);
  return kOk;
}

// prox / conj ------------------------------------------------------------------

struct ProxArgs {
  std::string mset, matrix;
  double tau = 1.0;
  bool conjugate = false;
  bool qr = false;
};

int cmd_prox(const ProxArgs& a, const Globals& g, std::ostream& out) {
  const MSet s = read_mset_file(a.mset);
  const Matrix x = read_matrix_file(a.matrix);
  ProxOptions opt;
  opt.force = g.force;
  if (a.conjugate) {
    out << "prox_conjugate\n";
    write_matrix(out, prox_conjugate(s, x, a.tau, opt));
    return kOk;
  }
  if (a.qr) {
    out << "prox\n";
    write_matrix(out, prox_qr(s, x, a.tau, opt));
    return kOk;
  }
  const ProxResult r = prox_omega(s, x, a.tau, opt);
  out << "residual " << num(r.residual) << '\n';
  out << "prox\n";
  write_matrix(out, r.y);
  out << "m0\n";
  write_matrix(out, r.m0);
  return kOk;
}

struct ConjArgs {
  std::string mset, matrix;
};

int cmd_conj(const ConjArgs& a, const Globals& g, std::ostream& out) {
  const MSet s = read_mset_file(a.mset);
  const Matrix y = read_matrix_file(a.matrix);
  ConjugateOptions opt;
  opt.force = g.force;
  const ConjugateResult r = conjugate(s, y, opt);
  out << "conjugate " << num(r.value) << '\n';
  out << "dual_norm " << num(std::isinf(r.value) ? r.value : 2.0 * std::sqrt(std::max(0.0, r.value))) << '\n';
  out << "argmin\n";
  write_matrix(out, r.m);
  return kOk;
}

// check-convexity ---------------------------------------------------------------

struct CheckArgs {
  std::string mset;
  int n = -1;
  long trials = 10000;
};

int cmd_check(const CheckArgs& a, const Globals& g, std::ostream& out) {
  const MSet s = read_mset_file(a.mset);
  Certificate c = certify(s, a.n);
  if (c.verdict == Verdict::convex) {
    out << "convex (" << c.detail << ")\n";
    return kOk;
  }
  const ProbeResult p = probe_convexity(s, a.trials, g.seed, g.threads);
  const Verdict v = p.pass ? c.verdict : Verdict::not_convex;
  out << to_string(v) << " (" << c.detail << ")\n";
  if (p.pass) {
    out << "no counterexample in " << p.trials << " trials\n";
    return kOk;
  }
  out << "counterexample at trial " << p.trials << " violation " << num(p.violation) << " theta "
      << num(p.theta) << '\n';
  out << "X\n";
  write_matrix(out, p.x);
  out << "Y\n";
  write_matrix(out, p.y);
  return kOk;
}

// train ------------------------------------------------------------------------

struct TrainArgs {
  std::string data, mset, model, trace;
  TreeArgs tree;
  bool mset_auto = false;
  bool reduce = false;
  double lambda = 1.0;
  long max_iter = 1000;
  double eps = 1e-14;
  double gamma0 = 0.0;
  double cdec = 2.0;
  double cinc = 1.25;
  long trace_every = 1;
  int n = 0;
};

int cmd_train(const TrainArgs& a, const Globals& g, std::ostream& out) {
  const auto samples = load_libsvm_file(a.data);
  if (samples.empty()) throw InvalidInput("no samples in '" + a.data + "'");
  const std::vector<int> labels = labels_of(samples);
  const CategoryTree tree = resolve_tree(a.tree, max_label(labels));
  const int n = a.n > 0 ? a.n : std::max(1, max_feature_index(samples));
  const Matrix data = to_dense(samples, n);

  MSet s;
  if (a.mset_auto == !a.mset.empty()) throw InvalidInput("exactly one of --mset or --mset-auto is required");
  if (a.mset_auto) {
    s = make_box(build_ancestor_mbar(tree, 1.0, 0.8).mbar);
  } else {
    s = read_mset_file(a.mset);
  }
  if (!g.force && !is_certified_convex(s, n))
    throw NotCertified("train: regularizer set is not certified convex");

  auto loss = std::make_shared<MulticlassHingeLoss>(data, labels, build_incidence(tree));
  const SaddleProblem problem(loss, s, a.lambda);

  LineSearchParams lp;
  lp.max_iter = a.max_iter;
  lp.eps = a.eps;
  lp.gamma0 = a.gamma0;
  lp.c_dec = a.cdec;
  lp.c_inc = a.cinc;
  lp.trace_every = a.trace_every;
  lp.seed = g.seed;

  std::ofstream trace;
  if (!a.trace.empty()) {
    trace = open_out(a.trace);
    write_trace_header(trace);
  }
  auto on_row = [&](const TraceRow& r) {
    if (trace.is_open()) write_trace_row(trace, r);
  };

  Matrix x;
  SaddleSolution sol;
  bool reduced = false;
  if (a.reduce) {
    const ReducedProblem rp = reduce_problem(problem);
    reduced = !rp.identity;
    sol = solve_saddle(rp.problem, lp, on_row);
    x = rp.back_map(sol.average.x);
  } else {
    sol = solve_saddle(problem, lp, on_row);
    x = sol.average.x;
  }

  if (!a.model.empty()) {
    std::ofstream mf = open_out(a.model);
    write_model(mf, x);
  }
  const EvalResult ev = evaluate(tree, x, data, labels);
  out << "objective " << num(problem.objective(x)) << '\n';
  out << "gap " << num(sol.last_gap) << '\n';
  out << "iterations " << sol.iterations << (sol.converged ? " (converged)" : "") << '\n';
  out << "reduced " << (reduced ? "yes" : "no") << '\n';
  out << "train_accuracy " << std::fixed << std::setprecision(3) << ev.accuracy << '\n';
  out << std::defaultfloat;
  out << "seconds " << num(sol.seconds) << '\n';
  return kOk;
}

// predict / angles ---------------------------------------------------------------

struct PredictArgs {
  std::string model, data;
  TreeArgs tree;
};

int cmd_predict(const PredictArgs& a, const Globals&, std::ostream& out) {
  const Matrix x = read_model_file(a.model);
  const auto samples = load_libsvm_file(a.data);
  const std::vector<int> labels = labels_of(samples);
  const CategoryTree tree = resolve_tree(a.tree, static_cast<int>(x.cols()));
  const Matrix data = to_dense(samples, static_cast<int>(x.rows()));
  const EvalResult ev = evaluate(tree, x, data, labels);
  for (std::size_t i = 0; i < ev.predictions.size(); ++i) out << ev.predictions[i] << ' ' << labels[i] << '\n';
  out << "accuracy " << std::fixed << std::setprecision(3) << ev.accuracy << '\n' << std::defaultfloat;
  return kOk;
}

struct AnglesArgs {
  std::string model;
};

int cmd_angles(const AnglesArgs& a, const Globals&, std::ostream& out, std::ostream& err) {
  const AnglesResult r = pairwise_angles(read_model_file(a.model));
  for (int j : r.zero_columns) err << "warning: column " << j + 1 << " is zero; its angles are reported as 90\n";
  for (Eigen::Index i = 0; i < r.degrees.rows(); ++i) {
    for (Eigen::Index j = 0; j < r.degrees.cols(); ++j) {
      if (j) out << ',';
      out << num(r.degrees(i, j));
    }
    out << '\n';
  }
  return kOk;
}

// bench ------------------------------------------------------------------------

struct BenchArgs {
  int n = 100;
  int samples = 500;
  double noise = 0.1;
  double lambda = 1.0;
  long iters = 1000;
  long baseline_iters = 0;  // 0: same as iters
  double baseline_c = 1.0;
  std::string trace_prefix, emit_data;
};

int cmd_bench(const BenchArgs& a, const Globals& g, std::ostream& out) {
  const CategoryTree tree = benchmark_tree();
  const Dataset train = hierarchical_dataset(tree, a.n, a.samples, g.seed, a.noise);
  if (!a.emit_data.empty()) {
    const Dataset test = hierarchical_dataset(tree, a.n, a.samples, g.seed + 1, a.noise);
    std::ofstream tr = open_out(a.emit_data + "/train.svm");
    write_libsvm(tr, train.a, train.labels);
    std::ofstream te = open_out(a.emit_data + "/test.svm");
    write_libsvm(te, test.a, test.labels);
    std::ofstream hi = open_out(a.emit_data + "/hierarchy.txt");
    write_hierarchy(hi, tree);
  }
  auto loss = std::make_shared<MulticlassHingeLoss>(train.a, train.labels, build_incidence(tree));
  const SaddleProblem problem(loss, make_box(build_ancestor_mbar(tree, 1.0, 0.8).mbar), a.lambda);

  LineSearchParams lp;
  lp.max_iter = a.iters;
  lp.seed = g.seed;
  lp.eps = 0.0;
  std::ofstream mp_trace;
  if (!a.trace_prefix.empty()) {
    mp_trace = open_out(a.trace_prefix + "_mirror_prox.csv");
    write_trace_header(mp_trace);
  }
  const SaddleSolution sol = solve_saddle(problem, lp, [&](const TraceRow& r) {
    if (mp_trace.is_open()) write_trace_row(mp_trace, r);
  });

  SubgradientParams sp;
  sp.iters = a.baseline_iters > 0 ? a.baseline_iters : a.iters;
  sp.c = a.baseline_c;
  const BaselineResult base = baseline_subgradient(problem, sp);
  if (!a.trace_prefix.empty()) {
    std::ofstream bt = open_out(a.trace_prefix + "_subgradient.csv");
    write_trace_header(bt);
    for (const TraceRow& r : base.trace) write_trace_row(bt, r);
  }
  out << "mirror_prox_objective " << num(sol.objective) << '\n';
  out << "mirror_prox_iterations " << sol.iterations << '\n';
  out << "mirror_prox_last_gap " << num(sol.last_gap) << '\n';
  out << "subgradient_objective " << num(base.best_objective) << '\n';
  out << "subgradient_iterations " << sp.iters << '\n';
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Variational Gram function toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  g.threads = default_threads();
  app.add_option("--threads", g.threads, "worker threads (1 is the deterministic reference)")
      ->check(CLI::PositiveNumber);
  app.add_option("--seed", g.seed, "random seed");
  app.add_flag("--force", g.force, "skip convexity certification");

  EvalArgs ea;
  auto* eval = app.add_subcommand("eval", "evaluate Omega, the VGF norm and the achieving M");
  eval->add_option("mset", ea.mset)->required();
  eval->add_option("matrix", ea.matrix)->required();

  ProxArgs pa;
  auto* prox = app.add_subcommand("prox", "proximal operator of tau Omega");
  prox->add_option("mset", pa.mset)->required();
  prox->add_option("matrix", pa.matrix)->required();
  prox->add_option("--tau", pa.tau);
  prox->add_flag("--conjugate", pa.conjugate, "prox of tau Omega* instead");
  prox->add_flag("--qr", pa.qr, "use the thin-QR route");

  ConjArgs ca;
  auto* conj = app.add_subcommand("conj", "conjugate Omega* and dual norm");
  conj->add_option("mset", ca.mset)->required();
  conj->add_option("matrix", ca.matrix)->required();

  CheckArgs ka;
  auto* check = app.add_subcommand("check-convexity", "certify or refute convexity of Omega");
  check->add_option("mset", ka.mset)->required();
  check->add_option("--n", ka.n, "row count of X");
  check->add_option("--trials", ka.trials, "random trials when no certificate exists");

  TrainArgs ta;
  auto* train = app.add_subcommand("train", "train a hierarchical classifier by mirror-prox");
  train->add_option("--data", ta.data, "LIBSVM training file")->required();
  add_tree_options(train, ta.tree);
  train->add_option("--mset", ta.mset, "regularizer set file");
  train->add_flag("--mset-auto", ta.mset_auto, "ancestor-pattern box");
  train->add_option("--lambda", ta.lambda);
  train->add_option("--max-iter", ta.max_iter);
  train->add_option("--eps", ta.eps);
  train->add_option("--gamma0", ta.gamma0, "initial step; <= 0 estimates it");
  train->add_option("--cdec", ta.cdec);
  train->add_option("--cinc", ta.cinc);
  train->add_option("--trace", ta.trace, "CSV trace output");
  train->add_option("--trace-every", ta.trace_every);
  train->add_flag("--reduce", ta.reduce, "kernel-trick reduction when n > m p");
  train->add_option("--model", ta.model, "model output");
  train->add_option("--n", ta.n, "feature dimension (default: largest index)");

  PredictArgs pr;
  auto* predict = app.add_subcommand("predict", "predict labels with a trained model");
  predict->add_option("--model", pr.model)->required();
  predict->add_option("--data", pr.data)->required();
  add_tree_options(predict, pr.tree);

  AnglesArgs an;
  auto* angles = app.add_subcommand("angles", "pairwise angles between model columns, in degrees");
  angles->add_option("--model", an.model)->required();

  BenchArgs ba;
  auto* bench = app.add_subcommand("bench", "synthetic hierarchical benchmark, mirror-prox vs subgradient");
  bench->add_option("--n", ba.n);
  bench->add_option("--samples", ba.samples);
  bench->add_option("--noise", ba.noise);
  bench->add_option("--lambda", ba.lambda);
  bench->add_option("--iters", ba.iters);
  bench->add_option("--baseline-iters", ba.baseline_iters);
  bench->add_option("--baseline-c", ba.baseline_c);
  bench->add_option("--trace", ba.trace_prefix, "prefix for trace CSVs");
  bench->add_option("--emit-data", ba.emit_data, "directory for train.svm, test.svm, hierarchy.txt");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kParse;
  }

  try {
    if (eval->parsed()) return cmd_eval(ea, g, out);
    if (prox->parsed()) return cmd_prox(pa, g, out);
    if (conj->parsed()) return cmd_conj(ca, g, out);
    if (check->parsed()) return cmd_check(ka, g, out);
    if (train->parsed()) return cmd_train(ta, g, out);
    if (predict->parsed()) return cmd_predict(pr, g, out);
    if (angles->parsed()) return cmd_angles(an, g, out, err);
    if (bench->parsed()) return cmd_bench(ba, g, out);
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return kParse;
  } catch (const InvalidInput& e) {
    err << "invalid input: " << e.what() << '\n';
    return kParse;
  } catch (const DimensionMismatch& e) {
    err << "dimension mismatch: " << e.what() << '\n';
    return kDims;
  } catch (const NotCertified& e) {
    err << "not certified: " << e.what() << '\n';
    return kCertification;
  } catch (const SolverError& e) {
    err << "solver error: " << e.what() << " (best value " << num(e.best_value()) << ")\n";
    return kSolver;
  } catch (const NotSupported& e) {
    err << "not supported: " << e.what() << '\n';
    return kParse;
  }
  return kParse;
}

}  // namespace vgfkit::cli
