#include "discround/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "discround/baselines.hpp"
#include "discround/rng.hpp"

namespace discround {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open instance file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& path, const std::string& bytes) {
  if (path.empty()) {
    std::cout << bytes;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot open output file: " + path);
  out << bytes;
}

std::string integral_string(const VectorXd& x) {
  std::string s;
  for (Eigen::Index i = 0; i < x.size(); ++i) s += x[i] > 0.5 ? '1' : '0';
  return s;
}

std::string vector_string(const VectorXd& x) {
  std::ostringstream ss;
  ss.precision(17);
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (i) ss << ' ';
    ss << x[i];
  }
  return ss.str();
}

struct CommonFlags {
  uint64_t seed = 0;
  std::string preset = "practical";
  double gamma = std::nan("");
  double alpha = std::nan("");
  double k0 = std::nan("");
  int restarts = -1;
  int slack_exp = -1;
  std::string out;
  std::string format = "table";
};

WalkConfig walk_config(const CommonFlags& fl, int n) {
  WalkConfig cfg = fl.preset == "paper" ? WalkConfig::paper(n) : WalkConfig::practical();
  if (!std::isnan(fl.gamma)) cfg.gamma = fl.gamma;
  if (!std::isnan(fl.alpha)) cfg.alpha = fl.alpha;
  if (!std::isnan(fl.k0)) cfg.k0 = fl.k0;
  if (fl.restarts >= 0) cfg.restarts = fl.restarts;
  if (fl.slack_exp >= 0) cfg.slack_exponent = fl.slack_exp;
  cfg.validate();
  return cfg;
}

RoundFullConfig round_config(const CommonFlags& fl, int n) {
  RoundFullConfig cfg;
  cfg.walk = walk_config(fl, n);
  cfg.sched.k0 = cfg.walk.k0;  // the two must agree
  cfg.validate();
  return cfg;
}

ReportFormat format_of(const CommonFlags& fl) {
  if (fl.format == "csv") return ReportFormat::Csv;
  if (fl.format == "table") return ReportFormat::Table;
  throw ValidationError("unknown format: " + fl.format);
}

std::vector<std::pair<std::string, std::string>> base_meta(const CommonFlags& fl,
                                                           const WalkConfig& walk) {
  return {{"preset", fl.preset}, {"restarts", std::to_string(walk.restarts)}};
}

// labels + report rows for runs that bypass round_full (baselines, one-shot)
RoundReport label_only_report(const std::vector<LinearConstraint>& cons, int n,
                              const VectorXd& x, const VectorXd& y, bool one_sided) {
  ScheduleParams params;
  params.delta = 1;
  for (const auto& c : cons) {
    int nnz = 0;
    for (Eigen::Index i = 0; i < c.a.size(); ++i)
      if (c.a[i] != 0.0) ++nnz;
    params.delta = std::max(params.delta, static_cast<double>(nnz));
  }
  auto labels = assign_parts(cons, n, params);
  RoundReport rep;
  rep.drift_sum.assign(cons.size(), 0.0);
  for (size_t j = 0; j < cons.size(); ++j) {
    ConstraintReport row;
    row.id = static_cast<int>(j) + 1;
    row.part = labels[j].part;
    row.b = cons[j].b;
    row.menu = labels[j].menu;
    row.bound_min = labels[j].bound_min;
    double v = cons[j].a.dot(x) - cons[j].b;
    row.violation = one_sided ? std::max(0.0, v) : std::abs(v);
    row.ratio = row.violation / row.bound_min;
    rep.drift_sum[j] = std::abs(cons[j].a.dot(x - y));
    rep.max_ratio = std::max(rep.max_ratio, row.ratio);
    rep.rows.push_back(row);
  }
  return rep;
}

int dispatch(const std::string& cmd, const std::string& mode, const std::string& path,
             const CommonFlags& fl, int bench_n, int bench_m,
             std::vector<double> bench_targets) {
  if (cmd == "bench") {
    auto res = run_bench(bench_n, bench_m, bench_targets, fl.seed);
    std::string out = "# bench n=" + std::to_string(res.n) + " m=" + std::to_string(res.m) +
                      " seed=" + std::to_string(fl.seed) + "\n";
    out += "b,engine,randomized,envelope,ratio\n";
    std::ostringstream ss;
    ss.precision(17);
    for (const auto& p : res.points)
      ss << p.b << ',' << p.engine << ',' << p.randomized << ',' << p.envelope << ',' << p.ratio
         << "\n";
    out += ss.str();
    out += "# C: " + std::to_string(res.max_ratio) + "\n";
    write_output(fl.out, out);
    return 0;
  }

  InstanceFile inst = parse_instance(read_file(path));
  const int n = inst.n;

  if (cmd == "round") {
    if (inst.constraints.empty()) throw ValidationError("round: instance has no constraints");
    auto cfg = round_config(fl, n);
    auto res = round_full(inst.y, inst.constraints, inst.structure(), cfg, fl.seed);
    res.report.driver = "round";
    res.report.seed = fl.seed;
    auto meta = base_meta(fl, cfg.walk);
    meta.emplace_back("x", integral_string(res.x));
    write_output(fl.out, emit_report(res.report, format_of(fl), meta));
    return 0;
  }

  if (cmd == "round-matroid") {
    // one-shot partial rounding; widths come from the file (default: track only)
    auto cfg = walk_config(fl, n);
    std::vector<SideConstraint> side;
    for (const auto& c : inst.constraints) {
      SideConstraint s;
      s.a = c.a;
      s.b = c.b;
      s.lambda = c.lambda_override.value_or(kUnboundedLambda);
      side.push_back(std::move(s));
    }
    auto res = partial_round(inst.y, side, inst.structure(), cfg, fl.seed);
    RoundReport rep;
    if (!inst.constraints.empty()) {
      rep = label_only_report(inst.constraints, n, res.x, inst.y, false);
      for (size_t j = 0; j < side.size(); ++j) {
        rep.rows[j].lambda = side[j].lambda;
        rep.rows[j].violation = std::abs(res.side_values[j]);  // drift from start
        rep.rows[j].ratio = rep.rows[j].violation / rep.rows[j].bound_min;
      }
      rep.max_ratio = 0;
      for (const auto& row : rep.rows) rep.max_ratio = std::max(rep.max_ratio, row.ratio);
    }
    rep.driver = "round-matroid";
    rep.seed = fl.seed;
    rep.iterations = 1;
    rep.total_steps = res.stats.steps;
    rep.total_truncations = res.stats.truncations;
    rep.notes.push_back("new_integral: " + std::to_string(res.new_integral));
    rep.notes.push_back(std::string("success: ") + (res.success ? "yes" : "no"));
    rep.notes.push_back("attempts: " + std::to_string(res.attempts));
    auto meta = base_meta(fl, cfg);
    meta.emplace_back("x", vector_string(res.x));
    write_output(fl.out, emit_report(rep, format_of(fl), meta));
    return 0;
  }

  if (cmd == "degmat") {
    if (!inst.matroid) throw ValidationError("degmat: instance needs a matroid block");
    if (!inst.costs) throw ValidationError("degmat: instance needs costs");
    auto cfg = round_config(fl, n);
    auto res =
        degmat(*inst.costs, inst.constraints, inst.matroid->build(n), inst.y, cfg, fl.seed);
    res.report.seed = fl.seed;
    auto meta = base_meta(fl, cfg.walk);
    meta.emplace_back("cost", std::to_string(res.cost));
    meta.emplace_back("cost_fractional", std::to_string(res.cost_fractional));
    meta.emplace_back("x", integral_string(res.x));
    write_output(fl.out, emit_report(res.report, format_of(fl), meta));
    return 0;
  }

  if (cmd == "multicrit") {
    if (!inst.matroid) throw ValidationError("multicrit: instance needs a matroid block");
    if (inst.multi_costs.empty() || inst.budgets.empty())
      throw ValidationError("multicrit: instance needs multi_costs and budgets");
    MulticritConfig cfg;
    cfg.round = round_config(fl, n);
    auto res = multicrit(inst.matroid->build(n), inst.multi_costs, inst.budgets, inst.eps,
                         cfg, fl.seed);
    res.report.seed = fl.seed;
    auto meta = base_meta(fl, cfg.round.walk);
    meta.emplace_back("found", res.found ? "yes" : "no");
    if (res.found) {
      VectorXd x = VectorXd::Zero(n);
      for (int i = 0; i < n; ++i)
        if ((res.base >> i) & 1u) x[i] = 1.0;
      meta.emplace_back("x", integral_string(x));
      std::ostringstream ss;
      ss.precision(17);
      ss << res.max_ratio;
      meta.emplace_back("max_ratio", ss.str());
      ss.str("");
      ss << res.excess_constant;
      meta.emplace_back("excess_constant", ss.str());
    }
    meta.emplace_back("branches", std::to_string(res.branches));
    write_output(fl.out, emit_report(res.report, format_of(fl), meta));
    return res.found ? 0 : 4;
  }

  if (cmd == "rsp" || cmd == "laminar-rsp") {
    if (!inst.paths) throw ValidationError(cmd + ": instance needs a paths block");
    auto cfg = round_config(fl, static_cast<int>(inst.paths->edges_of.size()));
    RoundReport rep;
    std::string chosen;
    if (cmd == "rsp") {
      auto res = rsp_run(*inst.paths, cfg, fl.seed);
      rep = std::move(res.report);
      for (size_t i = 0; i < res.chosen.size(); ++i)
        chosen += (i ? " " : "") + std::to_string(res.chosen[i]);
    } else {
      auto res = laminar_rsp(*inst.paths, inst.requirements, cfg, fl.seed);
      rep = std::move(res.report);
      for (size_t i = 0; i < res.chosen.size(); ++i)
        chosen += (i ? " " : "") + std::to_string(res.chosen[i]);
    }
    rep.seed = fl.seed;
    auto meta = base_meta(fl, cfg.walk);
    meta.emplace_back("chosen", chosen);
    write_output(fl.out, emit_report(rep, format_of(fl), meta));
    return 0;
  }

  if (cmd == "baseline") {
    VectorXd x;
    std::string driver;
    if (mode == "random") {
      x = randomized_round(inst.y, fl.seed);
      driver = "baseline-random";
    } else {
      MatrixXd A(static_cast<Eigen::Index>(inst.constraints.size()), n);
      for (size_t j = 0; j < inst.constraints.size(); ++j)
        A.row(static_cast<Eigen::Index>(j)) = inst.constraints[j].a;
      x = iterated_round(inst.y, A);
      driver = "baseline-iterated";
    }
    RoundReport rep = inst.constraints.empty()
                          ? RoundReport{}
                          : label_only_report(inst.constraints, n, x, inst.y, false);
    rep.driver = driver;
    rep.seed = fl.seed;
    std::vector<std::pair<std::string, std::string>> meta{{"x", integral_string(x)}};
    write_output(fl.out, emit_report(rep, format_of(fl), meta));
    return 0;
  }

  if (cmd == "verify") {
    std::string out;
    auto ok = [&](const std::string& name) { out += "check " + name + ": ok\n"; };
    ok("parse");
    StructureSpec structure = inst.structure();
    ok("structure");
    auto cfg = walk_config(fl, n);
    auto classes = classify_scales(inst.y, cfg.tol);
    ok("scale classes (" + std::to_string(classes.n_fractional) + " fractional)");
    if (structure.matroid) {
      if (!structure.matroid->separate(inst.y, cfg.tol).inside)
        throw PreconditionError("verify: y is outside the matroid polytope");
      if (structure.base &&
          std::abs(inst.y.sum() - structure.matroid->full_rank()) >
              cfg.tol.eps_feas * (1 + structure.matroid->full_rank()))
        throw PreconditionError("verify: y is not in the base polytope");
      ok("matroid membership");
    }
    std::vector<SideConstraint> side;
    std::vector<double> lambdas;
    if (!inst.constraints.empty() && classes.n_fractional > 0) {
      ScheduleParams params;
      params.delta = 1;
      for (const auto& c : inst.constraints) {
        int nnz = 0;
        for (Eigen::Index i = 0; i < c.a.size(); ++i)
          if (c.a[i] != 0.0) ++nnz;
        params.delta = std::max(params.delta, static_cast<double>(nnz));
      }
      auto labels = assign_parts(inst.constraints, n, params);
      for (size_t j = 0; j < inst.constraints.size(); ++j) {
        const auto& c = inst.constraints[j];
        SideConstraint s;
        s.a = c.a;
        s.b = c.b;
        s.lambda = c.lambda_override.value_or(
            lambda_for(labels[j].part, static_cast<int>(j) + 1, classes.n_fractional, c.b,
                       classes.n_fractional, params));
        lambdas.push_back(s.lambda);
        side.push_back(std::move(s));
      }
      if (!check_lambda_condition(lambdas, classes.n_fractional, cfg.k0))
        throw PreconditionError("verify: width condition fails for the scheduled widths");
      ok("width condition");
    }
    build_polytope(inst.y, side, structure, cfg);
    ok("polytope");
    write_output(fl.out, out);
    return 0;
  }

  throw ValidationError("unknown subcommand: " + cmd);
}

}  // namespace

BenchResult run_bench(int n, int m, const std::vector<double>& targets, uint64_t seed) {
  if (n < 8 || m < 1) throw ValidationError("bench: need n >= 8 and m >= 1");
  BenchResult out;
  out.n = n;
  out.m = m;
  const double envelope = std::sqrt(n * std::log(2.0 + static_cast<double>(m) / n));
  for (size_t t = 0; t < targets.size(); ++t) {
    const double b = targets[t];
    if (b < 1 || 2 * b > 1.0 * n * n)
      throw ValidationError("bench: target out of range: " + std::to_string(b));
    // support and coefficient sizes chosen so every row meets b at y = half
    const int coef = std::max(1, static_cast<int>(std::ceil(2.0 * b / n)));
    const int support = static_cast<int>(std::llround(2.0 * b / coef));
    CounterRng rng(seed, 1000 + t);
    VectorXd y = VectorXd::Constant(n, 0.5);
    std::vector<LinearConstraint> cons;
    for (int j = 0; j < m; ++j) {
      VectorXd a = VectorXd::Zero(n);
      // sample `support` distinct coordinates
      std::vector<int> pool(static_cast<size_t>(n));
      for (int i = 0; i < n; ++i) pool[static_cast<size_t>(i)] = i;
      for (int s = 0; s < support; ++s) {
        uint64_t pick = s + rng.next_below(static_cast<uint64_t>(n - s));
        std::swap(pool[static_cast<size_t>(s)], pool[static_cast<size_t>(pick)]);
        a[pool[static_cast<size_t>(s)]] = coef;
      }
      LinearConstraint c;
      c.a = std::move(a);
      c.b = b;
      cons.push_back(std::move(c));
    }

    RoundFullConfig cfg;
    auto res = round_full(y, cons, {}, cfg, seed + 17 * t);
    double engine = 0;
    for (const auto& row : res.report.rows) engine = std::max(engine, row.violation);

    VectorXd xr = randomized_round(y, seed + 23 * t + 5);
    double rb = 0;
    for (const auto& c : cons) rb = std::max(rb, std::abs(c.a.dot(xr) - c.b));

    BenchPoint p;
    p.b = b;
    p.engine = engine;
    p.randomized = rb;
    p.envelope = envelope;
    p.ratio = res.report.max_ratio;
    out.max_ratio = std::max(out.max_ratio, p.ratio);
    out.points.push_back(p);
  }
  return out;
}

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"discrepancy-walk rounding toolkit"};
  app.require_subcommand(1);
  app.fallthrough();

  CommonFlags fl;
  if (const char* env = std::getenv("DISCROUND_SEED")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (end && *end == '\0')
      fl.seed = static_cast<uint64_t>(v);
    else {
      std::cerr << "DISCROUND_SEED is not an integer: " << env << "\n";
      return 2;
    }
  }
  app.add_option("--seed", fl.seed, "random seed (default: DISCROUND_SEED or 0)");
  app.add_option("--preset", fl.preset, "walk preset")
      ->check(CLI::IsMember({"practical", "paper"}));
  app.add_option("--gamma", fl.gamma, "step size");
  app.add_option("--alpha", fl.alpha, "cap multiplier");
  app.add_option("--k0", fl.k0, "width-condition constant");
  app.add_option("--restarts", fl.restarts, "walk restarts");
  app.add_option("--slack-exp", fl.slack_exp, "slack exponent c in |a|/n^c");
  app.add_option("--out", fl.out, "output path (default: stdout)");
  app.add_option("--format", fl.format, "report format")
      ->check(CLI::IsMember({"table", "csv"}));

  std::string paths[7];
  CLI::App* subs[7];
  const char* names[7] = {"round",     "round-matroid", "degmat", "multicrit",
                          "rsp",       "laminar-rsp",   "verify"};
  const char* blurbs[7] = {"full rounding of a linear system",
                           "one-shot partial rounding with structure",
                           "degree-bounded minimum-cost matroid base",
                           "multi-budget matroid base search",
                           "one path per pair under edge capacities",
                           "multipath routing with nested requirements",
                           "validate an instance and its preconditions"};
  for (int i = 0; i < 7; ++i) {
    subs[i] = app.add_subcommand(names[i], blurbs[i]);
    subs[i]->add_option("instance", paths[i], "instance file")->required();
  }

  auto* baseline = app.add_subcommand("baseline", "reference rounders");
  std::string mode, baseline_path;
  baseline->add_option("mode", mode, "random | iterated")
      ->required()
      ->check(CLI::IsMember({"random", "iterated"}));
  baseline->add_option("instance", baseline_path, "instance file")->required();

  auto* bench = app.add_subcommand("bench", "violation-versus-target sweep");
  int bench_n = 256, bench_m = 256;
  std::vector<double> bench_targets{16, 64, 256, 1024};
  bench->add_option("--n", bench_n, "coordinates");
  bench->add_option("--m", bench_m, "rows");
  bench->add_option("--targets", bench_targets, "sweep targets");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  std::string cmd, path;
  for (int i = 0; i < 7; ++i)
    if (subs[i]->parsed()) {
      cmd = names[i];
      path = paths[i];
    }
  if (baseline->parsed()) {
    cmd = "baseline";
    path = baseline_path;
  }
  if (bench->parsed()) cmd = "bench";

  try {
    return dispatch(cmd, mode, path, fl, bench_n, bench_m, bench_targets);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const PreconditionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const ConvergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
}

}  // namespace discround
