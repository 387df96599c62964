#include "discround/schedules.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace discround {

namespace {

bool is_fractional(double v, const ToleranceModel& tol) {
  return std::min(v, 1.0 - v) > tol.eps_tight;
}

std::vector<int> fractional_indices(const VectorXd& x, const ToleranceModel& tol) {
  std::vector<int> idx;
  for (Eigen::Index i = 0; i < x.size(); ++i)
    if (is_fractional(x[i], tol)) idx.push_back(static_cast<int>(i));
  return idx;
}

int support_on(const VectorXd& a, const std::vector<char>& frac) {
  int c = 0;
  for (Eigen::Index i = 0; i < a.size(); ++i)
    if (a[i] != 0.0 && frac[static_cast<size_t>(i)]) ++c;
  return c;
}

double column_sparsity(const std::vector<LinearConstraint>& cons, int n) {
  std::vector<int> count(static_cast<size_t>(n), 0);
  for (const auto& c : cons)
    for (int i = 0; i < n; ++i)
      if (c.a[i] != 0.0) ++count[static_cast<size_t>(i)];
  int d = 0;
  for (int v : count) d = std::max(d, v);
  return std::max(1, d);
}

uint64_t mix_seed(uint64_t seed, uint64_t salt) {
  uint64_t z = seed + 0x9E3779B97F4A7C15ull * (salt + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace

const char* part_name(Part p) {
  switch (p) {
    case Part::M1: return "M1";
    case Part::M2: return "M2";
    case Part::M3: return "M3";
    case Part::M4: return "M4";
  }
  return "?";
}

void ScheduleParams::validate() const {
  if (!(c1 > 0 && c1 < 1.0 / 150))
    throw ValidationError("schedule: c1 must lie in (0, 1/150)");
  if (!(k0 >= 1)) throw ValidationError("schedule: k0 must be at least 1");
  if (!(c2 >= 2 * k0)) throw ValidationError("schedule: c2 must be at least 2*k0");
  if (!(k1 > 0)) throw ValidationError("schedule: k1 must be positive");
  if (!(c_L > 0)) throw ValidationError("schedule: c_L must be positive");
  if (L < 0 || delta < 0) throw ValidationError("schedule: L and delta cannot be negative");
}

double schedule_L(int n, int m, double c_L) {
  auto lg = [](int v) {
    return std::max(1.0, std::ceil(std::log2(static_cast<double>(std::max(v, 1)))));
  };
  return c_L * lg(m) * lg(n);
}

std::vector<PartLabel> assign_parts(const std::vector<LinearConstraint>& cons, int n,
                                    const ScheduleParams& params) {
  params.validate();
  const int m = static_cast<int>(cons.size());
  const double L = params.L > 0 ? params.L : schedule_L(n, m, params.c_L);
  const double delta = params.delta > 0 ? params.delta : column_sparsity(cons, n);
  const double nlog = std::sqrt(n * std::log(2.0 + static_cast<double>(m) / n));
  const double logn = std::log(std::max(2, n));

  std::vector<PartLabel> labels(cons.size());
  for (int j = 1; j <= m; ++j) {
    const auto& c = cons[static_cast<size_t>(j - 1)];
    if (c.b < 0) throw ValidationError("constraint targets must be nonnegative");
    PartLabel& lab = labels[static_cast<size_t>(j - 1)];
    double dj = delta;
    if (!params.group_of.empty() && !params.group_delta.empty())
      dj = params.group_delta[static_cast<size_t>(params.group_of[static_cast<size_t>(j - 1)])];
    lab.menu = {std::sqrt(static_cast<double>(j)), nlog, std::sqrt(L * c.b) + L,
                std::sqrt(dj) * logn};
    int best = 0;
    for (int t = 1; t < 4; ++t)
      if (lab.menu[static_cast<size_t>(t)] < lab.menu[static_cast<size_t>(best)]) best = t;
    lab.part = static_cast<Part>(best);
    lab.bound_min = lab.menu[static_cast<size_t>(best)];
  }
  return labels;
}

double lambda_for(Part part, int j, int f, double b_j, int support,
                  const ScheduleParams& params) {
  (void)b_j;
  if (f < 1) throw PreconditionError("lambda_for: needs at least one fractional coordinate");
  switch (part) {
    case Part::M1:
    case Part::M2: {
      double gate = params.c1 * f;
      if (j < gate) return 0.0;
      return std::sqrt(params.c2 * std::log(j / gate));
    }
    case Part::M3:
      return kUnboundedLambda;
    case Part::M4: {
      if (support <= 0) return kUnboundedLambda;  // row cannot move
      double dj = params.delta;
      double scale = params.k1;
      if (!params.group_of.empty() && !params.group_delta.empty()) {
        int g = params.group_of[static_cast<size_t>(j - 1)];
        dj = params.group_delta[static_cast<size_t>(g)];
        scale *= static_cast<double>(params.group_delta.size());
      }
      if (dj <= 0) throw PreconditionError("lambda_for: sparsity delta has not been set");
      return std::sqrt(scale * dj / support);
    }
  }
  return kUnboundedLambda;
}

void RoundFullConfig::validate() const {
  walk.validate();
  sched.validate();
  if (enum_threshold < 1 || enum_threshold > 20)
    throw ValidationError("round config: enumeration threshold must be in [1, 20]");
  if (max_iterations < 1) throw ValidationError("round config: needs at least one iteration");
  if (std::abs(sched.k0 - walk.k0) > 1e-12)
    throw ValidationError("round config: schedule and walk disagree on k0");
}

namespace {

// Enumerate the 2^f integral completions of the fractional coordinates, keep
// the admissible one with the smallest maximum menu-normalized violation.
VectorXd best_completion(const VectorXd& x, const std::vector<int>& frac,
                         const std::vector<LinearConstraint>& cons,
                         const std::vector<PartLabel>& labels, const StructureSpec& structure,
                         const RoundFullConfig& cfg) {
  const size_t f = frac.size();
  if (f == 0) return x;
  if (f > 63 || (uint64_t{1} << f) > cfg.enum_cap)
    throw ConvergenceError("completion: too many residual fractional coordinates");

  auto admissible = [&](const VectorXd& cand) {
    if (cfg.completion_ok) return cfg.completion_ok(cand);
    if (structure.matroid) {
      Subset s = 0;
      for (Eigen::Index i = 0; i < cand.size(); ++i)
        if (cand[i] > 0.5) s |= Subset{1} << i;
      if (structure.base) return structure.matroid->rank(s) == structure.matroid->full_rank() &&
                                 subset_size(s) == structure.matroid->full_rank();
      return structure.matroid->is_independent(s);
    }
    return true;
  };
  auto score = [&](const VectorXd& cand) {
    double worst = 0;
    for (size_t j = 0; j < cons.size(); ++j) {
      double v = cons[j].a.dot(cand) - cons[j].b;
      double viol = cfg.one_sided ? std::max(0.0, v) : std::abs(v);
      worst = std::max(worst, viol / labels[j].bound_min);
    }
    return worst;
  };

  VectorXd best;
  double best_score = 0;
  bool have = false;
  for (uint64_t mask = 0; mask < (uint64_t{1} << f); ++mask) {
    VectorXd cand = x;
    for (size_t t = 0; t < f; ++t)
      cand[frac[t]] = (mask >> t) & 1u ? 1.0 : 0.0;
    if (!admissible(cand)) continue;
    double sc = score(cand);
    if (!have || sc < best_score) {
      best = cand;
      best_score = sc;
      have = true;
    }
  }
  if (!have) throw ConvergenceError("completion: no admissible integral completion found");
  return best;
}

}  // namespace

RoundFullResult round_full(const VectorXd& y, const std::vector<LinearConstraint>& cons,
                           const StructureSpec& structure, const RoundFullConfig& cfg,
                           uint64_t seed) {
  cfg.validate();
  const int n = static_cast<int>(y.size());
  if (n < 1) throw ValidationError("round_full: empty point");
  const int m = static_cast<int>(cons.size());
  for (const auto& c : cons)
    if (c.a.size() != n) throw ValidationError("round_full: constraint dimension mismatch");

  ScheduleParams params = cfg.sched;
  if (params.L <= 0) params.L = schedule_L(n, m, params.c_L);
  if (params.delta <= 0) params.delta = m > 0 ? column_sparsity(cons, n) : 1.0;
  if (!params.group_of.empty()) {
    if (static_cast<int>(params.group_of.size()) != m)
      throw ValidationError("round_full: group map size mismatch");
    int g = 1 + *std::max_element(params.group_of.begin(), params.group_of.end());
    params.group_delta.assign(static_cast<size_t>(g), 1.0);
    for (int k = 0; k < g; ++k) {
      std::vector<LinearConstraint> part;
      for (int j = 0; j < m; ++j)
        if (params.group_of[static_cast<size_t>(j)] == k)
          part.push_back(cons[static_cast<size_t>(j)]);
      params.group_delta[static_cast<size_t>(k)] =
          part.empty() ? 1.0 : column_sparsity(part, n);
    }
  }
  std::vector<PartLabel> labels = assign_parts(cons, n, params);

  RoundReport rep;
  rep.seed = seed;
  rep.driver = "round";
  rep.drift_sum.assign(static_cast<size_t>(m), 0.0);
  rep.rows.resize(static_cast<size_t>(m));
  for (int j = 0; j < m; ++j) {
    auto& row = rep.rows[static_cast<size_t>(j)];
    row.id = j + 1;
    row.part = labels[static_cast<size_t>(j)].part;
    row.b = cons[static_cast<size_t>(j)].b;
    row.menu = labels[static_cast<size_t>(j)].menu;
    row.bound_min = labels[static_cast<size_t>(j)].bound_min;
    // targets below L ride on a padded internal target (virtual unit-weight
    // dummy mass that can never move); the violation is unaffected
    if (row.part == Part::M3 && row.b < params.L)
      rep.notes.push_back("constraint " + std::to_string(j + 1) + ": target bumped to L=" +
                          std::to_string(params.L) + " with dummy mass " +
                          std::to_string(params.L - row.b));
  }

  VectorXd x = y;
  std::vector<char> frac_mask(static_cast<size_t>(n), 0);
  WalkConfig wcfg = cfg.walk;
  int iter = 0;
  while (true) {
    auto frac = fractional_indices(x, cfg.walk.tol);
    int f = static_cast<int>(frac.size());
    if (f <= cfg.enum_threshold) break;
    if (iter >= cfg.max_iterations)
      throw ConvergenceError("round_full: iteration budget exhausted with " +
                             std::to_string(f) + " fractional coordinates");
    std::fill(frac_mask.begin(), frac_mask.end(), 0);
    for (int i : frac) frac_mask[static_cast<size_t>(i)] = 1;

    std::vector<SideConstraint> side(static_cast<size_t>(m));
    std::vector<double> lambdas(static_cast<size_t>(m));
    double k1_scale = 1.0;
    for (int round = 0;; ++round) {
      ScheduleParams p = params;
      p.k1 *= k1_scale;
      for (int j = 0; j < m; ++j) {
        const auto& c = cons[static_cast<size_t>(j)];
        int sup = support_on(c.a, frac_mask);
        double l;
        if (c.lambda_override)
          l = *c.lambda_override;
        else if (sup == 0)
          l = kUnboundedLambda;  // fully frozen row: its value cannot drift
        else
          l = lambda_for(labels[static_cast<size_t>(j)].part, j + 1, f, c.b, sup, p);
        lambdas[static_cast<size_t>(j)] = l;
      }
      if (check_lambda_condition(lambdas, f, params.k0)) break;
      if (round >= 30)
        throw PreconditionError("round_full: width condition unsatisfiable for this instance");
      k1_scale *= 2;  // widen the sparsity-part rows until the condition holds
    }
    if (k1_scale > 1.0)
      rep.notes.push_back("iteration " + std::to_string(iter) + ": k1 escalated by " +
                          std::to_string(k1_scale));

    for (int j = 0; j < m; ++j) {
      side[static_cast<size_t>(j)].a = cons[static_cast<size_t>(j)].a;
      side[static_cast<size_t>(j)].b = cons[static_cast<size_t>(j)].b;
      side[static_cast<size_t>(j)].lambda = lambdas[static_cast<size_t>(j)];
      rep.rows[static_cast<size_t>(j)].lambda = lambdas[static_cast<size_t>(j)];
    }

    auto pr = partial_round(x, side, structure, wcfg, mix_seed(seed, iter));
    if (pr.new_integral == 0) {
      if (pr.stats.status == WalkStatus::DimensionExhausted) {
        // singleton dyadic classes pin their coordinate outright; when the
        // whole bucketing degenerates this way the walk has no directions
        if (f < 63 && (uint64_t{1} << f) <= cfg.enum_cap) {
          rep.notes.push_back("iteration " + std::to_string(iter) +
                              ": walk pinned at f=" + std::to_string(f) +
                              ", finishing by enumeration");
          break;
        }
        if (!wcfg.merge_singleton_classes) {
          wcfg.merge_singleton_classes = true;
          rep.notes.push_back("iteration " + std::to_string(iter) +
                              ": walk pinned at f=" + std::to_string(f) +
                              ", coarsening singleton classes");
          ++iter;
          continue;
        }
      }
      throw ConvergenceError("round_full: walk made no progress at f=" + std::to_string(f));
    }
    if (!pr.success)
      rep.notes.push_back("iteration " + std::to_string(iter) + ": below freeze target (" +
                          std::to_string(pr.new_integral) + " new integral)");
    for (int j = 0; j < m; ++j)
      rep.drift_sum[static_cast<size_t>(j)] +=
          std::abs(cons[static_cast<size_t>(j)].a.dot(pr.x - x));
    rep.f_history.push_back(f);
    rep.total_steps += pr.stats.steps;
    rep.total_truncations += pr.stats.truncations;
    x = pr.x;
    ++iter;
  }
  rep.iterations = iter;

  auto frac = fractional_indices(x, cfg.walk.tol);
  VectorXd before = x;
  x = best_completion(x, frac, cons, labels, structure, cfg);
  for (int j = 0; j < m; ++j)
    rep.drift_sum[static_cast<size_t>(j)] +=
        std::abs(cons[static_cast<size_t>(j)].a.dot(x - before));

  // exact 0/1 snap for reporting
  for (int i = 0; i < n; ++i) x[i] = x[i] > 0.5 ? 1.0 : 0.0;

  for (int j = 0; j < m; ++j) {
    auto& row = rep.rows[static_cast<size_t>(j)];
    double v = cons[static_cast<size_t>(j)].a.dot(x) - cons[static_cast<size_t>(j)].b;
    row.violation = cfg.one_sided ? std::max(0.0, v) : std::abs(v);
    row.ratio = row.violation / row.bound_min;
    rep.max_ratio = std::max(rep.max_ratio, row.ratio);
  }
  return {std::move(x), std::move(rep)};
}

// ---- degree-bounded matroid base --------------------------------------------

DegmatResult degmat(const VectorXd& costs, const std::vector<LinearConstraint>& degree,
                    const MatroidOracle& matroid, const VectorXd& y,
                    const RoundFullConfig& cfg, uint64_t seed) {
  cfg.validate();
  const int n = matroid.ground_size();
  if (costs.size() != n || y.size() != n)
    throw ValidationError("degmat: cost or point dimension differs from the ground size");
  for (int i = 0; i < n; ++i) {
    if (costs[i] < 0 || std::abs(costs[i] - std::round(costs[i])) > 1e-9)
      throw ValidationError("degmat: costs must be nonnegative integers");
  }
  if (!matroid.separate(y, cfg.walk.tol).inside ||
      std::abs(y.sum() - matroid.full_rank()) > cfg.walk.tol.eps_feas * (1 + matroid.full_rank()))
    throw PreconditionError("degmat: point is not in the base polytope");

  ScheduleParams params = cfg.sched;
  const int m = static_cast<int>(degree.size());
  if (params.L <= 0) params.L = schedule_L(n, m, params.c_L);
  if (params.delta <= 0) params.delta = m > 0 ? column_sparsity(degree, n) : 1.0;
  std::vector<PartLabel> labels = assign_parts(degree, n, params);

  DegmatResult out;
  out.cost_fractional = costs.dot(y);
  RoundReport& rep = out.report;
  rep.seed = seed;
  rep.driver = "degmat";
  rep.drift_sum.assign(static_cast<size_t>(m), 0.0);
  rep.rows.resize(static_cast<size_t>(m));
  for (int j = 0; j < m; ++j) {
    auto& row = rep.rows[static_cast<size_t>(j)];
    row.id = j + 1;
    row.part = labels[static_cast<size_t>(j)].part;
    row.b = degree[static_cast<size_t>(j)].b;
    row.menu = labels[static_cast<size_t>(j)].menu;
    row.bound_min = labels[static_cast<size_t>(j)].bound_min;
  }

  StructureSpec structure;
  structure.matroid = matroid;
  structure.base = true;

  const int gate = static_cast<int>(std::max(params.k0, 48.0));
  VectorXd x = y;
  std::vector<char> frac_mask(static_cast<size_t>(n), 0);
  int iter = 0;
  double cost_drift = 0;
  while (true) {
    auto frac = fractional_indices(x, cfg.walk.tol);
    int f = static_cast<int>(frac.size());
    if (f < gate) break;  // few enough coordinates: hand over to the decomposition
    if (iter >= cfg.max_iterations)
      throw ConvergenceError("degmat: iteration budget exhausted");
    std::fill(frac_mask.begin(), frac_mask.end(), 0);
    for (int i : frac) frac_mask[static_cast<size_t>(i)] = 1;

    std::vector<SideConstraint> side(static_cast<size_t>(m) + 1);
    side[0].a = costs;
    side[0].b = out.cost_fractional;
    side[0].lambda = 0.0;  // the cost may only move by the additive slack
    std::vector<double> lambdas{0.0};
    for (int j = 0; j < m; ++j) {
      const auto& c = degree[static_cast<size_t>(j)];
      int sup = support_on(c.a, frac_mask);
      double l = c.lambda_override
                     ? *c.lambda_override
                     : (sup == 0 ? kUnboundedLambda
                                 : lambda_for(labels[static_cast<size_t>(j)].part, j + 1, f,
                                              c.b, sup, params));
      side[static_cast<size_t>(j) + 1].a = c.a;
      side[static_cast<size_t>(j) + 1].b = c.b;
      side[static_cast<size_t>(j) + 1].lambda = l;
      lambdas.push_back(l);
      rep.rows[static_cast<size_t>(j)].lambda = l;
    }
    if (!check_lambda_condition(lambdas, f, params.k0))
      throw PreconditionError("degmat: width condition fails at f=" + std::to_string(f));

    auto pr = partial_round(x, side, structure, cfg.walk, mix_seed(seed, iter));
    if (pr.new_integral == 0) {
      if (pr.stats.status == WalkStatus::DimensionExhausted) break;  // decompose as is
      throw ConvergenceError("degmat: walk made no progress");
    }
    for (int j = 0; j < m; ++j)
      rep.drift_sum[static_cast<size_t>(j)] +=
          std::abs(degree[static_cast<size_t>(j)].a.dot(pr.x - x));
    cost_drift += std::abs(costs.dot(pr.x - x));
    rep.f_history.push_back(f);
    rep.total_steps += pr.stats.steps;
    rep.total_truncations += pr.stats.truncations;
    x = pr.x;
    ++iter;
  }
  rep.iterations = iter;
  rep.notes.push_back("cost drift through the iterations: " + std::to_string(cost_drift));

  auto decomp = matroid.base_decompose(x, cfg.walk.tol);
  const auto* best = &decomp.front();
  double best_cost = 0;
  for (const auto& wb : decomp) {
    double c = 0;
    for (int i = 0; i < n; ++i)
      if ((wb.base >> i) & 1u) c += costs[i];
    if (&wb == &decomp.front() || c < best_cost) {
      best = &wb;
      best_cost = c;
    }
  }
  out.base = best->base;
  out.cost = best_cost;
  out.x = VectorXd::Zero(n);
  for (int i = 0; i < n; ++i)
    if ((out.base >> i) & 1u) out.x[i] = 1.0;

  if (out.cost > out.cost_fractional + 1.0)
    throw ConvergenceError("degmat: cost bound exceeded (cost " + std::to_string(out.cost) +
                           " vs fractional " + std::to_string(out.cost_fractional) + ")");

  for (int j = 0; j < m; ++j) {
    auto& row = rep.rows[static_cast<size_t>(j)];
    double v = degree[static_cast<size_t>(j)].a.dot(out.x) - degree[static_cast<size_t>(j)].b;
    row.violation = std::max(0.0, v);  // degree bounds are one-sided
    row.ratio = row.violation / row.bound_min;
    rep.max_ratio = std::max(rep.max_ratio, row.ratio);
  }
  return out;
}

// ---- multi-budget matroid base ----------------------------------------------

namespace {

// Greedy minimum-cost base; deterministic tie-break by element index.
Subset min_cost_base(const MatroidOracle& m, const VectorXd& cost) {
  std::vector<int> order(static_cast<size_t>(m.ground_size()));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return cost[a] < cost[b]; });
  Subset base = 0;
  for (int e : order)
    if (m.is_independent(base | (Subset{1} << e))) base |= Subset{1} << e;
  return base;
}

// Multiplicative-weights search for a base-polytope point meeting all
// budgets within (1 + slack): average of greedily chosen bases.
std::optional<VectorXd> budget_feasible_point(const MatroidOracle& m,
                                              const std::vector<VectorXd>& d,
                                              const std::vector<double>& budget,
                                              double slack, int iters) {
  const int n = m.ground_size();
  const size_t k = d.size();
  VectorXd accum = VectorXd::Zero(n);
  std::vector<double> w(k, 1.0);
  double eta = 0.25;
  for (int t = 1; t <= iters; ++t) {
    VectorXd c = VectorXd::Zero(n);
    double wsum = std::accumulate(w.begin(), w.end(), 0.0);
    for (size_t j = 0; j < k; ++j)
      c += (w[j] / (wsum * budget[j])) * d[j];
    Subset base = min_cost_base(m, c);
    VectorXd xb = VectorXd::Zero(n);
    for (int i = 0; i < n; ++i)
      if ((base >> i) & 1u) xb[i] = 1.0;
    accum += xb;
    VectorXd avg = accum / t;
    bool ok = true;
    for (size_t j = 0; j < k; ++j)
      if (d[j].dot(avg) > budget[j] * (1 + slack)) ok = false;
    if (ok && t >= 8) return avg;
    for (size_t j = 0; j < k; ++j) {
      double load = d[j].dot(xb) / budget[j] - 1.0;
      w[j] *= std::exp(eta * std::clamp(load, -1.0, 1.0));
    }
    double top = *std::max_element(w.begin(), w.end());
    if (top > 1e12)
      for (auto& v : w) v /= top;
  }
  return std::nullopt;
}

}  // namespace

MulticritResult multicrit(const MatroidOracle& matroid, const std::vector<VectorXd>& costs,
                          const std::vector<double>& budgets, double eps,
                          const MulticritConfig& cfg, uint64_t seed) {
  cfg.round.validate();
  const int n = matroid.ground_size();
  const size_t k = costs.size();
  if (k == 0 || budgets.size() != k) throw ValidationError("multicrit: need matching budgets");
  if (!(eps > 0)) throw ValidationError("multicrit: eps must be positive");
  for (const auto& d : costs) {
    if (d.size() != n) throw ValidationError("multicrit: cost dimension mismatch");
    if (d.minCoeff() < 0) throw ValidationError("multicrit: costs must be nonnegative");
  }
  for (double b : budgets)
    if (!(b > 0)) throw ValidationError("multicrit: budgets must be positive");
  const int r = matroid.full_rank();

  // elements too expensive for fractional treatment must be guessed exactly
  Subset heavy = 0;
  for (int e = 0; e < n; ++e)
    for (size_t j = 0; j < k; ++j)
      if (costs[j][e] > (eps / std::sqrt(static_cast<double>(k))) * budgets[j]) {
        heavy |= Subset{1} << e;
        break;
      }
  std::vector<int> heavy_idx;
  for (int e = 0; e < n; ++e)
    if ((heavy >> e) & 1u) heavy_idx.push_back(e);
  const int guess_cap = std::min<int>(
      r, static_cast<int>(std::ceil(std::pow(static_cast<double>(k), 1.5) / eps)));

  MulticritResult out;
  out.report.seed = seed;
  out.report.driver = "multicrit";
  double best_ratio = 0;
  bool have = false;

  auto consider = [&](Subset base) {
    double ratio = 0;
    for (size_t j = 0; j < k; ++j) {
      double c = 0;
      for (int i = 0; i < n; ++i)
        if ((base >> i) & 1u) c += costs[j][i];
      ratio = std::max(ratio, c / budgets[j]);
    }
    if (!have || ratio < best_ratio) {
      have = true;
      best_ratio = ratio;
      out.base = base;
    }
    return ratio <= 1 + 1e-12;  // inside budget: nothing left to improve
  };

  // enumerate guesses: size-ascending, lexicographic within a size
  std::vector<Subset> frontier{0};
  uint64_t branches = 0;
  bool done = false;
  for (int size = 0; size <= guess_cap && !done; ++size) {
    std::vector<Subset> next;
    for (Subset g : frontier) {
      if (done) break;
      if (++branches > cfg.branch_cap) {
        out.report.notes.push_back("enumeration budget exhausted");
        done = true;
        break;
      }
      // budgets must cover the guess
      bool fits = true;
      for (size_t j = 0; j < k && fits; ++j) {
        double c = 0;
        for (int i : heavy_idx)
          if ((g >> i) & 1u) c += costs[j][i];
        if (c > budgets[j] + 1e-12) fits = false;
      }
      if (!fits) continue;

      // survivors: non-heavy elements, reindexed after contracting the guess
      MatroidOracle contracted = matroid.contracted(g);
      std::vector<int> orig_of;  // contracted index -> original
      for (int e = 0; e < n; ++e)
        if (!((g >> e) & 1u)) orig_of.push_back(e);
      Subset keep = 0;
      for (size_t t = 0; t < orig_of.size(); ++t)
        if (!((heavy >> orig_of[t]) & 1u)) keep |= Subset{1} << t;
      std::vector<int> orig_of2;
      for (size_t t = 0; t < orig_of.size(); ++t)
        if ((keep >> t) & 1u) orig_of2.push_back(orig_of[t]);
      MatroidOracle residual = contracted.restricted(keep);

      int need = r - subset_size(g);
      if (residual.full_rank() == need) {
        if (need == 0) {
          if (consider(g)) {
            done = true;
            break;
          }
        } else {
          // residual budgets; rows pinned to zero ban costly leftovers
          std::vector<double> bres(k);
          std::vector<VectorXd> dres(k);
          bool viable = true;
          const int nr = residual.ground_size();
          Subset banned = 0;
          for (size_t j = 0; j < k; ++j) {
            double used = 0;
            for (int i : heavy_idx)
              if ((g >> i) & 1u) used += costs[j][i];
            bres[j] = budgets[j] - used;
            dres[j] = VectorXd::Zero(nr);
            for (int t = 0; t < nr; ++t) dres[j][t] = costs[j][orig_of2[static_cast<size_t>(t)]];
            if (bres[j] <= 1e-12) {
              for (int t = 0; t < nr; ++t)
                if (dres[j][t] > 1e-12) banned |= Subset{1} << t;
            }
          }
          MatroidOracle work = residual;
          std::vector<int> orig_of3 = orig_of2;
          if (banned) {
            Subset keep2 = ~banned & ((nr >= 64 ? ~Subset{0} : (Subset{1} << nr) - 1));
            std::vector<int> tmp;
            for (int t = 0; t < nr; ++t)
              if ((keep2 >> t) & 1u) tmp.push_back(orig_of2[static_cast<size_t>(t)]);
            work = residual.restricted(keep2);
            orig_of3 = tmp;
            if (work.full_rank() != need) viable = false;
          }
          std::vector<size_t> live;  // budget rows that still constrain anything
          for (size_t j = 0; j < k; ++j)
            if (bres[j] > 1e-12) live.push_back(j);

          if (viable) {
            std::vector<VectorXd> dwork(live.size());
            std::vector<double> bwork(live.size());
            for (size_t t = 0; t < live.size(); ++t) {
              dwork[t] = VectorXd::Zero(work.ground_size());
              for (int u = 0; u < work.ground_size(); ++u)
                dwork[t][u] = costs[live[t]][orig_of3[static_cast<size_t>(u)]];
              bwork[t] = bres[live[t]];
            }
            auto y = budget_feasible_point(work, dwork, bwork, eps * cfg.lp_slack,
                                           cfg.lp_iters);
            if (y) {
              // round the residual point over the base polytope
              StructureSpec structure;
              structure.matroid = work;
              structure.base = true;
              VectorXd x = *y;
              int iter = 0;
              bool walk_ok = true;
              while (walk_ok) {
                auto frac = fractional_indices(x, cfg.round.walk.tol);
                int f = static_cast<int>(frac.size());
                if (f <= cfg.round.enum_threshold) break;
                if (iter >= cfg.round.max_iterations) {
                  walk_ok = false;
                  break;
                }
                std::vector<SideConstraint> side(live.size());
                for (size_t t = 0; t < live.size(); ++t) {
                  side[t].a = dwork[t];
                  side[t].b = dwork[t].dot(x);
                  side[t].lambda =
                      f > 16 * static_cast<int>(k)
                          ? 0.0
                          : std::sqrt(cfg.round.sched.k0 * std::log(17.0 * k / f));
                }
                try {
                  auto pr = partial_round(x, side, structure, cfg.round.walk,
                                          mix_seed(seed, branches * 1000 + iter));
                  if (pr.new_integral == 0) break;  // stalled: decompose as is
                  out.report.total_steps += pr.stats.steps;
                  x = pr.x;
                } catch (const std::exception&) {
                  walk_ok = false;
                  break;
                }
                ++iter;
              }
              if (walk_ok) {
                auto decomp = work.base_decompose(x, cfg.round.walk.tol);
                Subset pick = 0;
                double pick_ratio = 0;
                bool pick_set = false;
                for (const auto& wb : decomp) {
                  double ratio = 0;
                  for (size_t j = 0; j < k; ++j) {
                    double c = 0;
                    for (int i : heavy_idx)
                      if ((g >> i) & 1u) c += costs[j][i];
                    for (int u = 0; u < work.ground_size(); ++u)
                      if ((wb.base >> u) & 1u) c += costs[j][orig_of3[static_cast<size_t>(u)]];
                    ratio = std::max(ratio, c / budgets[j]);
                  }
                  if (!pick_set || ratio < pick_ratio) {
                    pick = wb.base;
                    pick_ratio = ratio;
                    pick_set = true;
                  }
                }
                Subset full = g;
                for (int u = 0; u < work.ground_size(); ++u)
                  if ((pick >> u) & 1u) full |= Subset{1} << orig_of3[static_cast<size_t>(u)];
                if (consider(full)) {
                  done = true;
                  break;
                }
              }
            }
          }
        }
      }
      // grow the guess (lexicographic: only append higher indices)
      if (subset_size(g) < guess_cap) {
        int start = g ? 64 - __builtin_clzll(g) : 0;
        for (int e : heavy_idx) {
          if (e < start) continue;
          Subset g2 = g | (Subset{1} << e);
          if (matroid.is_independent(g2)) next.push_back(g2);
        }
      }
    }
    frontier = std::move(next);
  }
  out.branches = branches;

  if (have) {
    // the walk never returns a non-base; re-verify all the same
    if (matroid.rank(out.base) != r || subset_size(out.base) != r)
      throw ConvergenceError("multicrit: candidate is not a base");
    out.found = true;
    out.max_ratio = best_ratio;
    out.excess_constant = std::max(0.0, (best_ratio - 1.0) / eps);
    out.cost.resize(k);
    for (size_t j = 0; j < k; ++j) {
      double c = 0;
      for (int i = 0; i < n; ++i)
        if ((out.base >> i) & 1u) c += costs[j][i];
      out.cost[j] = c;
    }
    out.report.notes.push_back("branches: " + std::to_string(branches));
  }
  return out;
}

// ---- routing reductions -------------------------------------------------------

void PathCatalog::validate() const {
  const int np = static_cast<int>(edges_of.size());
  if (static_cast<int>(pair_of.size()) != np || static_cast<int>(weight.size()) != np)
    throw ValidationError("path catalog: parallel arrays disagree");
  if (static_cast<int>(capacity.size()) != n_edges)
    throw ValidationError("path catalog: one capacity per edge required");
  if (np > 64) throw ValidationError("path catalog: at most 64 support paths");
  for (int p = 0; p < np; ++p) {
    if (pair_of[static_cast<size_t>(p)] < 0 || pair_of[static_cast<size_t>(p)] >= n_pairs)
      throw ValidationError("path catalog: pair id out of range");
    if (weight[static_cast<size_t>(p)] < 0 || weight[static_cast<size_t>(p)] > 1 + 1e-9)
      throw ValidationError("path catalog: weights must lie in [0,1]");
    for (int e : edges_of[static_cast<size_t>(p)])
      if (e < 0 || e >= n_edges) throw ValidationError("path catalog: edge id out of range");
  }
  for (double c : capacity)
    if (c < 0) throw ValidationError("path catalog: capacities must be nonnegative");
}

RspReduction rsp_reduce(const PathCatalog& cat) {
  cat.validate();
  const int np = static_cast<int>(cat.edges_of.size());
  std::vector<double> pair_mass(static_cast<size_t>(cat.n_pairs), 0.0);
  for (int p = 0; p < np; ++p)
    pair_mass[static_cast<size_t>(cat.pair_of[static_cast<size_t>(p)])] +=
        cat.weight[static_cast<size_t>(p)];
  std::vector<Subset> parts(static_cast<size_t>(cat.n_pairs), 0);
  for (int p = 0; p < np; ++p)
    parts[static_cast<size_t>(cat.pair_of[static_cast<size_t>(p)])] |= Subset{1} << p;
  for (int i = 0; i < cat.n_pairs; ++i) {
    if (parts[static_cast<size_t>(i)] == 0)
      throw ValidationError("routing: pair " + std::to_string(i) + " has no support path");
    if (pair_mass[static_cast<size_t>(i)] < 1 - 1e-9)
      throw PreconditionError("routing: pair " + std::to_string(i) +
                              " has fractional mass below one");
  }

  RspReduction red{MatroidOracle::partition(np, parts,
                                            std::vector<int>(static_cast<size_t>(cat.n_pairs), 1)),
                   {}, VectorXd::Zero(np)};
  for (int p = 0; p < np; ++p)
    red.y[p] = cat.weight[static_cast<size_t>(p)] /
               pair_mass[static_cast<size_t>(cat.pair_of[static_cast<size_t>(p)])];

  red.degree.resize(static_cast<size_t>(cat.n_edges));
  for (int e = 0; e < cat.n_edges; ++e) {
    auto& c = red.degree[static_cast<size_t>(e)];
    c.a = VectorXd::Zero(np);
    c.b = cat.capacity[static_cast<size_t>(e)];
  }
  for (int p = 0; p < np; ++p)
    for (int e : cat.edges_of[static_cast<size_t>(p)])
      red.degree[static_cast<size_t>(e)].a[p] = 1.0;
  return red;
}

RspResult rsp_run(const PathCatalog& cat, const RoundFullConfig& cfg, uint64_t seed) {
  RspReduction red = rsp_reduce(cat);
  const int np = static_cast<int>(red.y.size());
  auto res = degmat(VectorXd::Zero(np), red.degree, red.matroid, red.y, cfg, seed);
  RspResult out;
  out.report = std::move(res.report);
  out.report.driver = "rsp";
  out.chosen.assign(static_cast<size_t>(cat.n_pairs), -1);
  for (int p = 0; p < np; ++p)
    if ((res.base >> p) & 1u) out.chosen[static_cast<size_t>(cat.pair_of[static_cast<size_t>(p)])] = p;
  return out;
}

LaminarRspResult laminar_rsp(const PathCatalog& cat,
                             const std::vector<LaminarRequirement>& reqs,
                             const RoundFullConfig& cfg, uint64_t seed) {
  cat.validate();
  const int np = static_cast<int>(cat.edges_of.size());
  VectorXd y = VectorXd::Zero(np);
  for (int p = 0; p < np; ++p) y[p] = std::min(1.0, cat.weight[static_cast<size_t>(p)]);

  std::vector<LaminarMember> members;
  std::vector<Subset> req_sets;
  for (const auto& rq : reqs) {
    Subset s = 0;
    for (int pr : rq.pairs) {
      if (pr < 0 || pr >= cat.n_pairs)
        throw ValidationError("laminar routing: pair id out of range");
      for (int p = 0; p < np; ++p)
        if (cat.pair_of[static_cast<size_t>(p)] == pr) s |= Subset{1} << p;
    }
    double mass = subset_sum(y, s);
    if (mass < rq.require - 1e-9)
      throw PreconditionError("laminar routing: fractional mass below the requirement");
    members.push_back({s, mass});
    req_sets.push_back(s);
  }

  StructureSpec structure;
  structure.laminar = LaminarFamily(np, members);  // validates laminarity

  RoundFullConfig run = cfg;
  run.one_sided = true;
  run.completion_ok = [reqs, req_sets](const VectorXd& x) {
    for (size_t t = 0; t < reqs.size(); ++t)
      if (subset_sum(x, req_sets[t]) < reqs[t].require - 1e-9) return false;
    return true;
  };

  std::vector<LinearConstraint> edge_rows(static_cast<size_t>(cat.n_edges));
  for (int e = 0; e < cat.n_edges; ++e) {
    edge_rows[static_cast<size_t>(e)].a = VectorXd::Zero(np);
    edge_rows[static_cast<size_t>(e)].b = cat.capacity[static_cast<size_t>(e)];
  }
  for (int p = 0; p < np; ++p)
    for (int e : cat.edges_of[static_cast<size_t>(p)])
      edge_rows[static_cast<size_t>(e)].a[p] = 1.0;

  auto res = round_full(y, edge_rows, structure, run, seed);
  LaminarRspResult out;
  out.report = std::move(res.report);
  out.report.driver = "laminar-rsp";
  for (int p = 0; p < np; ++p)
    if (res.x[p] > 0.5) out.chosen.push_back(p);
  return out;
}

}  // namespace discround
