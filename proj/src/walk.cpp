#include "discround/walk.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

namespace discround {

// ---- classes and config ----------------------------------------------------

ScaleClasses classify_scales(const VectorXd& y, const ToleranceModel& tol) {
  const int n = static_cast<int>(y.size());
  if (n == 0) throw ValidationError("classify_scales: empty point");
  ScaleClasses sc;
  sc.n = n;
  sc.ell = std::max(1, 3 * static_cast<int>(std::ceil(std::log2(std::max(n, 2)))));
  sc.s.resize(n);
  sc.level.resize(static_cast<size_t>(n));
  sc.side.resize(static_cast<size_t>(n));
  sc.frozen.resize(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    double yi = y[i];
    if (yi < -tol.eps_feas || yi > 1 + tol.eps_feas)
      throw PreconditionError("classify_scales: coordinate " + std::to_string(i) +
                              " outside [0,1]");
    yi = std::clamp(yi, 0.0, 1.0);
    bool low = yi <= 0.5;
    sc.side[static_cast<size_t>(i)] = low ? +1 : -1;
    double dist = low ? yi : 1 - yi;
    if (dist <= tol.eps_tight) {
      sc.frozen[static_cast<size_t>(i)] = 1;
      sc.level[static_cast<size_t>(i)] = sc.ell;
      sc.s[i] = std::ldexp(1.0, -sc.ell);
      continue;
    }
    int k = 1;
    while (k < sc.ell && dist <= std::ldexp(1.0, -(k + 1))) ++k;
    sc.frozen[static_cast<size_t>(i)] = 0;
    sc.level[static_cast<size_t>(i)] = k;
    sc.s[i] = std::ldexp(1.0, -k);
    ++sc.n_fractional;
  }
  return sc;
}

WalkConfig WalkConfig::practical() { return WalkConfig{}; }

WalkConfig WalkConfig::paper(int n) {
  WalkConfig cfg;
  cfg.alpha = 40.0;
  cfg.gamma = std::pow(std::max(n, 2), -6.0);
  return cfg;
}

void WalkConfig::validate() const {
  if (!(gamma > 0 && gamma <= 1)) throw ValidationError("walk config: gamma must be in (0,1]");
  if (!(alpha >= 2)) throw ValidationError("walk config: alpha must be at least 2");
  if (!(k0 >= 1)) throw ValidationError("walk config: k0 must be at least 1");
  if (!(stop_fraction > 0 && stop_fraction <= 1))
    throw ValidationError("walk config: stop_fraction must be in (0,1]");
  if (restarts < 1) throw ValidationError("walk config: needs at least one attempt");
  if (structure_check_every < 1 || audit_every < 1)
    throw ValidationError("walk config: audit cadences must be positive");
  if (!(slack_exponent >= 1)) throw ValidationError("walk config: slack exponent below 1");
  tol.validate();
}

uint64_t WalkConfig::effective_max_steps() const {
  if (max_steps > 0) return max_steps;
  double t = std::ceil(10.0 * alpha * alpha / (gamma * gamma));
  return static_cast<uint64_t>(std::min(t, 4.6e18));
}

double potential(const VectorXd& x, const ScaleClasses& classes) {
  double phi = 0;
  for (int i = 0; i < classes.n; ++i) {
    double base = std::ldexp(1.0, classes.level[static_cast<size_t>(i)]);  // 2^k
    double dev = classes.side[static_cast<size_t>(i)] > 0 ? x[i] : 1 - x[i];
    phi += base * base * dev * dev;
  }
  return phi;
}

bool check_lambda_condition(const std::vector<double>& lambdas, int f, double k0) {
  double sum = 0;
  for (double l : lambdas) {
    if (std::isinf(l)) continue;
    sum += std::exp(-l * l / k0);
  }
  return sum < f / 16.0;
}

// ---- polytope --------------------------------------------------------------

QPolytope build_polytope(const VectorXd& y, std::vector<SideConstraint> side,
                         const StructureSpec& structure, const WalkConfig& cfg) {
  cfg.validate();
  const int n = static_cast<int>(y.size());
  QPolytope q;
  q.n = n;
  q.y = y;
  q.classes = classify_scales(y, cfg.tol);

  q.lower.resize(n);
  q.upper.resize(n);
  for (int i = 0; i < n; ++i) {
    if (q.classes.frozen[static_cast<size_t>(i)]) {
      double v = y[i] <= 0.5 ? 0.0 : 1.0;
      q.lower[i] = q.upper[i] = v;
    } else if (q.classes.side[static_cast<size_t>(i)] > 0) {
      q.lower[i] = 0.0;
      q.upper[i] = std::min(cfg.alpha * q.classes.s[i], 1.0);
    } else {
      q.lower[i] = std::max(1.0 - cfg.alpha * q.classes.s[i], 0.0);
      q.upper[i] = 1.0;
    }
  }

  // class-sum rows over the fractional coordinates, one per nonempty class
  std::map<std::pair<int, int>, std::vector<int>> groups;  // (side, level) -> coords
  for (int i = 0; i < n; ++i)
    if (!q.classes.frozen[static_cast<size_t>(i)])
      groups[{q.classes.side[static_cast<size_t>(i)], q.classes.level[static_cast<size_t>(i)]}]
          .push_back(i);
  if (cfg.merge_singleton_classes) {
    std::map<std::pair<int, int>, std::vector<int>> merged;
    for (int sd : {+1, -1}) {
      std::vector<std::pair<int, std::vector<int>>> lane;  // level -> coords, sorted
      for (auto& [key, coords] : groups)
        if (key.first == sd) lane.emplace_back(key.second, coords);
      while (lane.size() > 1) {
        size_t victim = lane.size();
        for (size_t g = 0; g < lane.size(); ++g)
          if (lane[g].second.size() == 1) { victim = g; break; }
        if (victim == lane.size()) break;
        size_t prev = victim > 0 ? victim - 1 : victim + 1;
        size_t next = victim + 1 < lane.size() ? victim + 1 : victim - 1;
        size_t host = std::abs(lane[prev].first - lane[victim].first) <=
                              std::abs(lane[next].first - lane[victim].first)
                          ? prev
                          : next;
        lane[host].second.push_back(lane[victim].second[0]);
        lane.erase(lane.begin() + static_cast<ptrdiff_t>(victim));
      }
      for (auto& [lvl, coords] : lane) {
        std::sort(coords.begin(), coords.end());
        merged[{sd, lvl}] = std::move(coords);
      }
    }
    groups = std::move(merged);
  }
  int extra_rows = (structure.base ? 1 : 0) +
                   (structure.laminar ? static_cast<int>(structure.laminar->members().size()) : 0);
  q.eq_rows = MatrixXd::Zero(static_cast<Eigen::Index>(groups.size()) + extra_rows, n);
  q.eq_rhs = VectorXd::Zero(q.eq_rows.rows());
  Eigen::Index row = 0;
  for (auto& [key, coords] : groups) {
    double rhs = 0;
    for (int i : coords) {
      q.eq_rows(row, i) = 1.0;
      rhs += y[i];
    }
    q.eq_rhs[row] = rhs;
    ++row;
  }

  if (structure.matroid) {
    if (structure.matroid->ground_size() != n)
      throw ValidationError("structure matroid ground size differs from the point dimension");
    if (!structure.matroid->separate(y, cfg.tol).inside)
      throw PreconditionError("starting point outside the matroid polytope");
    q.matroid = structure.matroid;
  }
  if (structure.base) {
    if (!q.matroid) throw ValidationError("base equality requires a matroid");
    double r = q.matroid->full_rank();
    if (std::abs(y.sum() - r) > cfg.tol.eps_feas * (1 + r))
      throw PreconditionError("starting point is not in the base polytope");
    q.eq_rows.row(row).setOnes();
    q.eq_rhs[row] = r;
    ++row;
    q.base_equality = true;
  }
  if (structure.laminar) {
    if (structure.laminar->ground_size() != n)
      throw ValidationError("laminar family ground size differs from the point dimension");
    for (auto& m : structure.laminar->members()) {
      double v = subset_sum(y, m.set);
      if (std::abs(v - m.value) > cfg.tol.eps_feas * (1 + std::abs(m.value)))
        throw PreconditionError("laminar member is not tight at the starting point");
      Subset t = m.set;
      while (t) {
        int i = __builtin_ctzll(t);
        t &= t - 1;
        q.eq_rows(row, i) = 1.0;
      }
      q.eq_rhs[row] = m.value;
      ++row;
    }
    q.laminar = structure.laminar;
  }

  double nc = std::pow(static_cast<double>(n), cfg.slack_exponent);
  int bounded = 0;
  for (auto& sc : side) {
    if (sc.a.size() != n) throw ValidationError("side constraint dimension mismatch");
    if (std::isnan(sc.lambda) || sc.lambda < 0)
      throw ValidationError("side constraint lambda must be nonnegative");
    sc.w_scaled = (sc.a.array().square() * q.classes.s.array().square()).sum();
    sc.w_y = 0;
    for (int i = 0; i < n; ++i) {
      double d = std::min(y[i], 1 - y[i]);
      sc.w_y += sc.a[i] * sc.a[i] * d * d;
    }
    sc.slack = sc.a.norm() / nc;
    if (std::isinf(sc.lambda)) {
      sc.width = kUnboundedLambda;
    } else {
      sc.width = std::min(sc.lambda, static_cast<double>(n)) * std::sqrt(sc.w_scaled) + sc.slack;
      ++bounded;
    }
  }
  q.side = std::move(side);

  q.counts.structure = (q.matroid ? 1 : 0) + (q.base_equality ? 1 : 0) +
                       (q.laminar ? static_cast<int>(q.laminar->members().size()) : 0);
  q.counts.side = bounded;
  q.counts.cls = 2 * q.classes.ell;
  q.counts.box = 2 * n;
  return q;
}

// ---- walk state ------------------------------------------------------------

WalkState::WalkState(const QPolytope& q, const WalkConfig& cfg, uint64_t seed, uint64_t stream)
    : q_(&q), cfg_(cfg), rng_(seed, stream) {
  const int n = q.n;
  x_ = q.y;
  pinned_.assign(static_cast<size_t>(n), 0);
  for (int i = 0; i < n; ++i) {
    if (q.classes.frozen[static_cast<size_t>(i)]) {
      pinned_[static_cast<size_t>(i)] = 1;
      x_[i] = q.lower[i];  // exact 0 or 1
    }
  }
  side_tight_.assign(q.side.size(), 0);
  side_val_ = VectorXd::Zero(static_cast<Eigen::Index>(q.side.size()));
  refresh_side_values();

  if (q.matroid) {
    TightChain chain = q.matroid->tight_chain(x_, cfg_.tol);
    for (auto& ts : chain) rank_rows_.push_back(ts.set);
    stats.rank_seeded = static_cast<int>(chain.size());
  }
  var_stop_target_ = std::max(1, static_cast<int>(std::ceil(cfg_.stop_fraction *
                                                            q.classes.n_fractional)));
}

void WalkState::refresh_side_values() {
  for (size_t j = 0; j < q_->side.size(); ++j)
    side_val_[static_cast<Eigen::Index>(j)] = q_->side[j].a.dot(x_ - q_->y);
  steps_since_refresh_ = 0;
}

void WalkState::rebuild_basis() {
  const int n = q_->n;
  std::vector<int> free;
  for (int i = 0; i < n; ++i)
    if (!pinned_[static_cast<size_t>(i)]) free.push_back(i);
  const int nf = static_cast<int>(free.size());
  if (nf == 0) {
    basis_ = MatrixXd::Zero(n, 0);
    basis_dirty_ = false;
    return;
  }

  Eigen::Index rows = q_->eq_rows.rows() + static_cast<Eigen::Index>(rank_rows_.size());
  for (size_t j = 0; j < q_->side.size(); ++j)
    if (side_tight_[j]) ++rows;

  // constraint rows restricted to free coordinates in the scaled geometry
  MatrixXd R = MatrixXd::Zero(rows, nf);
  Eigen::Index r = 0;
  for (Eigen::Index e = 0; e < q_->eq_rows.rows(); ++e, ++r)
    for (int c = 0; c < nf; ++c)
      R(r, c) = q_->eq_rows(e, free[static_cast<size_t>(c)]) * q_->classes.s[free[static_cast<size_t>(c)]];
  for (size_t j = 0; j < q_->side.size(); ++j) {
    if (!side_tight_[j]) continue;
    for (int c = 0; c < nf; ++c)
      R(r, c) = q_->side[j].a[free[static_cast<size_t>(c)]] * q_->classes.s[free[static_cast<size_t>(c)]];
    ++r;
  }
  for (Subset s : rank_rows_) {
    for (int c = 0; c < nf; ++c)
      if ((s >> free[static_cast<size_t>(c)]) & 1u) R(r, c) = q_->classes.s[free[static_cast<size_t>(c)]];
    ++r;
  }

  MatrixXd nb = orthonormal_nullspace_basis(R, cfg_.tol);
  basis_ = MatrixXd::Zero(n, nb.cols());
  for (int c = 0; c < nf; ++c) basis_.row(free[static_cast<size_t>(c)]) = nb.row(c);
  basis_dirty_ = false;
}

int WalkState::free_dimension() {
  if (basis_dirty_) rebuild_basis();
  return static_cast<int>(basis_.cols());
}

VectorXd WalkState::random_direction() {
  if (basis_dirty_) rebuild_basis();
  const Eigen::Index dim = basis_.cols();
  VectorXd g(dim);
  for (Eigen::Index h = 0; h < dim; ++h) g[h] = rng_.next_sign();
  VectorXd G = basis_ * g;
  return q_->classes.s.cwiseProduct(G);
}

bool WalkState::var_target_reached() const { return stats.var_registered >= var_stop_target_; }

void WalkState::register_coordinate(int i, double bound_value) {
  x_[i] = bound_value;
  pinned_[static_cast<size_t>(i)] = 1;
  ++stats.var_registered;
  basis_dirty_ = true;
}

void WalkState::register_side(int j) {
  side_tight_[static_cast<size_t>(j)] = 1;
  ++stats.side_registered;
  basis_dirty_ = true;
}

void WalkState::register_rank(Subset s) {
  rank_rows_.push_back(s);
  ++stats.rank_registered;
  basis_dirty_ = true;
}

double WalkState::apply(const VectorXd& gbar) {
  ++stats.steps;
  ++steps_since_refresh_;
  const int n = q_->n;
  VectorXd delta = cfg_.gamma * gbar;

  enum class Face { None, Coord, Side, Rank };
  Face face = Face::None;
  double mu = 1.0;
  int face_coord = -1;
  double face_bound = 0;
  int face_side = -1;
  double face_side_sign = 0;
  Subset face_rank = 0;

  for (int i = 0; i < n; ++i) {
    if (pinned_[static_cast<size_t>(i)] || delta[i] == 0.0) continue;
    double lim;
    double bound;
    if (delta[i] > 0) {
      bound = q_->upper[i];
      lim = (bound - x_[i]) / delta[i];
    } else {
      bound = q_->lower[i];
      lim = (bound - x_[i]) / delta[i];
    }
    if (lim < mu) {
      mu = std::max(lim, 0.0);
      face = Face::Coord;
      face_coord = i;
      face_bound = bound;
    }
  }

  VectorXd dside(static_cast<Eigen::Index>(q_->side.size()));
  for (size_t j = 0; j < q_->side.size(); ++j)
    dside[static_cast<Eigen::Index>(j)] = q_->side[j].a.dot(delta);
  for (size_t j = 0; j < q_->side.size(); ++j) {
    const auto& sc = q_->side[j];
    if (side_tight_[j] || std::isinf(sc.width)) continue;
    double du = dside[static_cast<Eigen::Index>(j)];
    if (du == 0.0) continue;
    double target = du > 0 ? sc.width : -sc.width;
    double lim = (target - side_val_[static_cast<Eigen::Index>(j)]) / du;
    if (lim < mu) {
      mu = std::max(lim, 0.0);
      face = Face::Side;
      face_side = static_cast<int>(j);
      face_side_sign = du > 0 ? 1.0 : -1.0;
      face_coord = -1;
    }
  }

  if (q_->matroid) {
    auto lim = q_->matroid->max_feasible_step(x_, delta, mu, cfg_.tol, /*assume_feasible=*/true);
    if (lim.bounded && lim.mu < mu) {
      mu = lim.mu;
      face = Face::Rank;
      face_rank = lim.tight_set;
      face_coord = -1;
      face_side = -1;
    }
  }

  x_ += mu * delta;
  side_val_ += mu * dside;
  if (steps_since_refresh_ >= 512) refresh_side_values();

  switch (face) {
    case Face::None:
      break;
    case Face::Coord:
      register_coordinate(face_coord, face_bound);
      break;
    case Face::Side:
      side_val_[face_side] = face_side_sign * q_->side[static_cast<size_t>(face_side)].width;
      register_side(face_side);
      break;
    case Face::Rank:
      register_rank(face_rank);
      break;
  }
  if (mu < 1.0) ++stats.truncations;
  if (cfg_.step_observer) cfg_.step_observer(mu * delta);
  return mu;
}

void WalkState::audit() const {
  const int n = q_->n;
  for (int i = 0; i < n; ++i)
    if (x_[i] < q_->lower[i] - cfg_.tol.eps_feas || x_[i] > q_->upper[i] + cfg_.tol.eps_feas)
      throw ConvergenceError("walk audit: box violated at coordinate " + std::to_string(i));
  if (q_->eq_rows.rows() > 0) {
    VectorXd resid = q_->eq_rows * x_ - q_->eq_rhs;
    for (Eigen::Index r = 0; r < resid.size(); ++r)
      if (std::abs(resid[r]) > cfg_.tol.eps_feas * (1 + std::abs(q_->eq_rhs[r])))
        throw ConvergenceError("walk audit: equality row drifted");
  }
  for (size_t j = 0; j < q_->side.size(); ++j) {
    const auto& sc = q_->side[j];
    if (std::isinf(sc.width)) continue;
    double u = sc.a.dot(x_ - q_->y);
    if (std::abs(u) > sc.width + cfg_.tol.eps_feas * (1 + sc.width))
      throw ConvergenceError("walk audit: side band violated");
  }
  if (q_->matroid && !q_->matroid->separate(x_, cfg_.tol).inside)
    throw ConvergenceError("walk audit: matroid polytope violated");
  double cap = cfg_.alpha * cfg_.alpha * q_->classes.n_fractional + cfg_.tol.eps_feas;
  if (potential(x_, q_->classes) > cap)
    throw ConvergenceError("walk audit: potential exceeded its cap");
}

// ---- driver ----------------------------------------------------------------

PartialRoundResult partial_round(const VectorXd& y, std::vector<SideConstraint> side,
                                 const StructureSpec& structure, const WalkConfig& cfg,
                                 uint64_t seed) {
  cfg.validate();
  QPolytope q = build_polytope(y, std::move(side), structure, cfg);
  const int f = q.classes.n_fractional;

  PartialRoundResult best;
  best.n_fractional_start = f;

  auto finalize = [&](VectorXd x, int attempts, const WalkStats& stats) {
    PartialRoundResult r;
    r.x = snap_to_feasible(x, q.lower, q.upper, q.eq_rows, q.eq_rhs, cfg.tol);
    r.attempts = attempts;
    r.stats = stats;
    r.n_fractional_start = f;
    for (int i = 0; i < q.n; ++i)
      if (!q.classes.frozen[static_cast<size_t>(i)] && (r.x[i] == 0.0 || r.x[i] == 1.0))
        ++r.new_integral;
    r.side_values.resize(q.side.size());
    for (size_t j = 0; j < q.side.size(); ++j) r.side_values[j] = q.side[j].a.dot(r.x - q.y);
    return r;
  };

  if (f == 0) {
    best = finalize(y, 0, WalkStats{});
    best.success = true;
    return best;
  }

  std::vector<double> lambdas;
  for (auto& sc : q.side) lambdas.push_back(sc.lambda);
  if (!check_lambda_condition(lambdas, f, cfg.k0))
    throw PreconditionError("width condition fails: sum exp(-lambda^2/k0) must stay below f/16");

  int success_target = cfg.min_new_integral >= 0
                           ? cfg.min_new_integral
                           : std::max(1, static_cast<int>(std::ceil(
                                             (cfg.stop_fraction - 1.0 / cfg.alpha) * f)));
  success_target = std::min(success_target, f);

  const uint64_t max_steps = cfg.effective_max_steps();
  for (int attempt = 0; attempt < cfg.restarts; ++attempt) {
    WalkState ws(q, cfg, seed, static_cast<uint64_t>(attempt));
    while (true) {
      if (ws.var_target_reached()) {
        ws.stats.status = WalkStatus::VarTargetReached;
        break;
      }
      if (ws.free_dimension() == 0) {
        ws.stats.status = WalkStatus::DimensionExhausted;
        break;
      }
      if (ws.stats.steps >= max_steps) {
        ws.stats.status = WalkStatus::StepBudget;
        break;
      }
      ws.apply(ws.random_direction());
#ifndef NDEBUG
      ws.audit();
#else
      if (ws.stats.steps % static_cast<uint64_t>(cfg.audit_every) == 0) ws.audit();
#endif
      if (q.matroid && ws.stats.steps % static_cast<uint64_t>(cfg.structure_check_every) == 0) {
        if (!q.matroid->separate(ws.x(), cfg.tol).inside)
          throw ConvergenceError("structure audit: matroid polytope violated");
      }
    }
    ws.audit();
    PartialRoundResult r = finalize(ws.x(), attempt + 1, ws.stats);
    r.success = r.new_integral >= success_target;
    if (r.success) return r;
    if (attempt == 0 || r.new_integral > best.new_integral) best = r;
  }
  return best;
}

}  // namespace discround
