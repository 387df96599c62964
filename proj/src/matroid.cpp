#include "discround/matroid.hpp"

#include <algorithm>
#include <numeric>
#include <string>
#include <unordered_set>

namespace discround {

namespace {

constexpr int kTableCap = 20;  // 2^n enumeration bound for graphic/explicit

Subset ground_mask(int n) { return n == 64 ? ~0ull : ((1ull << n) - 1); }

struct UnionFind {
  std::vector<int> p;
  explicit UnionFind(int n) : p(n) { std::iota(p.begin(), p.end(), 0); }
  int find(int a) { return p[a] == a ? a : p[a] = find(p[a]); }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    p[a] = b;
    return true;
  }
};

// new index of element i once only the bits of `keep` survive
int compressed_index(Subset keep, int i) {
  return subset_size(keep & ((1ull << i) - 1));
}

Subset compress_set(Subset s, Subset keep) {
  Subset out = 0;
  Subset t = s & keep;
  while (t) {
    int i = __builtin_ctzll(t);
    out |= 1ull << compressed_index(keep, i);
    t &= t - 1;
  }
  return out;
}

}  // namespace

// ---- construction ----------------------------------------------------------

void MatroidOracle::finish_init() {
  switch (kind_) {
    case Kind::Uniform:
      full_rank_ = uniform_rank_;
      // closed-form separation treats a uniform matroid as one big part
      parts_.clear();
      caps_.clear();
      if (n_ > 0) {
        parts_.push_back(ground_mask(n_));
        caps_.push_back(uniform_rank_);
      }
      break;
    case Kind::Partition:
      full_rank_ = 0;
      for (size_t p = 0; p < parts_.size(); ++p)
        full_rank_ += std::min(caps_[p], subset_size(parts_[p]));
      break;
    case Kind::Graphic: {
      UnionFind uf(n_vertices_);
      full_rank_ = 0;
      for (auto& e : edges_)
        if (uf.unite(e.first, e.second)) ++full_rank_;
      break;
    }
    case Kind::Explicit:
      full_rank_ = bases_.empty() ? 0 : subset_size(bases_[0]);
      break;
  }
}

MatroidOracle MatroidOracle::uniform(int n, int rank) {
  if (n < 0 || n > 64) throw ValidationError("matroid ground set must have 0..64 elements");
  if (rank < 0 || rank > n) throw ValidationError("uniform matroid rank out of range");
  MatroidOracle m;
  m.kind_ = Kind::Uniform;
  m.n_ = n;
  m.uniform_rank_ = rank;
  m.finish_init();
  return m;
}

MatroidOracle MatroidOracle::partition(int n, std::vector<Subset> parts, std::vector<int> caps) {
  if (n < 0 || n > 64) throw ValidationError("matroid ground set must have 0..64 elements");
  if (parts.size() != caps.size()) throw ValidationError("partition matroid: one capacity per part");
  Subset covered = 0;
  for (size_t p = 0; p < parts.size(); ++p) {
    if (parts[p] & ~ground_mask(n)) throw ValidationError("partition matroid: part outside ground set");
    if (parts[p] & covered) throw ValidationError("partition matroid: parts overlap");
    if (caps[p] < 0) throw ValidationError("partition matroid: negative capacity");
    covered |= parts[p];
  }
  MatroidOracle m;
  m.kind_ = Kind::Partition;
  m.n_ = n;
  // normalize: drop empty parts, clamp capacities, make uncovered elements free singletons
  for (size_t p = 0; p < parts.size(); ++p) {
    if (!parts[p]) continue;
    m.parts_.push_back(parts[p]);
    m.caps_.push_back(std::min(caps[p], subset_size(parts[p])));
  }
  Subset rest = ground_mask(n) & ~covered;
  while (rest) {
    int i = __builtin_ctzll(rest);
    m.parts_.push_back(1ull << i);
    m.caps_.push_back(1);
    rest &= rest - 1;
  }
  m.finish_init();
  return m;
}

MatroidOracle MatroidOracle::graphic(int n_vertices, std::vector<std::pair<int, int>> edges) {
  if (n_vertices < 0) throw ValidationError("graphic matroid: negative vertex count");
  if (edges.size() > 64) throw ValidationError("matroid ground set must have 0..64 elements");
  for (auto& e : edges)
    if (e.first < 0 || e.first >= n_vertices || e.second < 0 || e.second >= n_vertices)
      throw ValidationError("graphic matroid: edge endpoint out of range");
  MatroidOracle m;
  m.kind_ = Kind::Graphic;
  m.n_ = static_cast<int>(edges.size());
  m.n_vertices_ = n_vertices;
  m.edges_ = std::move(edges);
  m.finish_init();
  return m;
}

MatroidOracle MatroidOracle::explicit_bases(int n, std::vector<Subset> bases) {
  if (n < 0 || n > kTableCap)
    throw ValidationError("explicit matroid: ground set capped at 20 elements");
  if (bases.empty()) throw ValidationError("explicit matroid: needs at least one base");
  std::sort(bases.begin(), bases.end());
  bases.erase(std::unique(bases.begin(), bases.end()), bases.end());
  int sz = subset_size(bases[0]);
  for (Subset b : bases) {
    if (b & ~ground_mask(n)) throw ValidationError("explicit matroid: base outside ground set");
    if (subset_size(b) != sz) throw ValidationError("explicit matroid: bases differ in size");
  }
  // spot-check the base exchange axiom so non-matroid inputs fail loudly
  std::unordered_set<Subset> lookup(bases.begin(), bases.end());
  size_t pair_budget = 6000;
  for (size_t a = 0; a < bases.size() && pair_budget; ++a) {
    for (size_t b = 0; b < bases.size() && pair_budget; ++b) {
      if (a == b) continue;
      --pair_budget;
      Subset only_a = bases[a] & ~bases[b];
      Subset t = only_a;
      while (t) {
        int x = __builtin_ctzll(t);
        t &= t - 1;
        bool ok = false;
        Subset cand = bases[b] & ~bases[a];
        while (cand && !ok) {
          int y = __builtin_ctzll(cand);
          cand &= cand - 1;
          ok = lookup.count((bases[a] & ~(1ull << x)) | (1ull << y)) > 0;
        }
        if (!ok) throw ValidationError("explicit matroid: base exchange axiom fails");
      }
    }
  }
  MatroidOracle m;
  m.kind_ = Kind::Explicit;
  m.n_ = n;
  m.bases_ = std::move(bases);
  m.finish_init();
  return m;
}

// ---- rank / independence ---------------------------------------------------

bool MatroidOracle::is_independent(Subset s) const {
  if (s & ~ground_mask(n_)) throw ValidationError("subset outside ground set");
  switch (kind_) {
    case Kind::Uniform:
      return subset_size(s) <= uniform_rank_;
    case Kind::Partition:
      for (size_t p = 0; p < parts_.size(); ++p)
        if (subset_size(s & parts_[p]) > caps_[p]) return false;
      return true;
    case Kind::Graphic: {
      UnionFind uf(n_vertices_);
      Subset t = s;
      while (t) {
        int e = __builtin_ctzll(t);
        t &= t - 1;
        if (!uf.unite(edges_[e].first, edges_[e].second)) return false;
      }
      return true;
    }
    case Kind::Explicit:
      for (Subset b : bases_)
        if ((s & ~b) == 0) return true;
      return false;
  }
  return false;
}

int MatroidOracle::rank(Subset s) const {
  if (s & ~ground_mask(n_)) throw ValidationError("subset outside ground set");
  switch (kind_) {
    case Kind::Uniform:
      return std::min(subset_size(s), uniform_rank_);
    case Kind::Partition: {
      int r = 0;
      for (size_t p = 0; p < parts_.size(); ++p)
        r += std::min(subset_size(s & parts_[p]), caps_[p]);
      return r;
    }
    case Kind::Graphic: {
      UnionFind uf(n_vertices_);
      int r = 0;
      Subset t = s;
      while (t) {
        int e = __builtin_ctzll(t);
        t &= t - 1;
        if (uf.unite(edges_[e].first, edges_[e].second)) ++r;
      }
      return r;
    }
    case Kind::Explicit: {
      // any independent subset extends to a base, so rank(S) = max_b |S & b|
      int r = 0;
      for (Subset b : bases_) r = std::max(r, subset_size(s & b));
      return r;
    }
  }
  return 0;
}

const std::vector<uint8_t>& MatroidOracle::rank_table() const {
  if (!rank_table_.empty()) return rank_table_;
  if (n_ > kTableCap)
    throw ValidationError("exact subset enumeration needs a ground set of at most 20 elements");
  size_t size = 1ull << n_;
  rank_table_.resize(size);
  for (size_t s = 0; s < size; ++s) rank_table_[s] = static_cast<uint8_t>(rank(s));
  return rank_table_;
}

// ---- separation ------------------------------------------------------------

MatroidOracle::Separation MatroidOracle::separate_closed_form(const VectorXd& x) const {
  // per part: sorted prefix sums give the worst subset of each size; the
  // overall worst set is the union across parts because rank is additive
  double total_pos = 0;
  Subset pos_union = 0;
  double best_single = -1e300;
  Subset best_single_set = 0;

  std::vector<std::pair<double, int>> items;
  for (size_t p = 0; p < parts_.size(); ++p) {
    items.clear();
    Subset t = parts_[p];
    while (t) {
      int i = __builtin_ctzll(t);
      t &= t - 1;
      items.push_back({x[i], i});
    }
    std::sort(items.begin(), items.end(), [](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first > b.first;
      return a.second < b.second;
    });
    double pre = 0, part_best = -1e300;
    Subset run = 0, part_arg = 0;
    for (size_t q = 0; q < items.size(); ++q) {
      pre += items[q].first;
      run |= 1ull << items[q].second;
      double v = pre - std::min(static_cast<int>(q) + 1, caps_[p]);
      if (v > part_best) {
        part_best = v;
        part_arg = run;
      }
    }
    if (part_best > 1e-15) {
      total_pos += part_best;
      pos_union |= part_arg;
    }
    if (part_best > best_single) {
      best_single = part_best;
      best_single_set = part_arg;
    }
  }

  Separation out;
  if (pos_union) {
    out.violation = total_pos;
    out.set = pos_union;
  } else {
    out.violation = best_single;
    out.set = best_single_set;
  }
  return out;
}

MatroidOracle::Separation MatroidOracle::separate_table(const VectorXd& x) const {
  const auto& rt = rank_table();
  size_t size = 1ull << n_;
  std::vector<double> xs(size, 0.0);
  Separation out;
  out.violation = -1e300;
  out.set = 0;
  for (size_t s = 1; s < size; ++s) {
    int i = __builtin_ctzll(s);
    xs[s] = xs[s & (s - 1)] + x[i];
    double v = xs[s] - rt[s];
    if (v > out.violation) {
      out.violation = v;
      out.set = s;
    }
  }
  return out;
}

MatroidOracle::Separation MatroidOracle::separate(const VectorXd& x,
                                                  const ToleranceModel& tol) const {
  if (x.size() != n_) throw ValidationError("separate: point dimension mismatch");
  for (int i = 0; i < n_; ++i)
    if (x[i] < -tol.eps_feas)
      throw PreconditionError("separate: point has negative coordinate " + std::to_string(i));
  if (n_ == 0) return {true, 0, 0.0};
  Separation out = has_closed_form() ? separate_closed_form(x) : separate_table(x);
  out.inside = out.violation <= tol.eps_feas;
  return out;
}

// ---- max feasible step -----------------------------------------------------

MatroidOracle::StepLimit MatroidOracle::max_feasible_step(const VectorXd& x, const VectorXd& d,
                                                          double mu_cap,
                                                          const ToleranceModel& tol,
                                                          bool assume_feasible) const {
  if (x.size() != n_ || d.size() != n_)
    throw ValidationError("max_feasible_step: dimension mismatch");
  if (mu_cap < 0) throw ValidationError("max_feasible_step: negative cap");
  if (!assume_feasible) {
    Separation s0 = separate(x, tol);
    if (!s0.inside) throw PreconditionError("max_feasible_step: starting point infeasible");
  }
  if (d.cwiseAbs().maxCoeff() == 0.0) return {mu_cap, false, 0};

  if (!has_closed_form()) {
    const auto& rt = rank_table();
    size_t size = 1ull << n_;
    std::vector<double> xs(size, 0.0), ds(size, 0.0);
    StepLimit out{mu_cap, false, 0};
    for (size_t s = 1; s < size; ++s) {
      int i = __builtin_ctzll(s);
      xs[s] = xs[s & (s - 1)] + x[i];
      ds[s] = ds[s & (s - 1)] + d[i];
      if (ds[s] > 1e-12) {
        double bound = (rt[s] - xs[s]) / ds[s];
        if (bound < out.mu) {
          out.mu = std::max(bound, 0.0);
          out.bounded = true;
          out.tight_set = s;
        }
      }
    }
    return out;
  }

  // coordinate bounds are the caller's job; clamp fp dust below zero so the
  // inner separation calls stay legal
  auto sep_at = [&](double mu) { return separate((x + mu * d).cwiseMax(0.0).eval(), tol); };
  if (sep_at(mu_cap).inside) return {mu_cap, false, 0};
  double lo = 0, hi = mu_cap;
  for (int it = 0; it < 80; ++it) {
    double mid = 0.5 * (lo + hi);
    if (sep_at(mid).inside)
      lo = mid;
    else
      hi = mid;
  }
  Subset face = sep_at(hi).set;
  double mu = hi;
  for (int guard = 0; guard < 64; ++guard) {
    double dS = subset_sum(d, face);
    if (dS > 1e-14) {
      double exact = (rank(face) - subset_sum(x, face)) / dS;
      mu = std::min(mu, std::max(exact, 0.0));
    } else {
      mu = lo;  // face detection degenerate; fall back to the bracketed value
      break;
    }
    Separation chk = sep_at(mu);
    if (chk.inside) break;
    face = chk.set;
  }
  return {std::min(mu, mu_cap), true, face};
}

// ---- tight chain -----------------------------------------------------------

TightChain MatroidOracle::tight_chain(const VectorXd& x, const ToleranceModel& tol) const {
  if (x.size() != n_) throw ValidationError("tight_chain: point dimension mismatch");
  for (int i = 0; i < n_; ++i)
    if (x[i] < -tol.eps_feas || x[i] > 1 + tol.eps_feas)
      throw PreconditionError("tight_chain: point outside the unit box");
  if (!separate(x, tol).inside)
    throw PreconditionError("tight_chain: point outside the matroid polytope");

  // minimal tight set containing each element ("principal" sets); every tight
  // set is a union of these, so a nested family spanning them spans all
  std::vector<Subset> principal(static_cast<size_t>(n_), 0);

  if (has_closed_form()) {
    for (size_t p = 0; p < parts_.size(); ++p) {
      double xp = subset_sum(x, parts_[p]);
      bool part_tight = xp >= caps_[p] - tol.eps_tight * (1 + caps_[p]);
      Subset positives = 0;
      Subset t = parts_[p];
      while (t) {
        int i = __builtin_ctzll(t);
        t &= t - 1;
        if (x[i] > tol.eps_tight) positives |= 1ull << i;
      }
      t = parts_[p];
      while (t) {
        int i = __builtin_ctzll(t);
        t &= t - 1;
        if (x[i] >= 1 - tol.eps_tight) {
          principal[i] = 1ull << i;
        } else if (part_tight) {
          Subset s = positives | (1ull << i);
          if (subset_size(s) >= caps_[p]) principal[i] = s;
        }
      }
    }
  } else {
    const auto& rt = rank_table();
    size_t size = 1ull << n_;
    std::vector<double> xs(size, 0.0);
    for (size_t s = 1; s < size; ++s) {
      int i = __builtin_ctzll(s);
      xs[s] = xs[s & (s - 1)] + x[i];
      if (xs[s] >= rt[s] - tol.eps_tight * (1 + rt[s])) {
        Subset t = s;
        while (t) {
          int j = __builtin_ctzll(t);
          t &= t - 1;
          principal[j] = principal[j] ? (principal[j] & s) : s;
        }
      }
    }
  }

  std::vector<Subset> distinct;
  for (int i = 0; i < n_; ++i)
    if (principal[i]) distinct.push_back(principal[i]);
  std::sort(distinct.begin(), distinct.end(), [](Subset a, Subset b) {
    int sa = subset_size(a), sb = subset_size(b);
    if (sa != sb) return sa < sb;
    return a < b;
  });
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());

  TightChain chain;
  Subset acc = 0;
  for (Subset s : distinct) {
    acc |= s;
    if (!chain.empty() && chain.back().set == acc) continue;
    chain.push_back({acc, rank(acc)});
  }
  return chain;
}

// ---- base decomposition ----------------------------------------------------

std::vector<MatroidOracle::WeightedBase> MatroidOracle::base_decompose(
    const VectorXd& x, const ToleranceModel& tol) const {
  if (x.size() != n_) throw ValidationError("base_decompose: point dimension mismatch");
  if (!separate(x, tol).inside)
    throw PreconditionError("base_decompose: point outside the matroid polytope");
  if (std::abs(x.sum() - full_rank_) > tol.eps_feas * (1 + full_rank_))
    throw PreconditionError("base_decompose: point is not in the base polytope");

  VectorXd z = x.cwiseMax(0.0);
  double W = 1.0;
  std::vector<WeightedBase> out;
  int stalls = 0;

  for (int iter = 0; iter < 4 * n_ + 8 && W > 1e-12; ++iter) {
    // Rounding dust of fixed size in z is magnified by 1/W once most of the
    // mass is peeled; widen the tolerance accordingly so the separation
    // oracle keeps accepting the rescaled residual.
    ToleranceModel eff = tol;
    eff.eps_feas = std::min(1e-4, tol.eps_feas / std::min(1.0, std::max(W, 1e-9)));
    eff.eps_tight = std::max(eff.eps_tight, eff.eps_feas);
    // Pick a base of the minimal face containing z/W: fill the tight chain
    // sets first (heaviest residual first inside each level).  Saturating the
    // chain saturates every tight set, which keeps the peel weight positive.
    VectorXd y = (z / W).cwiseMin(1.0).cwiseMax(0.0);
    TightChain chain = tight_chain(y, eff);
    std::vector<int> level(static_cast<size_t>(n_), n_ + 1);
    for (int q = static_cast<int>(chain.size()) - 1; q >= 0; --q) {
      Subset t = chain[static_cast<size_t>(q)].set;
      while (t) {
        int i = __builtin_ctzll(t);
        t &= t - 1;
        level[static_cast<size_t>(i)] = q;
      }
    }
    std::vector<int> order(static_cast<size_t>(n_));
    std::iota(order.begin(), order.end(), 0);
    bool flip = stalls > 0;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      if (level[a] != level[b]) return level[a] < level[b];
      if (z[a] != z[b]) return z[a] > z[b];
      return flip ? a > b : a < b;
    });
    Subset B = 0;
    for (int i : order)
      if (is_independent(B | (1ull << i))) B |= 1ull << i;

    // largest theta with (z - theta*1_B) / (W - theta) still in the base
    // polytope; every rank constraint is linear in theta so the feasible set
    // is an interval
    double theta = W;
    for (int i = 0; i < n_; ++i)
      if ((B >> i) & 1u) theta = std::min(theta, z[i]);

    if (!has_closed_form()) {
      const auto& rt = rank_table();
      size_t size = 1ull << n_;
      std::vector<double> zs(size, 0.0);
      std::vector<int> bc(size, 0);
      for (size_t s = 1; s < size; ++s) {
        int i = __builtin_ctzll(s);
        zs[s] = zs[s & (s - 1)] + z[i];
        bc[s] = bc[s & (s - 1)] + static_cast<int>((B >> i) & 1u);
        int coef = rt[s] - bc[s];
        if (coef > 0) {
          double bound = (W * rt[s] - zs[s]) / coef;
          theta = std::min(theta, std::max(bound, 0.0));
        }
      }
    } else {
      auto feasible = [&](double sigma) {
        double rem = W - sigma;
        if (rem <= 1e-14) {
          double worst = 0;
          for (int i = 0; i < n_; ++i)
            worst = std::max(worst, std::abs(z[i] - sigma * (((B >> i) & 1u) ? 1.0 : 0.0)));
          return worst <= 1e-9;
        }
        VectorXd y(n_);
        for (int i = 0; i < n_; ++i) y[i] = (z[i] - sigma * (((B >> i) & 1u) ? 1.0 : 0.0)) / rem;
        return separate(y.cwiseMax(0.0), eff).inside;
      };
      if (!feasible(theta)) {
        double lo = 0, hi = theta;
        for (int it = 0; it < 70; ++it) {
          double mid = 0.5 * (lo + hi);
          if (feasible(mid))
            lo = mid;
          else
            hi = mid;
        }
        // snap to the face that stops the peel
        double rem = W - hi;
        if (rem > 1e-14) {
          VectorXd y(n_);
          for (int i = 0; i < n_; ++i) y[i] = (z[i] - hi * (((B >> i) & 1u) ? 1.0 : 0.0)) / rem;
          Subset s = separate(y.cwiseMax(0.0), eff).set;
          int coef = rank(s) - subset_size(s & B);
          if (coef > 0) {
            double bound = (W * rank(s) - subset_sum(z, s)) / coef;
            theta = std::min(theta, std::max(bound, 0.0));
          } else {
            theta = lo;
          }
        } else {
          theta = lo;
        }
        if (!feasible(theta)) theta = lo;
      }
    }

    if (theta < 1e-13) {
      if (++stalls > 2) throw ConvergenceError("base_decompose: peeling stalled");
      continue;
    }
    stalls = 0;
    out.push_back({B, theta});
    for (int i = 0; i < n_; ++i)
      if ((B >> i) & 1u) z[i] = std::max(z[i] - theta, 0.0);
    W -= theta;
  }

  if (W > 1e-9) throw ConvergenceError("base_decompose: residual weight did not vanish");
  return out;
}

// ---- minors ----------------------------------------------------------------

MatroidOracle MatroidOracle::contracted(Subset s) const {
  if (s & ~ground_mask(n_)) throw ValidationError("contracted: subset outside ground set");
  if (!is_independent(s)) throw PreconditionError("contracted: set must be independent");
  Subset keep = ground_mask(n_) & ~s;
  int n2 = subset_size(keep);
  switch (kind_) {
    case Kind::Uniform:
      return uniform(n2, uniform_rank_ - subset_size(s));
    case Kind::Partition: {
      std::vector<Subset> parts;
      std::vector<int> caps;
      for (size_t p = 0; p < parts_.size(); ++p) {
        Subset np = compress_set(parts_[p], keep);
        if (!np) continue;
        parts.push_back(np);
        caps.push_back(caps_[p] - subset_size(parts_[p] & s));
      }
      return partition(n2, parts, caps);
    }
    case Kind::Graphic: {
      UnionFind uf(n_vertices_);
      Subset t = s;
      while (t) {
        int e = __builtin_ctzll(t);
        t &= t - 1;
        uf.unite(edges_[e].first, edges_[e].second);
      }
      std::vector<int> label(static_cast<size_t>(n_vertices_), -1);
      int nv = 0;
      for (int v = 0; v < n_vertices_; ++v) {
        int r = uf.find(v);
        if (label[static_cast<size_t>(r)] < 0) label[static_cast<size_t>(r)] = nv++;
      }
      std::vector<std::pair<int, int>> edges;
      for (int e = 0; e < n_; ++e)
        if ((keep >> e) & 1u)
          edges.push_back({label[static_cast<size_t>(uf.find(edges_[e].first))],
                           label[static_cast<size_t>(uf.find(edges_[e].second))]});
      return graphic(nv, edges);
    }
    case Kind::Explicit: {
      std::vector<Subset> bases;
      for (Subset b : bases_)
        if ((s & ~b) == 0) bases.push_back(compress_set(b, keep));
      return explicit_bases(n2, bases);
    }
  }
  throw std::logic_error("unreachable");
}

MatroidOracle MatroidOracle::restricted(Subset keep) const {
  if (keep & ~ground_mask(n_)) throw ValidationError("restricted: subset outside ground set");
  int n2 = subset_size(keep);
  switch (kind_) {
    case Kind::Uniform:
      return uniform(n2, std::min(uniform_rank_, n2));
    case Kind::Partition: {
      std::vector<Subset> parts;
      std::vector<int> caps;
      for (size_t p = 0; p < parts_.size(); ++p) {
        Subset np = compress_set(parts_[p], keep);
        if (!np) continue;
        parts.push_back(np);
        caps.push_back(caps_[p]);
      }
      return partition(n2, parts, caps);
    }
    case Kind::Graphic: {
      std::vector<std::pair<int, int>> edges;
      for (int e = 0; e < n_; ++e)
        if ((keep >> e) & 1u) edges.push_back(edges_[e]);
      return graphic(n_vertices_, edges);
    }
    case Kind::Explicit: {
      int best = 0;
      for (Subset b : bases_) best = std::max(best, subset_size(b & keep));
      std::vector<Subset> bases;
      for (Subset b : bases_)
        if (subset_size(b & keep) == best) bases.push_back(compress_set(b, keep));
      return explicit_bases(n2, bases);
    }
  }
  throw std::logic_error("unreachable");
}

// ---- laminar family --------------------------------------------------------

LaminarFamily::LaminarFamily(int ground_size, std::vector<LaminarMember> members)
    : n_(ground_size), members_(std::move(members)) {
  if (n_ < 0 || n_ > 64) throw ValidationError("laminar family: ground set capped at 64");
  for (auto& m : members_) {
    if (!m.set) throw ValidationError("laminar family: empty member set");
    if (m.set & ~ground_mask(n_)) throw ValidationError("laminar family: member outside ground set");
    if (m.value < 0 || m.value > subset_size(m.set))
      throw ValidationError("laminar family: required value out of range");
  }
  for (size_t a = 0; a < members_.size(); ++a)
    for (size_t b = a + 1; b < members_.size(); ++b) {
      Subset i = members_[a].set & members_[b].set;
      if (i && i != members_[a].set && i != members_[b].set)
        throw ValidationError("laminar family: members must be nested or disjoint");
      if (members_[a].set == members_[b].set)
        throw ValidationError("laminar family: duplicate member set");
    }
  std::sort(members_.begin(), members_.end(), [](const LaminarMember& a, const LaminarMember& b) {
    int sa = subset_size(a.set), sb = subset_size(b.set);
    if (sa != sb) return sa < sb;
    return a.set < b.set;
  });
}

std::vector<int> LaminarFamily::tight_members(const VectorXd& x, const ToleranceModel& tol) const {
  if (x.size() != n_) throw ValidationError("tight_members: point dimension mismatch");
  std::vector<int> out;
  for (size_t i = 0; i < members_.size(); ++i)
    if (std::abs(subset_sum(x, members_[i].set) - members_[i].value) <=
        tol.eps_tight * (1 + std::abs(members_[i].value)))
      out.push_back(static_cast<int>(i));
  return out;
}

}  // namespace discround
