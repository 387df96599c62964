#include "discround/instance.hpp"

#include <json.hpp>

namespace discround {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ValidationError("instance " + where + ": " + what);
}

void expect_kind(const json& j, const char* name, json::value_t t) {
  if (!j.contains(name)) fail(std::string("schema"), std::string("missing field '") + name + "'");
  const json& v = j.at(name);
  bool numeric_ok = t == json::value_t::number_float &&
                    (v.is_number_float() || v.is_number_integer() || v.is_number_unsigned());
  bool int_ok = t == json::value_t::number_integer && v.is_number_integer();
  if (!numeric_ok && !int_ok && v.type() != t)
    fail(std::string("schema"), std::string("field '") + name + "' has the wrong type");
}

int index_in_range(const json& v, int n, const std::string& where) {
  if (!v.is_number_integer()) fail(where, "index must be an integer");
  int i = v.get<int>();
  if (i < 0 || i >= n) fail(where, "index " + std::to_string(i) + " out of range [0," +
                                       std::to_string(n) + ")");
  return i;
}

VectorXd parse_vector(const json& arr, int n, const std::string& where) {
  if (!arr.is_array()) fail(where, "expected an array");
  if (static_cast<int>(arr.size()) != n)
    fail("dimension", where + " has length " + std::to_string(arr.size()) + ", expected " +
                          std::to_string(n));
  VectorXd v(n);
  for (int i = 0; i < n; ++i) {
    if (!arr[static_cast<size_t>(i)].is_number())
      fail(where + "[" + std::to_string(i) + "]", "expected a number");
    v[i] = arr[static_cast<size_t>(i)].get<double>();
  }
  return v;
}

LinearConstraint parse_constraint(const json& j, int n, int idx) {
  const std::string where = "constraints[" + std::to_string(idx) + "]";
  if (!j.is_object()) fail(where, "expected an object");
  LinearConstraint c;
  if (j.contains("a")) {
    c.a = parse_vector(j.at("a"), n, where + ".a");
  } else if (j.contains("indices")) {
    c.a = VectorXd::Zero(n);
    const json& ids = j.at("indices");
    if (!ids.is_array()) fail(where + ".indices", "expected an array");
    std::vector<double> vals;
    if (j.contains("values")) {
      const json& vl = j.at("values");
      if (!vl.is_array() || vl.size() != ids.size())
        fail("dimension", where + ".values must match .indices in length");
      for (const auto& v : vl) vals.push_back(v.get<double>());
    } else {
      vals.assign(ids.size(), 1.0);  // indicator row
    }
    for (size_t t = 0; t < ids.size(); ++t) {
      int i = index_in_range(ids[t], n, where + ".indices[" + std::to_string(t) + "]");
      c.a[i] = vals[t];
    }
  } else {
    fail("schema", where + " needs either 'a' or 'indices'");
  }
  expect_kind(j, "b", json::value_t::number_float);
  c.b = j.at("b").get<double>();
  if (j.contains("lambda")) {
    const json& l = j.at("lambda");
    if (l.is_string() && l.get<std::string>() == "inf")
      c.lambda_override = kUnboundedLambda;
    else if (l.is_number())
      c.lambda_override = l.get<double>();
    else
      fail(where + ".lambda", "expected a number or \"inf\"");
    if (*c.lambda_override < 0) fail("range", where + ".lambda is negative");
  }
  return c;
}

Subset mask_of(const std::vector<int>& idx) {
  Subset s = 0;
  for (int i : idx) s |= Subset{1} << i;
  return s;
}

std::vector<int> sorted_indices(const json& arr, int n, const std::string& where) {
  if (!arr.is_array()) fail(where, "expected an array");
  std::vector<int> out;
  for (size_t t = 0; t < arr.size(); ++t)
    out.push_back(index_in_range(arr[t], n, where + "[" + std::to_string(t) + "]"));
  return out;
}

}  // namespace

MatroidOracle MatroidBlock::build(int n) const {
  if (kind == "uniform") return MatroidOracle::uniform(n, rank);
  if (kind == "partition") {
    std::vector<Subset> masks;
    for (const auto& p : parts) masks.push_back(mask_of(p));
    return MatroidOracle::partition(n, masks, caps);
  }
  if (kind == "graphic") return MatroidOracle::graphic(vertices, edges);
  if (kind == "bases") {
    std::vector<Subset> masks;
    for (const auto& b : bases) masks.push_back(mask_of(b));
    return MatroidOracle::explicit_bases(n, masks);
  }
  throw ValidationError("instance matroid.kind: unknown kind '" + kind + "'");
}

StructureSpec InstanceFile::structure() const {
  StructureSpec s;
  if (matroid) s.matroid = matroid->build(n);
  s.base = base;
  if (!laminar.empty()) {
    std::vector<LaminarMember> members;
    for (const auto& b : laminar) members.push_back({mask_of(b.set), b.value});
    s.laminar = LaminarFamily(n, members);
  }
  return s;
}

InstanceFile parse_instance(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("instance schema: not valid JSON (") + e.what() + ")");
  }
  if (!j.is_object()) fail("schema", "top level must be an object");

  InstanceFile inst;
  expect_kind(j, "n", json::value_t::number_integer);
  inst.n = j.at("n").get<int>();
  if (inst.n < 1 || inst.n > 4096) fail("range", "n must lie in [1, 4096]");
  if (inst.n > 64 && (j.contains("matroid") || j.contains("laminar")))
    fail("range", "structure blocks need n at most 64");

  expect_kind(j, "y", json::value_t::array);
  inst.y = parse_vector(j.at("y"), inst.n, "y");
  for (int i = 0; i < inst.n; ++i)
    if (inst.y[i] < 0 || inst.y[i] > 1)
      fail("range", "y[" + std::to_string(i) + "] = " + std::to_string(inst.y[i]) +
                        " outside [0,1]");

  if (j.contains("constraints")) {
    const json& cs = j.at("constraints");
    if (!cs.is_array()) fail("constraints", "expected an array");
    for (size_t t = 0; t < cs.size(); ++t)
      inst.constraints.push_back(parse_constraint(cs[t], inst.n, static_cast<int>(t)));
  }

  if (j.contains("matroid")) {
    const json& m = j.at("matroid");
    if (!m.is_object()) fail("matroid", "expected an object");
    MatroidBlock blk;
    expect_kind(m, "kind", json::value_t::string);
    blk.kind = m.at("kind").get<std::string>();
    if (blk.kind == "uniform") {
      expect_kind(m, "rank", json::value_t::number_integer);
      blk.rank = m.at("rank").get<int>();
    } else if (blk.kind == "partition") {
      expect_kind(m, "parts", json::value_t::array);
      expect_kind(m, "caps", json::value_t::array);
      for (const auto& p : m.at("parts"))
        blk.parts.push_back(sorted_indices(p, inst.n, "matroid.parts"));
      for (const auto& c : m.at("caps")) blk.caps.push_back(c.get<int>());
    } else if (blk.kind == "graphic") {
      expect_kind(m, "vertices", json::value_t::number_integer);
      blk.vertices = m.at("vertices").get<int>();
      expect_kind(m, "edges", json::value_t::array);
      for (const auto& e : m.at("edges")) {
        if (!e.is_array() || e.size() != 2) fail("matroid.edges", "each edge is a vertex pair");
        blk.edges.emplace_back(e[0].get<int>(), e[1].get<int>());
      }
      if (static_cast<int>(blk.edges.size()) != inst.n)
        fail("dimension", "graphic matroid needs one ground element per edge");
    } else if (blk.kind == "bases") {
      expect_kind(m, "bases", json::value_t::array);
      for (const auto& b : m.at("bases"))
        blk.bases.push_back(sorted_indices(b, inst.n, "matroid.bases"));
    } else {
      fail("matroid.kind", "unknown kind '" + blk.kind + "'");
    }
    blk.build(inst.n);  // validates (overlapping parts, bad caps, ...)
    inst.matroid = std::move(blk);
  }
  if (j.contains("base")) {
    if (!j.at("base").is_boolean()) fail("base", "expected a boolean");
    inst.base = j.at("base").get<bool>();
    if (inst.base && !inst.matroid) fail("schema", "'base' needs a matroid block");
  }

  if (j.contains("laminar")) {
    const json& la = j.at("laminar");
    if (!la.is_array()) fail("laminar", "expected an array");
    for (size_t t = 0; t < la.size(); ++t) {
      const json& b = la[t];
      const std::string where = "laminar[" + std::to_string(t) + "]";
      if (!b.is_object()) fail(where, "expected an object");
      expect_kind(b, "set", json::value_t::array);
      expect_kind(b, "value", json::value_t::number_float);
      inst.laminar.push_back({sorted_indices(b.at("set"), inst.n, where + ".set"),
                              b.at("value").get<double>()});
    }
  }

  if (j.contains("costs")) inst.costs = parse_vector(j.at("costs"), inst.n, "costs");
  if (j.contains("multi_costs")) {
    const json& mc = j.at("multi_costs");
    if (!mc.is_array()) fail("multi_costs", "expected an array of arrays");
    for (size_t t = 0; t < mc.size(); ++t)
      inst.multi_costs.push_back(
          parse_vector(mc[t], inst.n, "multi_costs[" + std::to_string(t) + "]"));
  }
  if (j.contains("budgets")) {
    const json& bs = j.at("budgets");
    if (!bs.is_array()) fail("budgets", "expected an array");
    for (const auto& b : bs) inst.budgets.push_back(b.get<double>());
    if (!inst.multi_costs.empty() && inst.budgets.size() != inst.multi_costs.size())
      fail("dimension", "budgets and multi_costs must pair up");
  }
  if (j.contains("eps")) {
    expect_kind(j, "eps", json::value_t::number_float);
    inst.eps = j.at("eps").get<double>();
    if (inst.eps <= 0) fail("range", "eps must be positive");
  }

  if (j.contains("paths")) {
    const json& p = j.at("paths");
    if (!p.is_object()) fail("paths", "expected an object");
    PathCatalog cat;
    expect_kind(p, "edges", json::value_t::number_integer);
    expect_kind(p, "pairs", json::value_t::number_integer);
    expect_kind(p, "list", json::value_t::array);
    expect_kind(p, "capacity", json::value_t::array);
    cat.n_edges = p.at("edges").get<int>();
    cat.n_pairs = p.at("pairs").get<int>();
    for (size_t t = 0; t < p.at("list").size(); ++t) {
      const json& q = p.at("list")[t];
      const std::string where = "paths.list[" + std::to_string(t) + "]";
      if (!q.is_object()) fail(where, "expected an object");
      expect_kind(q, "pair", json::value_t::number_integer);
      expect_kind(q, "edges", json::value_t::array);
      expect_kind(q, "weight", json::value_t::number_float);
      cat.pair_of.push_back(q.at("pair").get<int>());
      std::vector<int> es;
      for (const auto& e : q.at("edges")) es.push_back(e.get<int>());
      cat.edges_of.push_back(std::move(es));
      cat.weight.push_back(q.at("weight").get<double>());
    }
    for (const auto& c : p.at("capacity")) cat.capacity.push_back(c.get<double>());
    cat.validate();  // throws located errors of its own
    inst.paths = std::move(cat);
  }

  if (j.contains("requirements")) {
    const json& rq = j.at("requirements");
    if (!rq.is_array()) fail("requirements", "expected an array");
    for (size_t t = 0; t < rq.size(); ++t) {
      const json& r = rq[t];
      const std::string where = "requirements[" + std::to_string(t) + "]";
      if (!r.is_object()) fail(where, "expected an object");
      expect_kind(r, "pairs", json::value_t::array);
      expect_kind(r, "require", json::value_t::number_float);
      LaminarRequirement lr;
      for (const auto& q : r.at("pairs")) lr.pairs.push_back(q.get<int>());
      lr.require = r.at("require").get<double>();
      inst.requirements.push_back(std::move(lr));
    }
  }

  return inst;
}

std::string serialize_instance(const InstanceFile& inst) {
  json j;
  j["n"] = inst.n;
  json y = json::array();
  for (int i = 0; i < inst.n; ++i) y.push_back(inst.y[i]);
  j["y"] = std::move(y);
  if (!inst.constraints.empty()) {
    json cs = json::array();
    for (const auto& c : inst.constraints) {
      json o;
      json a = json::array();
      for (Eigen::Index i = 0; i < c.a.size(); ++i) a.push_back(c.a[i]);
      o["a"] = std::move(a);
      o["b"] = c.b;
      if (c.lambda_override) {
        if (std::isinf(*c.lambda_override))
          o["lambda"] = "inf";
        else
          o["lambda"] = *c.lambda_override;
      }
      cs.push_back(std::move(o));
    }
    j["constraints"] = std::move(cs);
  }
  if (inst.matroid) {
    const MatroidBlock& m = *inst.matroid;
    json o;
    o["kind"] = m.kind;
    if (m.kind == "uniform") o["rank"] = m.rank;
    if (m.kind == "partition") {
      o["parts"] = m.parts;
      o["caps"] = m.caps;
    }
    if (m.kind == "graphic") {
      o["vertices"] = m.vertices;
      json es = json::array();
      for (const auto& e : m.edges) es.push_back(json::array({e.first, e.second}));
      o["edges"] = std::move(es);
    }
    if (m.kind == "bases") o["bases"] = m.bases;
    j["matroid"] = std::move(o);
  }
  if (inst.base) j["base"] = true;
  if (!inst.laminar.empty()) {
    json la = json::array();
    for (const auto& b : inst.laminar) {
      json o;
      o["set"] = b.set;
      o["value"] = b.value;
      la.push_back(std::move(o));
    }
    j["laminar"] = std::move(la);
  }
  if (inst.costs) {
    json c = json::array();
    for (Eigen::Index i = 0; i < inst.costs->size(); ++i) c.push_back((*inst.costs)[i]);
    j["costs"] = std::move(c);
  }
  if (!inst.multi_costs.empty()) {
    json mc = json::array();
    for (const auto& d : inst.multi_costs) {
      json row = json::array();
      for (Eigen::Index i = 0; i < d.size(); ++i) row.push_back(d[i]);
      mc.push_back(std::move(row));
    }
    j["multi_costs"] = std::move(mc);
    j["budgets"] = inst.budgets;
    j["eps"] = inst.eps;
  }
  if (inst.paths) {
    const PathCatalog& cat = *inst.paths;
    json p;
    p["edges"] = cat.n_edges;
    p["pairs"] = cat.n_pairs;
    json list = json::array();
    for (size_t t = 0; t < cat.edges_of.size(); ++t) {
      json q;
      q["pair"] = cat.pair_of[t];
      q["edges"] = cat.edges_of[t];
      q["weight"] = cat.weight[t];
      list.push_back(std::move(q));
    }
    p["list"] = std::move(list);
    p["capacity"] = cat.capacity;
    j["paths"] = std::move(p);
  }
  if (!inst.requirements.empty()) {
    json rq = json::array();
    for (const auto& r : inst.requirements) {
      json o;
      o["pairs"] = r.pairs;
      o["require"] = r.require;
      rq.push_back(std::move(o));
    }
    j["requirements"] = std::move(rq);
  }
  return j.dump(2) + "\n";
}

}  // namespace discround
