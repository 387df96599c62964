#pragma once

#include <optional>
#include <string>
#include <vector>

#include "discround/schedules.hpp"

namespace discround {

// Matroid description as written in an instance file; materialized into an
// oracle on demand so instances can be serialized back out losslessly.
struct MatroidBlock {
  std::string kind;                           // uniform | partition | graphic | bases
  int rank = 0;                               // uniform
  std::vector<std::vector<int>> parts;        // partition
  std::vector<int> caps;
  int vertices = 0;                           // graphic
  std::vector<std::pair<int, int>> edges;
  std::vector<std::vector<int>> bases;        // explicit base list

  MatroidOracle build(int n) const;
};

struct LaminarBlock {
  std::vector<int> set;
  double value = 0;
};

struct InstanceFile {
  int n = 0;
  VectorXd y;
  std::vector<LinearConstraint> constraints;
  std::optional<MatroidBlock> matroid;
  bool base = false;
  std::vector<LaminarBlock> laminar;
  std::optional<VectorXd> costs;            // degmat
  std::vector<VectorXd> multi_costs;        // multicrit
  std::vector<double> budgets;
  double eps = 0.5;
  std::optional<PathCatalog> paths;         // rsp / laminar-rsp
  std::vector<LaminarRequirement> requirements;

  // walk-facing view of the matroid/laminar blocks
  StructureSpec structure() const;
};

// Text (JSON syntax) to validated instance; errors name the offending field.
InstanceFile parse_instance(const std::string& text);

// Canonical serialization: parse(serialize(parse(f))) re-serializes to the
// same bytes.
std::string serialize_instance(const InstanceFile& inst);

}  // namespace discround
