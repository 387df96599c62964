#pragma once

#include <string>
#include <utility>
#include <vector>

#include "discround/schedules.hpp"

namespace discround {

enum class ReportFormat { Csv, Table };

// Deterministic rendering of a run report.  CSV column order is fixed:
// constraint_id, part, b, lambda, violation, bound_sqrt_j, bound_nlog,
// bound_Lb, bound_delta, bound_min, ratio.  Run metadata rides in '#'
// comment lines (CSV) or a footer (table); extra key/value pairs from the
// caller (preset, restarts, ...) are appended in the order given.
std::string emit_report(const RoundReport& rep, ReportFormat format,
                        const std::vector<std::pair<std::string, std::string>>& meta = {});

}  // namespace discround
