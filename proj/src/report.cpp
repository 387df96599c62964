#include "discround/report.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

namespace discround {

namespace {

// shortest decimal form that parses back to the same double
std::string num(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string fixed(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

void pad(std::string& line, const std::string& cell, size_t width) {
  line += cell;
  if (cell.size() < width) line.append(width - cell.size(), ' ');
  line += ' ';
}

}  // namespace

std::string emit_report(const RoundReport& rep, ReportFormat format,
                        const std::vector<std::pair<std::string, std::string>>& meta) {
  std::string out;
  auto emit_meta = [&](const std::string& prefix) {
    out += prefix + "driver: " + rep.driver + "\n";
    out += prefix + "seed: " + std::to_string(rep.seed) + "\n";
    out += prefix + "iterations: " + std::to_string(rep.iterations) + "\n";
    out += prefix + "steps: " + std::to_string(rep.total_steps) + "\n";
    out += prefix + "truncations: " + std::to_string(rep.total_truncations) + "\n";
    out += prefix + "max_ratio: " + num(rep.max_ratio) + "\n";
    for (const auto& [k, v] : meta) out += prefix + k + ": " + v + "\n";
    for (const auto& note : rep.notes) out += prefix + "note: " + note + "\n";
  };

  if (format == ReportFormat::Csv) {
    emit_meta("# ");
    out +=
        "constraint_id,part,b,lambda,violation,bound_sqrt_j,bound_nlog,bound_Lb,bound_delta,"
        "bound_min,ratio\n";
    for (const auto& r : rep.rows) {
      out += std::to_string(r.id);
      out += ',';
      out += part_name(r.part);
      out += ',';
      out += num(r.b) + ',' + num(r.lambda) + ',' + num(r.violation) + ',' + num(r.menu[0]) +
             ',' + num(r.menu[1]) + ',' + num(r.menu[2]) + ',' + num(r.menu[3]) + ',' +
             num(r.bound_min) + ',' + num(r.ratio) + "\n";
    }
    return out;
  }

  // table text: fixed column widths, header + rows + metadata footer
  const char* headers[] = {"id",       "part",     "b",        "lambda",
                           "violation", "sqrt_j",  "nlog",     "Lb",
                           "delta",    "bound_min", "ratio"};
  const size_t widths[] = {5, 4, 12, 12, 12, 12, 12, 12, 12, 12, 10};
  std::string line;
  for (size_t c = 0; c < 11; ++c) pad(line, headers[c], widths[c]);
  out += line + "\n";
  for (const auto& r : rep.rows) {
    line.clear();
    pad(line, std::to_string(r.id), widths[0]);
    pad(line, part_name(r.part), widths[1]);
    pad(line, fixed(r.b), widths[2]);
    pad(line, fixed(r.lambda), widths[3]);
    pad(line, fixed(r.violation), widths[4]);
    pad(line, fixed(r.menu[0]), widths[5]);
    pad(line, fixed(r.menu[1]), widths[6]);
    pad(line, fixed(r.menu[2]), widths[7]);
    pad(line, fixed(r.menu[3]), widths[8]);
    pad(line, fixed(r.bound_min), widths[9]);
    pad(line, fixed(r.ratio), widths[10]);
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out += line + "\n";
  }
  out += "--\n";
  emit_meta("");
  return out;
}

}  // namespace discround
