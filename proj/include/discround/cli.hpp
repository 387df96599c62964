#pragma once

#include <string>
#include <vector>

#include "discround/instance.hpp"
#include "discround/report.hpp"

namespace discround {

// One point of the violation-versus-target sweep behind the `bench`
// subcommand: per target b, random indicator-style rows are rounded by the
// engine and by independent randomized rounding.
struct BenchPoint {
  double b = 0;
  double engine = 0;      // max row violation after round_full
  double randomized = 0;  // max row violation of the randomized baseline
  double envelope = 0;    // sqrt(n log(2 + m/n))
  double ratio = 0;       // engine violation / smallest menu bound, max over rows
};

struct BenchResult {
  int n = 0, m = 0;
  std::vector<BenchPoint> points;
  double max_ratio = 0;  // measured constant over the sweep
};

BenchResult run_bench(int n, int m, const std::vector<double>& targets, uint64_t seed);

// Full command-line surface; returns the process exit code.
int run_cli(int argc, const char* const* argv);

}  // namespace discround
