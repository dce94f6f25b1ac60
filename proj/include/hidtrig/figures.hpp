#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hidtrig/core.hpp"

namespace hidtrig {

struct FigureTable {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  // Rectangular: every row has one value per column.
  void validate() const;
};

struct FigureOptions {
  ProblemParams params{2, 4, 3};
  std::optional<std::int64_t> max_n;  // per-figure default when unset
  std::uint64_t trials = 1000;
  std::optional<std::uint64_t> seed;  // required by figure 1
};

// 1: analytic vs Monte Carlo for p and P_t (n <= 50)
// 2: p and P_t curves (n <= 100)
// 3: Q(n) curve and the data-size difficulty curve over a = 2..6 at n = 50
// 8: every closed form of p side by side (n <= 50); the iterative column
//    needs l = 3, the repeated-element column (a, h, l) = (2, 4, 3)
std::vector<FigureTable> figure(int which, const FigureOptions& options);

}  // namespace hidtrig
