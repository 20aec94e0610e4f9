#pragma once

#include <string>

#include "qqm/grid.hpp"

namespace qqm {

/// Max/mean absolute residual of one constraint equation over the unmasked
/// grid, with the per-node magnitude field kept for export.
struct ResidualReport {
  std::string equation;
  double max_abs{0.0};
  double mean_abs{0.0};
  RealField magnitude;

  const GridSpec& grid() const { return magnitude.grid(); }
};

inline ResidualReport make_report(std::string equation, RealField magnitude) {
  ResidualReport r;
  r.equation = std::move(equation);
  const GridSpec& g = magnitude.grid();
  double sum = 0.0;
  std::size_t count = 0;
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      if (g.masked(i, j)) continue;
      const double m = magnitude.at(i, j);
      r.max_abs = std::max(r.max_abs, m);
      sum += m;
      ++count;
    }
  }
  r.mean_abs = count ? sum / static_cast<double>(count) : 0.0;
  r.magnitude = std::move(magnitude);
  return r;
}

}  // namespace qqm
