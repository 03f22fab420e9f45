#pragma once

#include <algorithm>
#include <cmath>
#include <span>

#include "mgcc/diagram.hpp"
#include "mgcc/tandem.hpp"

namespace mgcc::test {

// Reference two-section road: 0.1 km each, 180 veh/km jam density (c = 18),
// free speeds 100 and 50 km/h.
inline FundamentalDiagram reference_section1(std::optional<double> q_max = std::nullopt) {
  return FundamentalDiagram::linear(SectionParams(0.1, 100.0, 180.0), q_max);
}

inline FundamentalDiagram reference_section2(std::optional<double> q_max = std::nullopt) {
  return FundamentalDiagram::linear(SectionParams(0.1, 50.0, 180.0), q_max);
}

inline TandemConfig reference_tandem(double lambda) {
  return TandemConfig(reference_section1(), reference_section2(), lambda);
}

// Same free speeds, jam density 40 veh/km: c1 = c2 = 4.
inline TandemConfig mini_tandem(double lambda) {
  return TandemConfig(FundamentalDiagram::linear(SectionParams(0.1, 100.0, 40.0)),
                      FundamentalDiagram::linear(SectionParams(0.1, 50.0, 40.0)), lambda);
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(a[i] - b[i]));
  return m;
}

inline double rel_err(double got, double want) {
  return std::fabs(got - want) / std::max(std::fabs(want), 1e-300);
}

}  // namespace mgcc::test
