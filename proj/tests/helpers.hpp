#pragma once

#include <string>
#include <vector>

#include "mtl/pipeline.hpp"
#include "mtl/reproduce.hpp"

namespace mtl::test {

inline RunConfig shipped(const std::string& name, const std::vector<std::string>& overrides = {}) {
  return parse_config(std::string(MTL_SOURCE_DIR) + "/configs/" + name + ".cfg", overrides);
}

/// Certified ground state plus its verdict.
struct Solved {
  RunConfig cfg;
  GroundState gs;
  InstabilityReport report;
};

inline Solved solve(const std::string& name, const std::vector<std::string>& overrides = {}) {
  Solved s{shipped(name, overrides), {}, {}};
  s.gs = compute_ground_state(s.cfg);
  s.report = verdict(s.cfg.spec, s.gs.state);
  return s;
}

inline double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace mtl::test
