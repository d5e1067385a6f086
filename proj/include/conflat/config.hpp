#ifndef CONFLAT_CONFIG_HPP
#define CONFLAT_CONFIG_HPP

#include <cstdint>
#include <string>

#include "conflat/metric_spec.hpp"

namespace conflat {

// One pipeline run: the input metric plus every tunable. Values of 0 mean
// "derive from the metric dimension" where noted.
struct RunConfig {
  MetricSpec spec;
  double eps = 0.25;
  uint64_t seed = 0;

  int stencil_order = 0;  // 0: 3 in d=2, 2 in d=3
  int c_pair = 0;         // net pair radius; 0: 2 in d=2, 1 in d=3
  int n_cap = 0;          // coarse-grid cap; 0: 32 in d=2, 8 in d=3
  long long nm_cap = 1 << 16;
  int highway_constraint = -1;  // -1: on in d=2, off in d=3
  double highway_margin = 0.7;

  double h = 0.0;    // lattice spacing override (0: from the chosen grid)
  double h_e = 0.0;  // conformal lattice spacing (0: same as h)
  double h_f = 0.0;  // exported field grid spacing (0: auto, node-budgeted)

  std::size_t pairs = 1024;
  std::size_t trap_samples = 500;
  std::size_t highway_samples = 1024;
  int threads = 0;  // accepted for compatibility; this build runs sequentially

  std::string out_dir = "out";
  std::string source_path;

  int order() const { return stencil_order > 0 ? stencil_order : (spec.d == 2 ? 3 : 2); }
  int pair_rule() const { return c_pair > 0 ? c_pair : (spec.d == 2 ? 2 : 1); }
  int grid_cap() const { return n_cap > 0 ? n_cap : (spec.d == 2 ? 32 : 8); }
  bool highway_on() const { return highway_constraint >= 0 ? highway_constraint > 0 : spec.d == 2; }

  void validate() const;
  uint64_t hash() const;
  static RunConfig load(const std::string& path);
};

}  // namespace conflat

#endif
