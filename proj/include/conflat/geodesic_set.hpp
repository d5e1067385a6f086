#ifndef CONFLAT_GEODESIC_SET_HPP
#define CONFLAT_GEODESIC_SET_HPP

#include <string>
#include <vector>

#include "conflat/grid_partition.hpp"
#include "conflat/lattice_oracle.hpp"

namespace conflat {

// One lattice geodesic between two net vertices (oracle node ids throughout).
struct GeodesicPath {
  int a = -1, b = -1;
  std::vector<int32_t> nodes;
  double len = 0.0;  // metric length, equal to the oracle distance
};

struct GeodesicSet {
  const LatticeOracle* oracle = nullptr;
  std::vector<int32_t> net_vertices;  // oracle node ids, ascending
  std::vector<GeodesicPath> paths;
};

// Lattice geodesics between all net vertex pairs within c_pair Chebyshev net
// steps, via windowed multi-target searches. Deterministic: sources ascend,
// offsets sorted, ties broken by predecessor id.
GeodesicSet build_G1(const LatticeOracle& oracle, const GridPartition& grid, int c_pair = 2);

// Order-dependent untangling sweep: each path is spliced against the already
// processed ones so that any two paths intersect in a single contiguous run
// of shared nodes (possibly one node) or not at all. Splices swap one
// shortest sub-path for another, so lengths are preserved exactly.
GeodesicSet untangle(GeodesicSet gs);

// Spot check of the untangling postcondition on up to max_pairs intersecting
// path pairs; on failure fills msg with the offending pair.
bool check_untangled(const GeodesicSet& gs, long long max_pairs, std::string* msg = nullptr);

}  // namespace conflat

#endif
