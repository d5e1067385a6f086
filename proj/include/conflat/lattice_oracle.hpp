#ifndef CONFLAT_LATTICE_ORACLE_HPP
#define CONFLAT_LATTICE_ORACLE_HPP

#include <cstdint>
#include <list>
#include <map>
#include <memory>
#include <vector>

#include "conflat/metric_spec.hpp"
#include "conflat/path.hpp"
#include "conflat/vec.hpp"

namespace conflat {

// Distance map of a single Dijkstra source, with predecessors for geodesic
// extraction. Unreached nodes hold +inf / -1.
struct DistMap {
  int source = -1;
  std::vector<double> dist;
  std::vector<int32_t> pred;
};

// Shortest-path oracle for a MetricSpec on a regular lattice over [-R,R]^d.
//
// Stencils: order 1 = axis moves, order 2 = axis + all diagonals,
// order 3 = order 2 plus (2,1)-type moves (16-neighborhood in d=2).
// Edge weights are metric lengths of the straight segments between neighbor
// nodes, midpoint quadrature.
//
// The oracle is immutable after construction; distance maps are computed per
// source and cached (single-writer/multi-reader if guarded externally; this
// build runs queries sequentially).
class LatticeOracle {
 public:
  LatticeOracle(MetricSpec spec, double h, int stencil_order);
  ~LatticeOracle();

  const MetricSpec& spec() const { return spec_; }
  double h() const { return h_; }
  int stencil_order() const { return order_; }
  int d() const { return spec_.d; }
  double R() const { return spec_.R; }

  // Documented worst-case overestimate of a lattice shortest path relative to
  // the continuum length for this stencil (dimensionless fraction).
  double tol_lat() const { return tol_lat_; }

  int node_count() const { return node_count_; }
  int nodes_per_axis() const { return n_axis_; }
  Vec coord(int id) const;
  int snap(const Vec& p) const;  // throws if p is outside the box
  double snap_displacement() const { return h_ * std::sqrt(double(spec_.d)) / 2.0; }

  double edge_weight(int u, int v) const;
  const std::vector<std::array<int, 3>>& stencil() const { return stencil_; }

  // Single-source shortest-path distance between the nearest nodes to x and y.
  double dist(const Vec& x, const Vec& y) const;
  double dist_nodes(int u, int v) const;

  // Node path with metric length equal to dist(x,y) exactly (same shortest
  // path tree); deterministic under lexicographic predecessor tie-breaking.
  Path geodesic(const Vec& x, const Vec& y) const;

  // Full distance map from a source node; cached for reuse.
  std::shared_ptr<const DistMap> dist_map(int source) const;

  // Dijkstra restricted to a Chebyshev window of `window_steps` lattice steps
  // around u, stopping once all targets are finalized. Returns per-target
  // distances and (optionally) node paths. Targets outside the window or
  // unreached within it come back as +inf. Used for bulk local geodesics.
  void local_paths(int u, const std::vector<int>& targets, int window_steps,
                   std::vector<double>& dists, std::vector<Path>* paths) const;

  // Sampled bounds on the length density over the box (17^d probe grid, all
  // stencil directions).
  double density_min() const { return dens_min_; }
  double density_max() const { return dens_max_; }

  Path path_from_nodes(const std::vector<int>& nodes) const;

 private:
  struct Scratch;
  void run_dijkstra(int source, const int* window_lo, const int* window_hi,
                    const std::vector<int>* targets, Scratch& s) const;

  MetricSpec spec_;
  double h_;
  int order_;
  int n_axis_;
  int node_count_;
  double tol_lat_;
  double dens_min_, dens_max_;
  std::vector<std::array<int, 3>> stencil_;  // full (signed) offset set

  mutable std::unique_ptr<Scratch> scratch_;
  mutable std::list<std::shared_ptr<DistMap>> cache_;  // most recent first
};

double stencil_anisotropy_bound(int d, int order);

}  // namespace conflat

#endif
