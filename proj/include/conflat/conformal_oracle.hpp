#ifndef CONFLAT_CONFORMAL_ORACLE_HPP
#define CONFLAT_CONFORMAL_ORACLE_HPP

#include <list>
#include <memory>

#include "conflat/field.hpp"
#include "conflat/lattice_oracle.hpp"

namespace conflat {

// Shortest-path oracle for the conformally flat distance e^f * D_0 on a
// regular lattice at spacing h_e. Edge weights are adaptive quadratures of
// e^f along the straight neighbor segments; the recursion refines wherever
// the tube-radius interval of a sub-segment can touch the varying band of f,
// so the thin eta_bar transition shells are priced correctly even when
// h_e >> eta_bar.
//
// With zero_field set, weights are exactly the Euclidean segment lengths and
// distances coincide with a flat LatticeOracle's values.
class ConformalOracle {
 public:
  ConformalOracle(const FieldEvaluator* fe, int d, double R, double h_e, int stencil_order,
                  bool zero_field = false);
  ~ConformalOracle();

  int d() const { return d_; }
  double R() const { return R_; }
  double h() const { return h_; }
  int stencil_order() const { return order_; }
  double tol_lat() const { return tol_lat_; }
  int node_count() const { return node_count_; }
  int nodes_per_axis() const { return n_axis_; }
  double snap_displacement() const { return h_ * std::sqrt(double(d_)) / 2.0; }

  Vec coord(int id) const;
  int snap(const Vec& p) const;

  double ef_dist(const Vec& x, const Vec& y) const;
  Path ef_geodesic(const Vec& x, const Vec& y) const;
  double dist_nodes(int u, int v) const;
  std::shared_ptr<const DistMap> dist_map(int source) const;

  // Windowed multi-target run, as LatticeOracle::local_paths.
  void local_paths(int u, const std::vector<int>& targets, int window_steps,
                   std::vector<double>& dists, std::vector<Path>* paths) const;

  // Adaptive quadrature of e^f along [a,b] (exposed for tests).
  double segment_cost(const Vec& a, const Vec& b) const;

 private:
  struct Scratch;
  void run_dijkstra(int source, const int* window_lo, const int* window_hi,
                    const std::vector<int>* targets, Scratch& s) const;
  double edge_weight_cached(int u, int fwd) const;

  // Nearest edge among a candidate set; edge = -1 when the minimum exceeds
  // the field index radius (the returned r is still the candidate minimum).
  EdgeHit cand_hit(const Vec& p, const std::vector<int32_t>& cand) const;
  double quad(const Vec& a, double ra, const Vec& b, double rb,
              const std::vector<int32_t>& cand, int depth) const;

  const FieldEvaluator* fe_;
  bool zero_field_;
  int d_;
  double R_, h_;
  int order_;
  int n_axis_, node_count_;
  double tol_lat_;
  std::vector<std::array<int, 3>> stencil_;   // full signed offsets
  std::vector<std::array<int, 3>> forward_;   // lexicographically positive half
  std::vector<double> weights_;               // [node * forward_.size() + k]

  mutable std::vector<int32_t> cand_;  // per-segment candidate scratch
  mutable std::unique_ptr<Scratch> scratch_;
  mutable std::list<std::shared_ptr<DistMap>> cache_;
};

struct TrapResult {
  bool inside = false;
  double max_excursion = 0.0;
};

// Does every path vertex stay within D_0-distance eta + eta_bar/2 + h_e*sqrt(d)
// of the edge set? Throws if the endpoints are not themselves within eta
// (plus a snapping slack of h_e*sqrt(d)/2).
TrapResult check_trapped(const Path& path, const EdgeIndex& idx, double eta, double eta_bar,
                         double h_e);

}  // namespace conflat

#endif
