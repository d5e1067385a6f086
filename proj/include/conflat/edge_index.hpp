#ifndef CONFLAT_EDGE_INDEX_HPP
#define CONFLAT_EDGE_INDEX_HPP

#include <cstdint>

#include "conflat/weighted_graph.hpp"

namespace conflat {

struct EdgeHit {
  double r = 0.0;       // D_0 distance to the nearest edge
  int32_t edge = -1;    // nearest edge id (-1: farther than the index radius)
  double t = 0.0;       // projection parameter on that edge
  double r_a = 0.0;     // distance to the edge endpoints
  double r_b = 0.0;
};

// Uniform-bin point-to-edge-set queries over a WeightedGraph. Edges are
// binned with their bounding boxes inflated by `radius`, so query_within is
// exact whenever the true distance is <= radius; query() is always exact via
// an expanding ring search.
class EdgeIndex {
 public:
  EdgeIndex(const WeightedGraph& g, double radius);

  const WeightedGraph& graph() const { return *g_; }
  double radius() const { return radius_; }

  // Exact if the nearest edge is within radius; otherwise hit.edge = -1 and
  // hit.r = +inf (meaning "farther than radius").
  EdgeHit query_within(const Vec& p) const;

  // Exact nearest edge regardless of distance.
  EdgeHit query(const Vec& p) const;

  // All edges listed in the cells overlapping the bounding box of [a,b],
  // sorted and unique. Contains every edge within `radius()` of the segment
  // (and possibly a few more).
  void gather_segment(const Vec& a, const Vec& b, std::vector<int32_t>& out) const;

 private:
  void scan_cell(int ix, int iy, int iz, const Vec& p, EdgeHit& best) const;

  const WeightedGraph* g_;
  double radius_;
  double cell_;
  int ncell_;
  std::vector<int64_t> head_;   // CSR over cells
  std::vector<int32_t> items_;
};

}  // namespace conflat

#endif
