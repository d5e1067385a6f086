#ifndef CONFLAT_WEIGHTED_GRAPH_HPP
#define CONFLAT_WEIGHTED_GRAPH_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "conflat/geodesic_set.hpp"
#include "conflat/vec.hpp"

namespace conflat {

enum VertexKind : uint8_t { kVertexNet = 0, kVertexMerge = 1, kVertexSubdivision = 2 };

// Stage-G3 graph: geodesics cut at every pairwise intersection point. Edges
// are polylines on the lattice (plus exact crossing points); weights are kept
// per polyline segment so later subdivision preserves lengths exactly.
struct MergedGraph {
  int d = 2;
  double R = 1.0;
  std::vector<Vec> vpos;
  std::vector<uint8_t> vkind;
  std::vector<int32_t> net_vertex_ids;  // graph vertex ids of net vertices

  struct PolyEdge {
    int32_t u = -1, v = -1;
    std::vector<Vec> pts;        // includes both endpoints
    std::vector<double> segw;    // metric weight per polyline segment
    double len = 0.0;            // sum of segw
  };
  std::vector<PolyEdge> edges;
};

// Final graph: straight edges only.
struct WeightedGraph {
  int d = 2;
  double R = 1.0;
  int n_bar = 0, m_bar = 0;
  double tau = 0.0;
  long long K = 0;

  std::vector<Vec> vpos;
  std::vector<uint8_t> vkind;
  std::vector<int32_t> net_vertex_ids;
  std::vector<int32_t> eu, ev;
  std::vector<double> ew;   // metric weight w_e
  std::vector<double> el0;  // straight-segment D_0 length

  std::size_t vertex_count() const { return vpos.size(); }
  std::size_t edge_count() const { return eu.size(); }

  // Adjacency (CSR), built lazily by build_adjacency / first distance query.
  std::vector<int32_t> adj_head;
  std::vector<int32_t> adj_edge;
  void build_adjacency();

  // Weighted shortest-path distance; throws on disconnected vertices.
  double graph_dist(int32_t u, int32_t v) const;
  // Full distance map from a source (and optionally predecessors).
  std::vector<double> dist_map(int32_t source, std::vector<int32_t>* pred = nullptr) const;

  void save(const std::string& path) const;
  static WeightedGraph load(const std::string& path);
  uint64_t hash() const;
};

// Stage G3: cut the untangled geodesics at every pairwise intersection point
// (shared-run boundaries, shared single nodes, and transversal segment
// crossings, which on a diagonal/knight lattice can occur away from nodes).
MergedGraph insert_merge_vertices(const GeodesicSet& gs);

struct LinearizeOptions {
  double tau = 0.0;          // 0: auto, min edge length / 20 (capped below)
  long long K = 0;           // 0: auto per edge from weight_target
  double weight_target = 0;  // target piece weight; pipeline passes eps/128
  int max_retry = 4;
};

// Stage G4: replace every polyline edge by straight chords between breakpoints
// at arclength marks {tau, tau+(len-2*tau)/K, ..., len-tau}; verifies global
// straight-segment disjointness, doubling K (halving tau) on failure.
WeightedGraph piecewise_linearize(const MergedGraph& g3, const LinearizeOptions& opts);

// Finalizes weights (w_e = metric length of the underlying geodesic sub-arc,
// the oracle distance between the endpoints) and fills D_0 lengths; asserts
// connectivity.
void assign_weights(WeightedGraph& g, const LatticeOracle& oracle);

// All straight edges pairwise interior-disjoint (1e-12 guard); fills msg with
// the offending pair on failure.
bool segments_disjoint(const WeightedGraph& g, std::string* msg = nullptr);

}  // namespace conflat

#endif
