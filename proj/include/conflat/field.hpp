#ifndef CONFLAT_FIELD_HPP
#define CONFLAT_FIELD_HPP

#include <memory>

#include "conflat/edge_index.hpp"
#include "conflat/grid_field.hpp"
#include "conflat/synth_params.hpp"

namespace conflat {

// 3t^2 - 2t^3, clamped to [0,1].
double smoothstep(double t);

// Closed-form conformal factor: f(z) = F_ext(r) + bump_nearest(r) where
// r = D_0(z, edge set). F_ext rises 0 -> C0 across (eta-eta_bar, eta-eta_bar/2),
// holds C0 on |r-eta| <= eta_bar/2, falls C0 -> C1 across
// (eta+eta_bar/2, eta+eta_bar), and is C1 beyond. The nearest edge's bump is
// log(w_e/l0_e) for r <= eta/2, smoothed to 0 at r = eta.
class FieldEvaluator {
 public:
  FieldEvaluator(const WeightedGraph& g, const SynthParams& p);

  double F_ext(double r) const;
  double bump(int32_t edge, double r) const;  // edge < 0: no bump term
  double eval(const Vec& z) const;
  double eval_hit(const EdgeHit& hit) const;

  // Band of tube radii where f varies; outside it f is locally constant.
  // Used by quadrature refinement.
  double band_lo() const { return params_.eta / 2.0; }
  double band_hi() const { return params_.eta + params_.eta_bar; }

  const SynthParams& params() const { return params_; }
  const EdgeIndex& index() const { return *idx_; }
  const WeightedGraph& graph() const { return *g_; }
  double max_abs_bump() const { return max_abs_bump_; }

 private:
  const WeightedGraph* g_;
  SynthParams params_;
  std::unique_ptr<EdgeIndex> idx_;
  double max_abs_bump_;
};

// Sampled distance data on a regular grid at spacing h_f.
struct EdgeDistanceField {
  GridField dist;                  // D_0 distance to the edge set
  std::vector<int32_t> nearest;    // nearest edge id per node
  GridField dist_end;              // distance to the nearest edge's endpoints (min of the two)
};

// Exact point-to-segment distances per grid node for nodes within band_radius
// of the edge set; +inf (no nearest edge) beyond, where the factor is the
// constant C1 anyway. Throws if the grid would exceed the node budget.
EdgeDistanceField edge_distance_field(const WeightedGraph& g, double h_f, double band_radius);

GridField build_F_ext(const SynthParams& params, const EdgeDistanceField& edf);
GridField build_edge_bumps(const WeightedGraph& g, const SynthParams& params,
                           const EdgeDistanceField& edf);

// Sampled conformal factor plus its parameters and provenance.
struct ConformalField {
  SynthParams params;
  uint64_t graph_hash = 0;
  GridField f;
};

// Nodewise F_ext + bumps on a fresh grid at spacing h_f, with a continuity
// check (adjacent jumps bounded by the band slopes plus the nearest-edge
// switching discontinuity).
ConformalField synthesize(const WeightedGraph& g, const SynthParams& params, double h_f);

}  // namespace conflat

#endif
