#include "conflat/field.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace conflat {

double smoothstep(double t) {
  t = std::clamp(t, 0.0, 1.0);
  return t * t * (3.0 - 2.0 * t);
}

FieldEvaluator::FieldEvaluator(const WeightedGraph& g, const SynthParams& p)
    : g_(&g), params_(p) {
  if (!(p.eta > 0.0 && p.eta_bar > 0.0 && p.eta_bar < p.eta))
    throw std::runtime_error("field: invalid eta/eta_bar");
  // The index radius covers the whole varying band; beyond it f = C1.
  idx_ = std::make_unique<EdgeIndex>(g, p.eta + p.eta_bar);
  max_abs_bump_ = 0.0;
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    if (!(g.ew[e] > 0.0) || !(g.el0[e] > 0.0))
      throw std::runtime_error("field: edge with non-positive weight or length");
    max_abs_bump_ = std::max(max_abs_bump_, std::fabs(std::log(g.ew[e] / g.el0[e])));
  }
}

double FieldEvaluator::F_ext(double r) const {
  const double eta = params_.eta, eb = params_.eta_bar;
  const double C0 = params_.C0, C1 = params_.C1;
  if (r <= eta - eb) return 0.0;
  if (r < eta - eb / 2.0) return C0 * smoothstep((r - (eta - eb)) / (eb / 2.0));
  if (r <= eta + eb / 2.0) return C0;
  if (r < eta + eb) return C0 + (C1 - C0) * smoothstep((r - (eta + eb / 2.0)) / (eb / 2.0));
  return C1;
}

double FieldEvaluator::bump(int32_t edge, double r) const {
  if (edge < 0) return 0.0;
  const double eta = params_.eta;
  if (r >= eta) return 0.0;
  const double core = std::log(g_->ew[edge] / g_->el0[edge]);
  if (r <= eta / 2.0) return core;
  return core * (1.0 - smoothstep((r - eta / 2.0) / (eta / 2.0)));
}

double FieldEvaluator::eval_hit(const EdgeHit& hit) const {
  if (hit.edge < 0) return params_.C1;
  return F_ext(hit.r) + bump(hit.edge, hit.r);
}

double FieldEvaluator::eval(const Vec& z) const { return eval_hit(idx_->query_within(z)); }

EdgeDistanceField edge_distance_field(const WeightedGraph& g, double h_f, double band_radius) {
  if (!(h_f > 0.0)) throw std::runtime_error("edge_distance_field: h_f must be positive");
  if (!(band_radius > 0.0)) throw std::runtime_error("edge_distance_field: band_radius must be positive");
  double nodes = 1.0;
  const int per_axis = static_cast<int>(std::round(2.0 * g.R / h_f)) + 1;
  if (std::fabs((per_axis - 1) * h_f - 2.0 * g.R) > 1e-6 * g.R)
    throw std::runtime_error("edge_distance_field: h_f must divide 2R within rounding");
  for (int a = 0; a < g.d; ++a) nodes *= per_axis;
  if (nodes > 3.0e7)
    throw std::runtime_error("edge_distance_field: h_f too fine, grid exceeds node budget");

  EdgeIndex idx(g, band_radius);
  EdgeDistanceField edf;
  edf.dist.d = g.d;
  edf.dist.h = h_f;
  edf.dist.origin = {{-g.R, -g.R, g.d == 3 ? -g.R : 0.0}};
  edf.dist.n = {per_axis, per_axis, g.d == 3 ? per_axis : 1};
  edf.dist.values.resize(static_cast<std::size_t>(nodes));
  edf.dist_end = edf.dist;
  edf.nearest.resize(static_cast<std::size_t>(nodes));
  const int kmax = (g.d == 3) ? per_axis : 1;
  for (int k = 0; k < kmax; ++k)
    for (int j = 0; j < per_axis; ++j)
      for (int i = 0; i < per_axis; ++i) {
        const EdgeHit hit = idx.query_within(edf.dist.coord(i, j, k));
        const std::size_t id = edf.dist.index(i, j, k);
        edf.dist.values[id] = hit.r;
        edf.nearest[id] = hit.edge;
        edf.dist_end.values[id] = std::min(hit.r_a, hit.r_b);
      }
  return edf;
}

GridField build_F_ext(const SynthParams& params, const EdgeDistanceField& edf) {
  // Band evaluation only needs r; reuse FieldEvaluator's formula via a
  // lightweight copy of its band arithmetic.
  GridField out = edf.dist;
  const double eta = params.eta, eb = params.eta_bar;
  const double C0 = params.C0, C1 = params.C1;
  for (double& v : out.values) {
    const double r = v;
    if (r <= eta - eb)
      v = 0.0;
    else if (r < eta - eb / 2.0)
      v = C0 * smoothstep((r - (eta - eb)) / (eb / 2.0));
    else if (r <= eta + eb / 2.0)
      v = C0;
    else if (r < eta + eb)
      v = C0 + (C1 - C0) * smoothstep((r - (eta + eb / 2.0)) / (eb / 2.0));
    else
      v = C1;
  }
  return out;
}

GridField build_edge_bumps(const WeightedGraph& g, const SynthParams& params,
                           const EdgeDistanceField& edf) {
  GridField out = edf.dist;
  const double eta = params.eta;
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    const double r = edf.dist.values[i];
    const int32_t e = edf.nearest[i];
    if (e < 0 || r >= eta) {
      out.values[i] = 0.0;
      continue;
    }
    if (!(g.ew[e] > 0.0) || !(g.el0[e] > 0.0))
      throw std::runtime_error("build_edge_bumps: edge with non-positive weight or length");
    const double core = std::log(g.ew[e] / g.el0[e]);
    out.values[i] = (r <= eta / 2.0) ? core : core * (1.0 - smoothstep((r - eta / 2.0) / (eta / 2.0)));
  }
  return out;
}

ConformalField synthesize(const WeightedGraph& g, const SynthParams& params, double h_f) {
  EdgeDistanceField edf = edge_distance_field(g, h_f, params.eta + params.eta_bar);
  GridField fe = build_F_ext(params, edf);
  GridField fb = build_edge_bumps(g, params, edf);
  if (fe.values.size() != fb.values.size()) throw std::runtime_error("synthesize: grid mismatch");

  ConformalField cf;
  cf.params = params;
  cf.graph_hash = g.hash();
  cf.f = std::move(fe);
  double max_core = 0.0, core_spread = 0.0, cmin = 1e300, cmax = -1e300;
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    const double c = std::log(g.ew[e] / g.el0[e]);
    max_core = std::max(max_core, std::fabs(c));
    cmin = std::min(cmin, c);
    cmax = std::max(cmax, c);
  }
  core_spread = cmax - cmin;
  for (std::size_t i = 0; i < cf.f.values.size(); ++i) cf.f.values[i] += fb.values[i];

  // Continuity: band slopes bound the jump between adjacent samples, plus the
  // discontinuity where the nearest edge switches inside overlapping tubes.
  const double slope = 2.0 * (std::max(params.C0, std::fabs(params.C1 - params.C0)) +
                              max_core) / std::min(params.eta_bar / 2.0, params.eta / 2.0);
  const double budget = slope * h_f * std::sqrt(double(g.d)) + core_spread + 1e-12;
  const auto& f = cf.f;
  const int kmax = (g.d == 3) ? f.n[2] : 1;
  for (int k = 0; k < kmax; ++k)
    for (int j = 0; j < f.n[1]; ++j)
      for (int i = 0; i < f.n[0]; ++i) {
        const double v = f.at(i, j, k);
        if (i + 1 < f.n[0] && std::fabs(f.at(i + 1, j, k) - v) > budget)
          throw std::runtime_error("synthesize: continuity check failed");
        if (j + 1 < f.n[1] && std::fabs(f.at(i, j + 1, k) - v) > budget)
          throw std::runtime_error("synthesize: continuity check failed");
        if (g.d == 3 && k + 1 < f.n[2] && std::fabs(f.at(i, j, k + 1) - v) > budget)
          throw std::runtime_error("synthesize: continuity check failed");
      }
  return cf;
}

}  // namespace conflat
