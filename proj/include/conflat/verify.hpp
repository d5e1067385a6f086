#ifndef CONFLAT_VERIFY_HPP
#define CONFLAT_VERIFY_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "conflat/conformal_oracle.hpp"
#include "conflat/field.hpp"
#include "conflat/lattice_oracle.hpp"
#include "conflat/weighted_graph.hpp"

namespace conflat {

// One verified inequality. The budget is always an explicit sum of a fixed
// term, a stencil-anisotropy term, and a lattice-snapping term; the recorded
// decomposition is the one at the worst offender.
struct CheckRecord {
  std::string name;
  std::string statement;
  std::size_t samples = 0;
  std::size_t failures = 0;
  double worst_slack = 0.0;  // measured - budget at the worst offender
  double worst_measured = 0.0;
  double eps_term = 0.0;
  double tol_lat_term = 0.0;
  double snap_term = 0.0;
  bool pass = false;
  std::string detail;

  double budget() const { return eps_term + tol_lat_term + snap_term; }
};

struct VerificationReport {
  uint64_t seed = 0;
  double eps = 0.0;
  uint64_t graph_hash = 0;
  uint64_t config_hash = 0;
  SynthParams params;
  std::vector<CheckRecord> checks;
  std::vector<std::pair<std::string, std::string>> extras;

  bool all_pass() const;
  const CheckRecord* worst_check() const;  // largest worst_slack, or nullptr
  std::string summary() const;             // one line per check
  void save(const std::string& path) const;
};

// |d_G - D| <= eps/4 + tol_lat*D over random net-vertex pairs, and the
// one-sided bound d_G >= D*(1 - tol_lat) on all of them.
std::vector<CheckRecord> verify_graph_stage(const WeightedGraph& g, const LatticeOracle& oracle,
                                            double eps, std::size_t pairs, uint64_t seed);

// For every edge: ef_dist(v1,v2) <= w_e + tol and
// ef_dist(v1,v2) >= d_G(v1,v2) - eps/(10|G|) - tol with
// tol = tol_lat*w_e + 2*h_e*exp(C0). Uses w_e as the (upper bound) stand-in
// for d_G on the lower side, which only tightens the check.
std::vector<CheckRecord> verify_adjacent_bounds(const WeightedGraph& g, const ConformalOracle& co,
                                                const SynthParams& p, double eps);

// Over random net-vertex pairs: ef <= d_G + eps/4 + tol_lat*d_G and
// ef >= D - eps/4 - tol_lat*D.
std::vector<CheckRecord> verify_edge_bounds(const WeightedGraph& g, const ConformalOracle& co,
                                            const LatticeOracle& oracle, double eps,
                                            std::size_t pairs, uint64_t seed);

// Every stratified sample point has a graph vertex within eps/16 + tol in
// both metrics.
CheckRecord verify_highway(const WeightedGraph& g, const ConformalOracle& co,
                           const LatticeOracle& oracle, const SynthParams& p, double eps,
                           std::size_t samples, uint64_t seed);

// >= 95% of sampled conformal geodesics with endpoints on the edge set stay
// within D_0-distance eta + eta_bar/2 + h_e*sqrt(d) of it; failures are
// logged with their excursion.
CheckRecord verify_trapping(const WeightedGraph& g, const ConformalOracle& co,
                            const FieldEvaluator& fe, std::size_t samples, uint64_t seed);

// |D - ef| <= eps + tol_lat*D + 2*snap over stratified point pairs, plus the
// intermediate eps/2 margin as a separate record.
std::vector<CheckRecord> verify_theorem(const ConformalOracle& co, const LatticeOracle& oracle,
                                        double eps, std::size_t pairs, uint64_t seed);

// Stratified sample points over the box, q^d cells with one jittered point
// each (deterministic given the seed).
std::vector<Vec> stratified_points(int d, double R, std::size_t n, uint64_t seed);

}  // namespace conflat

#endif
