#ifndef CONFLAT_GRID_PARTITION_HPP
#define CONFLAT_GRID_PARTITION_HPP

#include "conflat/lattice_oracle.hpp"
#include "conflat/moduli.hpp"

namespace conflat {

// Coarse/fine cube partition of the box and the geodesic net lattice.
// Coarse cubes have side 2R/n_bar; fine cubes side 2R/(n_bar*m_bar); net
// vertices sit on (R/(n_bar*m_bar)) Z^d intersected with the box.
struct GridPartition {
  int d = 2;
  double R = 1.0;
  int n_bar = 1;
  int m_bar = 1;

  double eps = 0.0;
  double diam_budget = 0.0;    // eps/64
  double measured_diam = 0.0;  // worst inflated coarse-cube diameter found
  bool diam_measured = false;  // false if only the modulus bound was used
  bool diam_ok = false;
  double preparam1_bound = 0.0;

  int nm() const { return n_bar * m_bar; }
  double spacing() const { return R / nm(); }
  int vertices_per_axis() const { return 2 * nm() + 1; }
  long long coarse_count() const {
    long long c = 1;
    for (int a = 0; a < d; ++a) c *= n_bar;
    return c;
  }
  long long fine_per_coarse() const {
    long long c = 1;
    for (int a = 0; a < d; ++a) c *= m_bar;
    return c;
  }
  // Index bookkeeping: the coarse cube containing fine cube (i*m+j per axis).
  static int coarse_of(int fine_index, int m_bar) { return fine_index / m_bar; }
};

struct GridOptions {
  int n_cap = 0;        // 0 = honor the diameter target strictly (no cap)
  int nm_cap = 1 << 16;
  bool enforce_nn_smallwe = false;  // require nearest-neighbor weights <= eps/128
  bool highway_constraint = true;   // keep phi(spacing*sqrt(d)/2) under eps/16
  double highway_margin = 0.7;
  int diam_sample_cubes = 5;
  int diam_sample_per_axis = 4;
};

// Thrown when the requested net is finer than the oracle lattice supports.
struct OracleTooCoarse : std::runtime_error {
  double h_needed;
  explicit OracleTooCoarse(double h)
      : std::runtime_error("choose_grid: oracle lattice too coarse, refine to h <= " +
                           std::to_string(h)),
        h_needed(h) {}
};

GridPartition choose_grid(const LatticeOracle& oracle, const ModulusTable& mod, double eps,
                          const GridOptions& opts = {});

// Worst measured metric diameter of inflated coarse cubes (direct measurement
// on the oracle lattice, stratified cube sample).
double measure_inflated_diameter(const LatticeOracle& oracle, int n_bar,
                                 const GridOptions& opts);

}  // namespace conflat

#endif
