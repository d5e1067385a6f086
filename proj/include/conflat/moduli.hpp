#ifndef CONFLAT_MODULI_HPP
#define CONFLAT_MODULI_HPP

#include <vector>

#include "conflat/lattice_oracle.hpp"

namespace conflat {

// Moduli of continuity between the metric and D_0.
// phi: ell -> sup{Dbar(x,y) : D_0(x,y) <= ell}, tabulated on ascending
// scales, with a 1.1 safety factor (sampling may under-estimate the sup).
// psi: conservative inverse, the largest radius that forces Dbar <= theta.
struct ModulusTable {
  std::vector<double> ell;
  std::vector<double> phi;

  // Conservative lookup: value at the smallest tabulated scale >= l; linear
  // extrapolation through the first table entry below the table.
  double phi_of(double l) const;

  // Largest tabulated ell with phi(ell) <= theta (linear extrapolation below
  // the first entry).
  double psi(double theta) const;

  // sup over tabulated scales in [lo, hi] of phi(ell) / (ell - shift).
  double sup_ratio(double lo, double hi, double shift = 0.0) const;
};

// Estimates the table by an exhaustive pair scan from stratified source nodes
// (full distance maps on the given oracle; pass a coarse oracle for speed).
ModulusTable moduli(const LatticeOracle& oracle, const std::vector<double>& scales,
                    int sources_per_axis = 7);

}  // namespace conflat

#endif
