#ifndef CONFLAT_SYNTH_PARAMS_HPP
#define CONFLAT_SYNTH_PARAMS_HPP

#include <string>

#include "conflat/moduli.hpp"
#include "conflat/weighted_graph.hpp"

namespace conflat {

// Parameters of the conformal factor. C0 is the tube-wall plateau, C1 the
// far-field plateau; eta/eta_bar are the tube radius and transition width.
struct SynthParams {
  double eps = 0.0;
  double R = 1.0;
  int d = 2;
  int n_bar = 0, m_bar = 0;
  long long K = 0;
  double tau = 0.0;
  double eta = 0.0;
  double eta_bar = 0.0;
  double C0 = 0.0;
  double C1 = 0.0;
  double h_f = 0.0;
  long long edge_count = 0;

  // recorded constraint data (exported as slacks)
  double etasmol_bound = 0.0;   // inf_e eps*l0_e/(512 w_e)
  double psi_eps = 0.0;         // Psi(eps)
  double min_edge_sep = 0.0;    // min D_0 separation of non-adjacent edges
  double param1_rhs = 0.0;      // (1/(64 eps)) sup phi(l)/(l - eta_bar)
  double c1_formula = 0.0;      // log(eps*n_bar*m_bar/64)
  double lip_hat = 0.0;         // measured metric Lipschitz bound sup phi(l)/l
  double max_edge_weight = 0.0;

  int nm() const { return n_bar * m_bar; }

  void save(const std::string& path) const;
  static SynthParams load(const std::string& path);
};

// Selects eta, eta_bar, C0, C1 from the built graph and the measured moduli.
// eta is half the etasmol bound (further capped so that tubes of non-adjacent
// edges cannot overlap); eta_bar = min{eta, Psi(eps)/4, 1/(4 n m)} / 2;
// C0 = log(eps/(128 eta_bar)). C1 is log(eps*n*m/64) raised, when necessary,
// to log(1.1 * sup phi(l)/l): the far-field rate must dominate the metric's
// Lipschitz rate for lower bounds to survive a subdivided (rather than
// globally dense) net; both values are recorded.
SynthParams choose_params(const WeightedGraph& g, const ModulusTable& mod, double eps);

// Min D_0 distance between non-adjacent edges (binned scan; exact for pairs
// within a bin radius, lower-bounded by the bin radius otherwise).
double min_edge_separation(const WeightedGraph& g);

}  // namespace conflat

#endif
