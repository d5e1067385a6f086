#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <vector>

#include "conflat/grid_partition.hpp"
#include "conflat/metric_spec.hpp"
#include "conflat/moduli.hpp"
#include "doctest.h"

using namespace conflat;

namespace {

MetricSpec euclid2() {
  MetricSpec s;
  s.kind = MetricKind::Euclidean;
  s.R = 1.0;
  s.d = 2;
  return s;
}

std::vector<double> geom_scales(double lo, double hi, int n) {
  std::vector<double> s;
  for (int i = 0; i < n; ++i) s.push_back(lo * std::pow(hi / lo, double(i) / (n - 1)));
  return s;
}

ModulusTable linear_table(double slope, double lo, double hi, int n) {
  ModulusTable t;
  t.ell = geom_scales(lo, hi, n);
  for (double l : t.ell) t.phi.push_back(slope * l);
  return t;
}

}  // namespace

TEST_CASE("modulus table lookups are conservative") {
  ModulusTable t;
  t.ell = {1.0, 2.0, 4.0};
  t.phi = {1.0, 3.0, 5.0};

  // value at the smallest tabulated scale >= l
  CHECK(t.phi_of(1.0) == 1.0);
  CHECK(t.phi_of(1.5) == 3.0);
  CHECK(t.phi_of(2.0) == 3.0);
  CHECK(t.phi_of(3.0) == 5.0);
  CHECK(t.phi_of(10.0) == 5.0);  // clamped past the table
  // linear extrapolation through the first entry
  CHECK(t.phi_of(0.5) == doctest::Approx(0.5));
  CHECK(t.phi_of(0.0) == 0.0);

  // psi: largest tabulated ell with phi <= theta
  CHECK(t.psi(3.0) == 2.0);
  CHECK(t.psi(4.9) == 2.0);
  CHECK(t.psi(5.0) == 4.0);
  CHECK(t.psi(0.5) == doctest::Approx(0.5));  // extrapolated below
  CHECK(t.psi(0.0) == 0.0);

  // sup of phi/(ell - shift) over tabulated scales in range
  CHECK(t.sup_ratio(1.0, 4.0, 0.0) == doctest::Approx(5.0 / 4.0 > 3.0 / 2.0 ? 5.0 / 4.0 : 3.0 / 2.0));
  CHECK(t.sup_ratio(2.0, 4.0, 1.0) == doctest::Approx(3.0));  // 3/(2-1)
}

TEST_CASE("measured euclidean modulus is close to the identity with safety factor") {
  LatticeOracle o(euclid2(), 1.0 / 16.0, 3);
  const ModulusTable t = moduli(o, geom_scales(1.0 / 32.0, 2.0 * std::sqrt(2.0), 24), 5);
  REQUIRE(t.ell.size() == 24);
  for (std::size_t i = 1; i < t.phi.size(); ++i) CHECK(t.phi[i] >= t.phi[i - 1]);
  for (std::size_t i = 0; i < t.ell.size(); ++i) {
    const double l = t.ell[i];
    if (l < 0.25 || l > 2.0) continue;
    // sup over sampled pairs with D_0 <= l: at least ~l (minus grid slack),
    // at most (1+tol_lat) l, both times the 1.1 safety factor
    CHECK(t.phi[i] >= 1.1 * (l - 2.0 * o.h()) - 1e-12);
    CHECK(t.phi[i] <= 1.1 * (1.0 + o.tol_lat()) * l + 1e-9);
  }
  // psi inverts phi up to table binning
  const double p = t.psi(0.5);
  CHECK(t.phi_of(p) <= 0.5);
  CHECK(p > 0.3);
  CHECK(p < 0.5);
}

TEST_CASE("conformal modulus is bracketed by the density range") {
  MetricSpec s = euclid2();
  s.kind = MetricKind::Conformal;
  s.density_log = ScalarField::from_string("sinbump:0.5", 2);
  LatticeOracle o(s, 1.0 / 16.0, 3);
  const ModulusTable t = moduli(o, geom_scales(1.0 / 32.0, 2.0 * std::sqrt(2.0), 24), 5);
  for (std::size_t i = 0; i < t.ell.size(); ++i) {
    const double l = t.ell[i];
    if (l < 0.25 || l > 2.0) continue;
    CHECK(t.phi[i] <= 1.1 * (1.0 + o.tol_lat()) * std::exp(0.5) * l + 1e-9);
    CHECK(t.phi[i] >= 1.1 * std::exp(-0.5) * (l - 2.0 * o.h()) - 1e-12);
  }
}

TEST_CASE("grid chooser meets the highway sampling constraint") {
  // Synthetic exact euclidean modulus: phi = 1.1 * ell on a fine table.
  const ModulusTable t = linear_table(1.1, 1e-4, 4.0, 2000);
  LatticeOracle o(euclid2(), 1.0 / 144.0, 3);
  GridOptions opts;
  opts.n_cap = 8;
  opts.highway_constraint = true;
  opts.highway_margin = 0.7;
  const GridPartition gp = choose_grid(o, t, 0.25, opts);
  CHECK(gp.n_bar == 8);
  // smallest M with 1.1 * (R*sqrt(2)/(2M)) <= 0.7*eps/16 is 72; the fine
  // table bins add at most one step of slack
  CHECK(gp.nm() >= 72);
  CHECK(gp.nm() <= 80);
  CHECK(gp.spacing() == doctest::Approx(1.0 / gp.nm()));
  CHECK(gp.vertices_per_axis() == 2 * gp.nm() + 1);
  // the capped coarse grid cannot meet the eps/64 diameter budget; recorded,
  // not hidden
  CHECK_FALSE(gp.diam_ok);
}

TEST_CASE("grid chooser demands a finer oracle when the net outruns the lattice") {
  const ModulusTable t = linear_table(1.1, 1e-4, 4.0, 2000);
  LatticeOracle o(euclid2(), 1.0 / 16.0, 3);  // too coarse for nm ~ 72
  GridOptions opts;
  opts.n_cap = 8;
  try {
    choose_grid(o, t, 0.25, opts);
    FAIL("expected OracleTooCoarse");
  } catch (const OracleTooCoarse& e) {
    CHECK(e.h_needed > 0.0);
    CHECK(e.h_needed <= 1.0 / 144.0 + 1e-12);
  }
}

TEST_CASE("inflated coarse-cube diameter is measured when the lattice resolves it") {
  const ModulusTable t = linear_table(1.1, 1e-4, 4.0, 2000);
  LatticeOracle o(euclid2(), 1.0 / 128.0, 3);
  GridOptions opts;
  opts.highway_constraint = false;
  const double eps = 16.0;  // large budget => small n_bar, cheap measurement
  const GridPartition gp = choose_grid(o, t, eps, opts);
  CHECK(gp.diam_measured);
  CHECK(gp.diam_ok);
  const double diam0 = 3.0 * gp.R * std::sqrt(2.0) / gp.n_bar;
  CHECK(gp.measured_diam >= 0.9 * diam0);
  CHECK(gp.measured_diam <= (1.0 + o.tol_lat()) * diam0 + 2.0 * o.h());
  CHECK(gp.measured_diam <= gp.diam_budget);
}

TEST_CASE("nearest-neighbor weight coupling arithmetic (opt-in)") {
  // With the identity modulus, the nearest-neighbor rule phi(R/nm) <= eps/128
  // at eps = 0.2 forces nm >= 640.
  const ModulusTable t = linear_table(1.0, 1e-4, 4.0, 40000);
  const double eps = 0.2;
  const double p = t.psi(eps / 128.0);
  CHECK(p <= eps / 128.0 + 1e-12);
  CHECK(std::ceil(1.0 / p) >= 640);
  CHECK(std::ceil(1.0 / p) <= 642);  // table binning slack
}
