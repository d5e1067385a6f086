#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <vector>

#include "conflat/conformal_oracle.hpp"
#include "conflat/field.hpp"
#include "doctest.h"

using namespace conflat;

namespace {

WeightedGraph one_edge_graph(double w_over_l) {
  WeightedGraph g;
  g.d = 2;
  g.R = 1.0;
  g.vpos = {{{-0.5, 0.0, 0.0}}, {{0.5, 0.0, 0.0}}};
  g.vkind = {kVertexNet, kVertexNet};
  g.eu = {0};
  g.ev = {1};
  g.el0 = {1.0};
  g.ew = {w_over_l};
  return g;
}

SynthParams params_with(double eta, double eta_bar, double C0, double C1) {
  SynthParams p;
  p.eps = 0.25;
  p.R = 1.0;
  p.d = 2;
  p.eta = eta;
  p.eta_bar = eta_bar;
  p.C0 = C0;
  p.C1 = C1;
  return p;
}

}  // namespace

TEST_CASE("far-field C1 = 0 with a neutral tube core reproduces flat distances") {
  // core = log(w/l0) = 0, C0 = 2, C1 = 0: f >= 0 everywhere, zero off-band.
  const WeightedGraph g = one_edge_graph(1.0);
  const SynthParams p = params_with(0.01, 0.004, 2.0, 0.0);
  FieldEvaluator fe(g, p);
  ConformalOracle co(&fe, 2, 1.0, 0.125, 3);
  ConformalOracle flat(nullptr, 2, 1.0, 0.125, 3, /*zero_field=*/true);

  // same side of the tube: the flat geodesic never meets the band
  const Vec x{{-0.5, 0.25, 0.0}}, y{{0.5, 0.25, 0.0}};
  CHECK(co.ef_dist(x, y) == flat.ef_dist(x, y));

  // crossing the tube pays the band at least once and at most ~one segment
  const Vec a{{0.0, -0.25, 0.0}}, b{{0.0, 0.25, 0.0}};
  const double d0 = flat.ef_dist(a, b);
  const double dc = co.ef_dist(a, b);
  // both C0-rings (each eta_bar/2 wide) are traversed at e^2
  CHECK(dc >= d0 + (std::exp(2.0) - 1.0) * p.eta_bar / 2.0);
  CHECK(dc <= d0 + 2.0 * 0.125 * (std::exp(2.0) - 1.0));
}

TEST_CASE("constant factor scales distances uniformly") {
  // core = C0 = C1 = c: f is c everywhere outside a ring of width eta/2.
  const double c = std::log(0.9);
  const WeightedGraph g = one_edge_graph(0.9);
  FieldEvaluator fe(g, params_with(0.01, 0.004, c, c));
  ConformalOracle co(&fe, 2, 1.0, 0.125, 3);
  ConformalOracle flat(nullptr, 2, 1.0, 0.125, 3, /*zero_field=*/true);

  const std::vector<std::pair<Vec, Vec>> pairs = {
      {{{-0.75, 0.5, 0.0}}, {{0.75, 0.5, 0.0}}},
      {{{-0.5, -0.75, 0.0}}, {{0.25, 0.75, 0.0}}},
      {{{0.9, 0.9, 0.0}}, {{-0.9, -0.9, 0.0}}},
  };
  // not exactly constant: the bump tail overlaps the C0 plateau near the
  // wall, so crossings see a dip of order |c| * eta_bar
  for (const auto& [x, y] : pairs)
    CHECK(co.ef_dist(x, y) ==
          doctest::Approx(std::exp(c) * flat.ef_dist(x, y)).epsilon(1e-3));
}

TEST_CASE("raising the far-field plateau never shortens distances") {
  const WeightedGraph g = one_edge_graph(1.0);
  FieldEvaluator lo(g, params_with(0.01, 0.004, 2.0, 0.0));
  FieldEvaluator hi(g, params_with(0.01, 0.004, 2.0, 0.3));
  ConformalOracle co_lo(&lo, 2, 1.0, 0.125, 3);
  ConformalOracle co_hi(&hi, 2, 1.0, 0.125, 3);

  const Vec x{{-0.75, 0.5, 0.0}}, y{{0.75, -0.25, 0.0}};
  CHECK(co_hi.ef_dist(x, y) >= co_lo.ef_dist(x, y));
  // a far pair on one side lives entirely at f = C1
  const Vec u{{-0.5, 0.5, 0.0}}, v{{0.5, 0.5, 0.0}};
  CHECK(co_hi.ef_dist(u, v) ==
        doctest::Approx(std::exp(0.3) * co_lo.ef_dist(u, v)).epsilon(1e-9));
}

TEST_CASE("segment quadrature exits") {
  const WeightedGraph g = one_edge_graph(0.9);
  const double c1 = 0.2;
  FieldEvaluator fe(g, params_with(0.01, 0.004, 2.0, c1));
  ConformalOracle co(&fe, 2, 1.0, 0.125, 3);

  // fully beyond the band: exactly L * e^C1, quantized
  const Vec a{{0.3, 0.4, 0.0}}, b{{0.5, 0.4, 0.0}};
  CHECK(co.segment_cost(a, b) == quantize_weight(0.2 * std::exp(c1)));

  // running along the edge: the locally constant bump core
  const Vec u{{-0.25, 0.0, 0.0}}, v{{0.0, 0.0, 0.0}};
  CHECK(co.segment_cost(u, v) == doctest::Approx(0.25 * 0.9).epsilon(1e-9));

  // crossing: between the pointwise min and max of e^f over the segment
  const Vec p{{0.0, -0.125, 0.0}}, q{{0.0, 0.125, 0.0}};
  const double w = co.segment_cost(p, q);
  CHECK(w >= 0.25 * 0.9);
  CHECK(w <= 0.25 * std::exp(2.0));
  // symmetric in orientation
  CHECK(co.segment_cost(q, p) == w);
}

TEST_CASE("determinism and geodesic consistency of the conformal oracle") {
  const WeightedGraph g = one_edge_graph(1.0);
  FieldEvaluator fe(g, params_with(0.01, 0.004, 2.0, 0.0));
  ConformalOracle co(&fe, 2, 1.0, 0.125, 3);
  const Vec x{{-0.8, 0.3, 0.0}}, y{{0.7, -0.6, 0.0}};
  const double d1 = co.ef_dist(x, y);
  const double d2 = co.ef_dist(x, y);
  CHECK(d1 == d2);
  const Path pth = co.ef_geodesic(x, y);
  REQUIRE(pth.size() >= 2);
  CHECK(pth.nodes.front() == co.snap(x));
  CHECK(pth.nodes.back() == co.snap(y));
  double len = 0.0;
  for (std::size_t i = 0; i + 1 < pth.pts.size(); ++i)
    len += co.segment_cost(pth.pts[i], pth.pts[i + 1]);
  CHECK(len == d1);  // exact: quantized weights
}

TEST_CASE("trapping check accepts tube-hugging paths and flags excursions") {
  const WeightedGraph g = one_edge_graph(1.0);
  const SynthParams p = params_with(0.01, 0.004, 2.0, 0.0);
  FieldEvaluator fe(g, p);
  const double h_e = 0.125;

  Path along;  // stays on the edge
  along.pts = {{{-0.375, 0.0, 0.0}}, {{-0.25, 0.0, 0.0}}, {{0.0, 0.0, 0.0}}};
  const TrapResult ok = check_trapped(along, fe.index(), p.eta, p.eta_bar, h_e);
  CHECK(ok.inside);
  CHECK(ok.max_excursion == 0.0);

  Path stray;  // endpoints on the edge, interior far off it
  stray.pts = {{{-0.375, 0.0, 0.0}}, {{0.0, 0.375, 0.0}}, {{0.375, 0.0, 0.0}}};
  const TrapResult bad = check_trapped(stray, fe.index(), p.eta, p.eta_bar, h_e);
  CHECK_FALSE(bad.inside);
  CHECK(bad.max_excursion == doctest::Approx(0.375).epsilon(1e-6));

  Path off;  // endpoint not on the edge set at all
  off.pts = {{{0.3, 0.5, 0.0}}, {{0.0, 0.0, 0.0}}};
  CHECK_THROWS(check_trapped(off, fe.index(), p.eta, p.eta_bar, h_e));
}
