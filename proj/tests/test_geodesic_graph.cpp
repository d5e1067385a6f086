#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <vector>

#include "conflat/geodesic_set.hpp"
#include "conflat/lattice_oracle.hpp"
#include "conflat/metric_spec.hpp"
#include "conflat/weighted_graph.hpp"
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

GridPartition grid2(int n_bar, int m_bar) {
  GridPartition g;
  g.d = 2;
  g.R = 1.0;
  g.n_bar = n_bar;
  g.m_bar = m_bar;
  return g;
}

double path_length(const LatticeOracle& o, const std::vector<int32_t>& nodes) {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) s += o.edge_weight(nodes[i], nodes[i + 1]);
  return s;
}

}  // namespace

TEST_CASE("net pair enumeration: primitive forward offsets within the radius") {
  LatticeOracle o(euclid2(), 0.25, 3);
  const GridPartition grid = grid2(1, 1);  // 3x3 net, spacing 1

  const GeodesicSet g1 = build_G1(o, grid, 1);
  CHECK(g1.net_vertices.size() == 9);
  // offsets (1,0),(0,1),(1,1),(-1,1): 6+6+4+4 unordered pairs on a 3x3 net
  CHECK(g1.paths.size() == 20);

  const GeodesicSet g2 = build_G1(o, grid, 2);
  // c_pair=2 adds the primitive knight offsets (±2,1),(±1,2): 2 each;
  // (2,0),(0,2),(±2,2) are non-primitive and skipped
  CHECK(g2.paths.size() == 28);

  for (const GeodesicPath& p : g2.paths) {
    REQUIRE(p.nodes.size() >= 2);
    CHECK(p.nodes.front() == p.a);
    CHECK(p.nodes.back() == p.b);
    CHECK(p.len == o.dist_nodes(p.a, p.b));       // true geodesics
    CHECK(path_length(o, p.nodes) == p.len);      // exact: quantized weights
  }
  CHECK(std::is_sorted(g2.net_vertices.begin(), g2.net_vertices.end()));
  CHECK_THROWS(build_G1(o, grid, 0));
}

TEST_CASE("untangling leaves any two paths overlapping in one contiguous run") {
  // The euclidean lattice has heavy shortest-path ties, so the raw geodesics
  // genuinely tangle.
  LatticeOracle o(euclid2(), 0.125, 3);
  const GeodesicSet raw = build_G1(o, grid2(2, 1), 2);
  const GeodesicSet gs = untangle(raw);

  REQUIRE(gs.paths.size() == raw.paths.size());
  for (std::size_t i = 0; i < gs.paths.size(); ++i) {
    CHECK(gs.paths[i].a == raw.paths[i].a);
    CHECK(gs.paths[i].b == raw.paths[i].b);
    CHECK(gs.paths[i].len == raw.paths[i].len);  // splices swap equal lengths
    CHECK(path_length(o, gs.paths[i].nodes) == gs.paths[i].len);
  }
  std::string msg;
  CHECK(check_untangled(gs, 1000000, &msg));
  CHECK(msg.empty());
}

TEST_CASE("tangled pair is detected") {
  LatticeOracle o(euclid2(), 0.25, 3);
  GeodesicSet gs;
  gs.oracle = &o;
  // Two paths sharing exactly their endpoints but disjoint in between.
  GeodesicPath p1;
  p1.nodes = {o.snap({{-0.5, 0.0, 0.0}}), o.snap({{-0.25, 0.0, 0.0}}), o.snap({{0.0, 0.0, 0.0}}),
              o.snap({{0.25, 0.0, 0.0}}), o.snap({{0.5, 0.0, 0.0}})};
  GeodesicPath p2;
  p2.nodes = {o.snap({{-0.5, 0.0, 0.0}}), o.snap({{-0.25, 0.25, 0.0}}), o.snap({{0.0, 0.25, 0.0}}),
              o.snap({{0.25, 0.25, 0.0}}), o.snap({{0.5, 0.0, 0.0}})};
  for (GeodesicPath* p : {&p1, &p2}) {
    p->a = p->nodes.front();
    p->b = p->nodes.back();
    p->len = path_length(o, p->nodes);
    gs.paths.push_back(*p);
  }
  std::string msg;
  CHECK_FALSE(check_untangled(gs, 1000, &msg));
  CHECK_FALSE(msg.empty());
}

TEST_CASE("merge vertices at endpoint-on-interior contacts") {
  LatticeOracle o(euclid2(), 0.25, 3);
  GeodesicSet gs;
  gs.oracle = &o;
  GeodesicPath p1;  // horizontal through the origin
  p1.nodes = {o.snap({{-0.25, 0.0, 0.0}}), o.snap({{0.0, 0.0, 0.0}}), o.snap({{0.25, 0.0, 0.0}})};
  GeodesicPath p2;  // vertical, ending on p1's interior node
  p2.nodes = {o.snap({{0.0, 0.0, 0.0}}), o.snap({{0.0, 0.25, 0.0}})};
  for (GeodesicPath* p : {&p1, &p2}) {
    p->a = p->nodes.front();
    p->b = p->nodes.back();
    p->len = path_length(o, p->nodes);
    gs.paths.push_back(*p);
  }
  const MergedGraph m = insert_merge_vertices(gs);
  CHECK(m.vpos.size() == 4);
  CHECK(m.edges.size() == 3);
  double total = 0.0;
  for (const auto& e : m.edges) {
    CHECK(e.pts.size() == e.segw.size() + 1);
    total += e.len;
  }
  CHECK(total == doctest::Approx(p1.len + p2.len).epsilon(1e-14));
}

TEST_CASE("merge vertices at transversal segment crossings") {
  LatticeOracle o(euclid2(), 0.25, 3);
  GeodesicSet gs;
  gs.oracle = &o;
  GeodesicPath p1;  // knight edge (0,0)-(0.5,0.25)
  p1.nodes = {o.snap({{0.0, 0.0, 0.0}}), o.snap({{0.5, 0.25, 0.0}})};
  GeodesicPath p2;  // vertical edge crossing it away from any lattice node
  p2.nodes = {o.snap({{0.25, 0.0, 0.0}}), o.snap({{0.25, 0.25, 0.0}})};
  for (GeodesicPath* p : {&p1, &p2}) {
    p->a = p->nodes.front();
    p->b = p->nodes.back();
    p->len = path_length(o, p->nodes);
    gs.paths.push_back(*p);
  }
  const MergedGraph m = insert_merge_vertices(gs);
  REQUIRE(m.vpos.size() == 5);  // 4 endpoints + the crossing
  CHECK(m.edges.size() == 4);
  // the one vertex that is not a lattice node is the crossing point
  int cross_id = -1;
  for (std::size_t i = 0; i < m.vpos.size(); ++i) {
    bool is_node = false;
    for (const GeodesicPath& p : gs.paths)
      for (int32_t nid : p.nodes)
        if (dist0(m.vpos[i], o.coord(nid)) == 0.0) is_node = true;
    if (!is_node) cross_id = static_cast<int>(i);
  }
  REQUIRE(cross_id >= 0);
  CHECK(m.vkind[cross_id] == kVertexMerge);
  CHECK(m.vpos[cross_id][0] == doctest::Approx(0.25).epsilon(1e-9));
  CHECK(m.vpos[cross_id][1] == doctest::Approx(0.125).epsilon(1e-9));
  // split weights sum back to the whole
  double total = 0.0;
  for (const auto& e : m.edges) total += e.len;
  CHECK(total == doctest::Approx(p1.len + p2.len).epsilon(1e-12));
}

TEST_CASE("linearization breakpoints: explicit tau and K") {
  MergedGraph m;
  m.d = 2;
  m.R = 1.0;
  m.vpos = {{{-0.5, 0.0, 0.0}}, {{0.5, 0.0, 0.0}}};
  m.vkind = {kVertexNet, kVertexNet};
  m.net_vertex_ids = {0, 1};
  MergedGraph::PolyEdge e;
  e.u = 0;
  e.v = 1;
  e.pts = {m.vpos[0], m.vpos[1]};
  e.segw = {1.0};
  e.len = 1.0;
  m.edges.push_back(e);

  LinearizeOptions opts;
  opts.tau = 0.1;
  opts.K = 4;
  opts.weight_target = 1.0;
  const WeightedGraph g = piecewise_linearize(m, opts);
  // marks at arclength 0.1, 0.3, 0.5, 0.7, 0.9 -> 6 chords
  REQUIRE(g.edge_count() == 6);
  REQUIRE(g.vertex_count() == 7);
  std::vector<double> xs;
  for (std::size_t i = 0; i < g.vertex_count(); ++i)
    if (g.vkind[i] == kVertexSubdivision) xs.push_back(g.vpos[i][0]);
  std::sort(xs.begin(), xs.end());
  const std::vector<double> expect = {-0.4, -0.2, 0.0, 0.2, 0.4};
  REQUIRE(xs.size() == expect.size());
  for (std::size_t i = 0; i < xs.size(); ++i)
    CHECK(xs[i] == doctest::Approx(expect[i]).epsilon(1e-12));
  double l0 = 0.0;
  for (double l : g.el0) l0 += l;
  CHECK(l0 == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("linearization subdivides to the weight target") {
  MergedGraph m;
  m.d = 2;
  m.R = 1.0;
  m.vpos = {{{-0.5, 0.0, 0.0}}, {{0.5, 0.0, 0.0}}};
  m.vkind = {kVertexNet, kVertexNet};
  m.net_vertex_ids = {0, 1};
  MergedGraph::PolyEdge e;
  e.u = 0;
  e.v = 1;
  e.pts = {m.vpos[0], m.vpos[1]};
  e.segw = {1.0};
  e.len = 1.0;
  m.edges.push_back(e);

  LinearizeOptions opts;
  opts.weight_target = 0.03;
  const WeightedGraph g = piecewise_linearize(m, opts);
  CHECK(g.edge_count() >= 34);  // ceil(1/0.03)
  for (double w : g.ew) CHECK(w <= 0.03 + 1e-12);
  double wsum = 0.0;
  for (double w : g.ew) wsum += w;
  CHECK(wsum == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("straight-segment disjointness check catches violations") {
  WeightedGraph g;
  g.d = 2;
  g.R = 1.0;
  g.vpos = {{{0.0, 0.0, 0.0}}, {{0.5, 0.25, 0.0}}, {{0.25, 0.0, 0.0}}, {{0.25, 0.25, 0.0}}};
  g.vkind = {kVertexNet, kVertexNet, kVertexNet, kVertexNet};
  g.eu = {0, 2};
  g.ev = {1, 3};
  g.ew = {1.0, 1.0};
  g.el0 = {dist0(g.vpos[0], g.vpos[1]), dist0(g.vpos[2], g.vpos[3])};
  std::string msg;
  CHECK_FALSE(segments_disjoint(g, &msg));  // transversal crossing
  CHECK_FALSE(msg.empty());

  // collinear overlap through a shared vertex
  WeightedGraph c;
  c.d = 2;
  c.R = 1.0;
  c.vpos = {{{0.0, 0.0, 0.0}}, {{0.5, 0.0, 0.0}}, {{0.25, 0.0, 0.0}}};
  c.vkind = {kVertexNet, kVertexNet, kVertexNet};
  c.eu = {0, 1};
  c.ev = {1, 2};
  c.ew = {1.0, 1.0};
  c.el0 = {0.5, 0.25};
  msg.clear();
  CHECK_FALSE(segments_disjoint(c, &msg));
}

TEST_CASE("full graph stage: disjoint chords, exact save/load round-trip") {
  LatticeOracle o(euclid2(), 0.125, 3);
  const GridPartition grid = grid2(2, 1);
  GeodesicSet gs = untangle(build_G1(o, grid, 2));
  REQUIRE(check_untangled(gs, 1000000));
  const MergedGraph m = insert_merge_vertices(gs);
  LinearizeOptions opts;
  opts.weight_target = 0.05;
  WeightedGraph g = piecewise_linearize(m, opts);
  assign_weights(g, o);
  g.n_bar = grid.n_bar;
  g.m_bar = grid.m_bar;

  CHECK(segments_disjoint(g));
  REQUIRE(g.net_vertex_ids.size() == 25);  // 5x5 net
  for (int32_t vid : g.net_vertex_ids) CHECK(g.vkind[vid] == kVertexNet);

  // graph distance between net vertices reproduces the lattice metric on the
  // covered pairs (the stored geodesics realize it; no graph path beats it)
  for (const GeodesicPath& p : gs.paths) {
    int32_t gu = -1, gv = -1;
    for (int32_t vid : g.net_vertex_ids) {
      if (dist0(g.vpos[vid], o.coord(p.a)) == 0.0) gu = vid;
      if (dist0(g.vpos[vid], o.coord(p.b)) == 0.0) gv = vid;
    }
    REQUIRE(gu >= 0);
    REQUIRE(gv >= 0);
    CHECK(g.graph_dist(gu, gv) == doctest::Approx(p.len).epsilon(1e-9));
    if (p.a == gs.paths.front().a && p.b == gs.paths.front().b) break;  // spot check is enough
  }

  const std::string path =
      (std::filesystem::temp_directory_path() / "conflat_graph_rt.txt").string();
  g.save(path);
  const WeightedGraph h = WeightedGraph::load(path);
  CHECK(h.vertex_count() == g.vertex_count());
  CHECK(h.edge_count() == g.edge_count());
  CHECK(h.ew == g.ew);  // %.17g round-trip is exact
  CHECK(h.hash() == g.hash());
  CHECK(h.n_bar == g.n_bar);
}
