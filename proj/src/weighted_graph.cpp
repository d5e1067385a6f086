#include "conflat/weighted_graph.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <queue>
#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace conflat {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

uint64_t edge_key(int32_t a, int32_t b) {
  if (a > b) std::swap(a, b);
  return (uint64_t(uint32_t(a)) << 32) | uint32_t(b);
}

// Closest points of segments p0p1 and q0q1; returns squared distance, with
// the parameters of the closest pair in t and s.
double seg_seg_dist2(const Vec& p0, const Vec& p1, const Vec& q0, const Vec& q1, double& t,
                     double& s) {
  const Vec u = p1 - p0, v = q1 - q0, w = p0 - q0;
  const double a = dot(u, u), b = dot(u, v), c = dot(v, v);
  const double d = dot(u, w), e = dot(v, w);
  const double den = a * c - b * b;
  double tn, td = den, sn, sd = den;
  if (den < 1e-18 * a * c + 1e-300) {  // near parallel
    tn = 0.0;
    td = 1.0;
    sn = e;
    sd = c;
  } else {
    tn = b * e - c * d;
    sn = a * e - b * d;
  }
  if (tn < 0.0) {
    tn = 0.0;
    sn = e;
    sd = c;
  } else if (tn > td) {
    tn = td;
    sn = e + b;
    sd = c;
  }
  if (sn < 0.0) {
    sn = 0.0;
    tn = std::clamp(-d, 0.0, a);
    td = a;
  } else if (sn > sd) {
    sn = sd;
    tn = std::clamp(-d + b, 0.0, a);
    td = a;
  }
  t = (td != 0.0) ? tn / td : 0.0;
  s = (sd != 0.0) ? sn / sd : 0.0;
  const Vec diff = (p0 + u * t) - (q0 + v * s);
  return dot(diff, diff);
}

struct VecHash {
  std::size_t operator()(const Vec& p) const {
    uint64_t h = 0x243f6a8885a308d3ULL;
    for (int a = 0; a < 3; ++a) {
      uint64_t bits;
      std::memcpy(&bits, &p.c[a], 8);
      h = splitmix64(h ^ bits);
    }
    return h;
  }
};
struct VecEq {
  bool operator()(const Vec& a, const Vec& b) const { return a.c == b.c; }
};

}  // namespace

MergedGraph insert_merge_vertices(const GeodesicSet& gs) {
  const LatticeOracle& o = *gs.oracle;
  MergedGraph g;
  g.d = o.d();
  g.R = o.R();

  // Unique lattice edges with coverage signature (count + hashed path set).
  struct EdgeInfo {
    int32_t a, b;
    int count = 0;
    uint64_t cov = 0;
    std::vector<std::pair<double, Vec>> splits;  // t along a->b, crossing point
  };
  std::unordered_map<uint64_t, int32_t> ekey2idx;
  std::vector<EdgeInfo> edges;
  ekey2idx.reserve(gs.paths.size() * 4);
  for (std::size_t p = 0; p < gs.paths.size(); ++p) {
    const auto& N = gs.paths[p].nodes;
    for (std::size_t i = 0; i + 1 < N.size(); ++i) {
      const uint64_t key = edge_key(N[i], N[i + 1]);
      auto [it, fresh] = ekey2idx.try_emplace(key, static_cast<int32_t>(edges.size()));
      if (fresh) {
        EdgeInfo ei;
        ei.a = std::min(N[i], N[i + 1]);
        ei.b = std::max(N[i], N[i + 1]);
        edges.push_back(std::move(ei));
      }
      EdgeInfo& ei = edges[it->second];
      ei.count += 1;
      ei.cov += splitmix64(p + 1);
    }
  }

  // Nodes that must become vertices: path endpoints, coverage changes, and
  // nodes where more than two distinct lattice edges meet.
  std::unordered_set<int32_t> vertex_nodes;
  for (int32_t v : gs.net_vertices) vertex_nodes.insert(v);
  {
    std::unordered_map<int32_t, std::vector<uint64_t>> nedges;
    for (const auto& [key, idx] : ekey2idx) {
      (void)idx;
      const int32_t a = int32_t(key >> 32), b = int32_t(key & 0xffffffffu);
      nedges[a].push_back(key);
      nedges[b].push_back(key);
    }
    for (auto& [n, ks] : nedges) {
      std::sort(ks.begin(), ks.end());
      ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
      if (ks.size() > 2) vertex_nodes.insert(n);
    }
  }
  for (const auto& gp : gs.paths) {
    const auto& N = gp.nodes;
    for (std::size_t i = 1; i + 1 < N.size(); ++i) {
      const EdgeInfo& e1 = edges[ekey2idx.at(edge_key(N[i - 1], N[i]))];
      const EdgeInfo& e2 = edges[ekey2idx.at(edge_key(N[i], N[i + 1]))];
      if (e1.count != e2.count || e1.cov != e2.cov) vertex_nodes.insert(N[i]);
    }
  }

  // Transversal crossings between non-adjacent lattice segments. On this
  // stencil a crossing is always interior to both segments, and disjoint
  // segments stay a sizable fraction of h apart, so a tiny absolute threshold
  // separates the two cases cleanly.
  {
    const double h = o.h();
    const double cell = 2.5 * h;
    const int ncell = std::max(1, static_cast<int>(std::ceil(2.0 * g.R / cell)));
    auto cell_of = [&](double x) {
      return std::clamp(static_cast<int>((x + g.R) / cell), 0, ncell - 1);
    };
    std::unordered_map<int64_t, std::vector<int32_t>> bins;
    auto bin_key = [&](int ix, int iy, int iz) {
      return (int64_t(iz) * ncell + iy) * ncell + ix;
    };
    std::vector<std::array<Vec, 2>> epos(edges.size());
    std::vector<std::array<int16_t, 3>> elo(edges.size());
    for (std::size_t i = 0; i < edges.size(); ++i) {
      epos[i] = {o.coord(edges[i].a), o.coord(edges[i].b)};
      int lo[3] = {0, 0, 0}, hi[3] = {0, 0, 0};
      for (int a = 0; a < g.d; ++a) {
        lo[a] = cell_of(std::min(epos[i][0][a], epos[i][1][a]));
        hi[a] = cell_of(std::max(epos[i][0][a], epos[i][1][a]));
      }
      elo[i] = {int16_t(lo[0]), int16_t(lo[1]), int16_t(lo[2])};
      for (int z = lo[2]; z <= hi[2]; ++z)
        for (int y = lo[1]; y <= hi[1]; ++y)
          for (int x = lo[0]; x <= hi[0]; ++x)
            bins[bin_key(x, y, z)].push_back(static_cast<int32_t>(i));
    }
    for (auto& [bk, list] : bins) {
      for (std::size_t i = 0; i < list.size(); ++i)
        for (std::size_t j = i + 1; j < list.size(); ++j) {
          int32_t ia = std::min(list[i], list[j]), ib = std::max(list[i], list[j]);
          EdgeInfo &e1 = edges[ia], &e2 = edges[ib];
          if (e1.a == e2.a || e1.a == e2.b || e1.b == e2.a || e1.b == e2.b) continue;
          // handle each pair once, in the cell containing both bbox minima
          const int64_t owner =
              bin_key(std::max(elo[ia][0], elo[ib][0]), std::max(elo[ia][1], elo[ib][1]),
                      std::max(elo[ia][2], elo[ib][2]));
          if (owner != bk) continue;
          double t, s;
          const double d2 =
              seg_seg_dist2(epos[ia][0], epos[ia][1], epos[ib][0], epos[ib][1], t, s);
          if (d2 > 1e-18) continue;
          if (t < 1e-7 || t > 1.0 - 1e-7 || s < 1e-7 || s > 1.0 - 1e-7) continue;
          Vec x = lerp(epos[ia][0], epos[ia][1], t);
          // snap to a fixed fine grid so concurrent crossings (several pairs
          // meeting at one point) yield bitwise-identical vertices
          for (int a = 0; a < g.d; ++a) x[a] = std::ldexp(std::round(std::ldexp(x[a], 30)), -30);
          e1.splits.push_back({t, x});
          e2.splits.push_back({s, x});
        }
    }
    for (auto& e : edges) {
      std::sort(e.splits.begin(), e.splits.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
      e.splits.erase(std::unique(e.splits.begin(), e.splits.end(),
                                 [](const auto& a, const auto& b) {
                                   return VecEq{}(a.second, b.second);
                                 }),
                     e.splits.end());
    }
  }

  // Vertex ids.
  std::unordered_map<int32_t, int32_t> node2vid;
  std::unordered_map<Vec, int32_t, VecHash, VecEq> cross2vid;
  std::unordered_set<int32_t> net_set(gs.net_vertices.begin(), gs.net_vertices.end());
  auto vid_of_node = [&](int32_t n) {
    auto [it, fresh] = node2vid.try_emplace(n, static_cast<int32_t>(g.vpos.size()));
    if (fresh) {
      g.vpos.push_back(o.coord(n));
      g.vkind.push_back(net_set.count(n) ? kVertexNet : kVertexMerge);
    }
    return it->second;
  };
  auto vid_of_cross = [&](const Vec& p) {
    auto [it, fresh] = cross2vid.try_emplace(p, static_cast<int32_t>(g.vpos.size()));
    if (fresh) {
      g.vpos.push_back(p);
      g.vkind.push_back(kVertexMerge);
    }
    return it->second;
  };
  // Net vertices first so their ids are stable and ascending.
  for (int32_t n : gs.net_vertices) g.net_vertex_ids.push_back(vid_of_node(n));

  // Cut the paths into polyline edges at vertices, splitting lattice segments
  // at crossing points with weights divided linearly (sums preserved exactly).
  struct PendingEdge {
    int32_t u = -1;
    std::vector<Vec> pts;
    std::vector<double> segw;
  };
  std::unordered_map<uint64_t, std::vector<int32_t>> dedup;
  auto emit = [&](PendingEdge& pe, int32_t v) {
    MergedGraph::PolyEdge e;
    e.u = pe.u;
    e.v = v;
    e.pts = std::move(pe.pts);
    e.segw = std::move(pe.segw);
    if (e.u > e.v || (e.u == e.v && e.pts.size() > 1 &&
                      std::lexicographical_compare(e.pts.back().c.begin(), e.pts.back().c.end(),
                                                   e.pts.front().c.begin(), e.pts.front().c.end()))) {
      std::swap(e.u, e.v);
      std::reverse(e.pts.begin(), e.pts.end());
      std::reverse(e.segw.begin(), e.segw.end());
    }
    e.len = 0.0;
    for (double w : e.segw) e.len += w;
    uint64_t h = splitmix64(uint64_t(uint32_t(e.u)) << 32 | uint32_t(e.v));
    h = splitmix64(h ^ e.pts.size());
    for (const Vec& p : e.pts) h = splitmix64(h ^ VecHash{}(p));
    auto& slot = dedup[h];
    for (int32_t id : slot) {
      const auto& other = g.edges[id];
      if (other.u == e.u && other.v == e.v && other.pts.size() == e.pts.size() &&
          std::equal(other.pts.begin(), other.pts.end(), e.pts.begin(), VecEq{}))
        return;  // shared sub-path already present
    }
    slot.push_back(static_cast<int32_t>(g.edges.size()));
    g.edges.push_back(std::move(e));
  };

  for (const auto& gp : gs.paths) {
    const auto& N = gp.nodes;
    PendingEdge pe;
    pe.u = vid_of_node(N[0]);
    pe.pts.push_back(o.coord(N[0]));
    for (std::size_t i = 0; i + 1 < N.size(); ++i) {
      const EdgeInfo& ei = edges[ekey2idx.at(edge_key(N[i], N[i + 1]))];
      const double w = o.edge_weight(N[i], N[i + 1]);
      const bool fwd = N[i] == ei.a;
      double tprev = 0.0;
      const std::size_t ns = ei.splits.size();
      for (std::size_t k = 0; k < ns; ++k) {
        const auto& sp = ei.splits[fwd ? k : ns - 1 - k];
        const double t = fwd ? sp.first : 1.0 - sp.first;
        pe.segw.push_back((t - tprev) * w);
        pe.pts.push_back(sp.second);
        tprev = t;
        // crossing points are always vertices
        const int32_t vid = vid_of_cross(sp.second);
        PendingEdge next;
        next.u = vid;
        next.pts.push_back(sp.second);
        emit(pe, vid);
        pe = std::move(next);
      }
      pe.segw.push_back((1.0 - tprev) * w);
      pe.pts.push_back(o.coord(N[i + 1]));
      const bool is_vertex =
          (i + 2 == N.size()) || vertex_nodes.count(N[i + 1]) || net_set.count(N[i + 1]);
      if (is_vertex) {
        const int32_t vid = vid_of_node(N[i + 1]);
        PendingEdge next;
        next.u = vid;
        next.pts.push_back(o.coord(N[i + 1]));
        emit(pe, vid);
        pe = std::move(next);
      }
    }
  }
  return g;
}

WeightedGraph piecewise_linearize(const MergedGraph& g3, const LinearizeOptions& opts) {
  if (g3.edges.empty()) throw std::runtime_error("piecewise_linearize: empty graph");
  double len_min = kInf;
  for (const auto& e : g3.edges) len_min = std::min(len_min, e.len);
  if (!(len_min > 0.0)) throw std::runtime_error("piecewise_linearize: zero-length edge");

  double tau0 = opts.tau > 0.0 ? opts.tau : len_min / 20.0;
  if (opts.weight_target > 0.0) tau0 = std::min(tau0, 0.45 * opts.weight_target);

  for (int attempt = 0;; ++attempt) {
    const double tau = tau0 / double(1LL << attempt);
    const long long kmul = 1LL << attempt;

    WeightedGraph g;
    g.d = g3.d;
    g.R = g3.R;
    g.tau = tau;
    g.vpos = g3.vpos;
    g.vkind = g3.vkind;
    g.net_vertex_ids = g3.net_vertex_ids;

    long long kmax = 1;
    for (const auto& e : g3.edges) {
      // arclength marks for this edge
      const double tau_e = std::min(tau, e.len / 4.0);
      std::vector<double> marks;
      // A short edge keeps its single chord only if it is already straight;
      // distinct curved edges between the same vertex pair must subdivide or
      // their chords would coincide.
      if (!(opts.weight_target > 0.0 && e.len <= opts.weight_target && opts.K == 0 &&
            e.pts.size() == 2)) {
        // Every interior polyline breakpoint becomes a mark, so each chord
        // lies on a single straight segment of the polyline (chords that cut
        // polyline corners would pull the linearized edge set off the curve).
        std::vector<double> anchors{tau_e, e.len - tau_e};
        double acc_arc = 0.0;
        for (std::size_t s2 = 0; s2 + 1 < e.segw.size(); ++s2) {
          acc_arc += e.segw[s2];
          anchors.push_back(acc_arc);
        }
        std::sort(anchors.begin(), anchors.end());
        const double tol = 1e-12 * e.len;
        std::vector<double> base{0.0};
        for (double a : anchors)
          if (a > base.back() + tol && a < e.len - tol) base.push_back(a);
        base.push_back(e.len);
        for (std::size_t gi = 0; gi + 1 < base.size(); ++gi) {
          const double a0 = base[gi], a1 = base[gi + 1];
          const double gap = a1 - a0;
          long long K = 1;
          if (opts.K > 0) {
            // explicit K applies to interior gaps; the tau offcuts stay whole
            if (gi > 0 && gi + 2 < base.size()) K = opts.K * kmul;
          } else {
            const double target = opts.weight_target > 0.0 ? opts.weight_target : gap;
            while (gap / double(K) > target && K < (1LL << 40)) K *= 2;
            K *= kmul;
          }
          kmax = std::max(kmax, K);
          for (long long j = 1; j < K; ++j) marks.push_back(a0 + gap * double(j) / double(K));
          if (a1 < e.len) marks.push_back(a1);
        }
      }

      // walk the polyline, placing breakpoints at the marks
      int32_t prev = e.u;
      double prev_arc = 0.0;
      double acc = 0.0;
      std::size_t seg = 0;
      auto advance_to = [&](double arc) -> Vec {
        while (seg < e.segw.size() && acc + e.segw[seg] < arc - 1e-15 * e.len)
          acc += e.segw[seg++];
        if (seg >= e.segw.size()) return e.pts.back();
        const double f = e.segw[seg] > 0.0 ? std::clamp((arc - acc) / e.segw[seg], 0.0, 1.0) : 0.0;
        return lerp(e.pts[seg], e.pts[seg + 1], f);
      };
      for (double m : marks) {
        const Vec p = advance_to(m);
        const int32_t vid = static_cast<int32_t>(g.vpos.size());
        g.vpos.push_back(p);
        g.vkind.push_back(kVertexSubdivision);
        g.eu.push_back(prev);
        g.ev.push_back(vid);
        g.ew.push_back(m - prev_arc);
        g.el0.push_back(0.0);
        prev = vid;
        prev_arc = m;
      }
      g.eu.push_back(prev);
      g.ev.push_back(e.v);
      g.ew.push_back(e.len - prev_arc);
      g.el0.push_back(0.0);
    }
    g.K = kmax;
    for (std::size_t i = 0; i < g.eu.size(); ++i)
      g.el0[i] = dist0(g.vpos[g.eu[i]], g.vpos[g.ev[i]]);

    std::string msg;
    if (segments_disjoint(g, &msg)) return g;
    if (attempt >= opts.max_retry)
      throw std::runtime_error("piecewise_linearize: segments still intersect after " +
                               std::to_string(attempt + 1) + " attempts: " + msg);
  }
}

bool segments_disjoint(const WeightedGraph& g, std::string* msg) {
  double cell = 0.0;
  for (double l : g.el0) cell = std::max(cell, l);
  cell = std::max(cell * 1.01, 2.0 * g.R / 20000.0);
  const int ncell = std::max(1, static_cast<int>(std::ceil(2.0 * g.R / cell)));
  auto cell_of = [&](double x) {
    return std::clamp(static_cast<int>((x + g.R) / cell), 0, ncell - 1);
  };
  std::unordered_map<int64_t, std::vector<int32_t>> bins;
  std::vector<std::array<int16_t, 3>> elo(g.eu.size());
  auto bin_key = [&](int x, int y, int z) { return (int64_t(z) * ncell + y) * ncell + x; };
  for (std::size_t i = 0; i < g.eu.size(); ++i) {
    const Vec &p = g.vpos[g.eu[i]], &q = g.vpos[g.ev[i]];
    int lo[3] = {0, 0, 0}, hi[3] = {0, 0, 0};
    for (int a = 0; a < g.d; ++a) {
      lo[a] = cell_of(std::min(p[a], q[a]));
      hi[a] = cell_of(std::max(p[a], q[a]));
    }
    elo[i] = {int16_t(lo[0]), int16_t(lo[1]), int16_t(lo[2])};
    for (int z = lo[2]; z <= hi[2]; ++z)
      for (int y = lo[1]; y <= hi[1]; ++y)
        for (int x = lo[0]; x <= hi[0]; ++x)
          bins[bin_key(x, y, z)].push_back(static_cast<int32_t>(i));
  }
  for (auto& [bk, list] : bins) {
    for (std::size_t i = 0; i < list.size(); ++i)
      for (std::size_t j = i + 1; j < list.size(); ++j) {
        const int32_t ia = std::min(list[i], list[j]), ib = std::max(list[i], list[j]);
        const int64_t owner =
            bin_key(std::max(elo[ia][0], elo[ib][0]), std::max(elo[ia][1], elo[ib][1]),
                    std::max(elo[ia][2], elo[ib][2]));
        if (owner != bk) continue;
        const int32_t u1 = g.eu[ia], v1 = g.ev[ia], u2 = g.eu[ib], v2 = g.ev[ib];
        int32_t shared = -1;
        if (u1 == u2 || u1 == v2) shared = u1;
        if (v1 == u2 || v1 == v2) {
          if (shared >= 0) {  // both endpoints shared: the chords coincide
            if (msg)
              *msg = "edges " + std::to_string(ia) + " and " + std::to_string(ib) +
                     " have identical endpoints";
            return false;
          }
          shared = v1;
        }
        if (shared >= 0) {
          // touching at a vertex is fine unless the edges overlap collinearly
          const Vec a = g.vpos[u1 == shared ? v1 : u1] - g.vpos[shared];
          const Vec b = g.vpos[u2 == shared ? v2 : u2] - g.vpos[shared];
          const Vec cr = cross(a, b);
          if (dot(cr, cr) <= 1e-24 * dot(a, a) * dot(b, b) && dot(a, b) > 0.0) {
            if (msg)
              *msg = "edges " + std::to_string(ia) + " and " + std::to_string(ib) +
                     " overlap collinearly at a shared vertex";
            return false;
          }
          continue;
        }
        double t, s;
        const double d2 = seg_seg_dist2(g.vpos[u1], g.vpos[v1], g.vpos[u2], g.vpos[v2], t, s);
        if (d2 <= 1e-24) {
          if (msg)
            *msg = "edges " + std::to_string(ia) + " and " + std::to_string(ib) +
                   " intersect away from a shared vertex";
          return false;
        }
      }
  }
  return true;
}

void assign_weights(WeightedGraph& g, const LatticeOracle& oracle) {
  (void)oracle;  // weights are the sub-arc metric lengths, carried from G3
  for (std::size_t i = 0; i < g.eu.size(); ++i) {
    g.el0[i] = dist0(g.vpos[g.eu[i]], g.vpos[g.ev[i]]);
    if (!(g.ew[i] > 0.0))
      throw std::runtime_error("assign_weights: nonpositive edge weight");
  }
  // connectivity
  g.build_adjacency();
  std::vector<uint8_t> vis(g.vertex_count(), 0);
  std::vector<int32_t> stack{0};
  vis[0] = 1;
  std::size_t count = 1;
  while (!stack.empty()) {
    const int32_t u = stack.back();
    stack.pop_back();
    for (int32_t k = g.adj_head[u]; k < g.adj_head[u + 1]; ++k) {
      const int32_t e = g.adj_edge[k];
      const int32_t v = (g.eu[e] == u) ? g.ev[e] : g.eu[e];
      if (!vis[v]) {
        vis[v] = 1;
        ++count;
        stack.push_back(v);
      }
    }
  }
  if (count != g.vertex_count())
    throw std::runtime_error("assign_weights: graph is disconnected");
}

void WeightedGraph::build_adjacency() {
  adj_head.assign(vertex_count() + 1, 0);
  for (std::size_t i = 0; i < eu.size(); ++i) {
    ++adj_head[eu[i] + 1];
    ++adj_head[ev[i] + 1];
  }
  for (std::size_t i = 1; i < adj_head.size(); ++i) adj_head[i] += adj_head[i - 1];
  adj_edge.assign(adj_head.back(), 0);
  std::vector<int32_t> cur(adj_head.begin(), adj_head.end() - 1);
  for (std::size_t i = 0; i < eu.size(); ++i) {
    adj_edge[cur[eu[i]]++] = static_cast<int32_t>(i);
    adj_edge[cur[ev[i]]++] = static_cast<int32_t>(i);
  }
}

std::vector<double> WeightedGraph::dist_map(int32_t source, std::vector<int32_t>* pred) const {
  if (adj_head.empty()) throw std::runtime_error("graph_dist: adjacency not built");
  std::vector<double> dist(vertex_count(), kInf);
  if (pred) pred->assign(vertex_count(), -1);
  using Item = std::pair<double, int32_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
  dist[source] = 0.0;
  heap.push({0.0, source});
  while (!heap.empty()) {
    auto [du, u] = heap.top();
    heap.pop();
    if (du > dist[u]) continue;
    for (int32_t k = adj_head[u]; k < adj_head[u + 1]; ++k) {
      const int32_t e = adj_edge[k];
      const int32_t v = (eu[e] == u) ? ev[e] : eu[e];
      const double alt = du + ew[e];
      if (alt < dist[v] || (alt == dist[v] && pred && u < (*pred)[v])) {
        dist[v] = alt;
        if (pred) (*pred)[v] = u;
        heap.push({alt, v});
      }
    }
  }
  return dist;
}

double WeightedGraph::graph_dist(int32_t u, int32_t v) const {
  if (adj_head.empty()) throw std::runtime_error("graph_dist: adjacency not built");
  if (u == v) return 0.0;
  std::vector<double> dist(vertex_count(), kInf);
  using Item = std::pair<double, int32_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
  dist[u] = 0.0;
  heap.push({0.0, u});
  while (!heap.empty()) {
    auto [du, x] = heap.top();
    heap.pop();
    if (du > dist[x]) continue;
    if (x == v) return du;
    for (int32_t k = adj_head[x]; k < adj_head[x + 1]; ++k) {
      const int32_t e = adj_edge[k];
      const int32_t y = (eu[e] == x) ? ev[e] : eu[e];
      const double alt = du + ew[e];
      if (alt < dist[y]) {
        dist[y] = alt;
        heap.push({alt, y});
      }
    }
  }
  throw std::runtime_error("graph_dist: vertices are disconnected");
}

void WeightedGraph::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("graph save: cannot open " + path);
  char buf[256];
  std::snprintf(buf, sizeof buf, "GRAPH %d %.17g %d %d %.17g %lld\n", d, R, n_bar, m_bar, tau,
                K);
  out << buf;
  for (std::size_t i = 0; i < vpos.size(); ++i) {
    if (d == 3)
      std::snprintf(buf, sizeof buf, "V %zu %.17g %.17g %.17g %d\n", i, vpos[i][0], vpos[i][1],
                    vpos[i][2], int(vkind[i]));
    else
      std::snprintf(buf, sizeof buf, "V %zu %.17g %.17g %d\n", i, vpos[i][0], vpos[i][1],
                    int(vkind[i]));
    out << buf;
  }
  for (std::size_t i = 0; i < eu.size(); ++i) {
    std::snprintf(buf, sizeof buf, "E %zu %d %d %.17g %.17g\n", i, eu[i], ev[i], ew[i], el0[i]);
    out << buf;
  }
  if (!out) throw std::runtime_error("graph save: write failed for " + path);
}

WeightedGraph WeightedGraph::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("graph load: cannot open " + path);
  WeightedGraph g;
  std::string tag;
  in >> tag;
  if (tag != "GRAPH") throw std::runtime_error("graph load: bad header in " + path);
  in >> g.d >> g.R >> g.n_bar >> g.m_bar >> g.tau >> g.K;
  if (g.d != 2 && g.d != 3) throw std::runtime_error("graph load: bad dimension");
  while (in >> tag) {
    if (tag == "V") {
      std::size_t id;
      Vec p{{0, 0, 0}};
      int kind;
      in >> id >> p[0] >> p[1];
      if (g.d == 3) in >> p[2];
      in >> kind;
      if (id != g.vpos.size()) throw std::runtime_error("graph load: vertex ids out of order");
      g.vpos.push_back(p);
      g.vkind.push_back(static_cast<uint8_t>(kind));
      if (kind == kVertexNet) g.net_vertex_ids.push_back(static_cast<int32_t>(id));
    } else if (tag == "E") {
      std::size_t id;
      int32_t u, v;
      double w, l0;
      in >> id >> u >> v >> w >> l0;
      if (id != g.eu.size()) throw std::runtime_error("graph load: edge ids out of order");
      g.eu.push_back(u);
      g.ev.push_back(v);
      g.ew.push_back(w);
      g.el0.push_back(l0);
    } else {
      throw std::runtime_error("graph load: unexpected token '" + tag + "'");
    }
  }
  return g;
}

uint64_t WeightedGraph::hash() const {
  uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&](uint64_t x) { h = splitmix64(h ^ x); };
  auto mixd = [&](double v) {
    uint64_t bits;
    std::memcpy(&bits, &v, 8);
    mix(bits);
  };
  mix(uint64_t(d));
  mixd(R);
  mix(vpos.size());
  mix(eu.size());
  for (std::size_t i = 0; i < vpos.size(); ++i) {
    for (int a = 0; a < d; ++a) mixd(vpos[i][a]);
    mix(vkind[i]);
  }
  for (std::size_t i = 0; i < eu.size(); ++i) {
    mix(uint64_t(uint32_t(eu[i])) << 32 | uint32_t(ev[i]));
    mixd(ew[i]);
    mixd(el0[i]);
  }
  return h;
}

}  // namespace conflat
