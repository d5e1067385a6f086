#include "conflat/geodesic_set.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

namespace conflat {

namespace {

double run_length(const LatticeOracle& o, const std::vector<int32_t>& nodes, std::size_t i0,
                  std::size_t i1) {
  double len = 0.0;
  for (std::size_t i = i0; i + 1 <= i1; ++i) len += o.edge_weight(nodes[i], nodes[i + 1]);
  return len;
}

}  // namespace

GeodesicSet build_G1(const LatticeOracle& oracle, const GridPartition& grid, int c_pair) {
  if (c_pair < 1) throw std::runtime_error("build_G1: c_pair must be >= 1");
  const int d = oracle.d();
  const double s = grid.spacing();
  const double kf = s / oracle.h();
  const int k = static_cast<int>(std::round(kf));
  if (std::fabs(kf - k) > 1e-9 * kf || k < 1)
    throw std::runtime_error("build_G1: net spacing must be an integer multiple of the lattice h");

  const int n_axis = oracle.nodes_per_axis();
  const int net_axis = grid.vertices_per_axis();
  if ((net_axis - 1) * k != n_axis - 1)
    throw std::runtime_error("build_G1: net does not align with the lattice");

  GeodesicSet gs;
  gs.oracle = &oracle;

  // Forward (lexicographically positive) net offsets within the Chebyshev
  // pair radius; each unordered pair is produced exactly once.
  std::vector<std::array<int, 3>> offsets;
  const int zmax = (d == 3) ? c_pair : 0;
  for (int z = -zmax; z <= zmax; ++z)
    for (int y = -c_pair; y <= c_pair; ++y)
      for (int x = -c_pair; x <= c_pair; ++x) {
        std::array<int, 3> o{x, y, z};
        if (!(std::array<int, 3>{z, y, x} > std::array<int, 3>{0, 0, 0})) continue;
        // Non-primitive offsets pass through intermediate net vertices; their
        // geodesics duplicate the shorter pairs' coverage.
        const int g = std::gcd(std::gcd(std::abs(x), std::abs(y)), std::abs(z));
        if (g == 1) offsets.push_back(o);
      }
  std::sort(offsets.begin(), offsets.end());

  const double ratio = oracle.density_max() / std::max(1e-300, oracle.density_min());
  const int window_steps =
      static_cast<int>(std::ceil(c_pair * k * std::sqrt(double(d)) * ratio)) + 2;

  std::array<int, 3> ni{0, 0, 0};
  std::vector<int> targets;
  std::vector<std::array<int, 3>> used_offsets;
  std::vector<double> dists;
  std::vector<Path> paths;
  const int net_k = (d == 3) ? net_axis : 1;
  for (ni[2] = 0; ni[2] < net_k; ++ni[2])
    for (ni[1] = 0; ni[1] < net_axis; ++ni[1])
      for (ni[0] = 0; ni[0] < net_axis; ++ni[0]) {
        int u = 0, mult = 1;
        for (int a = 0; a < d; ++a) {
          u += ni[a] * k * mult;
          mult *= n_axis;
        }
        gs.net_vertices.push_back(u);

        targets.clear();
        used_offsets.clear();
        for (const auto& o : offsets) {
          int v = 0;
          bool ok = true;
          mult = 1;
          for (int a = 0; a < d; ++a) {
            int i = ni[a] + o[a];
            if (i < 0 || i >= net_axis) {
              ok = false;
              break;
            }
            v += i * k * mult;
            mult *= n_axis;
          }
          if (!ok) continue;
          targets.push_back(v);
          used_offsets.push_back(o);
        }
        if (targets.empty()) continue;

        oracle.local_paths(u, targets, window_steps, dists, &paths);
        for (std::size_t i = 0; i < targets.size(); ++i) {
          if (!std::isfinite(dists[i]))
            throw std::runtime_error("build_G1: pair unreachable within search window");
          GeodesicPath gp;
          gp.a = u;
          gp.b = targets[i];
          gp.len = dists[i];
          gp.nodes.assign(paths[i].nodes.begin(), paths[i].nodes.end());
          gs.paths.push_back(std::move(gp));
        }
      }
  return gs;
}

GeodesicSet untangle(GeodesicSet gs) {
  const LatticeOracle& o = *gs.oracle;
  // node id -> processed paths through it, ascending by construction
  std::unordered_map<int32_t, std::vector<int32_t>> on;
  on.reserve(gs.paths.size() * 4);

  std::vector<int32_t> used;  // paths already spliced against, per path
  std::unordered_map<int32_t, int32_t> pos_j;
  for (std::size_t m = 0; m < gs.paths.size(); ++m) {
    auto& P = gs.paths[m].nodes;
    std::vector<int32_t> out;
    out.reserve(P.size());
    used.clear();
    std::size_t pos = 0;
    while (pos < P.size()) {
      // first node at or after pos lying on a processed path not yet used
      std::size_t t = P.size();
      int32_t j = -1;
      for (std::size_t i = pos; i < P.size(); ++i) {
        auto it = on.find(P[i]);
        if (it == on.end()) continue;
        for (int32_t cand : it->second)
          if (std::find(used.begin(), used.end(), cand) == used.end()) {
            t = i;
            j = cand;
            break;
          }
        if (j >= 0) break;
      }
      if (j < 0) {
        out.insert(out.end(), P.begin() + pos, P.end());
        break;
      }
      const auto& Q = gs.paths[j].nodes;
      pos_j.clear();
      for (std::size_t i = 0; i < Q.size(); ++i) pos_j[Q[i]] = static_cast<int32_t>(i);
      // last node of P on path j
      std::size_t tp = t;
      for (std::size_t i = P.size(); i-- > t;)
        if (pos_j.count(P[i])) {
          tp = i;
          break;
        }
      const int32_t qa = pos_j[P[t]], qb = pos_j[P[tp]];
      out.insert(out.end(), P.begin() + pos, P.begin() + t);
      // Both sub-paths are shortest between the same nodes; lengths must agree.
      const double lp = run_length(o, P, t, tp);
      const double lq =
          run_length(o, Q, std::min(qa, qb), std::max(qa, qb));
      if (std::fabs(lp - lq) > 1e-9 * (1.0 + lp))
        throw std::runtime_error("untangle: splice changed the path length");
      if (qa <= qb)
        out.insert(out.end(), Q.begin() + qa, Q.begin() + qb + 1);
      else
        for (int32_t i = qa; i >= qb; --i) out.push_back(Q[i]);
      pos = tp + 1;
      used.push_back(j);
    }
    P = std::move(out);
    gs.paths[m].len = run_length(o, P, 0, P.size() - 1);
    for (int32_t v : P) on[v].push_back(static_cast<int32_t>(m));
  }
  return gs;
}

bool check_untangled(const GeodesicSet& gs, long long max_pairs, std::string* msg) {
  // Pairs are visited in path order with an early cap, so the checked subset
  // is deterministic and the co-occurrence map never materializes all pairs.
  std::unordered_map<int32_t, std::vector<int32_t>> on;
  on.reserve(gs.paths.size() * 4);
  long long checked = 0;
  std::unordered_map<int32_t, int32_t> pos;
  std::vector<int32_t> partners;
  for (std::size_t p = 0; p < gs.paths.size() && checked < max_pairs; ++p) {
    const auto& P = gs.paths[p].nodes;
    partners.clear();
    for (int32_t v : P) {
      auto it = on.find(v);
      if (it != on.end()) partners.insert(partners.end(), it->second.begin(), it->second.end());
    }
    std::sort(partners.begin(), partners.end());
    partners.erase(std::unique(partners.begin(), partners.end()), partners.end());
    for (int32_t q : partners) {
      if (checked++ >= max_pairs) break;
      const auto& Q = gs.paths[q].nodes;
    pos.clear();
    for (std::size_t i = 0; i < Q.size(); ++i) pos[Q[i]] = static_cast<int32_t>(i);
    // Positions of shared nodes must be one contiguous run in both paths.
    int first = -1, last = -1, count = 0;
    for (std::size_t i = 0; i < P.size(); ++i)
      if (pos.count(P[i])) {
        if (first < 0) first = static_cast<int>(i);
        last = static_cast<int>(i);
        ++count;
      }
    bool ok = count == last - first + 1;
    if (ok && count > 1) {
      int qa = pos[P[first]], qb = pos[P[last]];
      ok = std::abs(qb - qa) == count - 1;
      for (int i = first; ok && i <= last; ++i)
        ok = pos[P[i]] == qa + (qb >= qa ? 1 : -1) * (i - first);
    }
    if (!ok) {
      if (msg) *msg = "paths " + std::to_string(p) + " and " + std::to_string(q) +
                      " intersect in a non-contiguous set";
      return false;
    }
    }
    for (int32_t v : P) on[v].push_back(static_cast<int32_t>(p));
  }
  return true;
}

}  // namespace conflat
