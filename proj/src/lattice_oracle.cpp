#include "conflat/lattice_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>

namespace conflat {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kCacheCap = 24;
}  // namespace

double stencil_anisotropy_bound(int d, int order) {
  const double r2 = std::sqrt(2.0), r3 = std::sqrt(3.0), r5 = std::sqrt(5.0);
  if (d == 2) {
    if (order <= 1) return r2 - 1.0;
    if (order == 2) return std::sqrt(4.0 - 2.0 * r2) - 1.0;        // ~8.2%
    return std::sqrt(10.0 - 4.0 * r5) - 1.0;                        // ~2.75%
  }
  if (order <= 1) return r3 - 1.0;
  // 26-neighborhood chamfer bound; also used as a (conservative) bound for
  // the order-3 stencil in d=3.
  double a = r2 - 1.0, b = r3 - r2;
  return std::sqrt(1.0 + a * a + b * b) - 1.0;                      // ~12.8%
}

struct LatticeOracle::Scratch {
  std::vector<double> dist;
  std::vector<int32_t> pred;
  std::vector<uint32_t> stamp;
  uint32_t epoch = 0;
};

LatticeOracle::~LatticeOracle() = default;

LatticeOracle::LatticeOracle(MetricSpec spec, double h, int stencil_order)
    : spec_(std::move(spec)), h_(h), order_(stencil_order) {
  if (h_ <= 0.0) throw std::runtime_error("lattice_build: h must be positive");
  const double steps = 2.0 * spec_.R / h_;
  const double rounded = std::round(steps);
  if (std::fabs(steps - rounded) > 1e-6 * steps)
    throw std::runtime_error("lattice_build: h must divide 2R within rounding");
  n_axis_ = static_cast<int>(rounded) + 1;
  double count = 1.0;
  for (int a = 0; a < spec_.d; ++a) count *= n_axis_;
  if (count > 6.0e7) throw std::runtime_error("lattice_build: node count exceeds memory budget");
  node_count_ = static_cast<int>(count);
  tol_lat_ = stencil_anisotropy_bound(spec_.d, order_);

  // Stencil offsets: all nonzero vectors in {-1,0,1}^d (orders >= 2), axis
  // only for order 1, plus the (2,1)-type knight moves for order 3.
  auto push_unique = [&](std::array<int, 3> v) {
    if (std::find(stencil_.begin(), stencil_.end(), v) == stencil_.end()) stencil_.push_back(v);
  };
  const int zmax = (spec_.d == 3) ? 1 : 0;
  for (int z = -zmax; z <= zmax; ++z)
    for (int y = -1; y <= 1; ++y)
      for (int x = -1; x <= 1; ++x) {
        if (x == 0 && y == 0 && z == 0) continue;
        int nz = std::abs(x) + std::abs(y) + std::abs(z);
        if (order_ == 1 && nz > 1) continue;
        push_unique({x, y, z});
      }
  if (order_ >= 3) {
    for (int sx = -1; sx <= 1; sx += 2)
      for (int sy = -1; sy <= 1; sy += 2) {
        if (spec_.d == 2) {
          push_unique({2 * sx, sy, 0});
          push_unique({sx, 2 * sy, 0});
        } else {
          for (int sz = -1; sz <= 1; sz += 2) {
            push_unique({2 * sx, sy, 0});
            push_unique({sx, 2 * sy, 0});
            push_unique({2 * sx, 0, sz});
            push_unique({sx, 0, 2 * sz});
            push_unique({0, 2 * sy, sz});
            push_unique({0, sy, 2 * sz});
          }
        }
      }
  }
  std::sort(stencil_.begin(), stencil_.end());

  // Probe density bounds over a sample grid and all stencil directions.
  dens_min_ = kInf;
  dens_max_ = 0.0;
  const int probes = 17;
  const double step = 2.0 * spec_.R / (probes - 1);
  const int kmax = (spec_.d == 3) ? probes : 1;
  for (int k = 0; k < kmax; ++k)
    for (int j = 0; j < probes; ++j)
      for (int i = 0; i < probes; ++i) {
        Vec p{{-spec_.R + i * step, -spec_.R + j * step,
               spec_.d == 3 ? -spec_.R + k * step : 0.0}};
        for (const auto& o : stencil_) {
          Vec v{{double(o[0]), double(o[1]), double(o[2])}};
          double dens = spec_.length_density(p, v);
          dens_min_ = std::min(dens_min_, dens);
          dens_max_ = std::max(dens_max_, dens);
        }
      }

  scratch_ = std::make_unique<Scratch>();
  scratch_->dist.assign(node_count_, kInf);
  scratch_->pred.assign(node_count_, -1);
  scratch_->stamp.assign(node_count_, 0);
}

Vec LatticeOracle::coord(int id) const {
  Vec p;
  int rem = id;
  for (int a = 0; a < spec_.d; ++a) {
    p[a] = -spec_.R + (rem % n_axis_) * h_;
    rem /= n_axis_;
  }
  return p;
}

int LatticeOracle::snap(const Vec& p) const {
  if (!spec_.inside_box(p)) throw std::runtime_error("query point outside box");
  int id = 0, mult = 1;
  for (int a = 0; a < spec_.d; ++a) {
    int i = static_cast<int>(std::round((p[a] + spec_.R) / h_));
    i = std::clamp(i, 0, n_axis_ - 1);
    id += i * mult;
    mult *= n_axis_;
  }
  return id;
}

double LatticeOracle::edge_weight(int u, int v) const {
  return spec_.segment_weight(coord(u), coord(v));
}

void LatticeOracle::run_dijkstra(int source, const int* window_lo, const int* window_hi,
                                 const std::vector<int>* targets, Scratch& s) const {
  ++s.epoch;
  if (s.epoch == 0) {  // stamp wraparound
    std::fill(s.stamp.begin(), s.stamp.end(), 0);
    s.epoch = 1;
  }
  auto touch = [&](int id) {
    if (s.stamp[id] != s.epoch) {
      s.stamp[id] = s.epoch;
      s.dist[id] = kInf;
      s.pred[id] = -1;
    }
  };
  int remaining = -1;
  std::vector<uint8_t> want;
  if (targets) {
    remaining = static_cast<int>(targets->size());
    want.assign(targets->size(), 1);
  }

  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
  touch(source);
  s.dist[source] = 0.0;
  heap.push({0.0, source});

  std::array<int, 3> idx{0, 0, 0};
  while (!heap.empty()) {
    auto [du, u] = heap.top();
    heap.pop();
    touch(u);
    if (du > s.dist[u]) continue;
    if (targets) {
      for (std::size_t i = 0; i < targets->size(); ++i)
        if (want[i] && (*targets)[i] == u) {
          want[i] = 0;
          if (--remaining == 0) return;
        }
    }
    int rem = u;
    for (int a = 0; a < spec_.d; ++a) {
      idx[a] = rem % n_axis_;
      rem /= n_axis_;
    }
    const Vec pu = coord(u);
    for (const auto& o : stencil_) {
      int v = 0, mult = 1;
      bool ok = true;
      for (int a = 0; a < spec_.d; ++a) {
        int i = idx[a] + o[a];
        if (i < 0 || i >= n_axis_ ||
            (window_lo && (i < window_lo[a] || i > window_hi[a]))) {
          ok = false;
          break;
        }
        v += i * mult;
        mult *= n_axis_;
      }
      if (!ok) continue;
      touch(v);
      const double w = spec_.segment_weight(pu, coord(v));
      const double alt = du + w;
      if (alt < s.dist[v] || (alt == s.dist[v] && u < s.pred[v])) {
        s.dist[v] = alt;
        s.pred[v] = u;
        heap.push({alt, v});
      }
    }
  }
}

std::shared_ptr<const DistMap> LatticeOracle::dist_map(int source) const {
  for (auto it = cache_.begin(); it != cache_.end(); ++it) {
    if ((*it)->source == source) {
      auto hit = *it;
      cache_.erase(it);
      cache_.push_front(hit);
      return hit;
    }
  }
  run_dijkstra(source, nullptr, nullptr, nullptr, *scratch_);
  auto map = std::make_shared<DistMap>();
  map->source = source;
  map->dist = scratch_->dist;
  map->pred = scratch_->pred;
  cache_.push_front(map);
  if (cache_.size() > kCacheCap) cache_.pop_back();
  return map;
}

double LatticeOracle::dist_nodes(int u, int v) const {
  for (const auto& m : cache_) {
    if (m->source == u) return m->dist[v];
    if (m->source == v) return m->dist[u];
  }
  return dist_map(u)->dist[v];
}

double LatticeOracle::dist(const Vec& x, const Vec& y) const {
  return dist_nodes(snap(x), snap(y));
}

Path LatticeOracle::path_from_nodes(const std::vector<int>& nodes) const {
  Path p;
  p.nodes = nodes;
  p.pts.reserve(nodes.size());
  for (int id : nodes) p.pts.push_back(coord(id));
  return p;
}

Path LatticeOracle::geodesic(const Vec& x, const Vec& y) const {
  const int u = snap(x), v = snap(y);
  auto map = dist_map(u);
  if (!std::isfinite(map->dist[v])) throw std::runtime_error("geodesic: target unreachable");
  std::vector<int> nodes;
  for (int cur = v; cur != -1; cur = (cur == u ? -1 : map->pred[cur])) nodes.push_back(cur);
  std::reverse(nodes.begin(), nodes.end());
  return path_from_nodes(nodes);
}

void LatticeOracle::local_paths(int u, const std::vector<int>& targets, int window_steps,
                                std::vector<double>& dists, std::vector<Path>* paths) const {
  std::array<int, 3> lo{0, 0, 0}, hi{0, 0, 0};
  int rem = u;
  for (int a = 0; a < spec_.d; ++a) {
    int i = rem % n_axis_;
    rem /= n_axis_;
    lo[a] = std::max(0, i - window_steps);
    hi[a] = std::min(n_axis_ - 1, i + window_steps);
  }
  run_dijkstra(u, lo.data(), hi.data(), &targets, *scratch_);
  Scratch& s = *scratch_;
  dists.assign(targets.size(), kInf);
  if (paths) paths->assign(targets.size(), Path{});
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const int t = targets[i];
    if (s.stamp[t] != s.epoch || !std::isfinite(s.dist[t])) continue;
    dists[i] = s.dist[t];
    if (paths) {
      std::vector<int> nodes;
      for (int cur = t; cur != -1; cur = (cur == u ? -1 : s.pred[cur])) nodes.push_back(cur);
      std::reverse(nodes.begin(), nodes.end());
      (*paths)[i] = path_from_nodes(nodes);
    }
  }
}

}  // namespace conflat
