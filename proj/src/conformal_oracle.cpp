#include "conflat/conformal_oracle.hpp"

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

struct ConformalOracle::Scratch {
  std::vector<double> dist;
  std::vector<int32_t> pred;
  std::vector<uint32_t> stamp;
  uint32_t epoch = 0;
};

ConformalOracle::~ConformalOracle() = default;

ConformalOracle::ConformalOracle(const FieldEvaluator* fe, int d, double R, double h_e,
                                 int stencil_order, bool zero_field)
    : fe_(fe), zero_field_(zero_field), d_(d), R_(R), h_(h_e), order_(stencil_order) {
  if (!zero_field_ && fe_ == nullptr)
    throw std::runtime_error("conformal oracle: field evaluator required");
  if (h_ <= 0.0) throw std::runtime_error("conformal oracle: h_e must be positive");
  const double steps = 2.0 * R_ / h_;
  const double rounded = std::round(steps);
  if (std::fabs(steps - rounded) > 1e-6 * steps)
    throw std::runtime_error("conformal oracle: h_e must divide 2R within rounding");
  n_axis_ = static_cast<int>(rounded) + 1;
  double count = 1.0;
  for (int a = 0; a < d_; ++a) count *= n_axis_;
  if (count > 6.0e7)
    throw std::runtime_error("conformal oracle: node count exceeds memory budget");
  node_count_ = static_cast<int>(count);
  tol_lat_ = stencil_anisotropy_bound(d_, order_);

  auto push_unique = [&](std::array<int, 3> v) {
    if (std::find(stencil_.begin(), stencil_.end(), v) == stencil_.end()) stencil_.push_back(v);
  };
  const int zmax = (d_ == 3) ? 1 : 0;
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
        if (d_ == 2) {
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
  for (const auto& o : stencil_)
    if (std::array<int, 3>{o[2], o[1], o[0]} > std::array<int, 3>{0, 0, 0})
      forward_.push_back(o);

  // Precompute all lattice edge weights once.
  weights_.assign(std::size_t(node_count_) * forward_.size(), -1.0);
  std::array<int, 3> idx{0, 0, 0};
  for (int id = 0; id < node_count_; ++id) {
    int rem = id;
    for (int a = 0; a < d_; ++a) {
      idx[a] = rem % n_axis_;
      rem /= n_axis_;
    }
    const Vec pu = coord(id);
    for (std::size_t k = 0; k < forward_.size(); ++k) {
      bool ok = true;
      for (int a = 0; a < d_; ++a) {
        const int i = idx[a] + forward_[k][a];
        if (i < 0 || i >= n_axis_) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
      Vec pv = pu;
      for (int a = 0; a < d_; ++a) pv[a] += forward_[k][a] * h_;
      weights_[std::size_t(id) * forward_.size() + k] = segment_cost(pu, pv);
    }
  }

  scratch_ = std::make_unique<Scratch>();
  scratch_->dist.assign(node_count_, kInf);
  scratch_->pred.assign(node_count_, -1);
  scratch_->stamp.assign(node_count_, 0);
}

Vec ConformalOracle::coord(int id) const {
  Vec p;
  int rem = id;
  for (int a = 0; a < d_; ++a) {
    p[a] = -R_ + (rem % n_axis_) * h_;
    rem /= n_axis_;
  }
  return p;
}

int ConformalOracle::snap(const Vec& p) const {
  for (int a = 0; a < d_; ++a)
    if (p[a] < -R_ - 1e-12 || p[a] > R_ + 1e-12)
      throw std::runtime_error("conformal oracle: query point outside box");
  int id = 0, mult = 1;
  for (int a = 0; a < d_; ++a) {
    int i = static_cast<int>(std::round((p[a] + R_) / h_));
    i = std::clamp(i, 0, n_axis_ - 1);
    id += i * mult;
    mult *= n_axis_;
  }
  return id;
}

EdgeHit ConformalOracle::cand_hit(const Vec& p, const std::vector<int32_t>& cand) const {
  const WeightedGraph& g = fe_->index().graph();
  EdgeHit best;
  best.r = kInf;
  for (int32_t e : cand) {
    double t;
    const double r = point_segment_dist(p, g.vpos[g.eu[e]], g.vpos[g.ev[e]], &t);
    if (r < best.r || (r == best.r && e < best.edge)) {
      best.r = r;
      best.edge = e;
      best.t = t;
    }
  }
  if (best.r > fe_->index().radius()) best.edge = -1;
  return best;
}

// The candidate set holds every graph edge within the field index radius of
// the full lattice segment, so along it the candidate minimum equals the true
// distance wherever that is at most the radius, and elsewhere certifies that
// the point is past the varying band (f = C1). The candidate minimum is also
// 1-Lipschitz along the segment, which justifies the first exit.
double ConformalOracle::quad(const Vec& a, double ra, const Vec& b, double rb,
                             const std::vector<int32_t>& cand, int depth) const {
  const double L = dist0(a, b);
  const SynthParams& p = fe_->params();
  // the whole segment is past the band, where f = C1
  if (std::min(ra, rb) - 0.5 * L > fe_->band_hi()) return L * std::exp(p.C1);
  const Vec m = lerp(a, b, 0.5);
  const EdgeHit hit = cand_hit(m, cand);
  if (L <= p.eta_bar / 4.0 || depth >= 30) {
    return L * std::exp(fe_->eval_hit(hit));
  }
  // Segment tracks the edge set (r ~ 0 at both ends and the midpoint): f is
  // the locally constant bump core there, and the core drifts only with the
  // slow density variation, so midpoint quadrature is accurate without
  // refining down to the eta_bar scale.
  const double rtiny = 1e-9 * R_;
  if (ra <= rtiny && rb <= rtiny && hit.r <= rtiny) return L * std::exp(fe_->eval_hit(hit));
  return quad(a, ra, m, hit.r, cand, depth + 1) + quad(m, hit.r, b, rb, cand, depth + 1);
}

double ConformalOracle::segment_cost(const Vec& a, const Vec& b) const {
  if (zero_field_) return quantize_weight(dist0(a, b));
  fe_->index().gather_segment(a, b, cand_);
  const double ra = cand_hit(a, cand_).r;
  const double rb = cand_hit(b, cand_).r;
  return quantize_weight(quad(a, ra, b, rb, cand_, 0));
}

double ConformalOracle::edge_weight_cached(int u, int fwd) const {
  return weights_[std::size_t(u) * forward_.size() + fwd];
}

void ConformalOracle::run_dijkstra(int source, const int* window_lo, const int* window_hi,
                                   const std::vector<int>* targets, Scratch& s) const {
  ++s.epoch;
  if (s.epoch == 0) {
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
  const std::size_t nf = forward_.size();
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
    for (int a = 0; a < d_; ++a) {
      idx[a] = rem % n_axis_;
      rem /= n_axis_;
    }
    auto relax = [&](int v, double w) {
      touch(v);
      const double alt = du + w;
      if (alt < s.dist[v] || (alt == s.dist[v] && u < s.pred[v])) {
        s.dist[v] = alt;
        s.pred[v] = u;
        heap.push({alt, v});
      }
    };
    for (std::size_t k = 0; k < nf; ++k) {
      // forward neighbor
      {
        int v = 0, mult = 1;
        bool ok = true;
        for (int a = 0; a < d_; ++a) {
          const int i = idx[a] + forward_[k][a];
          if (i < 0 || i >= n_axis_ || (window_lo && (i < window_lo[a] || i > window_hi[a]))) {
            ok = false;
            break;
          }
          v += i * mult;
          mult *= n_axis_;
        }
        if (ok) relax(v, edge_weight_cached(u, static_cast<int>(k)));
      }
      // backward neighbor: weight stored at that node's forward slot
      {
        int v = 0, mult = 1;
        bool ok = true;
        for (int a = 0; a < d_; ++a) {
          const int i = idx[a] - forward_[k][a];
          if (i < 0 || i >= n_axis_ || (window_lo && (i < window_lo[a] || i > window_hi[a]))) {
            ok = false;
            break;
          }
          v += i * mult;
          mult *= n_axis_;
        }
        if (ok) relax(v, edge_weight_cached(v, static_cast<int>(k)));
      }
    }
  }
}

std::shared_ptr<const DistMap> ConformalOracle::dist_map(int source) const {
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

double ConformalOracle::dist_nodes(int u, int v) const {
  for (const auto& m : cache_) {
    if (m->source == u) return m->dist[v];
    if (m->source == v) return m->dist[u];
  }
  return dist_map(u)->dist[v];
}

double ConformalOracle::ef_dist(const Vec& x, const Vec& y) const {
  return dist_nodes(snap(x), snap(y));
}

Path ConformalOracle::ef_geodesic(const Vec& x, const Vec& y) const {
  const int u = snap(x), v = snap(y);
  auto map = dist_map(u);
  if (!std::isfinite(map->dist[v]))
    throw std::runtime_error("ef_geodesic: target unreachable");
  std::vector<int> nodes;
  for (int cur = v; cur != -1; cur = (cur == u ? -1 : map->pred[cur])) nodes.push_back(cur);
  std::reverse(nodes.begin(), nodes.end());
  Path p;
  p.nodes = nodes;
  p.pts.reserve(nodes.size());
  for (int id : nodes) p.pts.push_back(coord(id));
  return p;
}

void ConformalOracle::local_paths(int u, const std::vector<int>& targets, int window_steps,
                                 std::vector<double>& dists, std::vector<Path>* paths) const {
  std::array<int, 3> lo{0, 0, 0}, hi{0, 0, 0};
  int rem = u;
  for (int a = 0; a < d_; ++a) {
    const int i = rem % n_axis_;
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
      Path p;
      p.nodes = nodes;
      p.pts.reserve(nodes.size());
      for (int id : nodes) p.pts.push_back(coord(id));
      (*paths)[i] = std::move(p);
    }
  }
}

TrapResult check_trapped(const Path& path, const EdgeIndex& idx, double eta, double eta_bar,
                         double h_e) {
  if (path.pts.size() < 2) throw std::runtime_error("check_trapped: degenerate path");
  const int d = idx.graph().d;
  const double snap_slack = h_e * std::sqrt(double(d)) / 2.0;
  for (const Vec* end : {&path.pts.front(), &path.pts.back()})
    if (idx.query(*end).r > eta + snap_slack + 1e-12)
      throw std::runtime_error("check_trapped: endpoint not within the tube set");
  TrapResult res;
  const double band = eta + eta_bar / 2.0 + h_e * std::sqrt(double(d));
  for (const Vec& p : path.pts)
    res.max_excursion = std::max(res.max_excursion, idx.query(p).r);
  res.inside = res.max_excursion <= band + 1e-12;
  return res;
}

}  // namespace conflat
