#include "conflat/edge_index.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace conflat {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

EdgeIndex::EdgeIndex(const WeightedGraph& g, double radius) : g_(&g), radius_(radius) {
  if (g.edge_count() == 0) throw std::runtime_error("edge index: empty graph");
  if (!(radius > 0.0)) throw std::runtime_error("edge index: radius must be positive");
  double lmax = 0.0;
  for (double l : g.el0) lmax = std::max(lmax, l);
  double cell = std::max(lmax, 2.0 * radius);
  const int cap = (g.d == 3) ? 160 : 2048;
  ncell_ = std::clamp(static_cast<int>(std::floor(2.0 * g.R / cell)), 1, cap);
  cell_ = 2.0 * g.R / ncell_;

  const int nz = (g.d == 3) ? ncell_ : 1;
  const int64_t cells = int64_t(ncell_) * ncell_ * nz;
  auto cell_of = [&](double x) {
    return std::clamp(static_cast<int>((x + g.R) / cell_), 0, ncell_ - 1);
  };
  head_.assign(cells + 1, 0);
  auto for_cells = [&](std::size_t e, auto&& fn) {
    const Vec &p = g.vpos[g.eu[e]], &q = g.vpos[g.ev[e]];
    int lo[3] = {0, 0, 0}, hi[3] = {0, 0, 0};
    for (int a = 0; a < g.d; ++a) {
      lo[a] = cell_of(std::min(p[a], q[a]) - radius_);
      hi[a] = cell_of(std::max(p[a], q[a]) + radius_);
    }
    for (int z = lo[2]; z <= hi[2]; ++z)
      for (int y = lo[1]; y <= hi[1]; ++y)
        for (int x = lo[0]; x <= hi[0]; ++x) fn((int64_t(z) * ncell_ + y) * ncell_ + x);
  };
  for (std::size_t e = 0; e < g.edge_count(); ++e)
    for_cells(e, [&](int64_t c) { ++head_[c + 1]; });
  for (std::size_t i = 1; i < head_.size(); ++i) head_[i] += head_[i - 1];
  items_.assign(head_.back(), 0);
  std::vector<int64_t> cur(head_.begin(), head_.end() - 1);
  for (std::size_t e = 0; e < g.edge_count(); ++e)
    for_cells(e, [&](int64_t c) { items_[cur[c]++] = static_cast<int32_t>(e); });
}

void EdgeIndex::scan_cell(int ix, int iy, int iz, const Vec& p, EdgeHit& best) const {
  const int64_t c = (int64_t(iz) * ncell_ + iy) * ncell_ + ix;
  for (int64_t k = head_[c]; k < head_[c + 1]; ++k) {
    const int32_t e = items_[k];
    double t;
    const double r = point_segment_dist(p, g_->vpos[g_->eu[e]], g_->vpos[g_->ev[e]], &t);
    if (r < best.r || (r == best.r && e < best.edge)) {
      best.r = r;
      best.edge = e;
      best.t = t;
    }
  }
}

EdgeHit EdgeIndex::query_within(const Vec& p) const {
  EdgeHit best;
  best.r = kInf;
  auto cell_of = [&](double x) {
    return std::clamp(static_cast<int>((x + g_->R) / cell_), 0, ncell_ - 1);
  };
  scan_cell(cell_of(p[0]), cell_of(p[1]), g_->d == 3 ? cell_of(p[2]) : 0, p, best);
  if (best.r > radius_) {
    best.edge = -1;
    best.r = kInf;
    return best;
  }
  best.r_a = dist0(p, g_->vpos[g_->eu[best.edge]]);
  best.r_b = dist0(p, g_->vpos[g_->ev[best.edge]]);
  return best;
}

EdgeHit EdgeIndex::query(const Vec& p) const {
  EdgeHit best;
  best.r = kInf;
  auto cell_of = [&](double x) {
    return std::clamp(static_cast<int>((x + g_->R) / cell_), 0, ncell_ - 1);
  };
  const int cx = cell_of(p[0]), cy = cell_of(p[1]), cz = g_->d == 3 ? cell_of(p[2]) : 0;
  const int nz = (g_->d == 3) ? ncell_ : 1;
  const int kmax = std::max({cx, ncell_ - 1 - cx, cy, ncell_ - 1 - cy, cz, nz - 1 - cz});
  for (int k = 0; k <= kmax; ++k) {
    // scan the Chebyshev ring at radius k
    for (int z = std::max(0, cz - k); z <= std::min(nz - 1, cz + k); ++z)
      for (int y = std::max(0, cy - k); y <= std::min(ncell_ - 1, cy + k); ++y)
        for (int x = std::max(0, cx - k); x <= std::min(ncell_ - 1, cx + k); ++x) {
          if (std::max({std::abs(x - cx), std::abs(y - cy), std::abs(z - cz)}) != k) continue;
          scan_cell(x, y, z, p, best);
        }
    // every unscanned edge is listed no closer than (k-1) cells away from p's
    // cell, hence at distance >= (k-1)*cell - radius
    if (best.edge >= 0 && (double(k) - 1.0) * cell_ - radius_ > best.r) break;
  }
  if (best.edge < 0) throw std::runtime_error("edge index: query found no edge");
  best.r_a = dist0(p, g_->vpos[g_->eu[best.edge]]);
  best.r_b = dist0(p, g_->vpos[g_->ev[best.edge]]);
  return best;
}

void EdgeIndex::gather_segment(const Vec& a, const Vec& b, std::vector<int32_t>& out) const {
  out.clear();
  auto cell_of = [&](double x) {
    return std::clamp(static_cast<int>((x + g_->R) / cell_), 0, ncell_ - 1);
  };
  int lo[3] = {0, 0, 0}, hi[3] = {0, 0, 0};
  for (int ax = 0; ax < g_->d; ++ax) {
    lo[ax] = cell_of(std::min(a[ax], b[ax]));
    hi[ax] = cell_of(std::max(a[ax], b[ax]));
  }
  const int nz = (g_->d == 3) ? ncell_ : 1;
  (void)nz;
  for (int z = lo[2]; z <= hi[2]; ++z)
    for (int y = lo[1]; y <= hi[1]; ++y)
      for (int x = lo[0]; x <= hi[0]; ++x) {
        const int64_t c = (int64_t(z) * ncell_ + y) * ncell_ + x;
        for (int64_t k = head_[c]; k < head_[c + 1]; ++k) out.push_back(items_[k]);
      }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
}

}  // namespace conflat
