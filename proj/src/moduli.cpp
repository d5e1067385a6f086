#include "conflat/moduli.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace conflat {

double ModulusTable::phi_of(double l) const {
  if (l <= 0.0) return 0.0;
  auto it = std::lower_bound(ell.begin(), ell.end(), l);
  if (it == ell.end()) return phi.back();
  std::size_t i = static_cast<std::size_t>(it - ell.begin());
  if (*it == l || i == 0) {
    // Below the first entry extrapolate linearly through it.
    if (i == 0 && *it != l) return phi[0] * (l / ell[0]);
    return phi[i];
  }
  return phi[i];
}

double ModulusTable::psi(double theta) const {
  if (theta <= 0.0) return 0.0;
  double best = 0.0;
  for (std::size_t i = 0; i < ell.size(); ++i)
    if (phi[i] <= theta) best = std::max(best, ell[i]);
  if (best == 0.0 && !ell.empty() && phi[0] > 0.0) best = ell[0] * (theta / phi[0]);
  return best;
}

double ModulusTable::sup_ratio(double lo, double hi, double shift) const {
  double sup = 0.0;
  for (std::size_t i = 0; i < ell.size(); ++i) {
    if (ell[i] < lo || ell[i] > hi) continue;
    double denom = ell[i] - shift;
    if (denom <= 0.0) continue;
    sup = std::max(sup, phi[i] / denom);
  }
  if (sup == 0.0 && !ell.empty()) sup = phi[0] / std::max(1e-300, ell[0] - shift);
  return sup;
}

ModulusTable moduli(const LatticeOracle& oracle, const std::vector<double>& scales,
                    int sources_per_axis) {
  if (scales.empty()) throw std::runtime_error("moduli: empty scale list");
  for (std::size_t i = 1; i < scales.size(); ++i)
    if (scales[i] <= scales[i - 1]) throw std::runtime_error("moduli: scales must be ascending");

  ModulusTable table;
  table.ell = scales;
  table.phi.assign(scales.size(), 0.0);

  const int n = oracle.nodes_per_axis();
  const int d = oracle.d();
  const int stride = std::max(1, (n - 1) / std::max(1, sources_per_axis - 1));
  std::vector<int> sources;
  std::array<int, 3> idx{0, 0, 0};
  const int kmax = (d == 3) ? n : 1;
  for (idx[2] = 0; idx[2] < kmax; idx[2] += (d == 3 ? stride : 1))
    for (idx[1] = 0; idx[1] < n; idx[1] += stride)
      for (idx[0] = 0; idx[0] < n; idx[0] += stride) {
        int id = 0, mult = 1;
        for (int a = 0; a < d; ++a) {
          id += idx[a] * mult;
          mult *= n;
        }
        sources.push_back(id);
      }

  for (int src : sources) {
    auto map = oracle.dist_map(src);
    const Vec ps = oracle.coord(src);
    for (int v = 0; v < oracle.node_count(); ++v) {
      const double l0 = dist0(ps, oracle.coord(v));
      const double db = map->dist[v];
      if (!std::isfinite(db)) continue;
      // phi(ell) is a sup over pairs with D_0 <= ell: fold into every bin
      // at or above l0.
      auto it = std::lower_bound(table.ell.begin(), table.ell.end(), l0);
      for (std::size_t k = static_cast<std::size_t>(it - table.ell.begin());
           k < table.ell.size(); ++k)
        table.phi[k] = std::max(table.phi[k], db);
    }
  }
  // Safety factor: the inequalities downstream need phi as an upper bound and
  // sampling can only under-estimate the sup.
  for (double& p : table.phi) p *= 1.1;
  for (std::size_t i = 1; i < table.phi.size(); ++i)
    table.phi[i] = std::max(table.phi[i], table.phi[i - 1]);
  return table;
}

}  // namespace conflat
