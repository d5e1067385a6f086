#include "conflat/grid_partition.hpp"

#include <algorithm>
#include <cmath>

namespace conflat {

namespace {

// Chebyshev-inflated coarse cube: side 2R/n + R/(2n) collar on each face.
double inflated_diam0(int d, double R, int n_bar) {
  return 3.0 * R * std::sqrt(double(d)) / n_bar;
}

}  // namespace

double measure_inflated_diameter(const LatticeOracle& oracle, int n_bar,
                                 const GridOptions& opts) {
  const int d = oracle.d();
  const double R = oracle.R();
  const double h = oracle.h();
  const int n_axis = oracle.nodes_per_axis();
  const double side = 2.0 * R / n_bar;
  const double collar = 0.5 * R / n_bar;

  // Stratified cube sample: corners, center, a mid-face cube.
  std::vector<std::array<int, 3>> cubes;
  const int c0 = 0, c1 = n_bar - 1, cm = n_bar / 2;
  cubes.push_back({c0, c0, 0});
  cubes.push_back({cm, cm, d == 3 ? cm : 0});
  cubes.push_back({c1, c0, 0});
  cubes.push_back({c1, c1, d == 3 ? c1 : 0});
  cubes.push_back({cm, c0, d == 3 ? cm : 0});
  if (static_cast<int>(cubes.size()) > opts.diam_sample_cubes)
    cubes.resize(opts.diam_sample_cubes);
  std::sort(cubes.begin(), cubes.end());
  cubes.erase(std::unique(cubes.begin(), cubes.end()), cubes.end());

  // A minimizing path between inflated-cube points stays within this margin;
  // beyond it any path is already longer than the straight-line bound.
  const double diam = inflated_diam0(d, R, n_bar);
  const double ratio = oracle.density_max() / std::max(1e-300, oracle.density_min());
  const int margin_steps = static_cast<int>(std::ceil(diam * (1.0 + ratio) / h)) + 2;

  double worst = 0.0;
  const int sp = std::max(2, opts.diam_sample_per_axis);
  for (const auto& cube : cubes) {
    std::array<int, 3> lo{0, 0, 0}, hi{0, 0, 0};
    for (int a = 0; a < d; ++a) {
      const double x0 = -R + cube[a] * side - collar;
      const double x1 = x0 + side + 2.0 * collar;
      lo[a] = std::clamp(static_cast<int>(std::floor((x0 + R) / h)), 0, n_axis - 1);
      hi[a] = std::clamp(static_cast<int>(std::ceil((x1 + R) / h)), 0, n_axis - 1);
    }
    std::vector<int> pts;
    std::array<int, 3> idx{0, 0, 0};
    const int kmax = (d == 3) ? sp : 1;
    for (int k = 0; k < kmax; ++k)
      for (int j = 0; j < sp; ++j)
        for (int i = 0; i < sp; ++i) {
          idx[0] = lo[0] + (hi[0] - lo[0]) * i / (sp - 1);
          idx[1] = lo[1] + (hi[1] - lo[1]) * j / (sp - 1);
          idx[2] = (d == 3) ? lo[2] + (hi[2] - lo[2]) * k / (sp - 1) : 0;
          int id = 0, mult = 1;
          for (int a = 0; a < d; ++a) {
            id += idx[a] * mult;
            mult *= n_axis;
          }
          pts.push_back(id);
        }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

    std::vector<double> dists;
    for (int u : pts) {
      oracle.local_paths(u, pts, margin_steps, dists, nullptr);
      for (double v : dists)
        if (std::isfinite(v)) worst = std::max(worst, v);
    }
  }
  return worst;
}

GridPartition choose_grid(const LatticeOracle& oracle, const ModulusTable& mod, double eps,
                          const GridOptions& opts) {
  if (eps <= 0.0) throw std::runtime_error("choose_grid: eps must be positive");
  GridPartition gp;
  gp.d = oracle.d();
  gp.R = oracle.R();
  gp.eps = eps;
  gp.diam_budget = eps / 64.0;

  // Smallest n_bar whose inflated coarse cubes have modulus bound within
  // budget, then confirm by direct measurement when the lattice is fine
  // enough to resolve a cube.
  int nb = 1;
  while (nb < opts.nm_cap && mod.phi_of(inflated_diam0(gp.d, gp.R, nb)) > gp.diam_budget) ++nb;
  const bool capped = opts.n_cap > 0 && nb > opts.n_cap;
  if (capped) nb = opts.n_cap;

  gp.measured_diam = mod.phi_of(inflated_diam0(gp.d, gp.R, nb));
  if (oracle.h() <= (2.0 * gp.R / nb) / 4.0) {
    gp.measured_diam = measure_inflated_diameter(oracle, nb, opts);
    gp.diam_measured = true;
    if (!capped) {
      while (gp.measured_diam > gp.diam_budget && nb < opts.nm_cap &&
             oracle.h() <= (2.0 * gp.R / nb) / 4.0) {
        nb = std::max(nb + 1, static_cast<int>(std::ceil(nb * 1.25)));
        if (opts.n_cap > 0 && nb >= opts.n_cap) {
          nb = opts.n_cap;
          gp.measured_diam = measure_inflated_diameter(oracle, nb, opts);
          break;
        }
        gp.measured_diam = measure_inflated_diameter(oracle, nb, opts);
      }
    }
  }
  gp.n_bar = nb;
  gp.diam_ok = gp.measured_diam <= gp.diam_budget;

  // Net density targets. The parametrized bound is evaluated with the worst
  // admissible eta_bar (psi(eps)/4), which only strengthens it.
  const double hi = 2.0 * gp.R * std::sqrt(double(gp.d));
  const double psi_eps = mod.psi(eps);
  const double t_pre = mod.sup_ratio(psi_eps, hi, 0.0) / (32.0 * eps);
  const double t_par = mod.sup_ratio(psi_eps, hi, psi_eps / 4.0) / (64.0 * eps);
  gp.preparam1_bound = t_pre;
  double target = std::max(1.0, std::max(t_pre, t_par));

  auto smallest_nm = [&](double scale_per_nm, double bound) {
    int lo = 1, hi_m = opts.nm_cap;
    if (mod.phi_of(scale_per_nm / hi_m) > bound) return hi_m;
    while (lo < hi_m) {
      int mid = lo + (hi_m - lo) / 2;
      if (mod.phi_of(scale_per_nm / mid) <= bound)
        hi_m = mid;
      else
        lo = mid + 1;
    }
    return lo;
  };
  if (opts.highway_constraint) {
    const double bound = (eps / 16.0) * opts.highway_margin;
    target = std::max(target, double(smallest_nm(gp.R * std::sqrt(double(gp.d)) / 2.0, bound)));
  }
  if (opts.enforce_nn_smallwe)
    target = std::max(target, double(smallest_nm(gp.R, eps / 128.0)));

  int nm_target = static_cast<int>(std::ceil(target - 1e-9));
  nm_target = std::min(nm_target, opts.nm_cap);
  gp.m_bar = std::max(1, (nm_target + nb - 1) / nb);
  while (gp.n_bar * gp.m_bar > opts.nm_cap && gp.m_bar > 1) --gp.m_bar;

  const double s = gp.spacing();
  if (oracle.h() > s / 2.0 * (1.0 + 1e-9)) throw OracleTooCoarse(s / 2.0);
  return gp;
}

}  // namespace conflat
