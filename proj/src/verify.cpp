#include "conflat/verify.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace conflat {

namespace {

constexpr double kSlackTol = 1e-9;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt_vec(const Vec& p, int d) {
  std::string s = "(" + fmt(p[0]) + "," + fmt(p[1]);
  if (d == 3) s += "," + fmt(p[2]);
  return s + ")";
}

// Accumulates per-sample measurements against per-sample budgets, keeping the
// decomposition at the worst offender.
struct Accum {
  CheckRecord rec;
  explicit Accum(std::string name, std::string statement) {
    rec.name = std::move(name);
    rec.statement = std::move(statement);
    rec.worst_slack = -std::numeric_limits<double>::infinity();
  }
  void add(double measured, double eps_t, double tol_t, double snap_t, const std::string& detail) {
    const double slack = measured - (eps_t + tol_t + snap_t);
    ++rec.samples;
    if (slack > kSlackTol) ++rec.failures;
    if (slack > rec.worst_slack) {
      rec.worst_slack = slack;
      rec.worst_measured = measured;
      rec.eps_term = eps_t;
      rec.tol_lat_term = tol_t;
      rec.snap_term = snap_t;
      rec.detail = detail;
    }
  }
  CheckRecord done() {
    rec.pass = rec.samples > 0 && rec.failures == 0;
    return rec;
  }
};

double min_log_core(const WeightedGraph& g) {
  double cmin = 0.0;
  for (std::size_t e = 0; e < g.edge_count(); ++e)
    cmin = std::min(cmin, std::log(g.ew[e] / g.el0[e]));
  return cmin;
}

// Windowed conformal distances that are provably the global optima: any path
// escaping a Chebyshev window of W steps has cost at least W*h*exp(f_min), so
// once every target's distance is below that bound the window is conclusive.
void sound_ef_dists(const ConformalOracle& co, int source, const std::vector<int>& targets,
                    int w0, double ef_min, std::vector<double>& dists, std::vector<Path>* paths) {
  int W = std::max(2, w0);
  const int wmax = 2 * (co.nodes_per_axis() + 1);
  for (;;) {
    co.local_paths(source, targets, W, dists, paths);
    if (W >= wmax) return;  // window covered the whole box
    const double escape = double(W) * co.h() * ef_min;
    bool ok = true;
    for (double dv : dists)
      if (!(dv < escape)) {
        ok = false;
        break;
      }
    if (ok) return;
    W *= 2;
  }
}

}  // namespace

bool VerificationReport::all_pass() const {
  if (checks.empty()) return false;
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

const CheckRecord* VerificationReport::worst_check() const {
  const CheckRecord* worst = nullptr;
  for (const auto& c : checks)
    if (!worst || c.worst_slack > worst->worst_slack) worst = &c;
  return worst;
}

std::string VerificationReport::summary() const {
  std::ostringstream os;
  for (const auto& c : checks)
    os << "check " << c.name << ": " << (c.pass ? "PASS" : "FAIL") << " samples=" << c.samples
       << " failures=" << c.failures << " worst_slack=" << fmt(c.worst_slack)
       << " budget=" << fmt(c.budget()) << "\n";
  os << (all_pass() ? "ALL CHECKS PASS" : "CHECKS FAILED") << "\n";
  return os.str();
}

void VerificationReport::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("report: cannot write " + path);
  out << "report_version 1\n";
  out << "seed " << seed << "\n";
  out << "eps " << fmt(eps) << "\n";
  char hex[32];
  std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(graph_hash));
  out << "graph_hash " << hex << "\n";
  std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(config_hash));
  out << "config_hash " << hex << "\n";
  out << "params.eta " << fmt(params.eta) << "\n";
  out << "params.eta_bar " << fmt(params.eta_bar) << "\n";
  out << "params.C0 " << fmt(params.C0) << "\n";
  out << "params.C1 " << fmt(params.C1) << "\n";
  out << "params.n_bar " << params.n_bar << "\n";
  out << "params.m_bar " << params.m_bar << "\n";
  for (const auto& c : checks) {
    const std::string p = "check." + c.name + ".";
    out << p << "statement " << c.statement << "\n";
    out << p << "samples " << c.samples << "\n";
    out << p << "failures " << c.failures << "\n";
    out << p << "worst_measured " << fmt(c.worst_measured) << "\n";
    out << p << "eps_term " << fmt(c.eps_term) << "\n";
    out << p << "tol_lat_term " << fmt(c.tol_lat_term) << "\n";
    out << p << "snap_term " << fmt(c.snap_term) << "\n";
    out << p << "budget " << fmt(c.budget()) << "\n";
    out << p << "worst_slack " << fmt(c.worst_slack) << "\n";
    out << p << "pass " << (c.pass ? 1 : 0) << "\n";
    if (!c.detail.empty()) out << p << "detail " << c.detail << "\n";
  }
  for (const auto& [k, v] : extras) out << "extra." << k << " " << v << "\n";
  out << summary();
}

std::vector<Vec> stratified_points(int d, double R, std::size_t n, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  int q = 1;
  while (std::pow(double(q), d) < double(n)) ++q;
  std::vector<Vec> pts;
  pts.reserve(n);
  const double cell = 2.0 * R / q;
  std::array<int, 3> idx{0, 0, 0};
  const int kmax = (d == 3) ? q : 1;
  for (idx[2] = 0; idx[2] < kmax && pts.size() < n; ++idx[2])
    for (idx[1] = 0; idx[1] < q && pts.size() < n; ++idx[1])
      for (idx[0] = 0; idx[0] < q && pts.size() < n; ++idx[0]) {
        Vec p;
        for (int a = 0; a < d; ++a) p[a] = -R + (idx[a] + uni(rng)) * cell;
        pts.push_back(p);
      }
  return pts;
}

std::vector<CheckRecord> verify_graph_stage(const WeightedGraph& g, const LatticeOracle& oracle,
                                            double eps, std::size_t pairs, uint64_t seed) {
  if (g.net_vertex_ids.empty()) throw std::runtime_error("verify_graph_stage: no net vertices");
  std::mt19937_64 rng(seed);
  const std::size_t nv = g.net_vertex_ids.size();
  const std::size_t per_src = std::min<std::size_t>(256, nv);
  const std::size_t n_src = (pairs + per_src - 1) / per_src;

  Accum close("graph_close", "|d_G - D| <= eps/4 + tol_lat*D on net vertex pairs");
  Accum lower("graph_lower", "d_G >= D*(1 - tol_lat) on all sampled pairs");
  for (std::size_t si = 0; si < n_src; ++si) {
    const int32_t sv = g.net_vertex_ids[rng() % nv];
    const std::vector<double> dg = g.dist_map(sv);
    const auto om = oracle.dist_map(oracle.snap(g.vpos[sv]));
    for (std::size_t ti = 0; ti < per_src; ++ti) {
      const int32_t tv = g.net_vertex_ids[rng() % nv];
      const double d_g = dg[tv];
      const double dbar = om->dist[oracle.snap(g.vpos[tv])];
      if (!std::isfinite(d_g) || !std::isfinite(dbar))
        throw std::runtime_error("verify_graph_stage: unreachable pair");
      const std::string det = std::to_string(sv) + "->" + std::to_string(tv) +
                              " d_G=" + fmt(d_g) + " D=" + fmt(dbar);
      close.add(std::fabs(d_g - dbar), eps / 4.0, oracle.tol_lat() * dbar, 0.0, det);
      lower.add(dbar - d_g, 0.0, oracle.tol_lat() * dbar, 0.0, det);
    }
  }
  return {close.done(), lower.done()};
}

std::vector<CheckRecord> verify_adjacent_bounds(const WeightedGraph& g, const ConformalOracle& co,
                                                const SynthParams& p, double eps) {
  const double tol_fix = 2.0 * co.h() * std::exp(p.C0);
  const double slack_G = eps / (10.0 * double(g.edge_count()));
  const double ef_min = std::exp(min_log_core(g));

  // Group edges by the snapped source node so one windowed run serves every
  // edge leaving that node.
  std::unordered_map<int, std::vector<std::pair<int, std::size_t>>> groups;
  groups.reserve(g.edge_count());
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    const int su = co.snap(g.vpos[g.eu[e]]);
    const int tv = co.snap(g.vpos[g.ev[e]]);
    groups[su].push_back({tv, e});
  }

  Accum upper("adjacent_upper", "ef_dist(v1,v2) <= w_e + tol_lat*w_e + 2*h_e*exp(C0)");
  Accum lower("adjacent_lower",
              "ef_dist(v1,v2) >= d_G(v1,v2) - eps/(10|G|) - tol_lat*w_e - 2*h_e*exp(C0)");
  std::vector<int> targets;
  std::vector<double> dists;
  for (auto& [src, list] : groups) {
    targets.clear();
    double lmax = 0.0;
    for (auto& [tv, e] : list) {
      targets.push_back(tv);
      lmax = std::max(lmax, g.el0[e]);
    }
    const int w0 = static_cast<int>(std::ceil(3.0 * lmax / co.h())) + 6;
    sound_ef_dists(co, src, targets, w0, ef_min, dists, nullptr);
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::size_t e = list[i].second;
      const double ef = dists[i];
      if (!std::isfinite(ef)) throw std::runtime_error("verify_adjacent_bounds: unreachable edge");
      const double w = g.ew[e];
      const std::string det = "edge " + std::to_string(e) + " w=" + fmt(w) + " ef=" + fmt(ef);
      upper.add(ef - w, 0.0, co.tol_lat() * w, tol_fix, det);
      // w_e >= d_G(v1,v2), so this is at least as strict as gating on d_G
      lower.add(w - ef, slack_G, co.tol_lat() * w, tol_fix, det);
    }
  }
  return {upper.done(), lower.done()};
}

std::vector<CheckRecord> verify_edge_bounds(const WeightedGraph& g, const ConformalOracle& co,
                                            const LatticeOracle& oracle, double eps,
                                            std::size_t pairs, uint64_t seed) {
  if (g.net_vertex_ids.empty()) throw std::runtime_error("verify_edge_bounds: no net vertices");
  std::mt19937_64 rng(seed);
  const std::size_t nv = g.net_vertex_ids.size();
  const std::size_t per_src = std::min<std::size_t>(256, nv);
  const std::size_t n_src = (pairs + per_src - 1) / per_src;

  Accum upper("edge_upper", "ef(x,y) <= d_G(x,y) + eps/4 + tol_lat*d_G on vertex pairs");
  Accum lower("edge_lower", "ef(x,y) >= D(x,y) - eps/4 - tol_lat*D on vertex pairs");
  for (std::size_t si = 0; si < n_src; ++si) {
    const int32_t sv = g.net_vertex_ids[rng() % nv];
    const int sn = oracle.snap(g.vpos[sv]);
    const std::vector<double> dg = g.dist_map(sv);
    const auto om = oracle.dist_map(sn);
    const auto cm = co.dist_map(co.snap(g.vpos[sv]));
    for (std::size_t ti = 0; ti < per_src; ++ti) {
      const int32_t tv = g.net_vertex_ids[rng() % nv];
      const double d_g = dg[tv];
      const double dbar = om->dist[oracle.snap(g.vpos[tv])];
      const double ef = cm->dist[co.snap(g.vpos[tv])];
      if (!std::isfinite(d_g) || !std::isfinite(dbar) || !std::isfinite(ef))
        throw std::runtime_error("verify_edge_bounds: unreachable pair");
      const std::string det = std::to_string(sv) + "->" + std::to_string(tv) + " d_G=" + fmt(d_g) +
                              " D=" + fmt(dbar) + " ef=" + fmt(ef);
      upper.add(ef - d_g, eps / 4.0, co.tol_lat() * d_g, 0.0, det);
      lower.add(dbar - ef, eps / 4.0, oracle.tol_lat() * dbar, 0.0, det);
    }
  }
  return {upper.done(), lower.done()};
}

CheckRecord verify_highway(const WeightedGraph& g, const ConformalOracle& co,
                           const LatticeOracle& oracle, const SynthParams& p, double eps,
                           std::size_t samples, uint64_t seed) {
  const int d = g.d;
  const double R = g.R;
  const std::vector<Vec> pts = stratified_points(d, R, samples, seed);

  // Vertex bins for nearest-candidate lookup.
  const double dmin = std::max(1e-9, oracle.density_min());
  const double r_c = 3.0 * eps / (16.0 * dmin);
  const double cell = r_c;
  const int ncell = std::max(1, static_cast<int>(std::ceil(2.0 * R / cell)));
  auto cell_of = [&](double x) {
    return std::clamp(static_cast<int>((x + R) / cell), 0, ncell - 1);
  };
  auto key_of = [&](const Vec& q) {
    return (int64_t(d == 3 ? cell_of(q[2]) : 0) * ncell + cell_of(q[1])) * ncell + cell_of(q[0]);
  };
  std::unordered_map<int64_t, std::vector<int32_t>> bins;
  for (std::size_t v = 0; v < g.vertex_count(); ++v) bins[key_of(g.vpos[v])].push_back(int32_t(v));

  const double ratio = oracle.density_max() / dmin;
  const int w_lat = static_cast<int>(std::ceil(r_c * ratio / oracle.h())) + 2;
  const int w_ef = static_cast<int>(std::ceil(r_c * std::exp(p.C0) / co.h())) + 2;
  const double snap = oracle.snap_displacement();

  Accum acc("highway", "every point has a vertex within eps/16 + tol in D and ef");
  std::vector<int32_t> cand;
  std::vector<int> t_lat, t_ef;
  std::vector<double> d_lat, d_ef;
  for (const Vec& x : pts) {
    cand.clear();
    const int cx = cell_of(x[0]), cy = cell_of(x[1]), cz = d == 3 ? cell_of(x[2]) : 0;
    const int zlo = d == 3 ? std::max(0, cz - 1) : 0, zhi = d == 3 ? std::min(ncell - 1, cz + 1) : 0;
    for (int z = zlo; z <= zhi; ++z)
      for (int y = std::max(0, cy - 1); y <= std::min(ncell - 1, cy + 1); ++y)
        for (int xx = std::max(0, cx - 1); xx <= std::min(ncell - 1, cx + 1); ++xx) {
          auto it = bins.find((int64_t(z) * ncell + y) * ncell + xx);
          if (it == bins.end()) continue;
          cand.insert(cand.end(), it->second.begin(), it->second.end());
        }
    std::sort(cand.begin(), cand.end(), [&](int32_t a, int32_t b) {
      const double da = dist0(x, g.vpos[a]), db = dist0(x, g.vpos[b]);
      return da < db || (da == db && a < b);
    });
    if (cand.size() > 64) cand.resize(64);
    if (cand.empty()) {
      acc.add(std::numeric_limits<double>::infinity(), eps / 16.0, 0.0, 0.0,
              "no vertex within search radius of " + fmt_vec(x, d));
      continue;
    }
    t_lat.clear();
    t_ef.clear();
    for (int32_t v : cand) {
      t_lat.push_back(oracle.snap(g.vpos[v]));
      t_ef.push_back(co.snap(g.vpos[v]));
    }
    oracle.local_paths(oracle.snap(x), t_lat, w_lat, d_lat, nullptr);
    co.local_paths(co.snap(x), t_ef, w_ef, d_ef, nullptr);
    double best = std::numeric_limits<double>::infinity();
    int32_t best_v = -1;
    for (std::size_t i = 0; i < cand.size(); ++i) {
      const double m = std::max(d_lat[i], d_ef[i]);
      if (m < best) {
        best = m;
        best_v = cand[i];
      }
    }
    acc.add(best, eps / 16.0, oracle.tol_lat() * eps / 16.0, 2.0 * snap * std::exp(p.C1),
            "x=" + fmt_vec(x, d) + " vertex=" + std::to_string(best_v));
  }
  return acc.done();
}

CheckRecord verify_trapping(const WeightedGraph& g, const ConformalOracle& co,
                            const FieldEvaluator& fe, std::size_t samples, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const int d = g.d;
  const double R = g.R;
  const SynthParams& p = fe.params();
  const double h = co.h();
  const double band = p.eta + p.eta_bar / 2.0 + h * std::sqrt(double(d));
  const double ef_min = std::exp(min_log_core(g));
  const double reach = 0.15 * 2.0 * R;

  CheckRecord rec;
  rec.name = "trapping";
  rec.statement = "conformal geodesics with endpoints on E stay within eta + eta_bar/2 + "
                  "h_e*sqrt(d) of E (95% required)";
  rec.worst_slack = -std::numeric_limits<double>::infinity();
  std::vector<double> dists;
  std::vector<Path> paths;
  std::size_t logged = 0;
  while (rec.samples < samples) {
    const std::size_t e1 = rng() % g.edge_count();
    const Vec p1 = lerp(g.vpos[g.eu[e1]], g.vpos[g.ev[e1]], uni(rng));
    Vec q;
    for (int a = 0; a < d; ++a)
      q[a] = std::clamp(p1[a] + (2.0 * uni(rng) - 1.0) * reach, -R, R);
    const EdgeHit hit = fe.index().query(q);
    const Vec p2 = lerp(g.vpos[g.eu[hit.edge]], g.vpos[g.ev[hit.edge]], hit.t);
    const int su = co.snap(p1), tv = co.snap(p2);
    if (su == tv) continue;
    const int w0 = static_cast<int>(std::ceil(3.0 * dist0(p1, p2) / h)) + 8;
    sound_ef_dists(co, su, {tv}, w0, ef_min, dists, &paths);
    if (!std::isfinite(dists[0]))
      throw std::runtime_error("verify_trapping: geodesic not found");
    const TrapResult tr = check_trapped(paths[0], fe.index(), p.eta, p.eta_bar, h);
    ++rec.samples;
    const double slack = tr.max_excursion - band;
    if (slack > rec.worst_slack) {
      rec.worst_slack = slack;
      rec.worst_measured = tr.max_excursion;
      rec.eps_term = p.eta + p.eta_bar / 2.0;
      rec.snap_term = h * std::sqrt(double(d));
      rec.detail = "x=" + fmt_vec(p1, d) + " y=" + fmt_vec(p2, d);
    }
    if (!tr.inside) {
      ++rec.failures;
      if (logged < 8) {
        rec.detail += " | outside: x=" + fmt_vec(p1, d) + " y=" + fmt_vec(p2, d) +
                      " excursion=" + fmt(tr.max_excursion);
        ++logged;
      }
    }
  }
  rec.pass = rec.samples >= samples &&
             double(rec.samples - rec.failures) >= 0.95 * double(rec.samples);
  return rec;
}

std::vector<CheckRecord> verify_theorem(const ConformalOracle& co, const LatticeOracle& oracle,
                                        double eps, std::size_t pairs, uint64_t seed) {
  const int d = oracle.d();
  const double R = oracle.R();
  const std::size_t n_src = 16;
  const std::size_t per_src = (pairs + n_src - 1) / n_src;
  const std::vector<Vec> sources = stratified_points(d, R, n_src, seed);
  const double snap = oracle.snap_displacement();

  // Adversarial targets shared across sources: box corners and the center.
  std::vector<Vec> corners;
  for (int m = 0; m < (1 << d); ++m) {
    Vec c;
    for (int a = 0; a < d; ++a) c[a] = (m >> a & 1) ? R : -R;
    corners.push_back(c);
  }
  corners.push_back(Vec{});

  Accum main("theorem", "|D - ef| <= eps + tol_lat*D + 2*snap over point pairs");
  Accum inter("closemetrics", "|D - ef| <= eps/2 + tol_lat*D + 2*snap (intermediate bound)");
  for (std::size_t si = 0; si < sources.size(); ++si) {
    const int sn = oracle.snap(sources[si]);
    const auto om = oracle.dist_map(sn);
    const auto cm = co.dist_map(co.snap(sources[si]));
    std::vector<Vec> targets = stratified_points(d, R, per_src, seed ^ (0x9e3779b97f4a7c15ULL * (si + 1)));
    targets.insert(targets.end(), corners.begin(), corners.end());
    for (const Vec& t : targets) {
      const double dbar = om->dist[oracle.snap(t)];
      const double ef = cm->dist[co.snap(t)];
      if (!std::isfinite(dbar) || !std::isfinite(ef))
        throw std::runtime_error("verify_theorem: unreachable pair");
      const double m = std::fabs(dbar - ef);
      const std::string det =
          "x=" + fmt_vec(sources[si], d) + " y=" + fmt_vec(t, d) + " D=" + fmt(dbar) + " ef=" + fmt(ef);
      main.add(m, eps, oracle.tol_lat() * dbar, 2.0 * snap, det);
      inter.add(m, eps / 2.0, oracle.tol_lat() * dbar, 2.0 * snap, det);
    }
  }
  return {main.done(), inter.done()};
}

}  // namespace conflat
