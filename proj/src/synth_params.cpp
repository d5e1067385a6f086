#include "conflat/synth_params.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <unordered_map>

#include "conflat/kv.hpp"

namespace conflat {

namespace {

double seg_seg_dist(const Vec& p0, const Vec& p1, const Vec& q0, const Vec& q1) {
  // mirrors the closest-point routine in weighted_graph.cpp
  const Vec u = p1 - p0, v = q1 - q0, w = p0 - q0;
  const double a = dot(u, u), b = dot(u, v), c = dot(v, v);
  const double d = dot(u, w), e = dot(v, w);
  const double den = a * c - b * b;
  double tn, td = den, sn, sd = den;
  if (den < 1e-18 * a * c + 1e-300) {
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
  const double t = (td != 0.0) ? tn / td : 0.0;
  const double s = (sd != 0.0) ? sn / sd : 0.0;
  const Vec diff = (p0 + u * t) - (q0 + v * s);
  return std::sqrt(dot(diff, diff));
}

}  // namespace

double min_edge_separation(const WeightedGraph& g) {
  double cell = 0.0;
  for (double l : g.el0) cell = std::max(cell, l);
  cell = std::max(cell * 1.01, 2.0 * g.R / 20000.0);
  const int ncell = std::max(1, static_cast<int>(std::ceil(2.0 * g.R / cell)));
  auto cell_of = [&](double x) {
    return std::clamp(static_cast<int>((x + g.R) / cell), 0, ncell - 1);
  };
  auto bin_key = [&](int x, int y, int z) { return (int64_t(z) * ncell + y) * ncell + x; };
  // Insert each edge one extra cell on the low side so that any pair closer
  // than one cell shares a bin.
  std::unordered_map<int64_t, std::vector<int32_t>> bins;
  std::vector<std::array<int16_t, 3>> elo(g.eu.size());
  for (std::size_t i = 0; i < g.eu.size(); ++i) {
    const Vec &p = g.vpos[g.eu[i]], &q = g.vpos[g.ev[i]];
    int lo[3] = {0, 0, 0}, hi[3] = {0, 0, 0};
    for (int a = 0; a < g.d; ++a) {
      lo[a] = std::max(0, cell_of(std::min(p[a], q[a])) - 1);
      hi[a] = cell_of(std::max(p[a], q[a]));
    }
    elo[i] = {int16_t(lo[0]), int16_t(lo[1]), int16_t(lo[2])};
    for (int z = lo[2]; z <= hi[2]; ++z)
      for (int y = lo[1]; y <= hi[1]; ++y)
        for (int x = lo[0]; x <= hi[0]; ++x)
          bins[bin_key(x, y, z)].push_back(static_cast<int32_t>(i));
  }
  double best = cell;
  for (auto& [bk, list] : bins) {
    for (std::size_t i = 0; i < list.size(); ++i)
      for (std::size_t j = i + 1; j < list.size(); ++j) {
        const int32_t ia = std::min(list[i], list[j]), ib = std::max(list[i], list[j]);
        const int64_t owner =
            bin_key(std::max(elo[ia][0], elo[ib][0]), std::max(elo[ia][1], elo[ib][1]),
                    std::max(elo[ia][2], elo[ib][2]));
        if (owner != bk) continue;
        const int32_t u1 = g.eu[ia], v1 = g.ev[ia], u2 = g.eu[ib], v2 = g.ev[ib];
        if (u1 == u2 || u1 == v2 || v1 == u2 || v1 == v2) continue;
        best = std::min(best, seg_seg_dist(g.vpos[u1], g.vpos[v1], g.vpos[u2], g.vpos[v2]));
      }
  }
  return best;
}

SynthParams choose_params(const WeightedGraph& g, const ModulusTable& mod, double eps) {
  if (eps <= 0.0) throw std::runtime_error("choose_params: eps must be positive");
  if (g.n_bar <= 0 || g.m_bar <= 0)
    throw std::runtime_error("choose_params: graph carries no net dimensions");
  if (g.edge_count() == 0) throw std::runtime_error("choose_params: empty graph");

  SynthParams p;
  p.eps = eps;
  p.R = g.R;
  p.d = g.d;
  p.n_bar = g.n_bar;
  p.m_bar = g.m_bar;
  p.K = g.K;
  p.tau = g.tau;
  p.edge_count = static_cast<long long>(g.edge_count());

  double etasmol = std::numeric_limits<double>::infinity();
  double wmax = 0.0;
  for (std::size_t i = 0; i < g.ew.size(); ++i) {
    etasmol = std::min(etasmol, eps * g.el0[i] / (512.0 * g.ew[i]));
    wmax = std::max(wmax, g.ew[i]);
  }
  p.etasmol_bound = etasmol;
  p.max_edge_weight = wmax;
  if (wmax > eps / 128.0 * (1.0 + 1e-12))
    throw std::runtime_error("choose_params: max edge weight exceeds eps/128");

  p.min_edge_sep = min_edge_separation(g);
  p.eta = std::min(0.5 * etasmol, 0.3 * p.min_edge_sep);
  if (!(p.eta > 0.0)) throw std::runtime_error("choose_params: eta collapsed to zero");

  p.psi_eps = mod.psi(eps);
  const double hi = 2.0 * g.R * std::sqrt(double(g.d));
  p.lip_hat = mod.sup_ratio(0.0, hi, 0.0);
  p.c1_formula = std::log(eps * double(p.nm()) / 64.0);
  p.C1 = std::max(p.c1_formula, std::log(1.1 * p.lip_hat));

  double eb = std::min({p.eta, p.psi_eps / 4.0, 1.0 / (4.0 * double(p.nm())),
                        eps / (128.0 * std::exp(p.C1))});
  p.eta_bar = 0.5 * eb;
  p.C0 = std::log(eps / (128.0 * p.eta_bar));
  p.h_f = p.eta_bar / 8.0;

  p.param1_rhs = mod.sup_ratio(p.psi_eps, 2.0 * g.R, p.eta_bar) / (64.0 * eps);

  // invariants, named on failure
  if (!(p.eta < etasmol)) throw std::runtime_error("choose_params: etasmol violated");
  if (!(p.eta_bar < std::min(p.eta, p.psi_eps / 4.0)))
    throw std::runtime_error("choose_params: eta_bar bound violated");
  if (!(p.C0 > p.C1)) throw std::runtime_error("choose_params: C0 > C1 violated");
  if (!(double(p.nm()) >= p.param1_rhs))
    throw std::runtime_error("choose_params: net density bound (param1) violated");
  if (!(p.eta + p.eta_bar < 0.5 * p.min_edge_sep))
    throw std::runtime_error("choose_params: tube radius exceeds half the edge separation");
  return p;
}

void SynthParams::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("params save: cannot open " + path);
  char buf[128];
  auto put = [&](const char* k, double v) {
    std::snprintf(buf, sizeof buf, "%s = %.17g\n", k, v);
    out << buf;
  };
  out << "# conformal factor parameters\n";
  put("eps", eps);
  put("R", R);
  out << "d = " << d << "\n";
  out << "n_bar = " << n_bar << "\n";
  out << "m_bar = " << m_bar << "\n";
  out << "K = " << K << "\n";
  put("tau", tau);
  put("eta", eta);
  put("eta_bar", eta_bar);
  put("C0", C0);
  put("C1", C1);
  put("h_f", h_f);
  out << "edge_count = " << edge_count << "\n";
  out << "# constraint slacks\n";
  put("etasmol_bound", etasmol_bound);
  put("etasmol_slack", etasmol_bound - eta);
  put("psi_eps", psi_eps);
  put("eta_bar_slack", std::min(eta, psi_eps / 4.0) - eta_bar);
  put("min_edge_sep", min_edge_sep);
  put("param1_rhs", param1_rhs);
  put("param1_slack", double(n_bar) * double(m_bar) - param1_rhs);
  put("c0_minus_c1", C0 - C1);
  put("c1_formula", c1_formula);
  put("lip_hat", lip_hat);
  put("max_edge_weight", max_edge_weight);
  put("max_edge_weight_slack", eps / 128.0 - max_edge_weight);
  if (!out) throw std::runtime_error("params save: write failed for " + path);
}

SynthParams SynthParams::load(const std::string& path) {
  KeyValueFile kv = KeyValueFile::parse(path);
  SynthParams p;
  p.eps = kv.get_double("eps");
  p.R = kv.get_double("R");
  p.d = kv.get_int("d");
  p.n_bar = kv.get_int("n_bar");
  p.m_bar = kv.get_int("m_bar");
  p.K = kv.get_int("K");
  p.tau = kv.get_double("tau");
  p.eta = kv.get_double("eta");
  p.eta_bar = kv.get_double("eta_bar");
  p.C0 = kv.get_double("C0");
  p.C1 = kv.get_double("C1");
  p.h_f = kv.get_double("h_f");
  p.edge_count = kv.get_int("edge_count");
  p.etasmol_bound = kv.get_double("etasmol_bound");
  p.psi_eps = kv.get_double("psi_eps");
  p.min_edge_sep = kv.get_double("min_edge_sep");
  p.param1_rhs = kv.get_double("param1_rhs");
  p.c1_formula = kv.get_double("c1_formula");
  p.lip_hat = kv.get_double("lip_hat");
  p.max_edge_weight = kv.get_double("max_edge_weight");
  return p;
}

}  // namespace conflat
