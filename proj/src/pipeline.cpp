#include "conflat/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "conflat/geodesic_set.hpp"
#include "conflat/kv.hpp"

namespace conflat {

namespace {

std::string hex64(uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::vector<double> modulus_scales(double lo, double hi, int n) {
  std::vector<double> s;
  s.reserve(n);
  for (int i = 0; i < n; ++i) s.push_back(lo * std::pow(hi / lo, double(i) / (n - 1)));
  return s;
}

// Stage timing trace on stderr, enabled with CONFLAT_TRACE=1.
struct StageTimer {
  bool on = std::getenv("CONFLAT_TRACE") != nullptr;
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  void mark(const char* stage) {
    if (!on) return;
    const auto t1 = std::chrono::steady_clock::now();
    std::fprintf(stderr, "trace: %-18s %.2fs\n", stage,
                 std::chrono::duration<double>(t1 - t0).count());
    t0 = t1;
  }
};

}  // namespace

double PipelineResult::h_field() const {
  if (cfg.h_f > 0.0) return cfg.h_f;
  return conformal ? conformal->h() : oracle->h();
}

std::unique_ptr<PipelineResult> build_pipeline(const RunConfig& cfg) {
  cfg.validate();
  auto pr = std::make_unique<PipelineResult>();
  pr->cfg = cfg;
  const MetricSpec& spec = pr->cfg.spec;
  const int d = spec.d;
  const double R = spec.R;
  const int order = cfg.order();
  StageTimer tm;

  // Moduli on a coarse throwaway lattice.
  const double h_mod = 2.0 * R / (d == 2 ? 128 : 32);
  auto mod_oracle = std::make_unique<LatticeOracle>(spec, h_mod, order);
  pr->mod = moduli(*mod_oracle, modulus_scales(h_mod / 2.0, 2.0 * R * std::sqrt(double(d)), 32),
                   d == 2 ? 7 : 4);
  tm.mark("moduli");

  GridOptions gopts;
  gopts.n_cap = cfg.grid_cap();
  gopts.nm_cap = static_cast<int>(cfg.nm_cap);
  gopts.highway_constraint = cfg.highway_on();
  gopts.highway_margin = cfg.highway_margin;

  if (cfg.h > 0.0) {
    pr->oracle = std::make_unique<LatticeOracle>(spec, cfg.h, order);
    pr->grid = choose_grid(*pr->oracle, pr->mod, cfg.eps, gopts);
  } else {
    try {
      pr->grid = choose_grid(*mod_oracle, pr->mod, cfg.eps, gopts);
      pr->oracle = std::move(mod_oracle);
    } catch (const OracleTooCoarse& e) {
      pr->oracle = std::make_unique<LatticeOracle>(spec, e.h_needed, order);
      pr->grid = choose_grid(*pr->oracle, pr->mod, cfg.eps, gopts);
    }
  }
  mod_oracle.reset();
  tm.mark("grid+oracle");
  const LatticeOracle& oracle = *pr->oracle;

  {
    GeodesicSet gs = untangle(build_G1(oracle, pr->grid, cfg.pair_rule()));
    tm.mark("G1+untangle");
    pr->path_count = gs.paths.size();
    std::string msg;
    const long long cap = 2000000;
    if (!check_untangled(gs, cap, &msg))
      throw std::runtime_error("build_pipeline: geodesics still tangle: " + msg);
    pr->untangle_pairs_checked = std::min<long long>(cap, static_cast<long long>(pr->path_count));
    tm.mark("untangle_check");

    // Containment slack: how far the untangled geodesics overflow the
    // bounding box of their endpoints.
    double zeta = 0.0;
    for (const auto& path : gs.paths) {
      const Vec a = oracle.coord(path.nodes.front());
      const Vec b = oracle.coord(path.nodes.back());
      for (int32_t node : path.nodes) {
        const Vec p = oracle.coord(node);
        for (int ax = 0; ax < d; ++ax) {
          zeta = std::max(zeta, std::min(a[ax], b[ax]) - p[ax]);
          zeta = std::max(zeta, p[ax] - std::max(a[ax], b[ax]));
        }
      }
    }
    pr->zeta_excursion = zeta;

    MergedGraph g3 = insert_merge_vertices(gs);
    tm.mark("merge");
    gs = GeodesicSet{};
    LinearizeOptions lopts;
    lopts.weight_target = cfg.eps / 128.0;
    pr->graph = piecewise_linearize(g3, lopts);
    tm.mark("linearize");
  }
  pr->graph.n_bar = pr->grid.n_bar;
  pr->graph.m_bar = pr->grid.m_bar;
  assign_weights(pr->graph, oracle);
  tm.mark("weights");

  pr->params = choose_params(pr->graph, pr->mod, cfg.eps);
  pr->field = std::make_unique<FieldEvaluator>(pr->graph, pr->params);
  const double h_e = cfg.h_e > 0.0 ? cfg.h_e : oracle.h();
  pr->conformal = std::make_unique<ConformalOracle>(pr->field.get(), d, R, h_e, order, false);
  tm.mark("conformal_oracle");
  return pr;
}

void run_checks(PipelineResult& pr) {
  const RunConfig& cfg = pr.cfg;
  StageTimer tm;
  VerificationReport& rep = pr.report;
  rep = VerificationReport{};
  rep.seed = cfg.seed;
  rep.eps = cfg.eps;
  rep.graph_hash = pr.graph.hash();
  rep.config_hash = cfg.hash();
  rep.params = pr.params;

  {
    CheckRecord rec;
    rec.name = "untangled";
    rec.statement = "untangled geodesic pairs overlap in a single contiguous run";
    rec.samples = pr.path_count;
    rec.worst_slack = -1.0;
    rec.pass = pr.path_count > 0;
    rec.detail = "pairs_checked=" + std::to_string(pr.untangle_pairs_checked);
    rep.checks.push_back(rec);
  }
  {
    CheckRecord rec;
    rec.name = "containment";
    rec.statement = "geodesic edges stay within the coarse-cube collar of their endpoints";
    rec.samples = pr.path_count;
    rec.worst_measured = pr.zeta_excursion;
    rec.eps_term = pr.grid.R / (2.0 * pr.grid.n_bar);
    rec.worst_slack = rec.worst_measured - rec.budget();
    rec.failures = rec.worst_slack > 1e-9 ? 1 : 0;
    rec.pass = rec.samples > 0 && rec.failures == 0;
    rep.checks.push_back(rec);
  }

  const uint64_t s = cfg.seed;
  for (auto& r : verify_graph_stage(pr.graph, *pr.oracle, cfg.eps, cfg.pairs, s ^ 0xa1ULL))
    rep.checks.push_back(std::move(r));
  tm.mark("graph_stage");
  for (auto& r : verify_adjacent_bounds(pr.graph, *pr.conformal, pr.params, cfg.eps))
    rep.checks.push_back(std::move(r));
  tm.mark("adjacent");
  for (auto& r :
       verify_edge_bounds(pr.graph, *pr.conformal, *pr.oracle, cfg.eps, cfg.pairs, s ^ 0xb2ULL))
    rep.checks.push_back(std::move(r));
  tm.mark("edge_bounds");
  rep.checks.push_back(verify_trapping(pr.graph, *pr.conformal, *pr.field, cfg.trap_samples,
                                       s ^ 0xc3ULL));
  tm.mark("trapping");
  rep.checks.push_back(verify_highway(pr.graph, *pr.conformal, *pr.oracle, pr.params, cfg.eps,
                                      cfg.highway_samples, s ^ 0xd4ULL));
  tm.mark("highway");
  for (auto& r : verify_theorem(*pr.conformal, *pr.oracle, cfg.eps, cfg.pairs, s ^ 0xe5ULL))
    rep.checks.push_back(std::move(r));
  tm.mark("theorem");

  char buf[40];
  auto putd = [&](const std::string& k, double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    rep.extras.push_back({k, buf});
  };
  rep.extras.push_back({"metric", pr.cfg.spec.describe()});
  putd("tol_lat", pr.oracle->tol_lat());
  putd("snap", pr.oracle->snap_displacement());
  putd("h", pr.oracle->h());
  putd("h_e", pr.conformal->h());
  rep.extras.push_back({"n_bar", std::to_string(pr.grid.n_bar)});
  rep.extras.push_back({"m_bar", std::to_string(pr.grid.m_bar)});
  rep.extras.push_back({"vertices", std::to_string(pr.graph.vertex_count())});
  rep.extras.push_back({"edges", std::to_string(pr.graph.edge_count())});
  rep.extras.push_back({"paths", std::to_string(pr.path_count)});
  putd("zeta_excursion", pr.zeta_excursion);
  putd("diam_budget", pr.grid.diam_budget);
  putd("diam_measured", pr.grid.measured_diam);
  rep.extras.push_back({"diam_is_measured", pr.grid.diam_measured ? "1" : "0"});
  rep.extras.push_back({"diam_ok", pr.grid.diam_ok ? "1" : "0"});
  putd("min_edge_sep", pr.params.min_edge_sep);
}

void write_artifacts(const PipelineResult& pr, const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const fs::path out(out_dir);

  pr.graph.save((out / "graph.txt").string());
  pr.params.save((out / "params.txt").string());
  const ConformalField cf = synthesize(pr.graph, pr.params, pr.h_field());
  cf.f.save_text((out / "field.txt").string());
  if (!pr.report.checks.empty()) pr.report.save((out / "report.txt").string());

  std::ofstream man((out / "manifest.txt").string());
  if (!man) throw std::runtime_error("write_artifacts: cannot write manifest");
  man << "config_hash = " << hex64(pr.cfg.hash()) << "\n";
  man << "graph_hash = " << hex64(pr.graph.hash()) << "\n";
  man << "metric = " << pr.cfg.spec.describe() << "\n";
  man << "graph_file = graph.txt\n";
  man << "params_file = params.txt\n";
  man << "field_file = field.txt\n";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", pr.h_field());
  man << "h_f = " << buf << "\n";
}

void refuse_mismatched_artifacts(const RunConfig& cfg, const std::string& out_dir) {
  namespace fs = std::filesystem;
  const fs::path man = fs::path(out_dir) / "manifest.txt";
  if (!fs::exists(man)) return;
  const KeyValueFile kv = KeyValueFile::parse(man.string());
  if (kv.get_or("config_hash", "") != hex64(cfg.hash()))
    throw std::runtime_error(out_dir +
                             ": existing artifacts were built from a different configuration "
                             "(manifest config_hash mismatch); use a fresh output directory");
}

}  // namespace conflat
