#ifndef CONFLAT_PIPELINE_HPP
#define CONFLAT_PIPELINE_HPP

#include <memory>
#include <string>

#include "conflat/config.hpp"
#include "conflat/conformal_oracle.hpp"
#include "conflat/grid_partition.hpp"
#include "conflat/verify.hpp"

namespace conflat {

// Everything one run produces, with stable addresses (the field holds a
// pointer into `graph`); always held behind a unique_ptr.
struct PipelineResult {
  RunConfig cfg;
  ModulusTable mod;
  GridPartition grid;
  std::unique_ptr<LatticeOracle> oracle;
  WeightedGraph graph;
  SynthParams params;
  std::unique_ptr<FieldEvaluator> field;
  std::unique_ptr<ConformalOracle> conformal;

  std::size_t path_count = 0;
  long long untangle_pairs_checked = 0;
  double zeta_excursion = 0.0;

  VerificationReport report;

  PipelineResult() = default;
  PipelineResult(const PipelineResult&) = delete;
  PipelineResult& operator=(const PipelineResult&) = delete;

  double h_field() const;  // exported field grid spacing
};

// Oracle, net, graph, parameters, field, conformal oracle. Throws on any
// structural failure (tangled geodesics, intersecting segments, parameter
// infeasibility).
std::unique_ptr<PipelineResult> build_pipeline(const RunConfig& cfg);

// Runs the full check suite and fills `report`.
void run_checks(PipelineResult& pr);

// graph.txt, field.txt, params.txt, manifest.txt (+ report.txt if checks ran)
// under out_dir.
void write_artifacts(const PipelineResult& pr, const std::string& out_dir);

// Config-hash guard: throws if a manifest in out_dir records a different
// configuration than cfg.
void refuse_mismatched_artifacts(const RunConfig& cfg, const std::string& out_dir);

}  // namespace conflat

#endif
