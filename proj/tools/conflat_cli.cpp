#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "conflat/pipeline.hpp"

namespace {

int run(const std::string& command, conflat::RunConfig cfg) {
  using namespace conflat;
  namespace fs = std::filesystem;

  if (command == "verify" || command == "report") refuse_mismatched_artifacts(cfg, cfg.out_dir);

  std::unique_ptr<PipelineResult> pr = build_pipeline(cfg);

  if (command == "synth") {
    write_artifacts(*pr, cfg.out_dir);
    std::cout << "wrote graph, field and params to " << cfg.out_dir << "\n";
    return 0;
  }
  if (command == "export-graph") {
    fs::create_directories(cfg.out_dir);
    pr->graph.save((fs::path(cfg.out_dir) / "graph.txt").string());
    std::cout << "wrote " << (fs::path(cfg.out_dir) / "graph.txt").string() << "\n";
    return 0;
  }
  if (command == "export-field") {
    fs::create_directories(cfg.out_dir);
    const ConformalField cf = synthesize(pr->graph, pr->params, pr->h_field());
    cf.f.save_text((fs::path(cfg.out_dir) / "field.txt").string());
    std::cout << "wrote " << (fs::path(cfg.out_dir) / "field.txt").string() << "\n";
    return 0;
  }
  // verify / report
  run_checks(*pr);
  write_artifacts(*pr, cfg.out_dir);
  std::cout << pr->report.summary();
  if (!pr->report.all_pass()) {
    const CheckRecord* worst = pr->report.worst_check();
    std::cerr << "verification failed; worst check: " << (worst ? worst->name : "?") << "\n";
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"conformally flat approximation pipeline"};
  std::string config_path, command = "verify", out_dir;
  long long seed = -1;
  int threads = 0;
  app.add_option("--config", config_path, "run configuration file")->required();
  app.add_option("--command", command, "synth | verify | export-field | export-graph | report");
  app.add_option("--seed", seed, "override the config seed");
  app.add_option("--out", out_dir, "override the output directory");
  app.add_option("--threads", threads, "worker pool size (this build runs sequentially)");
  CLI11_PARSE(app, argc, argv);

  try {
    conflat::RunConfig cfg = conflat::RunConfig::load(config_path);
    if (seed >= 0) cfg.seed = static_cast<uint64_t>(seed);
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (threads > 0) cfg.threads = threads;
    if (command != "synth" && command != "verify" && command != "export-field" &&
        command != "export-graph" && command != "report") {
      std::cerr << "unknown command '" << command << "'\n";
      return 2;
    }
    return run(command, std::move(cfg));
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
