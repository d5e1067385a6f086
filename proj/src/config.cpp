#include "conflat/config.hpp"

#include <cstdio>
#include <filesystem>
#include <sstream>
#include <stdexcept>

#include "conflat/kv.hpp"

namespace conflat {

namespace {

uint64_t fnv1a(const std::string& s) {
  uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace

void RunConfig::validate() const {
  if (!(eps > 0.0)) throw std::runtime_error(source_path + ": eps must be positive");
  if (h < 0.0 || h_e < 0.0 || h_f < 0.0)
    throw std::runtime_error(source_path + ": spacings must be positive");
  if (h_e > 0.0 && h_f > 0.0 && h_e > h_f)
    throw std::runtime_error(source_path + ": h_e must not exceed h_f");
  if (stencil_order < 0 || stencil_order > 3)
    throw std::runtime_error(source_path + ": stencil_order must be in 1..3");
  if (c_pair < 0) throw std::runtime_error(source_path + ": c_pair must be >= 1");
  if (pairs == 0 || highway_samples == 0 || trap_samples == 0)
    throw std::runtime_error(source_path + ": sample counts must be positive");
  if (!(highway_margin > 0.0 && highway_margin <= 1.0))
    throw std::runtime_error(source_path + ": highway_margin must be in (0,1]");
}

uint64_t RunConfig::hash() const {
  std::ostringstream os;
  char buf[40];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    os << buf << ";";
  };
  os << spec.describe() << ";";
  put(eps);
  os << seed << ";" << order() << ";" << pair_rule() << ";" << grid_cap() << ";" << nm_cap << ";"
     << (highway_on() ? 1 : 0) << ";";
  put(highway_margin);
  put(h);
  put(h_e);
  put(h_f);
  os << pairs << ";" << trap_samples << ";" << highway_samples << ";";
  return fnv1a(os.str());
}

RunConfig RunConfig::load(const std::string& path) {
  const KeyValueFile kv = KeyValueFile::parse(path);
  RunConfig cfg;
  cfg.source_path = path;
  if (kv.has("metric_file")) {
    const std::filesystem::path base = std::filesystem::path(path).parent_path();
    cfg.spec = MetricSpec::load((base / kv.get("metric_file")).string());
  } else {
    cfg.spec = MetricSpec::load(path);
  }
  cfg.eps = kv.get_double("eps");
  cfg.seed = static_cast<uint64_t>(kv.get_int_or("seed", 0));
  cfg.stencil_order = kv.get_int_or("stencil_order", 0);
  cfg.c_pair = kv.get_int_or("c_pair", 0);
  cfg.n_cap = kv.get_int_or("n_cap", 0);
  cfg.nm_cap = kv.get_int_or("nm_cap", 1 << 16);
  cfg.highway_constraint = kv.get_int_or("highway_constraint", -1);
  cfg.highway_margin = kv.get_double_or("highway_margin", 0.7);
  cfg.h = kv.get_double_or("h", 0.0);
  cfg.h_e = kv.get_double_or("h_e", 0.0);
  cfg.h_f = kv.get_double_or("h_f", 0.0);
  cfg.pairs = static_cast<std::size_t>(kv.get_int_or("pairs", 1024));
  cfg.trap_samples = static_cast<std::size_t>(kv.get_int_or("trap_samples", 500));
  cfg.highway_samples = static_cast<std::size_t>(kv.get_int_or("highway_samples", 1024));
  cfg.threads = kv.get_int_or("threads", 0);
  cfg.out_dir = kv.get_or("out_dir", "out");
  cfg.validate();
  return cfg;
}

}  // namespace conflat
