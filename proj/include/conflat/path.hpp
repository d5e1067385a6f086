#ifndef CONFLAT_PATH_HPP
#define CONFLAT_PATH_HPP

#include <functional>
#include <string>
#include <vector>

#include "conflat/metric_spec.hpp"
#include "conflat/vec.hpp"

namespace conflat {

// Polyline path. When the path lives on a lattice, `nodes` holds the lattice
// node ids alongside the coordinates (same length as `pts`).
struct Path {
  std::vector<Vec> pts;
  std::vector<int> nodes;

  bool empty() const { return pts.empty(); }
  std::size_t size() const { return pts.size(); }

  double d0_length() const;

  void save(const std::string& path, double metric_length) const;
};

enum class LengthMetric { D0, Dbar };

// Sum over segments of quadrature of the length density; midpoint rule with
// per-segment subdivision until the relative change drops below 1e-9.
double path_length(const MetricSpec& spec, const Path& p, LengthMetric metric);

// Conformal length sum of e^{f} along the polyline, same quadrature rule.
double path_length_conformal(const Path& p, const std::function<double(const Vec&)>& f);

}  // namespace conflat

#endif
