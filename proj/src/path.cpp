#include "conflat/path.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace conflat {

double Path::d0_length() const {
  double total = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i) total += dist0(pts[i - 1], pts[i]);
  return total;
}

void Path::save(const std::string& file, double metric_length) const {
  std::ofstream out(file);
  if (!out) throw std::runtime_error("cannot open for write: " + file);
  char buf[128];
  std::snprintf(buf, sizeof(buf), "PATH %zu %.17g %.17g\n", pts.size(), metric_length,
                d0_length());
  out << buf;
  const bool is3d = [&] {
    for (const Vec& p : pts)
      if (p[2] != 0.0) return true;
    return false;
  }();
  for (const Vec& p : pts) {
    if (is3d)
      std::snprintf(buf, sizeof(buf), "P %.17g %.17g %.17g\n", p[0], p[1], p[2]);
    else
      std::snprintf(buf, sizeof(buf), "P %.17g %.17g\n", p[0], p[1]);
    out << buf;
  }
}

// Adaptive midpoint quadrature of `density` along [a,b].
static double segment_quadrature(const Vec& a, const Vec& b,
                                 const std::function<double(const Vec&, const Vec&)>& density) {
  const Vec dir = b - a;
  const double len = dir.norm();
  if (len == 0.0) return 0.0;
  double prev = len * density(lerp(a, b, 0.5), dir);
  for (int level = 1; level <= 16; ++level) {
    const int pieces = 1 << level;
    double sum = 0.0;
    for (int i = 0; i < pieces; ++i)
      sum += density(lerp(a, b, (i + 0.5) / pieces), dir);
    const double cur = len * sum / pieces;
    if (std::fabs(cur - prev) <= 1e-9 * std::max(1e-30, std::fabs(cur))) return cur;
    prev = cur;
  }
  return prev;
}

double path_length(const MetricSpec& spec, const Path& p, LengthMetric metric) {
  if (p.pts.empty()) throw std::runtime_error("path_length: empty path");
  double total = 0.0;
  for (std::size_t i = 1; i < p.pts.size(); ++i) {
    if (metric == LengthMetric::D0) {
      total += dist0(p.pts[i - 1], p.pts[i]);
    } else {
      total += segment_quadrature(p.pts[i - 1], p.pts[i], [&](const Vec& x, const Vec& v) {
        return spec.length_density(x, v);
      });
    }
  }
  return total;
}

double path_length_conformal(const Path& p, const std::function<double(const Vec&)>& f) {
  if (p.pts.empty()) throw std::runtime_error("path_length_conformal: empty path");
  double total = 0.0;
  for (std::size_t i = 1; i < p.pts.size(); ++i) {
    total += segment_quadrature(p.pts[i - 1], p.pts[i],
                                [&](const Vec& x, const Vec&) { return std::exp(f(x)); });
  }
  return total;
}

}  // namespace conflat
