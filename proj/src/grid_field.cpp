#include "conflat/grid_field.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace conflat {

double GridField::interpolate(const Vec& p) const {
  std::array<int, 3> i0{0, 0, 0};
  std::array<double, 3> fr{0.0, 0.0, 0.0};
  for (int a = 0; a < d; ++a) {
    double u = (p[a] - origin[a]) / h;
    if (u < 0.0) u = 0.0;
    if (u > n[a] - 1) u = n[a] - 1;
    int i = static_cast<int>(std::floor(u));
    if (i > n[a] - 2) i = n[a] - 2;
    if (i < 0) i = 0;
    i0[a] = i;
    fr[a] = (n[a] > 1) ? u - i : 0.0;
  }
  double acc = 0.0;
  const int corners = 1 << d;
  for (int m = 0; m < corners; ++m) {
    double w = 1.0;
    std::array<int, 3> ii = i0;
    for (int a = 0; a < d; ++a) {
      if (m & (1 << a)) {
        w *= fr[a];
        ii[a] = std::min(i0[a] + 1, n[a] - 1);
      } else {
        w *= 1.0 - fr[a];
      }
    }
    acc += w * at(ii[0], ii[1], ii[2]);
  }
  return acc;
}

static std::string header_line(const GridField& g) {
  char buf[256];
  if (g.d == 2) {
    std::snprintf(buf, sizeof(buf), "GRID 2 %d %d %.17g %.17g %.17g", g.n[0], g.n[1], g.h,
                  g.origin[0], g.origin[1]);
  } else {
    std::snprintf(buf, sizeof(buf), "GRID 3 %d %d %d %.17g %.17g %.17g %.17g", g.n[0], g.n[1],
                  g.n[2], g.h, g.origin[0], g.origin[1], g.origin[2]);
  }
  return buf;
}

void GridField::save_text(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for write: " + path);
  out << header_line(*this) << "\n";
  char buf[32];
  const std::size_t row = static_cast<std::size_t>(n[0]);
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g", values[i]);
    out << buf << ((i + 1) % row == 0 ? '\n' : ' ');
  }
}

void GridField::save_binary(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for write: " + path);
  out << header_line(*this) << "\n";
  out.write(reinterpret_cast<const char*>(values.data()),
            static_cast<std::streamsize>(values.size() * sizeof(double)));
}

GridField GridField::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open grid file: " + path);
  std::string header;
  std::getline(in, header);
  std::istringstream hs(header);
  std::string tag;
  GridField g;
  hs >> tag >> g.d;
  if (tag != "GRID" || (g.d != 2 && g.d != 3)) throw std::runtime_error("bad GRID header: " + path);
  for (int a = 0; a < g.d; ++a) hs >> g.n[a];
  hs >> g.h;
  for (int a = 0; a < g.d; ++a) hs >> g.origin[a];
  if (!hs) throw std::runtime_error("bad GRID header: " + path);
  g.values.resize(g.size());

  // Peek at the payload: binary blocks start immediately after the newline
  // and have exactly size()*8 bytes; text payloads parse as ascii floats.
  const std::streampos data_pos = in.tellg();
  in.seekg(0, std::ios::end);
  const std::size_t payload = static_cast<std::size_t>(in.tellg() - data_pos);
  in.seekg(data_pos);
  if (payload == g.values.size() * sizeof(double)) {
    in.read(reinterpret_cast<char*>(g.values.data()),
            static_cast<std::streamsize>(payload));
  } else {
    for (std::size_t i = 0; i < g.values.size(); ++i) {
      if (!(in >> g.values[i])) throw std::runtime_error("short GRID payload: " + path);
    }
  }
  return g;
}

}  // namespace conflat
