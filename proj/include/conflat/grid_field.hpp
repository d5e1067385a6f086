#ifndef CONFLAT_GRID_FIELD_HPP
#define CONFLAT_GRID_FIELD_HPP

#include <string>
#include <vector>

#include "conflat/vec.hpp"

namespace conflat {

// Regular scalar grid over a box, with multilinear interpolation.
//
// File format (text): header line `GRID d n1 [n2 [n3]] h x0 y0 [z0]`,
// then row-major float64 values, one row per line. The binary variant has
// the same header line followed by a little-endian float64 block.
struct GridField {
  int d = 2;
  std::array<int, 3> n{1, 1, 1};  // samples per axis
  double h = 1.0;                 // spacing
  Vec origin;                     // coordinate of sample (0,0[,0])
  std::vector<double> values;     // row-major, x fastest

  std::size_t size() const {
    std::size_t s = 1;
    for (int a = 0; a < d; ++a) s *= static_cast<std::size_t>(n[a]);
    return s;
  }
  std::size_t index(int i, int j, int k = 0) const {
    return (static_cast<std::size_t>(k) * n[1] + j) * n[0] + i;
  }
  double at(int i, int j, int k = 0) const { return values[index(i, j, k)]; }
  Vec coord(int i, int j, int k = 0) const {
    return {{origin[0] + i * h, origin[1] + j * h, origin[2] + k * h}};
  }

  // Multilinear interpolation; clamps to the grid boundary.
  double interpolate(const Vec& p) const;

  void save_text(const std::string& path) const;
  void save_binary(const std::string& path) const;
  static GridField load(const std::string& path);  // auto-detects text vs binary
};

}  // namespace conflat

#endif
