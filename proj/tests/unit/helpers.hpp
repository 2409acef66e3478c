#pragma once

#include <vector>

#include "upasim/grid.hpp"

namespace upasim::test {

inline Grid grid1(int n, double L = 1.0) { return Grid::make(1, std::vector<double>{L}, std::vector<int>{n}); }

inline Grid grid2(int nx, int ny, double Lx = 1.0, double Ly = 1.0) {
  return Grid::make(2, std::vector<double>{Lx, Ly}, std::vector<int>{nx, ny});
}

inline Grid grid3(int n) { return Grid::make(3, std::vector<double>{1.0, 1.0, 1.0}, std::vector<int>{n, n, n}); }

}  // namespace upasim::test
