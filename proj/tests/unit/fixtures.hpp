#pragma once

#include <initializer_list>
#include <vector>

#include "rangewalk/lattice_walk.hpp"

namespace fixtures {

using rangewalk::LatticePoint;
using rangewalk::Trajectory;

inline LatticePoint pt(std::initializer_list<std::int64_t> c, int d = 4) {
  LatticePoint p = LatticePoint::origin(d);
  int i = 0;
  for (auto v : c) p.coords[i++] = v;
  return p;
}

inline Trajectory path(std::initializer_list<std::initializer_list<std::int64_t>> pts, int d = 4) {
  std::vector<LatticePoint> v;
  for (const auto& c : pts) v.push_back(pt(c, d));
  return rangewalk::load_fixed_path(v);
}

// 0, e1, 2e1, ..., n e1
inline Trajectory straight(int n, int d = 4) {
  std::vector<LatticePoint> v;
  for (int k = 0; k <= n; ++k) v.push_back(pt({k}, d));
  return rangewalk::load_fixed_path(v);
}

inline Trajectory back_and_forth() { return path({{0}, {1}, {0}}); }
inline Trajectory four_cycle() { return path({{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0, 0}}); }

}  // namespace fixtures
