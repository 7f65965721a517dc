#pragma once

#include "gmcflow/grid.hpp"

#include <cmath>
#include <numbers>

namespace gmcflow {

// Reduce a displacement component into the minimal image [-pi, pi).
inline double minimal_image(double u) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  u = std::remainder(u, two_pi);
  return u;
}

// Euclidean norm of the componentwise minimal-image difference.
inline double torus_distance(const Eigen::Vector3d& x, const Eigen::Vector3d& y, int dim) {
  double s = 0.0;
  for (int a = 0; a < dim; ++a) {
    double u = minimal_image(x[a] - y[a]);
    s += u * u;
  }
  return std::sqrt(s);
}

inline double torus_distance(const TorusGrid& g, Eigen::Index i, Eigen::Index j) {
  return torus_distance(node_point(g, i), node_point(g, j), g.dim);
}

}  // namespace gmcflow
