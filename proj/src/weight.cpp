#include "gmcflow/weight.hpp"

#include "gmcflow/distance.hpp"

#include <cmath>
#include <stdexcept>

namespace gmcflow {

WeightField build_weight(const CovarianceKernel& kernel, Eigen::Index pole_node, double beta,
                         WeightMode mode, double floor) {
  const TorusGrid& g = kernel.R.grid;
  if (pole_node < 0 || pole_node >= g.size())
    throw std::invalid_argument("build_weight: pole node out of range");
  double b2 = beta * beta;
  if (!(b2 < g.dim)) throw std::invalid_argument("build_weight: requires beta^2 < dim");
  if (floor < 0.0) throw std::invalid_argument("build_weight: floor must be nonnegative");

  WeightField w;
  w.grid = g;
  w.pole = pole_node;
  w.beta = beta;
  w.mode = mode;
  w.floor = floor;
  w.values = GridField(g);

  if (mode == WeightMode::kernel) {
    Eigen::Vector3i pole_idx = unflatten(g, pole_node);
    for (Eigen::Index i = 0; i < g.size(); ++i) {
      // translation covariance through the kernel: w(y;z) = exp(-b2 R(y-z))
      Eigen::Vector3i rel = unflatten(g, i) - pole_idx;
      double R = kernel.R.values[flatten(g, rel)];
      w.values.values[i] = std::max(floor, std::exp(-b2 * R));
    }
  } else {
    w.values = power_weight(g, pole_node, b2, floor);
  }
  return w;
}

GridField power_weight(const TorusGrid& grid, Eigen::Index pole_node, double exponent,
                       double floor) {
  GridField w(grid);
  Eigen::Vector3d z = node_point(grid, pole_node);
  double h = grid.spacing();
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    double r = torus_distance(node_point(grid, i), z, grid.dim);
    double v = (i == pole_node) ? std::pow(h, exponent) : std::pow(r, exponent);
    w.values[i] = std::max(floor, v);
  }
  return w;
}

double a2_constant(const GridField& w, const std::vector<double>& radii,
                   const std::vector<Eigen::Index>& centers) {
  const TorusGrid& g = w.grid;
  double h = g.spacing();
  if ((w.values <= 0.0).any())
    throw std::invalid_argument("a2_constant: weight must be strictly positive");
  double best = 1.0;
  for (double rho : radii) {
    if (rho < 2.0 * h) throw std::invalid_argument("a2_constant: radii must be >= 2h");
    for (Eigen::Index c : centers) {
      Eigen::Vector3d xc = node_point(g, c);
      double sw = 0.0, sinv = 0.0;
      Eigen::Index count = 0;
      for (Eigen::Index i = 0; i < g.size(); ++i) {
        if (torus_distance(node_point(g, i), xc, g.dim) > rho) continue;
        sw += w.values[i];
        sinv += 1.0 / w.values[i];
        ++count;
      }
      if (count == 0) continue;
      double prod = (sw / count) * (sinv / count);
      best = std::max(best, prod);
    }
  }
  return best;
}

double a2_constant(const WeightField& w, const std::vector<double>& radii,
                   const std::vector<Eigen::Index>& centers) {
  return a2_constant(w.values, radii, centers);
}

}  // namespace gmcflow
