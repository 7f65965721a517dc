#pragma once

#include "gmcflow/field.hpp"
#include "gmcflow/grid.hpp"

#include <vector>

namespace gmcflow {

// Degenerate elliptic weight with a pole at a grid node. Kernel mode uses the
// truncated covariance, w = exp(-beta^2 R(.-z)), which self-regularizes at the
// pole to exp(-beta^2 sigma2); power mode uses the bare torus-distance power
// |y-z|^{beta^2} with the pole node floored at h^{beta^2}.

enum class WeightMode { kernel, power };

struct WeightField {
  TorusGrid grid;
  Eigen::Index pole = 0;  // flat node index of z
  double beta = 0.0;
  WeightMode mode = WeightMode::kernel;
  double floor = 0.0;
  GridField values;
};

WeightField build_weight(const CovarianceKernel& kernel, Eigen::Index pole_node, double beta,
                         WeightMode mode, double floor = 0.0);

// Raw power-law weight |y-z|^exponent with the pole node set to
// max(floor, h^exponent); no range restriction on the exponent, so it also
// serves the out-of-A2 diagnostics.
GridField power_weight(const TorusGrid& grid, Eigen::Index pole_node, double exponent,
                       double floor = 0.0);

// sup over the sampled balls of (avg_B w)(avg_B 1/w), with discrete averages
// over nodes within torus distance radius of each center. Radii must be >= 2h.
double a2_constant(const GridField& w, const std::vector<double>& radii,
                   const std::vector<Eigen::Index>& centers);

double a2_constant(const WeightField& w, const std::vector<double>& radii,
                   const std::vector<Eigen::Index>& centers);

}  // namespace gmcflow
