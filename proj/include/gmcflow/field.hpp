#pragma once

#include "gmcflow/grid.hpp"

#include <cstdint>

namespace gmcflow {

// Spectral synthesis of the truncated log-correlated field
//   X(y) = omega_d^{-1/2} sum_n <n>^{-d/2} A_n e^{i n.y}
// over all modes representable on the grid, with Hermitian pairing so the
// nodal samples are real. The matching truncated covariance is
//   R(x) = omega_d^{-1} sum_n <n>^{-d} cos(n.x),   sigma2 = R(0).
// omega_d is the unit-sphere surface measure; dividing by it makes the
// covariance singularity exactly -log|x| + smooth, the normalization every
// decay law and weight estimate downstream is calibrated to.

// 2, 2*pi, 4*pi for d = 1, 2, 3
double sphere_surface(int dim);

struct FieldSpec {
  double beta = 0.5;  // 0 < beta^2 < dim
  TorusGrid grid;
  std::uint64_t seed = 0;

  FieldSpec() = default;
  FieldSpec(double beta_, const TorusGrid& grid_, std::uint64_t seed_);
};

struct CovarianceKernel {
  GridField R;
  double sigma2 = 0.0;
};

CovarianceKernel truncated_covariance(const TorusGrid& grid);

// One real realization; identical output for a given (spec.seed, realization)
// regardless of call order or worker count.
GridField sample_field(const FieldSpec& spec, std::uint64_t realization);

// Smooth remainder g(x) = R(x) + log |x| on nodes at distance >= 2h from the
// pole; closer nodes are flagged invalid and their values zeroed.
struct SmoothPart {
  GridField values;
  Eigen::Array<bool, Eigen::Dynamic, 1> valid;
};

SmoothPart extract_g(const CovarianceKernel& kernel);

}  // namespace gmcflow
