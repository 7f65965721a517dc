#pragma once

#include "gmcflow/field.hpp"
#include "gmcflow/grid.hpp"

#include <cstdint>

namespace gmcflow {

// Discrete Gaussian multiplicative chaos: nodal atoms
//   atom_j = h^d exp(beta X(x_j) - beta^2 sigma2 / 2)
// with unit-mean Wick-normalized exponentials.

// exp(beta X - beta^2 sigma2 / 2), nodewise. Rejects sigma2 < 0.
GridField wick_exponential(const GridField& X, double sigma2, double beta);

struct GmcRealization {
  TorusGrid grid;
  Eigen::ArrayXd atom_weights;
  double beta = 0.0;
  std::int64_t realization_id = 0;

  double total_mass() const { return atom_weights.sum(); }
};

GmcRealization make_gmc_realization(const GridField& X, double sigma2, double beta,
                                    std::int64_t realization_id);

// mu(psi) = sum_j psi_j atom_j
double gmc_integrate(const GmcRealization& m, const GridField& psi);

// E[mu_beta(psi) mu_beta2(psi)] for the discrete measure:
//   sum_{j,k} psi_j psi_k exp(beta*beta2 R(x_j - x_k)) h^{2d},
// evaluated spectrally in O(N^d log N). Rejects beta*beta2 >= dim.
double second_moment_predict(const GridField& psi, double beta, double beta2,
                             const CovarianceKernel& kernel);

}  // namespace gmcflow
