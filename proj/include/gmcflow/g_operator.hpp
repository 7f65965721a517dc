#pragma once

#include "gmcflow/field.hpp"
#include "gmcflow/grid.hpp"

#include <vector>

namespace gmcflow {

// The convolution operator G_alpha f = integral of exp(alpha R(.-y)) f(y) dy,
// realized as a Fourier multiplier. H_hat stores the kernel coefficients in
// the integral convention
//   H_hat(n) = h^d sum_j exp(alpha R(x_j)) e^{-i n.x_j}  ~  <n>^{alpha-d},
// so that apply_G is exactly the h^d-quadrature convolution with the kernel.

struct MultiplierTable {
  double alpha = 0.0;
  TorusGrid grid;
  Eigen::ArrayXd H_hat;  // indexed like SpectralField coefficients
};

// Rejects alpha outside (0, dim); throws if any coefficient is nonpositive.
MultiplierTable kernel_coefficients(double alpha, const CovarianceKernel& kernel);

struct DecayFitBin {
  double k_center = 0.0;         // geometric bin center in |n|
  double ratio_min = 0.0;        // min over bin of H_hat(n) <n>^{d-alpha}
  double ratio_max = 0.0;
};

struct DecayFit {
  double alpha = 0.0;
  int dim = 0;
  double slope = 0.0;            // least-squares slope of log H_hat vs log <n>
  double intercept = 0.0;
  double residual = 0.0;         // rms residual of the fit
  std::vector<DecayFitBin> bins; // dyadic bins over |n| in [8, n_g/4]
};

// Log-log fit of the coefficient decay over |n| in [8, n_g/4]; requires n_g >= 64.
DecayFit verify_decay(const MultiplierTable& table);

SpectralField apply_G(const MultiplierTable& table, const SpectralField& u);

// Mode-wise division with modes |n|_inf > mode_cutoff zeroed. cutoff in [1, n_g/2].
SpectralField invert_G(const MultiplierTable& table, const SpectralField& f, int mode_cutoff);

// Projection between chaos subspaces: solves G_{beta*beta2} phi = G_{beta2^2} phi_out
// mode-wise. Requires beta*beta2 < dim and beta2^2 < dim.
SpectralField project_between_chaoses(const SpectralField& phi, double beta, double beta2,
                                      const CovarianceKernel& kernel);

}  // namespace gmcflow
