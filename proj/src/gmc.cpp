#include "gmcflow/gmc.hpp"

#include "gmcflow/fft.hpp"

#include <cmath>
#include <stdexcept>

namespace gmcflow {

GridField wick_exponential(const GridField& X, double sigma2, double beta) {
  if (sigma2 < 0.0) throw std::invalid_argument("wick_exponential: sigma2 must be nonnegative");
  GridField out(X.grid);
  out.values = (beta * X.values - 0.5 * beta * beta * sigma2).exp();
  return out;
}

GmcRealization make_gmc_realization(const GridField& X, double sigma2, double beta,
                                    std::int64_t realization_id) {
  GridField w = wick_exponential(X, sigma2, beta);
  GmcRealization m;
  m.grid = X.grid;
  m.atom_weights = w.values * X.grid.cell_volume();
  m.beta = beta;
  m.realization_id = realization_id;
  if (!m.atom_weights.isFinite().all() || (m.atom_weights <= 0.0).any())
    throw std::runtime_error("make_gmc_realization: atom weights must be positive and finite");
  return m;
}

double gmc_integrate(const GmcRealization& m, const GridField& psi) {
  if (psi.grid != m.grid) throw std::invalid_argument("gmc_integrate: grid mismatch");
  return (psi.values * m.atom_weights).sum();
}

double second_moment_predict(const GridField& psi, double beta, double beta2,
                             const CovarianceKernel& kernel) {
  const TorusGrid& g = psi.grid;
  if (kernel.R.grid != g) throw std::invalid_argument("second_moment_predict: grid mismatch");
  double prod = beta * beta2;
  if (prod >= g.dim)
    throw std::invalid_argument("second_moment_predict: beta*beta2 must be < dim (L^2 range)");

  // sum_j psi_j (K (*) psi)_j h^d with K = exp(beta*beta2 R) and (*) the
  // h^d-weighted circular convolution, done through one forward/backward pass.
  Eigen::ArrayXcd K_hat = dft_forward(g, (prod * kernel.R.values).exp().cast<std::complex<double>>());
  Eigen::ArrayXcd psi_hat = dft_forward(g, psi.values.cast<std::complex<double>>());
  Eigen::ArrayXcd conv = dft_inverse(g, (K_hat * psi_hat).eval());
  double vol = g.volume();
  return (psi.values * conv.real()).sum() * g.cell_volume() * vol;
}

}  // namespace gmcflow
