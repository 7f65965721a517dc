#include "gmcflow/field.hpp"

#include "gmcflow/distance.hpp"
#include "gmcflow/fft.hpp"
#include "gmcflow/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace gmcflow {

double sphere_surface(int dim) {
  switch (dim) {
    case 1: return 2.0;
    case 2: return 2.0 * std::numbers::pi;
    case 3: return 4.0 * std::numbers::pi;
  }
  throw std::invalid_argument("sphere_surface: dim must be 1, 2 or 3");
}

FieldSpec::FieldSpec(double beta_, const TorusGrid& grid_, std::uint64_t seed_)
    : beta(beta_), grid(grid_), seed(seed_) {
  if (!(beta > 0.0) || !(beta * beta < grid.dim))
    throw std::invalid_argument("FieldSpec: requires 0 < beta^2 < dim");
}

CovarianceKernel truncated_covariance(const TorusGrid& grid) {
  const double inv_omega = 1.0 / sphere_surface(grid.dim);
  SpectralField mult(grid, true);
  double sigma2 = 0.0;
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    double m = inv_omega * std::pow(angb2(mode_at(grid, i)), -0.5 * grid.dim);
    mult.coeffs[i] = m;
    sigma2 += m;
  }
  CovarianceKernel k;
  k.R = inverse_transform(mult);
  k.sigma2 = sigma2;
  return k;
}

GridField sample_field(const FieldSpec& spec, std::uint64_t realization) {
  const TorusGrid& g = spec.grid;
  SpectralField coeffs(g, true);
  const double quarter_d = 0.25 * g.dim;  // <n>^{-d/2} = (1+|n|^2)^{-d/4}
  const double scale = 1.0 / std::sqrt(sphere_surface(g.dim));
  const double inv_sqrt2 = std::sqrt(0.5);

  // Draws are addressed by the canonical member of each {n,-n} pair, so any
  // evaluation order produces the same field.
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    Eigen::Index j = conjugate_index(g, i);
    double amp = scale * std::pow(angb2(mode_at(g, i)), -quarter_d);
    if (i == j) {
      // zero mode and self-conjugate (Nyquist) modes carry real Gaussians
      auto z = gaussian_pair(spec.seed, Stream::field, realization, static_cast<std::uint64_t>(i));
      coeffs.coeffs[i] = amp * z.z0;
    } else if (i < j) {
      auto z = gaussian_pair(spec.seed, Stream::field, realization, static_cast<std::uint64_t>(i));
      std::complex<double> a(inv_sqrt2 * z.z0, inv_sqrt2 * z.z1);
      coeffs.coeffs[i] = amp * a;
      coeffs.coeffs[j] = amp * std::conj(a);
    }
  }
  return inverse_transform(coeffs);
}

SmoothPart extract_g(const CovarianceKernel& kernel) {
  const TorusGrid& g = kernel.R.grid;
  const double cutoff = 2.0 * g.spacing();
  SmoothPart out;
  out.values = GridField(g);
  out.valid = Eigen::Array<bool, Eigen::Dynamic, 1>::Constant(g.size(), false);
  Eigen::Vector3d origin = Eigen::Vector3d::Zero();
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    double r = torus_distance(node_point(g, i), origin, g.dim);
    if (r >= cutoff) {
      out.values.values[i] = kernel.R.values[i] + std::log(r);
      out.valid[i] = true;
    }
  }
  return out;
}

}  // namespace gmcflow
