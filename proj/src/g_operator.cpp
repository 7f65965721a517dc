#include "gmcflow/g_operator.hpp"

#include "gmcflow/fft.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace gmcflow {

MultiplierTable kernel_coefficients(double alpha, const CovarianceKernel& kernel) {
  const TorusGrid& g = kernel.R.grid;
  if (!(alpha > 0.0) || !(alpha < g.dim))
    throw std::invalid_argument("kernel_coefficients: alpha must lie in (0, dim)");

  Eigen::ArrayXcd c = dft_forward(g, (alpha * kernel.R.values).exp().cast<std::complex<double>>());
  MultiplierTable t;
  t.alpha = alpha;
  t.grid = g;
  t.H_hat = c.real() * g.volume();
  // The kernel exp(alpha R) has strictly positive coefficients (its spectrum
  // is a convolution series of the positive multiplier <n>^{-d}); a
  // nonpositive entry can only mean numerical breakdown.
  for (Eigen::Index i = 0; i < t.H_hat.size(); ++i)
    if (!(t.H_hat[i] > 0.0))
      throw std::runtime_error("kernel_coefficients: nonpositive coefficient at mode index " +
                               std::to_string(i));
  return t;
}

DecayFit verify_decay(const MultiplierTable& table) {
  const TorusGrid& g = table.grid;
  if (g.n < 64) throw std::invalid_argument("verify_decay: requires n_per_axis >= 64");
  const double k_lo = 8.0, k_hi = g.n / 4.0;

  DecayFit fit;
  fit.alpha = table.alpha;
  fit.dim = g.dim;

  // least squares of y = log H_hat against x = log <n> over the fit range
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  Eigen::Index count = 0;
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    double kn = std::sqrt(static_cast<double>(mode_at(g, i).squaredNorm()));
    if (kn < k_lo || kn > k_hi) continue;
    double x = 0.5 * std::log(angb2(mode_at(g, i)));
    double y = std::log(table.H_hat[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++count;
  }
  double denom = static_cast<double>(count) * sxx - sx * sx;
  fit.slope = (static_cast<double>(count) * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / static_cast<double>(count);

  double ss = 0;
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    double kn = std::sqrt(static_cast<double>(mode_at(g, i).squaredNorm()));
    if (kn < k_lo || kn > k_hi) continue;
    double x = 0.5 * std::log(angb2(mode_at(g, i)));
    double y = std::log(table.H_hat[i]);
    double e = y - (fit.intercept + fit.slope * x);
    ss += e * e;
  }
  fit.residual = std::sqrt(ss / static_cast<double>(count));

  // dyadic bins [k, 2k) with the ratio to the proven power law <n>^{alpha-d}
  const double target = table.alpha - g.dim;
  for (double k = k_lo; k < k_hi; k *= 2.0) {
    double hi = std::min(2.0 * k, k_hi + 1e-9);
    DecayFitBin bin;
    bin.k_center = std::sqrt(k * hi);
    bin.ratio_min = std::numeric_limits<double>::infinity();
    bin.ratio_max = 0.0;
    for (Eigen::Index i = 0; i < g.size(); ++i) {
      double kn = std::sqrt(static_cast<double>(mode_at(g, i).squaredNorm()));
      if (kn < k || kn >= hi || kn > k_hi) continue;
      double ratio = table.H_hat[i] * std::pow(angb2(mode_at(g, i)), -0.5 * target);
      bin.ratio_min = std::min(bin.ratio_min, ratio);
      bin.ratio_max = std::max(bin.ratio_max, ratio);
    }
    if (bin.ratio_max > 0.0) fit.bins.push_back(bin);
  }
  return fit;
}

SpectralField apply_G(const MultiplierTable& table, const SpectralField& u) {
  if (u.grid != table.grid) throw std::invalid_argument("apply_G: grid mismatch");
  SpectralField out = u;
  out.coeffs *= table.H_hat.cast<std::complex<double>>();
  return out;
}

SpectralField invert_G(const MultiplierTable& table, const SpectralField& f, int mode_cutoff) {
  if (f.grid != table.grid) throw std::invalid_argument("invert_G: grid mismatch");
  if (mode_cutoff <= 0 || mode_cutoff > table.grid.n / 2)
    throw std::invalid_argument("invert_G: mode_cutoff must lie in [1, n_per_axis/2]");
  SpectralField out = f;
  for (Eigen::Index i = 0; i < out.coeffs.size(); ++i) {
    Eigen::Vector3i n = mode_at(table.grid, i);
    int ninf = n.cwiseAbs().maxCoeff();
    if (ninf > mode_cutoff)
      out.coeffs[i] = 0.0;
    else
      out.coeffs[i] /= table.H_hat[i];
  }
  return out;
}

SpectralField project_between_chaoses(const SpectralField& phi, double beta, double beta2,
                                      const CovarianceKernel& kernel) {
  const int d = phi.grid.dim;
  if (!(beta * beta2 > 0.0) || beta * beta2 >= d)
    throw std::invalid_argument("project_between_chaoses: beta*beta2 must lie in (0, dim)");
  if (beta2 * beta2 >= d)
    throw std::invalid_argument("project_between_chaoses: beta2^2 must be < dim");
  MultiplierTable cross = kernel_coefficients(beta * beta2, kernel);
  MultiplierTable diag = kernel_coefficients(beta2 * beta2, kernel);
  SpectralField out = phi;
  out.coeffs *= (cross.H_hat / diag.H_hat).cast<std::complex<double>>();
  return out;
}

}  // namespace gmcflow
