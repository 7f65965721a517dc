#include "gmcflow/fft.hpp"
#include "gmcflow/g_operator.hpp"
#include "gmcflow/norms.hpp"
#include "gmcflow/rng.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <numbers>

using namespace gmcflow;

namespace {

SpectralField random_band_limited(const TorusGrid& g, int max_mode, std::uint64_t seed) {
  SpectralField F(g, true);
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    Eigen::Index j = conjugate_index(g, i);
    Eigen::Vector3i n = mode_at(g, i);
    if (n.cwiseAbs().maxCoeff() > max_mode) continue;
    auto z = gaussian_pair(seed, Stream::aux, 1, i);
    if (i == j)
      F.coeffs[i] = z.z0;
    else if (i < j) {
      F.coeffs[i] = std::complex<double>(z.z0, z.z1);
      F.coeffs[j] = std::conj(F.coeffs[i]);
    }
  }
  return F;
}

}  // namespace

TEST_CASE("kernel coefficients: positivity and range checks") {
  TorusGrid g(2, 128);
  CovarianceKernel k = truncated_covariance(g);
  MultiplierTable t = kernel_coefficients(0.25, k);
  CHECK((t.H_hat > 0.0).all());
  CHECK_THROWS_AS((void)kernel_coefficients(0.0, k), std::invalid_argument);
  CHECK_THROWS_AS((void)kernel_coefficients(2.0, k), std::invalid_argument);
}

TEST_CASE("kernel coefficients: alpha -> 0 limit is the volume") {
  TorusGrid g(2, 32);
  CovarianceKernel k = truncated_covariance(g);
  MultiplierTable t = kernel_coefficients(1e-6, k);
  const double vol = g.volume();
  CHECK(std::abs(t.H_hat[0] - vol) <= 1e-4 * vol);
  for (Eigen::Index i = 1; i < g.size(); ++i) CHECK(std::abs(t.H_hat[i]) <= 1e-4 * vol);
}

TEST_CASE("kernel coefficients match the direct DFT oracle") {
  TorusGrid g(2, 16);
  CovarianceKernel k = truncated_covariance(g);
  MultiplierTable t = kernel_coefficients(0.6, k);
  Eigen::ArrayXcd direct =
      oracle::direct_dft(g, (0.6 * k.R.values).exp().cast<std::complex<double>>()) * g.volume();
  CHECK((t.H_hat - direct.real()).abs().maxCoeff() <= 1e-12 * t.H_hat[0]);
}

TEST_CASE("coefficient decay follows the power law") {
  TorusGrid g(2, 128);
  CovarianceKernel k = truncated_covariance(g);
  MultiplierTable t = kernel_coefficients(0.25, k);
  DecayFit fit = verify_decay(t);
  CHECK(fit.slope == doctest::Approx(0.25 - 2.0).epsilon(0.086));  // within +-0.15
  CHECK(std::abs(fit.slope - (0.25 - 2.0)) <= 0.15);

  // ratio to the power law within a factor-4 band across the fit range
  double lo = 1e300, hi = 0;
  for (const auto& b : fit.bins) {
    lo = std::min(lo, b.ratio_min);
    hi = std::max(hi, b.ratio_max);
  }
  CHECK(hi / lo <= 4.0);

  CHECK_THROWS_AS((void)verify_decay(kernel_coefficients(0.25, truncated_covariance(TorusGrid(2, 32)))),
                  std::invalid_argument);
}

TEST_CASE("apply_G: multiplier eigenfunctions and the convolution oracle") {
  TorusGrid g(2, 16);
  CovarianceKernel k = truncated_covariance(g);
  MultiplierTable t = kernel_coefficients(0.5, k);

  SpectralField single(g, false);
  Eigen::Index im = flatten(g, Eigen::Vector3i(3, 12, 0));
  single.coeffs[im] = 1.0;
  SpectralField out = apply_G(t, single);
  CHECK(std::abs(out.coeffs[im] - t.H_hat[im]) < 1e-13 * t.H_hat[0]);
  for (Eigen::Index i = 0; i < g.size(); ++i)
    if (i != im) CHECK(std::abs(out.coeffs[i]) == 0.0);

  GridField ones(g);
  ones.values.setOnes();
  SpectralField ones_hat = forward_transform(ones);
  GridField Gones = inverse_transform(apply_G(t, ones_hat));
  CHECK((Gones.values - t.H_hat[0]).abs().maxCoeff() < 1e-10 * t.H_hat[0]);

  // concentrated bump vs direct h^d-quadrature convolution with the kernel
  GridField bump(g);
  bump.values[flatten(g, Eigen::Vector3i(4, 9, 0))] = 1.0;
  bump.values[flatten(g, Eigen::Vector3i(5, 9, 0))] = 0.5;
  GridField Gb = inverse_transform(apply_G(t, forward_transform(bump)));
  Eigen::ArrayXd H = (0.5 * k.R.values).exp();
  for (Eigen::Index j = 0; j < g.size(); ++j) {
    double acc = 0;
    for (Eigen::Index l = 0; l < g.size(); ++l) {
      Eigen::Vector3i diff = unflatten(g, j) - unflatten(g, l);
      acc += H[flatten(g, diff)] * bump.values[l];
    }
    acc *= g.cell_volume();
    CHECK(std::abs(Gb.values[j] - acc) <= 1e-10 * std::abs(acc));
  }

  SpectralField wrong(TorusGrid(2, 8), false);
  CHECK_THROWS_AS((void)apply_G(t, wrong), std::invalid_argument);
}

TEST_CASE("invert_G: band-limited round trip and amplification bound") {
  TorusGrid g(2, 64);
  CovarianceKernel k = truncated_covariance(g);
  MultiplierTable t = kernel_coefficients(0.5, k);

  SpectralField u = random_band_limited(g, 16, 5);
  SpectralField round = invert_G(t, apply_G(t, u), 16);
  double scale = u.coeffs.abs().maxCoeff();
  CHECK((round.coeffs - u.coeffs).abs().maxCoeff() <= 1e-10 * scale);

  // cutoff zeroes everything beyond it
  SpectralField full = random_band_limited(g, 32, 6);
  SpectralField inv = invert_G(t, full, 8);
  double max_amp = 0;
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    Eigen::Vector3i n = mode_at(g, i);
    if (n.cwiseAbs().maxCoeff() > 8) {
      CHECK(std::abs(inv.coeffs[i]) == 0.0);
    } else {
      max_amp = std::max(max_amp, 1.0 / t.H_hat[i]);
    }
  }
  double in_norm = std::sqrt(full.coeffs.abs2().sum());
  double out_norm = std::sqrt(inv.coeffs.abs2().sum());
  CHECK(out_norm <= max_amp * in_norm);

  CHECK_THROWS_AS((void)invert_G(t, full, 0), std::invalid_argument);
  CHECK_THROWS_AS((void)invert_G(t, full, 33), std::invalid_argument);
}

TEST_CASE("Sobolev mapping ratio stays in the table-derived band") {
  TorusGrid g(2, 64);
  CovarianceKernel k = truncated_covariance(g);
  const double alpha = 0.5, s = 0.3;
  MultiplierTable t = kernel_coefficients(alpha, k);

  double c_lo = 1e300, c_hi = 0;
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    if (mode_at(g, i).cwiseAbs().maxCoeff() > 16) continue;
    double r = t.H_hat[i] * std::pow(angb2(mode_at(g, i)), 0.5 * (g.dim - alpha));
    c_lo = std::min(c_lo, r);
    c_hi = std::max(c_hi, r);
  }
  for (int trial = 0; trial < 20; ++trial) {
    SpectralField u = random_band_limited(g, 16, 100 + trial);
    double ratio = sobolev_norm(apply_G(t, u), s) / sobolev_norm(u, s + alpha - g.dim);
    CHECK(ratio >= c_lo * (1 - 1e-10));
    CHECK(ratio <= c_hi * (1 + 1e-10));
  }
}

TEST_CASE("worst-case inversion amplification tracks the decay law") {
  TorusGrid g(2, 256);
  CovarianceKernel k = truncated_covariance(g);
  const double alpha = 0.25;
  MultiplierTable t = kernel_coefficients(alpha, k);
  DecayFit fit = verify_decay(t);
  double lo = 1e300, hi = 0;
  for (const auto& b : fit.bins) {
    lo = std::min(lo, b.ratio_min);
    hi = std::max(hi, b.ratio_max);
  }
  for (int cut : {8, 16, 32}) {
    double amp = 0;
    Eigen::Index worst = 0;
    for (Eigen::Index i = 0; i < g.size(); ++i) {
      if (mode_at(g, i).cwiseAbs().maxCoeff() > cut) continue;
      if (1.0 / t.H_hat[i] > amp) {
        amp = 1.0 / t.H_hat[i];
        worst = i;
      }
    }
    // the binding mode obeys the same two-sided power law as the fit range
    double law = std::pow(angb2(mode_at(g, worst)), 0.5 * (g.dim - alpha));
    CHECK(amp <= law / lo * (1 + 1e-12));
    CHECK(amp >= law / hi * (1 - 1e-12));
  }
}

TEST_CASE("chaos projection: identity case, single modes, defining identity") {
  TorusGrid g(2, 32);
  CovarianceKernel k = truncated_covariance(g);

  SpectralField phi = random_band_limited(g, 12, 9);
  SpectralField same = project_between_chaoses(phi, 0.5, 0.5, k);
  CHECK((same.coeffs - phi.coeffs).abs().maxCoeff() <= 1e-14 * phi.coeffs.abs().maxCoeff());

  MultiplierTable cross = kernel_coefficients(0.35, k);
  MultiplierTable diag = kernel_coefficients(0.49, k);
  SpectralField single(g, false);
  Eigen::Index im = flatten(g, Eigen::Vector3i(2, 29, 0));
  single.coeffs[im] = 1.0;
  SpectralField proj = project_between_chaoses(single, 0.5, 0.7, k);
  CHECK(std::abs(proj.coeffs[im] - cross.H_hat[im] / diag.H_hat[im]) < 1e-13);

  // defining identity G_{bb'} phi = G_{b'^2} phi_{b'}, both sides applied
  // independently
  SpectralField lhs = apply_G(cross, phi);
  SpectralField rhs = apply_G(diag, project_between_chaoses(phi, 0.5, 0.7, k));
  CHECK((lhs.coeffs - rhs.coeffs).abs().maxCoeff() <= 1e-12 * lhs.coeffs.abs().maxCoeff());

  CHECK_THROWS_AS((void)project_between_chaoses(phi, 1.4, 1.45, k), std::invalid_argument);
}

TEST_CASE("operator is self-adjoint in the discrete L2 pairing") {
  TorusGrid g(2, 16);
  CovarianceKernel k = truncated_covariance(g);
  MultiplierTable t = kernel_coefficients(0.5, k);
  GridField u(g), v(g);
  for (Eigen::Index j = 0; j < g.size(); ++j) {
    u.values[j] = gaussian_pair(3, Stream::aux, 2, j).z0;
    v.values[j] = gaussian_pair(3, Stream::aux, 2, j).z1;
  }
  GridField Gu = inverse_transform(apply_G(t, forward_transform(u)));
  GridField Gv = inverse_transform(apply_G(t, forward_transform(v)));
  double a = (Gu.values * v.values).sum() * g.cell_volume();
  double b = (u.values * Gv.values).sum() * g.cell_volume();
  CHECK(std::abs(a - b) <= 1e-12 * std::abs(a));
}

TEST_CASE("composition multiplies tables and is not G at the summed exponent") {
  TorusGrid g(2, 32);
  CovarianceKernel k = truncated_covariance(g);
  MultiplierTable t1 = kernel_coefficients(0.4, k);
  MultiplierTable t2 = kernel_coefficients(0.7, k);
  MultiplierTable sum = kernel_coefficients(1.1, k);

  SpectralField u = random_band_limited(g, 8, 17);
  SpectralField composed = apply_G(t1, apply_G(t2, u));
  Eigen::ArrayXcd expect = u.coeffs * (t1.H_hat * t2.H_hat).cast<std::complex<double>>();
  CHECK((composed.coeffs - expect).abs().maxCoeff() <= 1e-12 * expect.abs().maxCoeff());

  // tables differ: composition is not the summed-exponent operator
  double rel = ((t1.H_hat * t2.H_hat) - sum.H_hat).abs().maxCoeff() / sum.H_hat.maxCoeff();
  CHECK(rel > 1e-3);
}
