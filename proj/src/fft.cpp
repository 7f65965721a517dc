#include "gmcflow/fft.hpp"

#include <unsupported/Eigen/FFT>

#include <complex>
#include <vector>

namespace gmcflow {

namespace {

// One 1-D transform over every line of the cube along `axis`, in place.
// Eigen::FFT caches twiddle plans per size inside the thread-local engine.
void transform_axis(const TorusGrid& g, Eigen::ArrayXcd& data, int axis, bool inverse) {
  thread_local Eigen::FFT<double> engine;
  const int n = g.n;
  Eigen::Index stride = 1;
  for (int a = g.dim - 1; a > axis; --a) stride *= n;
  const Eigen::Index total = g.size();
  const Eigen::Index block = stride * n;  // span of one axis-slab

  std::vector<std::complex<double>> in(n), out(n);
  for (Eigen::Index base = 0; base < total; base += block) {
    for (Eigen::Index off = 0; off < stride; ++off) {
      Eigen::Index p = base + off;
      for (int k = 0; k < n; ++k) in[k] = data[p + k * stride];
      if (inverse)
        engine.inv(out, in);  // includes the 1/n factor
      else
        engine.fwd(out, in);
      for (int k = 0; k < n; ++k) data[p + k * stride] = out[k];
    }
  }
}

}  // namespace

Eigen::ArrayXcd dft_forward(const TorusGrid& grid, const Eigen::ArrayXcd& nodal) {
  Eigen::ArrayXcd c = nodal;
  for (int a = 0; a < grid.dim; ++a) transform_axis(grid, c, a, false);
  c *= 1.0 / static_cast<double>(grid.size());
  return c;
}

Eigen::ArrayXcd dft_inverse(const TorusGrid& grid, const Eigen::ArrayXcd& coeffs) {
  Eigen::ArrayXcd f = coeffs;
  for (int a = 0; a < grid.dim; ++a) transform_axis(grid, f, a, true);
  f *= static_cast<double>(grid.size());  // undo the per-axis 1/n factors
  return f;
}

SpectralField forward_transform(const GridField& f) {
  Eigen::ArrayXcd nodal = f.values.cast<std::complex<double>>();
  return SpectralField(f.grid, dft_forward(f.grid, nodal), true);
}

GridField inverse_transform(const SpectralField& F) {
  if (!F.hermitian)
    throw std::invalid_argument("inverse_transform: real field requested from non-Hermitian coefficients");
  Eigen::ArrayXcd nodal = dft_inverse(F.grid, F.coeffs);
  return GridField(F.grid, nodal.real());
}

bool is_hermitian(const SpectralField& F, double tol) {
  const auto& c = F.coeffs;
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    Eigen::Index j = conjugate_index(F.grid, i);
    if (std::abs(c[i] - std::conj(c[j])) > tol) return false;
  }
  return true;
}

}  // namespace gmcflow
