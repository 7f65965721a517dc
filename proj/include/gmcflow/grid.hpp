#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace gmcflow {

// Uniform periodic grid on [0,2pi)^d, d in {1,2,3}, with nodes x_j = 2*pi*j/n.
// Linear (flat) indexing is row-major with axis 0 slowest.
struct TorusGrid {
  int dim = 2;
  int n = 8;  // nodes per axis, even, >= 8

  TorusGrid() = default;
  TorusGrid(int dim_, int n_) : dim(dim_), n(n_) {
    if (dim < 1 || dim > 3) throw std::invalid_argument("TorusGrid: dim must be 1, 2 or 3");
    if (n < 8 || n % 2 != 0) throw std::invalid_argument("TorusGrid: n per axis must be even and >= 8");
  }

  double spacing() const { return 2.0 * std::numbers::pi / n; }
  double cell_volume() const { return std::pow(spacing(), dim); }
  double volume() const { return std::pow(2.0 * std::numbers::pi, dim); }
  Eigen::Index size() const {
    Eigen::Index s = 1;
    for (int a = 0; a < dim; ++a) s *= n;
    return s;
  }

  bool operator==(const TorusGrid& o) const { return dim == o.dim && n == o.n; }
  bool operator!=(const TorusGrid& o) const { return !(*this == o); }
};

// Real nodal values over a TorusGrid.
struct GridField {
  TorusGrid grid;
  Eigen::ArrayXd values;

  GridField() = default;
  explicit GridField(const TorusGrid& g) : grid(g), values(Eigen::ArrayXd::Zero(g.size())) {}
  GridField(const TorusGrid& g, Eigen::ArrayXd v) : grid(g), values(std::move(v)) {
    if (values.size() != grid.size()) throw std::invalid_argument("GridField: value count != node count");
  }
};

// Complex Fourier coefficients over the mode lattice {-n/2,...,n/2-1}^d.
// Storage uses FFT frequency order per axis: k in [0,n) maps to the signed
// mode n_k = k for k < n/2 and n_k = k - n otherwise.
struct SpectralField {
  TorusGrid grid;
  Eigen::ArrayXcd coeffs;
  bool hermitian = false;

  SpectralField() = default;
  explicit SpectralField(const TorusGrid& g, bool herm = false)
      : grid(g), coeffs(Eigen::ArrayXcd::Zero(g.size())), hermitian(herm) {}
  SpectralField(const TorusGrid& g, Eigen::ArrayXcd c, bool herm)
      : grid(g), coeffs(std::move(c)), hermitian(herm) {
    if (coeffs.size() != grid.size()) throw std::invalid_argument("SpectralField: coeff count != mode count");
  }
};

// ---- index helpers -------------------------------------------------------

inline Eigen::Vector3i unflatten(const TorusGrid& g, Eigen::Index flat) {
  Eigen::Vector3i idx = Eigen::Vector3i::Zero();
  for (int a = g.dim - 1; a >= 0; --a) {
    idx[a] = static_cast<int>(flat % g.n);
    flat /= g.n;
  }
  return idx;
}

inline Eigen::Index flatten(const TorusGrid& g, const Eigen::Vector3i& idx) {
  Eigen::Index flat = 0;
  for (int a = 0; a < g.dim; ++a) {
    int i = idx[a] % g.n;
    if (i < 0) i += g.n;
    flat = flat * g.n + i;
  }
  return flat;
}

// Flat index of the node shifted by `shift` (periodically) from `flat`.
inline Eigen::Index shifted_index(const TorusGrid& g, Eigen::Index flat, const Eigen::Vector3i& shift) {
  Eigen::Vector3i idx = unflatten(g, flat);
  for (int a = 0; a < g.dim; ++a) idx[a] += shift[a];
  return flatten(g, idx);
}

inline Eigen::Vector3d node_point(const TorusGrid& g, Eigen::Index flat) {
  Eigen::Vector3i idx = unflatten(g, flat);
  Eigen::Vector3d x = Eigen::Vector3d::Zero();
  for (int a = 0; a < g.dim; ++a) x[a] = g.spacing() * idx[a];
  return x;
}

// Signed mode vector for a flat coefficient index (FFT frequency order).
inline Eigen::Vector3i mode_at(const TorusGrid& g, Eigen::Index flat) {
  Eigen::Vector3i k = unflatten(g, flat);
  for (int a = 0; a < g.dim; ++a)
    if (k[a] >= g.n / 2) k[a] -= g.n;
  return k;
}

// <n>^2 = 1 + |n|^2
inline double angb2(const Eigen::Vector3i& mode) {
  return 1.0 + static_cast<double>(mode.squaredNorm());
}

// Flat index of the mode -n; total pairing of the lattice (Nyquist rows map
// to themselves).
inline Eigen::Index conjugate_index(const TorusGrid& g, Eigen::Index flat) {
  Eigen::Vector3i k = unflatten(g, flat);
  for (int a = 0; a < g.dim; ++a) k[a] = (g.n - k[a]) % g.n;
  return flatten(g, k);
}

}  // namespace gmcflow
