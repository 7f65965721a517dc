#pragma once

// Brute-force reference implementations used only by tests. These stay
// independent of the FFT/solver paths they check.

#include "gmcflow/grid.hpp"

#include <complex>

namespace gmcflow::oracle {

// O(N^2d) forward DFT: coeff(n) = (1/N^d) sum_j f_j e^{-i n.x_j}
inline Eigen::ArrayXcd direct_dft(const TorusGrid& g, const Eigen::ArrayXcd& nodal) {
  Eigen::ArrayXcd out(g.size());
  for (Eigen::Index m = 0; m < g.size(); ++m) {
    Eigen::Vector3i n = mode_at(g, m);
    std::complex<double> acc = 0.0;
    for (Eigen::Index j = 0; j < g.size(); ++j) {
      Eigen::Vector3d x = node_point(g, j);
      double phase = 0;
      for (int a = 0; a < g.dim; ++a) phase += n[a] * x[a];
      acc += nodal[j] * std::exp(std::complex<double>(0.0, -phase));
    }
    out[m] = acc / static_cast<double>(g.size());
  }
  return out;
}

// O(N^2d) synthesis: f_j = sum_n c_n e^{+i n.x_j}
inline Eigen::ArrayXcd direct_synthesis(const TorusGrid& g, const Eigen::ArrayXcd& coeffs) {
  Eigen::ArrayXcd out(g.size());
  for (Eigen::Index j = 0; j < g.size(); ++j) {
    Eigen::Vector3d x = node_point(g, j);
    std::complex<double> acc = 0.0;
    for (Eigen::Index m = 0; m < g.size(); ++m) {
      Eigen::Vector3i n = mode_at(g, m);
      double phase = 0;
      for (int a = 0; a < g.dim; ++a) phase += n[a] * x[a];
      acc += coeffs[m] * std::exp(std::complex<double>(0.0, phase));
    }
    out[j] = acc;
  }
  return out;
}

// Direct lattice sum R(x) = omega^{-1} sum_n <n>^{-d} cos(n.x) at one point.
inline double covariance_sum(const TorusGrid& g, const Eigen::Vector3d& x, double omega) {
  double acc = 0;
  for (Eigen::Index m = 0; m < g.size(); ++m) {
    Eigen::Vector3i n = mode_at(g, m);
    double phase = 0;
    for (int a = 0; a < g.dim; ++a) phase += n[a] * x[a];
    acc += std::pow(angb2(n), -0.5 * g.dim) * std::cos(phase);
  }
  return acc / omega;
}

}  // namespace gmcflow::oracle
