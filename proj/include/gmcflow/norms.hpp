#pragma once

#include "gmcflow/grid.hpp"

#include <cmath>
#include <stdexcept>

namespace gmcflow {

// || f ||_{s,2}^2 = sum_n <n>^{2s} |f_hat(n)|^2 over the representable lattice.
inline double sobolev_norm(const SpectralField& F, double s) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < F.coeffs.size(); ++i) {
    double w = std::pow(angb2(mode_at(F.grid, i)), s);
    acc += w * std::norm(F.coeffs[i]);
  }
  return std::sqrt(acc);
}

// ( sum_j |f_j|^p w_j h^d )^{1/p}
inline double weighted_lp_norm(const GridField& f, const GridField& w, double p) {
  if (p < 1.0) throw std::invalid_argument("weighted_lp_norm: p must be >= 1");
  if (f.grid != w.grid) throw std::invalid_argument("weighted_lp_norm: grid mismatch");
  if ((w.values < 0.0).any()) throw std::invalid_argument("weighted_lp_norm: negative weight");
  double acc = (f.values.abs().pow(p) * w.values).sum() * f.grid.cell_volume();
  return std::pow(acc, 1.0 / p);
}

// Plain quadrature of f over the torus.
inline double integrate(const GridField& f) { return f.values.sum() * f.grid.cell_volume(); }

inline double l2_norm(const GridField& f) {
  return std::sqrt((f.values * f.values).sum() * f.grid.cell_volume());
}

}  // namespace gmcflow
