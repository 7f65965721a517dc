#pragma once

#include "gmcflow/grid.hpp"

namespace gmcflow {

// Discrete transforms between nodal values and Fourier coefficients.
//
// forward:  coeff(n) = (1/n_g^d) sum_j f(x_j) e^{-i n.x_j}
// inverse:  f(x_j)   = sum_n coeff(n) e^{+i n.x_j}
//
// With this normalization coeff(n) approximates the average
// (2pi)^{-d} \int f e^{-i n.x} dx of a band-limited f.

Eigen::ArrayXcd dft_forward(const TorusGrid& grid, const Eigen::ArrayXcd& nodal);
Eigen::ArrayXcd dft_inverse(const TorusGrid& grid, const Eigen::ArrayXcd& coeffs);

SpectralField forward_transform(const GridField& f);

// Requires F.hermitian; throws std::invalid_argument otherwise.
GridField inverse_transform(const SpectralField& F);

// Checks coeff(-n) == conj(coeff(n)) within abs tolerance.
bool is_hermitian(const SpectralField& F, double tol = 1e-12);

}  // namespace gmcflow
