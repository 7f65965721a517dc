#pragma once

#include "gmcflow/grid.hpp"
#include "gmcflow/weight.hpp"

#include <array>
#include <vector>

namespace gmcflow {

// Finite-volume discretization of L = -div(w grad .) on the periodic grid,
// solved by conjugate gradients on the mean-zero subspace with a
// constant-coefficient spectral preconditioner.

enum class Transmissibility { geometric, harmonic };

struct DiscreteOperator {
  TorusGrid grid;
  // face_w[a][j]: weight on the face between node j and its +e_a neighbour
  // (geometric or harmonic mean of the nodal weights). The operator divides
  // by h^2, so the stored transmissibility is face_w / h^2.
  std::array<Eigen::ArrayXd, 3> face_w;
  std::array<Eigen::ArrayXi, 3> up;    // flat index of j + e_a
  std::array<Eigen::ArrayXi, 3> down;  // flat index of j - e_a
  double mean_weight = 1.0;
};

DiscreteOperator assemble_operator(const WeightField& w,
                                   Transmissibility trans = Transmissibility::geometric);

GridField apply_operator(const DiscreteOperator& L, const GridField& u);

// Discrete divergence of the face-averaged flux w*f, with f given nodewise
// per axis. The result sums to zero exactly (telescoping).
GridField assemble_rhs(const WeightField& w, const std::array<GridField, 3>& f,
                       Transmissibility trans = Transmissibility::geometric);

// Same, but with f already sampled on the +e_a faces of each node.
GridField assemble_rhs_faces(const WeightField& w, const std::array<GridField, 3>& f_face,
                             Transmissibility trans = Transmissibility::geometric);

struct SolveReport {
  GridField u;             // mean-zero solution
  int iterations = 0;
  double rel_residual = 0.0;
  double energy = 0.0;     // <L u, u> h^d = weighted Dirichlet energy
  bool converged = false;
};

// Requires |sum rhs| <= 1e-10 * ||rhs||; nonconvergence is reported via the
// `converged` flag, incompatible data is rejected.
SolveReport solve_pde(const DiscreteOperator& L, const GridField& rhs, double tol,
                      int max_iter = 10000);

// Mean-zero Green column: rhs = indicator(source)/h^d - (2pi)^{-d}.
SolveReport green_function(const DiscreteOperator& L, Eigen::Index source, double tol,
                           int max_iter = 20000);

struct RegularityReport {
  std::vector<double> radii;
  std::vector<double> oscillation;      // osc_{B_rho} u
  std::vector<double> gradient_energy;  // averaged |grad u|^2 against d(nu)
  double osc_exponent = 0.0;
  double energy_exponent = 0.0;
  double osc_residual = 0.0;
  double energy_residual = 0.0;
};

// Fits osc_{B_rho} u ~ rho^a and the nu-averaged gradient energy ~ rho^b over
// balls centered at `center` (default: the weight pole).
RegularityReport regularity_probe(const GridField& u, const WeightField& w,
                                  const std::vector<double>& radii, Eigen::Index center = -1);

}  // namespace gmcflow
