#pragma once

#include "gmcflow/field.hpp"
#include "gmcflow/g_operator.hpp"
#include "gmcflow/gmc.hpp"
#include "gmcflow/solver.hpp"

#include <functional>
#include <vector>

namespace gmcflow {

// The deterministic family u(y;z): one weighted solve per z-grid node with
// the weight pole at z, followed by inversion of the kernel convolution in
// the z variable and Monte Carlo verification of the duality identity
// E[U(y) exp_wick(beta X(z))] = u(y;z).

struct VectorFieldFamily {
  TorusGrid y_grid, z_grid;
  bool deterministic = true;
  std::array<GridField, 3> components;  // used when deterministic
  // optional z-parameterized data hook; receives the flat z-grid node index
  std::function<std::array<GridField, 3>(Eigen::Index)> generator;

  std::array<GridField, 3> data_at(Eigen::Index z_flat) const {
    if (deterministic) return components;
    return generator(z_flat);
  }
};

struct SolveStats {
  int iterations = 0;
  double rel_residual = 0.0;
  double energy = 0.0;
  bool converged = false;
};

struct SolutionFamily {
  TorusGrid y_grid, z_grid;
  double beta = 0.0;
  // u(z_flat, y_flat): rows follow the z-grid, columns the y-grid
  Eigen::MatrixXd u;
  std::vector<SolveStats> stats;
};

struct PhiField {
  TorusGrid y_grid, z_grid;
  double beta = 0.0;
  int mode_cutoff = 0;
  Eigen::MatrixXd phi;  // same layout as SolutionFamily::u
};

struct FamilySolveOptions {
  WeightMode mode = WeightMode::kernel;
  double floor = 0.0;
  Transmissibility trans = Transmissibility::geometric;
  double tol = 1e-10;
  int max_iter = 20000;
  int workers = 1;
};

// Flat y-grid node index of a z-grid node (the z-grid must divide the y-grid).
Eigen::Index z_node_on_y_grid(const TorusGrid& y_grid, const TorusGrid& z_grid,
                              Eigen::Index z_flat);

// Aggregates per-z failures into one error listing the offending z indices.
SolutionFamily solve_family(const VectorFieldFamily& f, const CovarianceKernel& y_kernel,
                            double beta, const FamilySolveOptions& opts);

// Trigonometric (zero-padding) interpolation in z at every fixed y; exact on
// the coarse nodes. The fine grid must refine the coarse one.
SolutionFamily z_interpolate(const SolutionFamily& fam, const TorusGrid& fine_z_grid);

// phi(y;.) = G_{beta^2}^{-1} u(y;.) on the z-grid, modes beyond the cutoff
// dropped. The kernel must live on the family's z-grid.
PhiField invert_in_z(const SolutionFamily& fam, const CovarianceKernel& z_kernel,
                     int mode_cutoff);

// U(y) = sum_k phi(y; z_k) atom_k over a GMC realization on the z-grid.
GridField assemble_solution(const PhiField& phi, const GmcRealization& m);

struct McTarget {
  Eigen::Index y_node = 0;  // flat index on the y-grid
  Eigen::Index z_node = 0;  // flat index on the z-grid
};

struct McRow {
  McTarget target;
  double estimate = 0.0;
  double se = 0.0;
  double reference = 0.0;
  bool pass = false;
};

struct McReport {
  std::vector<McRow> rows;
  int passed = 0;
  double pass_rate = 0.0;
  int realizations = 0;
};

// Estimates E[U(y) exp_wick(beta X(z))] over `realizations` independent field
// draws and checks each target against the family value within 3 SE.
McReport s_transform_mc(const PhiField& phi, const SolutionFamily& reference,
                        const FieldSpec& z_spec, const CovarianceKernel& z_kernel,
                        const std::vector<McTarget>& targets, int realizations, int workers = 1);

struct ZRegularityReport {
  std::vector<Eigen::Index> x_nodes;
  std::vector<double> hs_norms;     // discrete H^s norm of u(x;.) per sampled x
  double max_norm = 0.0;
  double min_norm = 0.0;
  double diff_exponent = 0.0;       // log-log slope of |du/dz| vs |x-z|
  bool exponent_fitted = false;
};

ZRegularityReport z_regularity_probe(const SolutionFamily& fam,
                                     const std::vector<Eigen::Index>& x_nodes, double s);

}  // namespace gmcflow
