#include "gmcflow/family.hpp"

#include "gmcflow/distance.hpp"
#include "gmcflow/fft.hpp"
#include "gmcflow/norms.hpp"
#include "gmcflow/parallel.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace gmcflow {

Eigen::Index z_node_on_y_grid(const TorusGrid& y_grid, const TorusGrid& z_grid,
                              Eigen::Index z_flat) {
  if (y_grid.dim != z_grid.dim || y_grid.n % z_grid.n != 0)
    throw std::invalid_argument("z grid is not a subgrid of the y grid");
  int stride = y_grid.n / z_grid.n;
  Eigen::Vector3i idx = unflatten(z_grid, z_flat);
  return flatten(y_grid, (idx * stride).eval());
}

SolutionFamily solve_family(const VectorFieldFamily& f, const CovarianceKernel& y_kernel,
                            double beta, const FamilySolveOptions& opts) {
  const TorusGrid& yg = f.y_grid;
  const TorusGrid& zg = f.z_grid;
  if (y_kernel.R.grid != yg) throw std::invalid_argument("solve_family: kernel grid mismatch");
  z_node_on_y_grid(yg, zg, 0);  // validates nesting

  SolutionFamily fam;
  fam.y_grid = yg;
  fam.z_grid = zg;
  fam.beta = beta;
  fam.u = Eigen::MatrixXd::Zero(zg.size(), yg.size());
  fam.stats.assign(zg.size(), SolveStats{});

  std::vector<Eigen::Index> failed(zg.size(), -1);
  parallel_for(zg.size(), opts.workers, [&](std::int64_t zi) {
    Eigen::Index pole = z_node_on_y_grid(yg, zg, zi);
    WeightField w = build_weight(y_kernel, pole, beta, opts.mode, opts.floor);
    DiscreteOperator L = assemble_operator(w, opts.trans);
    GridField rhs = assemble_rhs(w, f.data_at(zi), opts.trans);
    SolveReport rep = solve_pde(L, rhs, opts.tol, opts.max_iter);
    fam.u.row(zi) = rep.u.values.matrix().transpose();
    fam.stats[zi] = {rep.iterations, rep.rel_residual, rep.energy, rep.converged};
    if (!rep.converged) failed[zi] = zi;
  });

  std::ostringstream bad;
  int nbad = 0;
  for (Eigen::Index zi = 0; zi < zg.size(); ++zi)
    if (failed[zi] >= 0) {
      bad << (nbad++ ? "," : "") << zi;
    }
  if (nbad > 0)
    throw std::runtime_error("solve_family: " + std::to_string(nbad) +
                             " solve(s) failed to converge at z indices [" + bad.str() + "]");
  return fam;
}

namespace {

// Zero-padding embedding of coarse-grid coefficients into a fine mode
// lattice. Coarse Nyquist components (n = -n_c/2) split evenly between the
// +/- fine modes, which preserves Hermitian symmetry and reproduces the
// coarse nodal values exactly.
void embed_modes(const TorusGrid& coarse, const TorusGrid& fine, const Eigen::ArrayXcd& cc,
                 Eigen::ArrayXcd& fc) {
  fc.setZero();
  const int nyq = coarse.n / 2;
  for (Eigen::Index i = 0; i < coarse.size(); ++i) {
    Eigen::Vector3i n = mode_at(coarse, i);
    // collect the axes sitting on the coarse Nyquist line
    std::vector<int> nyq_axes;
    for (int a = 0; a < coarse.dim; ++a)
      if (n[a] == -nyq) nyq_axes.push_back(a);
    const int splits = 1 << nyq_axes.size();
    std::complex<double> share = cc[i] / static_cast<double>(splits);
    for (int mask = 0; mask < splits; ++mask) {
      Eigen::Vector3i m = n;
      for (size_t b = 0; b < nyq_axes.size(); ++b)
        if (mask & (1 << b)) m[nyq_axes[b]] = nyq;
      // place signed mode m on the fine lattice
      Eigen::Vector3i k = m;
      for (int a = 0; a < fine.dim; ++a)
        if (k[a] < 0) k[a] += fine.n;
      fc[flatten(fine, k)] += share;
    }
  }
}

}  // namespace

SolutionFamily z_interpolate(const SolutionFamily& fam, const TorusGrid& fine_z_grid) {
  const TorusGrid& zc = fam.z_grid;
  const TorusGrid& zf = fine_z_grid;
  if (zf.dim != zc.dim || zf.n % zc.n != 0 || zf.n < zc.n)
    throw std::invalid_argument("z_interpolate: fine grid must refine the coarse z grid");
  if (zf.n == zc.n) return fam;

  SolutionFamily out;
  out.y_grid = fam.y_grid;
  out.z_grid = zf;
  out.beta = fam.beta;
  out.u = Eigen::MatrixXd::Zero(zf.size(), fam.y_grid.size());
  out.stats = fam.stats;

  Eigen::ArrayXcd fc(zf.size());
  for (Eigen::Index y = 0; y < fam.u.cols(); ++y) {
    Eigen::ArrayXcd cc = dft_forward(zc, fam.u.col(y).array().cast<std::complex<double>>());
    embed_modes(zc, zf, cc, fc);
    out.u.col(y) = dft_inverse(zf, fc).real().matrix();
  }
  return out;
}

PhiField invert_in_z(const SolutionFamily& fam, const CovarianceKernel& z_kernel,
                     int mode_cutoff) {
  const TorusGrid& zg = fam.z_grid;
  if (z_kernel.R.grid != zg) throw std::invalid_argument("invert_in_z: kernel grid mismatch");
  double b2 = fam.beta * fam.beta;
  if (!(b2 > 0.0) || !(b2 < zg.dim))
    throw std::invalid_argument("invert_in_z: requires beta^2 in (0, dim)");
  MultiplierTable table = kernel_coefficients(b2, z_kernel);

  PhiField out;
  out.y_grid = fam.y_grid;
  out.z_grid = zg;
  out.beta = fam.beta;
  out.mode_cutoff = mode_cutoff;
  out.phi = Eigen::MatrixXd::Zero(zg.size(), fam.y_grid.size());

  for (Eigen::Index y = 0; y < fam.u.cols(); ++y) {
    SpectralField u_hat(zg, dft_forward(zg, fam.u.col(y).array().cast<std::complex<double>>()),
                        true);
    SpectralField phi_hat = invert_G(table, u_hat, mode_cutoff);
    out.phi.col(y) = dft_inverse(zg, phi_hat.coeffs).real().matrix();
  }
  return out;
}

GridField assemble_solution(const PhiField& phi, const GmcRealization& m) {
  if (m.grid != phi.z_grid) throw std::invalid_argument("assemble_solution: grid mismatch");
  GridField U(phi.y_grid);
  U.values = (phi.phi.transpose() * m.atom_weights.matrix()).array();
  return U;
}

McReport s_transform_mc(const PhiField& phi, const SolutionFamily& reference,
                        const FieldSpec& z_spec, const CovarianceKernel& z_kernel,
                        const std::vector<McTarget>& targets, int realizations, int workers) {
  if (reference.z_grid != phi.z_grid || reference.y_grid != phi.y_grid)
    throw std::invalid_argument("s_transform_mc: reference does not match the phi field");
  if (z_spec.grid != phi.z_grid) throw std::invalid_argument("s_transform_mc: spec grid mismatch");
  if (realizations < 1000) throw std::invalid_argument("s_transform_mc: need at least 1000 realizations");
  for (const auto& t : targets) {
    Eigen::Vector3d y = node_point(phi.y_grid, t.y_node);
    Eigen::Vector3d z = node_point(phi.z_grid, t.z_node);
    if (torus_distance(y, z, phi.y_grid.dim) == 0.0)
      throw std::invalid_argument("s_transform_mc: targets must have y != z");
  }

  const double b = z_spec.beta;
  const double cell = phi.z_grid.cell_volume();
  const Eigen::Index T = static_cast<Eigen::Index>(targets.size());

  // per-realization samples go into fixed slots so the reduction order is
  // independent of the worker count
  Eigen::MatrixXd samples(realizations, T);
  parallel_for(realizations, workers, [&](std::int64_t r) {
    GridField X = sample_field(z_spec, static_cast<std::uint64_t>(r));
    Eigen::ArrayXd wick = (b * X.values - 0.5 * b * b * z_kernel.sigma2).exp();
    for (Eigen::Index t = 0; t < T; ++t) {
      double U = cell * (phi.phi.col(targets[t].y_node).array() * wick).sum();
      samples(r, t) = U * wick[targets[t].z_node];
    }
  });

  McReport rep;
  rep.realizations = realizations;
  for (Eigen::Index t = 0; t < T; ++t) {
    double mean = samples.col(t).mean();
    double var = (samples.col(t).array() - mean).square().sum() / (realizations - 1);
    double se = std::sqrt(var / realizations);
    McRow row;
    row.target = targets[t];
    row.estimate = mean;
    row.se = se;
    row.reference = reference.u(targets[t].z_node, targets[t].y_node);
    row.pass = std::abs(mean - row.reference) <= 3.0 * se;
    rep.rows.push_back(row);
    if (row.pass) ++rep.passed;
  }
  rep.pass_rate = targets.empty() ? 1.0 : static_cast<double>(rep.passed) / targets.size();
  return rep;
}

ZRegularityReport z_regularity_probe(const SolutionFamily& fam,
                                     const std::vector<Eigen::Index>& x_nodes, double s) {
  const TorusGrid& zg = fam.z_grid;
  ZRegularityReport rep;
  rep.x_nodes = x_nodes;

  double vmin = std::numeric_limits<double>::infinity(), vmax = 0.0;
  for (Eigen::Index x : x_nodes) {
    SpectralField u_hat(zg, dft_forward(zg, fam.u.col(x).array().cast<std::complex<double>>()),
                        true);
    double nrm = sobolev_norm(u_hat, s);
    rep.hs_norms.push_back(nrm);
    vmin = std::min(vmin, nrm);
    vmax = std::max(vmax, nrm);
  }
  rep.max_norm = vmax;
  rep.min_norm = vmin;

  // first z-differences against distance from the diagonal
  std::vector<double> lx, ly;
  const double hz = zg.spacing();
  for (Eigen::Index x : x_nodes) {
    Eigen::Vector3d xp = node_point(fam.y_grid, x);
    for (Eigen::Index z = 0; z < zg.size(); ++z) {
      double r = torus_distance(node_point(zg, z), xp, zg.dim);
      if (r < 2.0 * hz || r > 0.5 * std::numbers::pi) continue;
      for (int a = 0; a < zg.dim; ++a) {
        Eigen::Vector3i step = Eigen::Vector3i::Zero();
        step[a] = 1;
        double d = std::abs(fam.u(shifted_index(zg, z, step), x) - fam.u(z, x)) / hz;
        if (d <= 0.0) continue;
        lx.push_back(std::log(r));
        ly.push_back(std::log(d));
      }
    }
  }
  if (lx.size() >= 8) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    double n = static_cast<double>(lx.size());
    for (size_t i = 0; i < lx.size(); ++i) {
      sx += lx[i];
      sy += ly[i];
      sxx += lx[i] * lx[i];
      sxy += lx[i] * ly[i];
    }
    rep.diff_exponent = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    rep.exponent_fitted = true;
  }
  return rep;
}

}  // namespace gmcflow
