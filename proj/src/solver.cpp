#include "gmcflow/solver.hpp"

#include "gmcflow/distance.hpp"
#include "gmcflow/fft.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace gmcflow {

namespace {

double face_mean(double a, double b, Transmissibility trans) {
  if (trans == Transmissibility::geometric) return std::sqrt(a * b);
  return (a <= 0.0 || b <= 0.0) ? 0.0 : 2.0 / (1.0 / a + 1.0 / b);
}

// Least squares slope/intercept for y against x.
void fit_line(const std::vector<double>& x, const std::vector<double>& y, double& slope,
              double& intercept, double& rms) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  intercept = (sy - slope * sx) / n;
  double ss = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    double e = y[i] - (intercept + slope * x[i]);
    ss += e * e;
  }
  rms = std::sqrt(ss / n);
}

}  // namespace

DiscreteOperator assemble_operator(const WeightField& w, Transmissibility trans) {
  const TorusGrid& g = w.grid;
  DiscreteOperator L;
  L.grid = g;
  L.mean_weight = w.values.values.mean();
  for (int a = 0; a < g.dim; ++a) {
    L.face_w[a] = Eigen::ArrayXd::Zero(g.size());
    L.up[a] = Eigen::ArrayXi::Zero(g.size());
    L.down[a] = Eigen::ArrayXi::Zero(g.size());
    Eigen::Vector3i step = Eigen::Vector3i::Zero();
    step[a] = 1;
    for (Eigen::Index j = 0; j < g.size(); ++j) {
      Eigen::Index ju = shifted_index(g, j, step);
      Eigen::Index jd = shifted_index(g, j, -step);
      L.up[a][j] = static_cast<int>(ju);
      L.down[a][j] = static_cast<int>(jd);
      L.face_w[a][j] = face_mean(w.values.values[j], w.values.values[ju], trans);
    }
  }
  return L;
}

GridField apply_operator(const DiscreteOperator& L, const GridField& u) {
  if (u.grid != L.grid) throw std::invalid_argument("apply_operator: grid mismatch");
  const TorusGrid& g = L.grid;
  const double inv_h2 = 1.0 / (g.spacing() * g.spacing());
  GridField out(g);
  for (int a = 0; a < g.dim; ++a) {
    const auto& fw = L.face_w[a];
    const auto& up = L.up[a];
    const auto& down = L.down[a];
    for (Eigen::Index j = 0; j < g.size(); ++j) {
      double uj = u.values[j];
      out.values[j] += inv_h2 * (fw[j] * (uj - u.values[up[j]]) +
                                 fw[down[j]] * (uj - u.values[down[j]]));
    }
  }
  return out;
}

GridField assemble_rhs(const WeightField& w, const std::array<GridField, 3>& f,
                       Transmissibility trans) {
  const TorusGrid& g = w.grid;
  std::array<GridField, 3> f_face;
  for (int a = 0; a < g.dim; ++a) {
    if (f[a].grid != g) throw std::invalid_argument("assemble_rhs: grid mismatch");
    f_face[a] = GridField(g);
    Eigen::Vector3i step = Eigen::Vector3i::Zero();
    step[a] = 1;
    for (Eigen::Index j = 0; j < g.size(); ++j)
      f_face[a].values[j] = 0.5 * (f[a].values[j] + f[a].values[shifted_index(g, j, step)]);
  }
  return assemble_rhs_faces(w, f_face, trans);
}

GridField assemble_rhs_faces(const WeightField& w, const std::array<GridField, 3>& f_face,
                             Transmissibility trans) {
  const TorusGrid& g = w.grid;
  const double inv_h = 1.0 / g.spacing();
  GridField rhs(g);
  for (int a = 0; a < g.dim; ++a) {
    if (f_face[a].grid != g) throw std::invalid_argument("assemble_rhs_faces: grid mismatch");
    Eigen::Vector3i step = Eigen::Vector3i::Zero();
    step[a] = 1;
    for (Eigen::Index j = 0; j < g.size(); ++j) {
      Eigen::Index ju = shifted_index(g, j, step);
      Eigen::Index jd = shifted_index(g, j, -step);
      double flux_up = face_mean(w.values.values[j], w.values.values[ju], trans) * f_face[a].values[j];
      double flux_dn =
          face_mean(w.values.values[jd], w.values.values[j], trans) * f_face[a].values[jd];
      rhs.values[j] += inv_h * (flux_up - flux_dn);
    }
  }
  return rhs;
}

namespace {

// Inverse of the constant-coefficient operator mean_w * (-Laplacian_h) on the
// mean-zero subspace, applied spectrally.
Eigen::ArrayXd precondition(const TorusGrid& g, double mean_w, const Eigen::ArrayXd& r) {
  Eigen::ArrayXcd r_hat = dft_forward(g, r.cast<std::complex<double>>());
  const double h = g.spacing();
  const double inv_h2 = 1.0 / (h * h);
  for (Eigen::Index i = 0; i < r_hat.size(); ++i) {
    Eigen::Vector3i n = mode_at(g, i);
    double lambda = 0.0;
    for (int a = 0; a < g.dim; ++a) {
      double s = std::sin(0.5 * n[a] * h);
      lambda += 4.0 * inv_h2 * s * s;
    }
    if (lambda == 0.0)
      r_hat[i] = 0.0;  // zero mode: stay in the mean-zero subspace
    else
      r_hat[i] /= mean_w * lambda;
  }
  return dft_inverse(g, r_hat).real();
}

}  // namespace

SolveReport solve_pde(const DiscreteOperator& L, const GridField& rhs, double tol, int max_iter) {
  const TorusGrid& g = L.grid;
  if (rhs.grid != g) throw std::invalid_argument("solve_pde: grid mismatch");
  const Eigen::Index n = g.size();

  double rhs_norm = std::sqrt((rhs.values * rhs.values).sum());
  if (std::abs(rhs.values.sum()) > 1e-10 * std::max(rhs_norm, 1e-300) && rhs_norm > 0.0)
    throw std::invalid_argument("solve_pde: incompatible rhs (nonzero total sum)");

  SolveReport rep;
  rep.u = GridField(g);
  if (rhs_norm == 0.0) {
    rep.converged = true;
    return rep;
  }

  // CG on the mean-zero subspace; the projection is reapplied each iteration
  // to keep rounding drift out of the nullspace direction.
  Eigen::ArrayXd r = rhs.values - rhs.values.mean();
  Eigen::ArrayXd x = Eigen::ArrayXd::Zero(n);
  Eigen::ArrayXd z = precondition(g, L.mean_weight, r);
  Eigen::ArrayXd p = z;
  double rz = (r * z).sum();
  const double target = tol * std::sqrt((r * r).sum());

  GridField pw(g);
  int it = 0;
  double rn = std::sqrt((r * r).sum());
  for (; it < max_iter && rn > target; ++it) {
    pw.values = p;
    GridField lp = apply_operator(L, pw);
    double p_lp = (p * lp.values).sum();
    if (!(p_lp > 0.0)) break;  // lost positive-definiteness to rounding
    double alpha = rz / p_lp;
    x += alpha * p;
    r -= alpha * lp.values;
    r -= r.mean();
    rn = std::sqrt((r * r).sum());
    if (rn <= target) {
      ++it;
      break;
    }
    Eigen::ArrayXd z_new = precondition(g, L.mean_weight, r);
    double rz_new = (r * z_new).sum();
    p = z_new + (rz_new / rz) * p;
    rz = rz_new;
  }

  x -= x.mean();
  rep.u.values = x;
  rep.iterations = it;
  rep.rel_residual = rn / std::sqrt((rhs.values * rhs.values).sum());
  GridField lu = apply_operator(L, rep.u);
  rep.energy = (lu.values * x).sum() * g.cell_volume();
  rep.converged = rn <= target;
  return rep;
}

SolveReport green_function(const DiscreteOperator& L, Eigen::Index source, double tol,
                           int max_iter) {
  const TorusGrid& g = L.grid;
  if (source < 0 || source >= g.size())
    throw std::invalid_argument("green_function: source node out of range");
  GridField rhs(g);
  rhs.values = Eigen::ArrayXd::Constant(g.size(), -1.0 / g.volume());
  rhs.values[source] += 1.0 / g.cell_volume();
  return solve_pde(L, rhs, tol, max_iter);
}

RegularityReport regularity_probe(const GridField& u, const WeightField& w,
                                  const std::vector<double>& radii, Eigen::Index center) {
  const TorusGrid& g = u.grid;
  if (w.grid != g) throw std::invalid_argument("regularity_probe: grid mismatch");
  if (center < 0) center = w.pole;
  Eigen::Vector3d xc = node_point(g, center);

  RegularityReport rep;
  std::vector<double> lx, ly_osc, ly_energy;
  for (double rho : radii) {
    double umin = std::numeric_limits<double>::infinity();
    double umax = -umin;
    double mass = 0.0;
    double energy = 0.0;
    for (Eigen::Index j = 0; j < g.size(); ++j) {
      if (torus_distance(node_point(g, j), xc, g.dim) > rho) continue;
      umin = std::min(umin, u.values[j]);
      umax = std::max(umax, u.values[j]);
      mass += w.values.values[j] * g.cell_volume();
      for (int a = 0; a < g.dim; ++a) {
        Eigen::Vector3i step = Eigen::Vector3i::Zero();
        step[a] = 1;
        Eigen::Index ju = shifted_index(g, j, step);
        if (torus_distance(node_point(g, ju), xc, g.dim) > rho) continue;
        double slope = (u.values[ju] - u.values[j]) / g.spacing();
        energy += std::sqrt(w.values.values[j] * w.values.values[ju]) * slope * slope *
                  g.cell_volume();
      }
    }
    if (!(umax > umin) || mass <= 0.0) continue;
    rep.radii.push_back(rho);
    rep.oscillation.push_back(umax - umin);
    rep.gradient_energy.push_back(energy / mass);
    lx.push_back(std::log(rho));
    ly_osc.push_back(std::log(umax - umin));
    ly_energy.push_back(std::log(std::max(energy / mass, 1e-300)));
  }
  if (lx.size() >= 2) {
    double icpt;
    fit_line(lx, ly_osc, rep.osc_exponent, icpt, rep.osc_residual);
    fit_line(lx, ly_energy, rep.energy_exponent, icpt, rep.energy_residual);
  }
  return rep;
}

}  // namespace gmcflow
