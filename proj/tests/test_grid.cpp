#include "gmcflow/distance.hpp"
#include "gmcflow/fft.hpp"
#include "gmcflow/io.hpp"
#include "gmcflow/norms.hpp"
#include "gmcflow/rng.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>

using namespace gmcflow;
constexpr double pi = std::numbers::pi;

namespace {

GridField random_field(const TorusGrid& g, std::uint64_t seed) {
  GridField f(g);
  for (Eigen::Index j = 0; j < g.size(); ++j)
    f.values[j] = gaussian_pair(seed, Stream::aux, 0, j).z0;
  return f;
}

}  // namespace

TEST_CASE("torus distance basics") {
  Eigen::Vector3d a(0, 0, 0), b(0.1, 0, 0), c(2 * pi - 0.1, 0, 0);
  CHECK(torus_distance(a, a, 2) == 0.0);
  CHECK(torus_distance(a, b, 2) == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(torus_distance(a, c, 2) == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(torus_distance(b, c, 2) == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(torus_distance(a, b, 2) == torus_distance(b, a, 2));
}

TEST_CASE("torus distance triangle inequality, exhaustive") {
  for (int n : {8, 16}) {
    TorusGrid g(2, n);
    const Eigen::Index N = g.size();
    Eigen::MatrixXd d(N, N);
    for (Eigen::Index i = 0; i < N; ++i)
      for (Eigen::Index j = 0; j < N; ++j) d(i, j) = torus_distance(g, i, j);
    bool ok = true;
    for (Eigen::Index i = 0; i < N && ok; ++i)
      for (Eigen::Index j = 0; j < N && ok; ++j)
        for (Eigen::Index k = 0; k < N; ++k)
          if (d(i, k) > d(i, j) + d(j, k) + 1e-12) {
            ok = false;
            break;
          }
    CHECK(ok);
  }
}

TEST_CASE("forward transform of constants and cosines") {
  TorusGrid g(2, 16);
  GridField f(g);
  f.values.setConstant(3.25);
  SpectralField F = forward_transform(f);
  CHECK(F.hermitian);
  CHECK(std::abs(F.coeffs[0] - 3.25) < 1e-13);
  double rest = 0;
  for (Eigen::Index i = 1; i < g.size(); ++i) rest = std::max(rest, std::abs(F.coeffs[i]));
  CHECK(rest < 1e-13);

  for (Eigen::Index j = 0; j < g.size(); ++j) f.values[j] = std::cos(node_point(g, j)[0]);
  F = forward_transform(f);
  Eigen::Index plus = flatten(g, Eigen::Vector3i(1, 0, 0));
  Eigen::Index minus = flatten(g, Eigen::Vector3i(g.n - 1, 0, 0));
  CHECK(std::abs(F.coeffs[plus] - 0.5) < 1e-13);
  CHECK(std::abs(F.coeffs[minus] - 0.5) < 1e-13);
}

TEST_CASE("transform round trip and direct DFT oracle") {
  for (int dim : {1, 2, 3}) {
    TorusGrid g(dim, 8);
    GridField f = random_field(g, 11 + dim);
    SpectralField F = forward_transform(f);
    CHECK(is_hermitian(F, 1e-12));

    Eigen::ArrayXcd ref = oracle::direct_dft(g, f.values.cast<std::complex<double>>());
    double scale = ref.abs().maxCoeff();
    CHECK((F.coeffs - ref).abs().maxCoeff() < 1e-12 * scale);

    GridField back = inverse_transform(F);
    CHECK((back.values - f.values).abs().maxCoeff() < 1e-12 * f.values.abs().maxCoeff());

    Eigen::ArrayXcd synth = oracle::direct_synthesis(g, F.coeffs);
    CHECK((synth.real() - f.values).abs().maxCoeff() < 1e-11 * f.values.abs().maxCoeff());
  }
}

TEST_CASE("inverse of a single Hermitian mode pair samples a cosine") {
  TorusGrid g(2, 16);
  SpectralField F(g, true);
  Eigen::Vector3i n(3, 14, 0);  // signed mode (3, -2)
  F.coeffs[flatten(g, n)] = 0.5;
  F.coeffs[conjugate_index(g, flatten(g, n))] = 0.5;
  GridField f = inverse_transform(F);
  for (Eigen::Index j = 0; j < g.size(); ++j) {
    Eigen::Vector3d x = node_point(g, j);
    CHECK(f.values[j] == doctest::Approx(std::cos(3 * x[0] - 2 * x[1])).epsilon(1e-12));
  }
}

TEST_CASE("inverse transform rejects non-Hermitian input when a real field is requested") {
  TorusGrid g(2, 8);
  SpectralField F(g, false);
  F.coeffs[3] = {0.2, 0.7};
  CHECK_THROWS_AS((void)inverse_transform(F), std::invalid_argument);
}

TEST_CASE("sobolev norm: constants, single modes, oracle, monotonicity") {
  TorusGrid g(2, 16);
  GridField ones(g);
  ones.values.setOnes();
  SpectralField F = forward_transform(ones);
  for (double s : {-1.5, 0.0, 0.7, 2.0})
    CHECK(sobolev_norm(F, s) == doctest::Approx(1.0).epsilon(1e-12));

  SpectralField single(g, false);
  Eigen::Vector3i n(2, 3, 0);
  single.coeffs[flatten(g, n)] = 1.0;
  for (double s : {-1.0, 0.5, 1.3})
    CHECK(sobolev_norm(single, s) == doctest::Approx(std::pow(angb2(n), 0.5 * s)).epsilon(1e-12));

  GridField f = random_field(g, 5);
  SpectralField Fr = forward_transform(f);
  double s = 0.8;
  double direct = 0;
  for (Eigen::Index i = 0; i < g.size(); ++i)
    direct += std::pow(angb2(mode_at(g, i)), s) * std::norm(Fr.coeffs[i]);
  CHECK(sobolev_norm(Fr, s) == doctest::Approx(std::sqrt(direct)).epsilon(1e-12));

  CHECK(sobolev_norm(Fr, 0.3) <= sobolev_norm(Fr, 0.9));
  CHECK(sobolev_norm(Fr, -1.0) <= sobolev_norm(Fr, 0.0));
}

TEST_CASE("weighted Lp norm") {
  TorusGrid g(2, 8);
  GridField ones(g), w(g);
  ones.values.setOnes();
  w.values.setOnes();
  for (double p : {1.0, 2.0, 3.0})
    CHECK(weighted_lp_norm(ones, w, p) ==
          doctest::Approx(std::pow(g.volume(), 1.0 / p)).epsilon(1e-12));

  GridField zero_w(g);
  CHECK(weighted_lp_norm(ones, zero_w, 2.0) == 0.0);

  GridField f = random_field(g, 21);
  GridField wr(g, random_field(g, 22).values.abs());
  double direct =
      std::pow((f.values.abs().pow(2.5) * wr.values).sum() * g.cell_volume(), 1.0 / 2.5);
  CHECK(weighted_lp_norm(f, wr, 2.5) == doctest::Approx(direct).epsilon(1e-12));

  CHECK_THROWS_AS((void)weighted_lp_norm(f, wr, 0.5), std::invalid_argument);
}

TEST_CASE("Parseval identity and L2 consistency") {
  TorusGrid g(2, 32);
  GridField f = random_field(g, 31);
  SpectralField F = forward_transform(f);
  double physical = (f.values * f.values).sum() * g.cell_volume();
  double spectral = g.volume() * F.coeffs.abs2().sum();
  CHECK(physical == doctest::Approx(spectral).epsilon(1e-10));
  // || f ||_{0,2} = (2pi)^{-d/2} * L2 norm
  CHECK(sobolev_norm(F, 0.0) ==
        doctest::Approx(l2_norm(f) / std::sqrt(g.volume())).epsilon(1e-10));
}

TEST_CASE("TGF1 round trip and checksums") {
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "gmcflow_io_test";
  fs::create_directories(dir);
  TorusGrid g(2, 8);
  GridField f = random_field(g, 77);
  std::string path = (dir / "f.tgf1").string();
  write_field(path, f);
  GridField back = read_grid_field(path);
  CHECK(back.grid == g);
  CHECK((back.values == f.values).all());

  SpectralField F = forward_transform(f);
  std::string spath = (dir / "F.tgf1").string();
  write_field(spath, F);
  SpectralField SB = read_spectral_field(spath, true);
  CHECK((SB.coeffs == F.coeffs).all());

  CHECK_THROWS((void)read_spectral_field(path, true));  // wrong payload kind

  std::uint64_t before = file_checksum(path);
  {
    std::fstream io(path, std::ios::in | std::ios::out | std::ios::binary);
    io.seekp(14);
    char b = 0x5a;
    io.write(&b, 1);
  }
  CHECK(file_checksum(path) != before);
}
