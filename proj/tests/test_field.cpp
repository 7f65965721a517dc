#include "gmcflow/distance.hpp"
#include "gmcflow/fft.hpp"
#include "gmcflow/field.hpp"
#include "gmcflow/parallel.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <numbers>

using namespace gmcflow;
constexpr double pi = std::numbers::pi;

TEST_CASE("truncated covariance: definition, evenness, direct sum oracle") {
  TorusGrid g(2, 16);
  CovarianceKernel k = truncated_covariance(g);

  CHECK(k.R.values[0] == doctest::Approx(k.sigma2).epsilon(1e-12));

  double asym = 0;
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    Eigen::Index j = conjugate_index(g, i);  // node at -x
    asym = std::max(asym, std::abs(k.R.values[i] - k.R.values[j]));
  }
  CHECK(asym < 1e-12);

  const double omega = sphere_surface(2);
  CHECK(k.sigma2 ==
        doctest::Approx(oracle::covariance_sum(g, Eigen::Vector3d::Zero(), omega)).epsilon(1e-12));
  for (Eigen::Index i : {Eigen::Index(3), Eigen::Index(40), Eigen::Index(200)}) {
    double ref = oracle::covariance_sum(g, node_point(g, i), omega);
    CHECK(k.R.values[i] == doctest::Approx(ref).epsilon(1e-10));
  }
}

TEST_CASE("sigma2 grows monotonically with resolution") {
  double prev = 0;
  for (int n : {32, 64, 128}) {
    CovarianceKernel k = truncated_covariance(TorusGrid(2, n));
    CHECK(k.sigma2 > prev);
    prev = k.sigma2;
  }
}

TEST_CASE("field spec validates the L2 range") {
  TorusGrid g(2, 16);
  CHECK_THROWS_AS(FieldSpec(1.5, g, 1), std::invalid_argument);  // beta^2 = 2.25 >= 2
  CHECK_THROWS_AS(FieldSpec(-0.5, g, 1), std::invalid_argument);
  CHECK_NOTHROW(FieldSpec(1.2, TorusGrid(3, 16), 1));  // beta^2 = 1.44 < 3
}

TEST_CASE("sample_field is reproducible and worker-count independent") {
  TorusGrid g(2, 16);
  FieldSpec spec(0.5, g, 424242);
  GridField a = sample_field(spec, 7);
  GridField b = sample_field(spec, 7);
  CHECK((a.values == b.values).all());
  GridField c = sample_field(spec, 8);
  CHECK((a.values != c.values).any());

  const int M = 64;
  Eigen::MatrixXd one(g.size(), M), four(g.size(), M);
  parallel_for(M, 1, [&](std::int64_t r) { one.col(r) = sample_field(spec, r).values.matrix(); });
  parallel_for(M, 4, [&](std::int64_t r) { four.col(r) = sample_field(spec, r).values.matrix(); });
  CHECK((one.array() == four.array()).all());
}

TEST_CASE("field moments match the truncated covariance") {
  TorusGrid g(2, 16);
  FieldSpec spec(0.5, g, 12345);
  CovarianceKernel k = truncated_covariance(g);
  const int M = 10000;

  const Eigen::Index nodes[6] = {flatten(g, {3, 4, 0}),  flatten(g, {9, 13, 0}),
                                 flatten(g, {0, 0, 0}),  flatten(g, {8, 8, 0}),
                                 flatten(g, {15, 2, 0}), flatten(g, {5, 10, 0})};
  Eigen::MatrixXd vals(M, 6);
  parallel_for(M, 4, [&](std::int64_t r) {
    GridField X = sample_field(spec, r);
    for (int c = 0; c < 6; ++c) vals(r, c) = X.values[nodes[c]];
  });

  // zero mean within 3 SE at a fixed node
  double mean = vals.col(0).mean();
  CHECK(std::abs(mean) <= 3.0 * std::sqrt(k.sigma2 / M));

  // nodal variance = sigma2 within 3 SE
  double var = (vals.col(0).array() - mean).square().sum() / (M - 1);
  CHECK(std::abs(var - k.sigma2) <= 3.0 * k.sigma2 * std::sqrt(2.0 / (M - 1)));

  // empirical covariance vs R on five pairs within 3 SE
  for (auto [a, b] : std::initializer_list<std::pair<int, int>>{{0, 1}, {0, 2}, {1, 3}, {2, 4},
                                                                {3, 5}}) {
    Eigen::Vector3i diff = unflatten(g, nodes[b]) - unflatten(g, nodes[a]);
    double R_ab = k.R.values[flatten(g, diff)];
    Eigen::ArrayXd xa = vals.col(a).array() - vals.col(a).mean();
    Eigen::ArrayXd xb = vals.col(b).array() - vals.col(b).mean();
    double cov = (xa * xb).sum() / (M - 1);
    double se = std::sqrt((k.sigma2 * k.sigma2 + R_ab * R_ab) / M);
    CHECK(std::abs(cov - R_ab) <= 3.0 * se);
  }

  // joint sanity: all 21 entries of the 6-node covariance matrix within 4 SE
  for (int a = 0; a < 6; ++a)
    for (int b = a; b < 6; ++b) {
      Eigen::Vector3i diff = unflatten(g, nodes[b]) - unflatten(g, nodes[a]);
      double R_ab = k.R.values[flatten(g, diff)];
      Eigen::ArrayXd xa = vals.col(a).array() - vals.col(a).mean();
      Eigen::ArrayXd xb = vals.col(b).array() - vals.col(b).mean();
      double cov = (xa * xb).sum() / (M - 1);
      double se = std::sqrt((k.sigma2 * k.sigma2 + R_ab * R_ab) / M);
      CHECK(std::abs(cov - R_ab) <= 4.0 * se);
    }
}

TEST_CASE("extract_g: exclusion zone, evenness, refinement stability") {
  TorusGrid g64(2, 64);
  CovarianceKernel k64 = truncated_covariance(g64);
  SmoothPart s64 = extract_g(k64);

  // the 2h exclusion zone is flagged, not silently returned
  Eigen::Index near_pole = flatten(g64, Eigen::Vector3i(1, 0, 0));
  CHECK_FALSE(s64.valid[near_pole]);
  CHECK(s64.valid.count() > 0);
  for (Eigen::Index i = 0; i < g64.size(); ++i) {
    double r = torus_distance(node_point(g64, i), Eigen::Vector3d::Zero(), 2);
    CHECK(s64.valid[i] == (r >= 2.0 * g64.spacing()));
  }

  double asym = 0;
  for (Eigen::Index i = 0; i < g64.size(); ++i) {
    Eigen::Index j = conjugate_index(g64, i);
    if (s64.valid[i] && s64.valid[j])
      asym = std::max(asym, std::abs(s64.values.values[i] - s64.values.values[j]));
  }
  CHECK(asym < 1e-12);

  // two-resolution comparison at |x| = pi/2
  TorusGrid g128(2, 128);
  SmoothPart s128 = extract_g(truncated_covariance(g128));
  Eigen::Index i64 = flatten(g64, Eigen::Vector3i(16, 0, 0));
  Eigen::Index i128 = flatten(g128, Eigen::Vector3i(32, 0, 0));
  CHECK(s64.valid[i64]);
  CHECK(std::abs(s64.values.values[i64] - s128.values.values[i128]) <= 0.05);
}

TEST_CASE("R + log|x| stays bounded on the admissible annulus") {
  // discrete reflection of the smoothness of g: bounded, and stable in
  // resolution, over 2h <= |x| <= pi
  for (int n : {32, 64}) {
    TorusGrid g(2, n);
    SmoothPart sp = extract_g(truncated_covariance(g));
    double lo = 1e300, hi = -1e300;
    for (Eigen::Index i = 0; i < g.size(); ++i) {
      if (!sp.valid[i]) continue;
      if (torus_distance(node_point(g, i), Eigen::Vector3d::Zero(), 2) > pi) continue;
      lo = std::min(lo, sp.values.values[i]);
      hi = std::max(hi, sp.values.values[i]);
    }
    CHECK(lo > -3.0);
    CHECK(hi < 3.0);
  }
}
