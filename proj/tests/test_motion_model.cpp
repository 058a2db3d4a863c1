// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "rislam/motion_model.hpp"
#include "rislam/rng.hpp"

using namespace rislam;

namespace {
const GravityVector kGravity = GravityVector::from_magnitude(9.81);
}

TEST_CASE("system matrices match the printed form") {
  {
    const auto [F, G] = system_matrices(1.0);
    // First row of F: (1, 0, 0, 1, 0, 0)
    CHECK(F(0, 0) == 1.0);
    CHECK(F(0, 3) == 1.0);
    CHECK(F(0, 1) == 0.0);
    CHECK(F(0, 4) == 0.0);
    CHECK(G(0, 0) == 0.5);
    CHECK(G(3, 0) == 1.0);
    CHECK(G(3, 3) == 1.0);
  }
  {
    const auto [F, G] = system_matrices(0.1);
    CHECK(G(0, 0) == doctest::Approx(0.005).epsilon(1e-15));
    CHECK(G(3, 0) == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(F(0, 3) == doctest::Approx(0.1).epsilon(1e-15));
  }
  for (double ts : {1.0, 0.1, 0.01, 2.5}) {
    const auto [F, G] = system_matrices(ts);
    CHECK(F.determinant() == doctest::Approx(1.0).epsilon(1e-12));
    // Exact sparsity pattern: zero entries are exactly zero.
    for (int i = 0; i < 6; ++i) {
      for (int j = 0; j < 6; ++j) {
        const bool f_nonzero = (i == j) || (j == i + 3);
        if (!f_nonzero) CHECK(F(i, j) == 0.0);
        const bool g_nonzero = (i == j) || (j == i + 3) || (i == j + 3);
        if (!g_nonzero) CHECK(G(i, j) == 0.0);
      }
    }
  }
  CHECK_THROWS_AS(system_matrices(0.0), std::invalid_argument);
  CHECK_THROWS_AS(system_matrices(-0.1), std::invalid_argument);
}

TEST_CASE("tangential direction") {
  SUBCASE("stationary device is degenerate for any orientation") {
    SplitMix64 rng(3);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int i = 0; i < 20; ++i) {
      const Rotation3 R = Rotation3::exp(Vec3(g(rng), g(rng), g(rng)));
      const ImuBias bias{Vec3(0.05, -0.02, 0.01), Vec3::Zero()};
      const Vec3 accel =
          R.inverse() * Vec3(0, 0, 9.81) + bias.accel;  // pure gravity
      CHECK(!tangential_direction(accel, R, bias, kGravity).has_value());
    }
  }
  SUBCASE("direct evaluation with identity orientation") {
    const auto d = tangential_direction(Vec3(1, 0, 9.81), Rotation3::identity(),
                                        ImuBias{}, kGravity);
    REQUIRE(d.has_value());
    CHECK((*d - Vec3(1, 0, 0)).norm() < 1e-12);
  }
  SUBCASE("rotation oracle") {
    const auto d = tangential_direction(Vec3(1, 0, 9.81),
                                        Rotation3::rot_z(M_PI / 2.0), ImuBias{},
                                        kGravity);
    REQUIRE(d.has_value());
    CHECK((*d - Vec3(0, 1, 0)).norm() < 1e-9);
  }
  SUBCASE("unit norm whenever not degenerate") {
    SplitMix64 rng(17);
    std::normal_distribution<double> g(0.0, 2.0);
    for (int i = 0; i < 1000; ++i) {
      const Rotation3 R = Rotation3::exp(Vec3(g(rng), g(rng), g(rng)));
      const Vec3 a(g(rng), g(rng), g(rng) + 9.81);
      const auto d = tangential_direction(a, R, ImuBias{}, kGravity);
      if (d) CHECK(std::abs(d->norm() - 1.0) < 1e-12);
    }
  }
}

TEST_CASE("imu motion step against hand-computed products") {
  SUBCASE("zero-noise constant velocity") {
    ReducedState s{Vec3::Zero(), Vec3(1, 0, 0)};
    const auto next = imu_motion_step(s, 0.0, Vec3::Zero(), std::nullopt, 0.1);
    CHECK((next.position - Vec3(0.1, 0, 0)).norm() < 1e-15);
    CHECK((next.velocity - Vec3(1, 0, 0)).norm() < 1e-15);
  }
  SUBCASE("forced tangential input") {
    ReducedState s{Vec3::Zero(), Vec3(1, 0, 0)};
    const auto next =
        imu_motion_step(s, 0.5, Vec3::Zero(), Vec3(1, 0, 0), 0.1);
    CHECK((next.position - Vec3(0.1025, 0, 0)).norm() < 1e-12);
    CHECK((next.velocity - Vec3(1.05, 0, 0)).norm() < 1e-12);
  }
  SUBCASE("forced velocity perturbation") {
    ReducedState s{Vec3::Zero(), Vec3::Zero()};
    const auto next =
        imu_motion_step(s, 0.0, Vec3(0.1, 0, 0), Vec3(1, 0, 0), 0.1);
    CHECK((next.position - Vec3(0.01, 0, 0)).norm() < 1e-12);
    CHECK((next.velocity - Vec3(0.1, 0, 0)).norm() < 1e-12);
  }
}

TEST_CASE("sampled imu motion moments") {
  const int n = 100000;
  const ImuMotionParams params{1.5, 0.005};
  const ReducedState s{Vec3(1, 2, 0), Vec3(0.5, -0.3, 0)};
  const double ts = 0.1;
  const Vec3 accel(1.0, 0, 9.81);  // direction (1,0,0) under identity R

  Vec3 mean_p = Vec3::Zero(), mean_v = Vec3::Zero();
  Mat6 cov_u = Mat6::Zero();
  const auto [F, G] = system_matrices(ts);
  const Vec6 drift = F * s.stacked();
  SplitMix64 rng(2024);
  for (int i = 0; i < n; ++i) {
    SplitMix64 sub(mix_seed(2024, static_cast<std::uint64_t>(i)));
    const auto next = sample_imu_motion(s, accel, Rotation3::identity(),
                                        ImuBias{}, params, kGravity, ts, sub);
    mean_p += next.position;
    mean_v += next.velocity;
    // Recover u from the linear system: G u = x' - F x (G invertible).
    const Vec6 u = G.inverse() * (next.stacked() - drift);
    cov_u += u * u.transpose();
  }
  mean_p /= n;
  mean_v /= n;
  cov_u /= n;

  // Mean equals the deterministic drift within Monte-Carlo tolerance.
  const ReducedState det = ReducedState::from_stacked(drift);
  const double se_p = 0.5 * ts * ts * params.sigma_a / std::sqrt(double(n));
  CHECK((mean_p - det.position).norm() < 6 * se_p + 1e-9);
  const double se_v = ts * params.sigma_a / std::sqrt(double(n));
  CHECK((mean_v - det.velocity).norm() < 6 * se_v + 1e-9);

  // Covariance of u: diag(sigma_a^2 a a^T, sigma_v^2 I) within 5%.
  const Vec3 a_hat(1, 0, 0);
  const Mat3 top = params.sigma_a * params.sigma_a * a_hat * a_hat.transpose();
  CHECK(std::abs(cov_u(0, 0) - top(0, 0)) / top(0, 0) < 0.05);
  CHECK(std::abs(cov_u(1, 1)) < 0.05 * top(0, 0));
  for (int k = 3; k < 6; ++k) {
    const double expect = params.sigma_v * params.sigma_v;
    CHECK(std::abs(cov_u(k, k) - expect) / expect < 0.05);
  }
}

TEST_CASE("degenerate direction leaves only the velocity perturbation") {
  const ImuMotionParams params{1.5, 0.005};
  const ReducedState s{Vec3::Zero(), Vec3::Zero()};
  // Stationary: specific force equals gravity exactly.
  const Vec3 accel(0, 0, 9.81);
  SplitMix64 rng(5);
  const auto next = sample_imu_motion(s, accel, Rotation3::identity(),
                                      ImuBias{}, params, kGravity, 0.1, rng);
  // Position moved only via G's velocity column: |dp| <= ts * |nu|.
  CHECK(next.position.norm() < 0.1 * 5 * params.sigma_v);
}

TEST_CASE("random walk moments") {
  const RandomWalkParams params{0.1, 0.05};
  const ReducedState s{Vec3(3, -1, 0), Vec3(0.4, 0.2, 0)};
  const double ts = 0.14;
  const int n = 100000;
  Vec3 mean_p = Vec3::Zero();
  Vec3 var_p = Vec3::Zero();
  for (int i = 0; i < n; ++i) {
    SplitMix64 sub(mix_seed(99, static_cast<std::uint64_t>(i)));
    const auto next = sample_random_walk(s, params, ts, sub);
    mean_p += next.position;
  }
  mean_p /= n;
  const Vec3 expect_p = s.position + ts * s.velocity;
  CHECK((mean_p - expect_p).norm() < 3 * params.sigma_p / std::sqrt(double(n)) * 3);

  for (int i = 0; i < n; ++i) {
    SplitMix64 sub(mix_seed(99, static_cast<std::uint64_t>(i)));
    const auto next = sample_random_walk(s, params, ts, sub);
    const Vec3 d = next.position - expect_p;
    var_p += d.cwiseProduct(d);
  }
  var_p /= n;
  for (int k = 0; k < 3; ++k) {
    CHECK(std::abs(std::sqrt(var_p[k]) - params.sigma_p) / params.sigma_p <
          0.03);
  }

  SUBCASE("zero noise is pure constant-velocity propagation") {
    SplitMix64 rng(1);
    const auto next =
        sample_random_walk(s, RandomWalkParams{1e-300, 1e-300}, ts, rng);
    CHECK((next.position - expect_p).norm() < 1e-12);
    CHECK((next.velocity - s.velocity).norm() < 1e-12);
  }
}

TEST_CASE("determinism by seed") {
  const ImuMotionParams params{1.5, 0.005};
  const ReducedState s{Vec3(1, 0, 0), Vec3(0, 1, 0)};
  SplitMix64 a(77), b(77);
  const auto r1 = sample_imu_motion(s, Vec3(0.5, 0, 9.81),
                                    Rotation3::identity(), ImuBias{}, params,
                                    kGravity, 0.1, a);
  const auto r2 = sample_imu_motion(s, Vec3(0.5, 0, 9.81),
                                    Rotation3::identity(), ImuBias{}, params,
                                    kGravity, 0.1, b);
  CHECK(r1.position == r2.position);
  CHECK(r1.velocity == r2.velocity);
}
