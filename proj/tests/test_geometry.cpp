// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "rislam/geometry.hpp"
#include "rislam/rng.hpp"

using namespace rislam;

namespace {

Rotation3 random_rotation(SplitMix64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  return Rotation3::from_quaternion(g(rng), g(rng), g(rng), g(rng));
}

Vec3 random_vec(SplitMix64& rng, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  return Vec3(g(rng), g(rng), g(rng));
}

}  // namespace

TEST_CASE("composition identities") {
  const Rotation3 I = Rotation3::identity();
  CHECK(((I * I).matrix() - Mat3::Identity()).norm() == doctest::Approx(0.0));

  SplitMix64 rng(7);
  for (int i = 0; i < 20; ++i) {
    const Rotation3 R = random_rotation(rng);
    CHECK(((R * R.inverse()).matrix() - Mat3::Identity()).norm() < 1e-9);
  }
}

TEST_CASE("composition matches the matrix product oracle") {
  const Rotation3 a = Rotation3::rot_z(M_PI / 2.0);
  const Rotation3 b = Rotation3::rot_z(M_PI / 2.0);
  const Mat3 expected = Rotation3::rot_z(M_PI).matrix();
  CHECK(((a * b).matrix() - expected).norm() < 1e-9);

  SplitMix64 rng(11);
  for (int i = 0; i < 50; ++i) {
    const Rotation3 x = random_rotation(rng);
    const Rotation3 y = random_rotation(rng);
    CHECK(((x * y).matrix() - Mat3(x.matrix() * y.matrix())).norm() < 1e-9);
  }
}

TEST_CASE("rotation of vectors") {
  CHECK((Rotation3::identity() * Vec3(1, 2, 3) - Vec3(1, 2, 3)).norm() < 1e-12);
  CHECK((Rotation3::rot_z(M_PI / 2.0) * Vec3(1, 0, 0) - Vec3(0, 1, 0)).norm() <
        1e-9);
  SplitMix64 rng(3);
  const Rotation3 R = random_rotation(rng);
  CHECK((R * Vec3::Zero()).norm() == 0.0);
}

TEST_CASE("norm preserved over 1000 random pairs") {
  SplitMix64 rng(42);
  for (int i = 0; i < 1000; ++i) {
    const Rotation3 R = random_rotation(rng);
    const Vec3 v = random_vec(rng, 10.0);
    CHECK(std::abs((R * v).norm() - v.norm()) < 1e-9);
  }
}

TEST_CASE("orthonormality after composition chains") {
  SplitMix64 rng(5);
  Rotation3 R;
  for (int i = 0; i < 2000; ++i) R = R * random_rotation(rng);
  const Mat3 m = R.matrix();
  CHECK((m * m.transpose() - Mat3::Identity()).norm() < 1e-9);
  CHECK(m.determinant() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("quaternion/matrix round trip") {
  SplitMix64 rng(9);
  for (int i = 0; i < 100; ++i) {
    const Rotation3 R = random_rotation(rng);
    const Rotation3 back = Rotation3::from_matrix(R.matrix());
    CHECK((back.matrix() - R.matrix()).norm() < 1e-9);
  }
}

TEST_CASE("exp/log round trip inside the principal ball") {
  SplitMix64 rng(13);
  for (int i = 0; i < 100; ++i) {
    Vec3 v = random_vec(rng, 1.0);
    if (v.norm() >= M_PI) v *= (M_PI - 1e-3) / v.norm();
    CHECK((Rotation3::exp(v).log() - v).norm() < 1e-9);
  }
  CHECK(Rotation3::exp(Vec3::Zero()).log().norm() < 1e-12);
}

TEST_CASE("gravity convention") {
  const GravityVector g = GravityVector::from_magnitude(9.81);
  CHECK(g.vec.z() == doctest::Approx(-9.81));
  CHECK(g.magnitude() == doctest::Approx(9.81).epsilon(1e-3));
}

TEST_CASE("reduced state stacking") {
  ReducedState s{Vec3(1, 2, 3), Vec3(4, 5, 6)};
  const Vec6 x = s.stacked();
  CHECK(x[0] == 1.0);
  CHECK(x[5] == 6.0);
  const ReducedState back = ReducedState::from_stacked(x);
  CHECK((back.position - s.position).norm() == 0.0);
  CHECK((back.velocity - s.velocity).norm() == 0.0);
}
