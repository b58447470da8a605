#include "qsatlink/polarization.hpp"

#include <cmath>

#include "doctest.h"
#include "qsatlink/constants.hpp"
#include "qsatlink/error.hpp"
#include "test_support.hpp"

using namespace qsatlink;
using namespace testsupport;
using constants::kPi;

namespace {
const PolarizationState kH = PolarizationState::horizontal();
const PolarizationState kV = PolarizationState::vertical();
const PolarizationState kL = PolarizationState::circular_left();
const PolarizationState kR = PolarizationState::circular_right();
}  // namespace

TEST_CASE("rotation basics") {
  CHECK(max_entry_diff(from_operator(rotation(0.0)), oracle_identity()) ==
        0.0);

  auto quarter = from_operator(rotation(kPi / 2.0));
  CHECK(std::abs(quarter.m00) < 1e-15);
  CHECK(quarter.m01.real() == doctest::Approx(1.0));
  CHECK(quarter.m10.real() == doctest::Approx(-1.0));
  CHECK(std::abs(quarter.m11) < 1e-15);

  // rotation(theta) * rotation(-theta) == I, product evaluated by the
  // independent matrix oracle.
  auto prod = mul(from_operator(rotation(0.37)), from_operator(rotation(-0.37)));
  CHECK(max_entry_diff(prod, oracle_identity()) < 1e-15);

  CHECK_THROWS_AS(rotation(std::nan("")), InvalidArgumentError);
  CHECK_THROWS_AS(rotation(INFINITY), InvalidArgumentError);
}

TEST_CASE("mirror flip on basis states") {
  auto m = mirror_flip();
  CHECK(fidelity(m.apply(kH), kH) == doctest::Approx(1.0));
  CHECK(fidelity(m.apply(kV), kV) == doctest::Approx(1.0));  // up to phase
  // diag(1,-1) applied to (1, i)/sqrt(2) gives (1, -i)/sqrt(2).
  CHECK(fidelity(m.apply(kL), kR) == doctest::Approx(1.0));
  CHECK(fidelity(m.apply(kL), kL) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("coude uplink") {
  TelescopePose pose{1.1, 0.6};
  auto u = coude_uplink(pose);
  CHECK(u.is_unitary(1e-12));

  // Zero-angle factors collapse: az=0, el=pi/2 leaves mirror * rotation(pi/2),
  // which is the exchange matrix [[0,1],[1,0]].
  auto collapsed = from_operator(coude_uplink({0.0, kPi / 2.0}));
  auto expected = mul(oracle_mirror(), oracle_rotation(kPi / 2.0));
  CHECK(max_entry_diff(collapsed, expected) < 1e-15);
  CHECK(std::abs(collapsed.m01 - 1.0) < 1e-15);
  CHECK(std::abs(collapsed.m10 - 1.0) < 1e-15);

  Gen gen(101);
  for (int i = 0; i < 100; ++i) {
    auto det = determinant(from_operator(coude_uplink(gen.pose())));
    CHECK(std::abs(std::abs(det) - 1.0) < 1e-12);
  }

  CHECK_THROWS_AS(coude_uplink({-0.1, 0.3}), InvalidArgumentError);
  CHECK_THROWS_AS(coude_uplink({0.1, 2.0}), InvalidArgumentError);
}

TEST_CASE("coude downlink compensates the uplink") {
  TelescopePose pose{2.3, 0.4};
  auto chain = coude_downlink(pose) * mirror_flip() * coude_uplink(pose);
  CHECK(max_entry_diff(from_operator(chain), oracle_mirror()) < 1e-12);

  Gen gen(17);
  CHECK(coude_downlink(gen.pose()).is_unitary(1e-12));

  auto collapsed = from_operator(coude_downlink({0.0, kPi / 2.0}));
  auto expected = mul(oracle_rotation(kPi / 2.0), oracle_mirror());
  CHECK(max_entry_diff(collapsed, expected) < 1e-15);
}

TEST_CASE("ccr transform") {
  auto bare = from_operator(ccr_transform(0.0));
  CHECK(max_entry_diff(bare, oracle_mirror()) == 0.0);

  auto u = ccr_transform(0.7);
  CHECK(u.is_unitary(1e-12));
  // A rotated reflection is Hermitian.
  CHECK(max_entry_diff(from_operator(u), from_operator(u.adjoint())) < 1e-15);

  // phi = pi/2: explicit product gives diag(-1, 1).
  auto half = from_operator(ccr_transform(kPi / 2.0));
  auto expected = mul(mul(oracle_rotation(-kPi / 2.0), oracle_mirror()),
                      oracle_rotation(kPi / 2.0));
  CHECK(max_entry_diff(half, expected) < 1e-15);
  CHECK(half.m00.real() == doctest::Approx(-1.0));
  CHECK(half.m11.real() == doctest::Approx(1.0));
}

TEST_CASE("round trip on named states") {
  TelescopePose pose{0.8, 0.9};
  CHECK(fidelity(round_trip(pose, 0.0, kH), kH) == doctest::Approx(1.0));
  CHECK(fidelity(round_trip(pose, 0.0, kV), kV) == doctest::Approx(1.0));
  // phi = pi/4 rotates the received state by pi/2: H lands on V up to phase.
  CHECK(fidelity(round_trip(pose, kPi / 4.0, kH), kV) ==
        doctest::Approx(1.0));
}

TEST_CASE("detection probabilities") {
  CHECK(detection_probability(kH, kH) == doctest::Approx(1.0));
  CHECK(detection_probability(kH, kV) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(detection_probability(kL, kH) == doctest::Approx(0.5));
  // Unnormalized amplitudes are rejected at the type boundary.
  CHECK_THROWS_AS(PolarizationState(0.6, 0.9), InvalidArgumentError);
}

TEST_CASE("operators from every operation are unitary") {
  Gen gen(23);
  for (int i = 0; i < 50; ++i) {
    auto pose = gen.pose();
    double theta = gen.uniform(-10.0, 10.0);
    CHECK(rotation(theta).is_unitary(1e-12));
    CHECK(mirror_flip().is_unitary(1e-12));
    CHECK(coude_uplink(pose).is_unitary(1e-12));
    CHECK(coude_downlink(pose).is_unitary(1e-12));
    CHECK(ccr_transform(theta).is_unitary(1e-12));
  }
}

TEST_CASE("mirror-rotation commutation identity") {
  Gen gen(31);
  for (int i = 0; i < 1000; ++i) {
    double theta = gen.uniform(-8.0, 8.0);
    auto lhs = from_operator(mirror_flip() * rotation(theta));
    auto rhs = from_operator(rotation(-theta) * mirror_flip());
    CHECK(max_entry_diff(lhs, rhs) < 1e-12);
  }
}

TEST_CASE("compensation theorem over random poses and states") {
  Gen gen(47);
  auto flip = mirror_flip();
  for (int i = 0; i < 1000; ++i) {
    auto pose = gen.pose();
    auto psi = gen.state();
    auto received = round_trip(pose, 0.0, psi);
    CHECK(fidelity(flip.apply(psi), received) > 1.0 - 1e-10);
  }
}

TEST_CASE("faraday rotator theorem over random poses, angles and states") {
  Gen gen(53);
  for (int i = 0; i < 1000; ++i) {
    auto pose = gen.pose();
    auto psi = gen.state();
    double phi = gen.uniform(-4.0, 4.0);
    auto received = round_trip(pose, phi, psi);
    auto predicted = (rotation(2.0 * phi) * mirror_flip()).apply(psi);
    CHECK(fidelity(predicted, received) > 1.0 - 1e-10);
  }
}

TEST_CASE("analyzer port probabilities are complementary") {
  Gen gen(59);
  for (int i = 0; i < 200; ++i) {
    auto psi = gen.state();
    auto a = gen.state();
    auto a_perp = a.orthogonal();
    CHECK(detection_probability(psi, a) + detection_probability(psi, a_perp) ==
          doctest::Approx(1.0).epsilon(1e-12));
  }
}
