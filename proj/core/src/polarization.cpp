#include "qsatlink/polarization.hpp"

#include <cmath>

#include "qsatlink/constants.hpp"
#include "qsatlink/error.hpp"

namespace qsatlink {

namespace {
constexpr double kNormTol = 1e-12;
const double kInvSqrt2 = 1.0 / std::sqrt(2.0);
}  // namespace

void TelescopePose::validate() const {
  if (!(azimuth >= 0.0) || !(azimuth < 2.0 * constants::kPi)) {
    throw InvalidArgumentError("azimuth must be in [0, 2*pi)");
  }
  if (!(elevation >= 0.0) || !(elevation <= constants::kPi / 2.0)) {
    throw InvalidArgumentError("elevation must be in [0, pi/2]");
  }
}

PolarizationState::PolarizationState(Complex h, Complex v) : h_(h), v_(v) {
  double norm2 = std::norm(h) + std::norm(v);
  if (std::abs(norm2 - 1.0) > kNormTol) {
    throw InvalidArgumentError("polarization state must be normalized");
  }
}

PolarizationState PolarizationState::horizontal() { return {1.0, 0.0}; }
PolarizationState PolarizationState::vertical() { return {0.0, 1.0}; }
PolarizationState PolarizationState::diagonal() {
  return {kInvSqrt2, kInvSqrt2};
}
PolarizationState PolarizationState::antidiagonal() {
  return {kInvSqrt2, -kInvSqrt2};
}
PolarizationState PolarizationState::circular_left() {
  return {kInvSqrt2, Complex(0.0, kInvSqrt2)};
}
PolarizationState PolarizationState::circular_right() {
  return {kInvSqrt2, Complex(0.0, -kInvSqrt2)};
}

PolarizationState PolarizationState::orthogonal() const {
  return {-std::conj(v_), std::conj(h_)};
}

Complex inner_product(const PolarizationState& a, const PolarizationState& b) {
  return std::conj(a.amplitude_h()) * b.amplitude_h() +
         std::conj(a.amplitude_v()) * b.amplitude_v();
}

double fidelity(const PolarizationState& a, const PolarizationState& b) {
  return std::abs(inner_product(a, b));
}

PolarizationOperator PolarizationOperator::identity() {
  return {1.0, 0.0, 0.0, 1.0};
}

PolarizationState PolarizationOperator::apply(
    const PolarizationState& psi) const {
  Complex h = e_[0] * psi.amplitude_h() + e_[1] * psi.amplitude_v();
  Complex v = e_[2] * psi.amplitude_h() + e_[3] * psi.amplitude_v();
  return {h, v};
}

PolarizationOperator PolarizationOperator::adjoint() const {
  return {std::conj(e_[0]), std::conj(e_[2]), std::conj(e_[1]),
          std::conj(e_[3])};
}

Complex PolarizationOperator::determinant() const {
  return e_[0] * e_[3] - e_[1] * e_[2];
}

bool PolarizationOperator::is_unitary(double tol) const {
  PolarizationOperator p = adjoint() * (*this);
  return std::abs(p.at(0, 0) - 1.0) <= tol && std::abs(p.at(0, 1)) <= tol &&
         std::abs(p.at(1, 0)) <= tol && std::abs(p.at(1, 1) - 1.0) <= tol;
}

PolarizationOperator operator*(const PolarizationOperator& a,
                               const PolarizationOperator& b) {
  return {a.at(0, 0) * b.at(0, 0) + a.at(0, 1) * b.at(1, 0),
          a.at(0, 0) * b.at(0, 1) + a.at(0, 1) * b.at(1, 1),
          a.at(1, 0) * b.at(0, 0) + a.at(1, 1) * b.at(1, 0),
          a.at(1, 0) * b.at(0, 1) + a.at(1, 1) * b.at(1, 1)};
}

PolarizationOperator rotation(double theta) {
  if (!std::isfinite(theta)) {
    throw InvalidArgumentError("rotation angle must be finite");
  }
  double c = std::cos(theta);
  double s = std::sin(theta);
  return {c, s, -s, c};
}

PolarizationOperator mirror_flip() { return {1.0, 0.0, 0.0, -1.0}; }

PolarizationOperator coude_uplink(const TelescopePose& pose) {
  pose.validate();
  const double half_pi = constants::kPi / 2.0;
  return mirror_flip() * rotation(half_pi - pose.elevation) * mirror_flip() *
         rotation(pose.azimuth) * mirror_flip() * rotation(half_pi);
}

PolarizationOperator coude_downlink(const TelescopePose& pose) {
  pose.validate();
  const double half_pi = constants::kPi / 2.0;
  return rotation(half_pi) * mirror_flip() * rotation(pose.azimuth) *
         mirror_flip() * rotation(half_pi - pose.elevation) * mirror_flip();
}

PolarizationOperator ccr_transform(double fr_angle) {
  if (!std::isfinite(fr_angle)) {
    throw InvalidArgumentError("Faraday rotator angle must be finite");
  }
  return rotation(-fr_angle) * mirror_flip() * rotation(fr_angle);
}

PolarizationState round_trip(const TelescopePose& pose, double fr_angle,
                             const PolarizationState& psi) {
  PolarizationOperator chain =
      coude_downlink(pose) * ccr_transform(fr_angle) * coude_uplink(pose);
  return chain.apply(psi);
}

double detection_probability(const PolarizationState& psi,
                             const PolarizationState& analyzer_state) {
  double p = std::norm(inner_product(analyzer_state, psi));
  return p < 0.0 ? 0.0 : (p > 1.0 ? 1.0 : p);
}

}  // namespace qsatlink
