#pragma once

#include <array>
#include <complex>

namespace qsatlink {

using Complex = std::complex<double>;

/// Telescope pointing. Azimuth in [0, 2*pi), elevation in [0, pi/2], radians.
struct TelescopePose {
  double azimuth = 0.0;
  double elevation = 0.0;

  /// Throws InvalidArgumentError when either angle is outside its range.
  void validate() const;
};

/// Pure polarization state in the {|H>, |V>} basis. Normalized on
/// construction; equality of states is physical, i.e. up to a global phase.
class PolarizationState {
public:
  /// Throws InvalidArgumentError unless |h|^2 + |v|^2 == 1 within 1e-12.
  PolarizationState(Complex h, Complex v);

  Complex amplitude_h() const { return h_; }
  Complex amplitude_v() const { return v_; }

  static PolarizationState horizontal();
  static PolarizationState vertical();
  static PolarizationState diagonal();       // (|H> + |V>)/sqrt(2)
  static PolarizationState antidiagonal();   // (|H> - |V>)/sqrt(2)
  static PolarizationState circular_left();  // (|H> + i|V>)/sqrt(2)
  static PolarizationState circular_right(); // (|H> - i|V>)/sqrt(2)

  /// The state orthogonal to this one.
  PolarizationState orthogonal() const;

private:
  Complex h_, v_;
};

/// <a|b>.
Complex inner_product(const PolarizationState& a, const PolarizationState& b);

/// |<a|b>| in [0, 1]; 1 means equal up to global phase.
double fidelity(const PolarizationState& a, const PolarizationState& b);

/// 2x2 operator on polarization states. All operators produced by this
/// module are unitary.
class PolarizationOperator {
public:
  PolarizationOperator(Complex m00, Complex m01, Complex m10, Complex m11)
      : e_{m00, m01, m10, m11} {}

  static PolarizationOperator identity();

  Complex at(int row, int col) const { return e_[row * 2 + col]; }

  PolarizationState apply(const PolarizationState& psi) const;
  PolarizationOperator adjoint() const;
  Complex determinant() const;

  /// M†M == I entrywise within tol.
  bool is_unitary(double tol = 1e-12) const;

private:
  std::array<Complex, 4> e_;
};

/// Matrix product: (a*b) applies b first.
PolarizationOperator operator*(const PolarizationOperator& a,
                               const PolarizationOperator& b);

/// Reference-frame rotation [[cos t, sin t], [-sin t, cos t]].
/// Throws InvalidArgumentError for non-finite angles.
PolarizationOperator rotation(double theta);

/// Ideal mirror: pi phase shift between s and p, i.e. diag(1, -1).
PolarizationOperator mirror_flip();

/// Polarization transformation of the mirror train from the optical table to
/// the telescope exit, for the given pointing. Five alternating mirror and
/// frame-rotation factors; the rightmost factor acts first.
PolarizationOperator coude_uplink(const TelescopePose& pose);

/// Same mirror train traversed in the opposite direction.
PolarizationOperator coude_downlink(const TelescopePose& pose);

/// Retroreflector with a Faraday rotator at its entrance face, rotated by
/// fr_angle. fr_angle = 0 reduces to the bare metallic-coating flip.
PolarizationOperator ccr_transform(double fr_angle);

/// Full ground-to-satellite-to-ground chain: downlink * CCR * uplink applied
/// to psi. Equal (up to global phase) to rotation(2*fr_angle) * mirror_flip()
/// applied to psi, for every pose.
PolarizationState round_trip(const TelescopePose& pose, double fr_angle,
                             const PolarizationState& psi);

/// Born probability |<analyzer|psi>|^2 of a click in the analyzer port.
double detection_probability(const PolarizationState& psi,
                             const PolarizationState& analyzer_state);

}  // namespace qsatlink
