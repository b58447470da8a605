#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qsatlink/linkbudget.hpp"
#include "qsatlink/orbitpass.hpp"
#include "qsatlink/polarization.hpp"
#include "qsatlink/timing.hpp"

namespace qsatlink {

/// Which forward model drives the per-pulse detection mean.
enum class LinkModel {
  kDownlink,  // mu_sat times the downlink (quantum channel) transmissivity
  kRadar,     // full two-way radar product from mu_tx
};

struct StateInterval {
  double duration = 0.0;  // [s]
  PolarizationState state = PolarizationState::horizontal();
  std::string label;      // e.g. "H", "V", "L", "R"
};

/// Complete description of a one-way downlink session over a pass.
/// Session time runs from the start of the pass; ranging pulses fire at
/// every slot boundary and their echoes form the anchor epochs.
struct SessionConfig {
  SatelliteSpec satellite;
  PassGeometry pass;
  LinkBudgetParams link;  // slant_range/airmass fields overwritten per slot
  SlotSchedule schedule{};
  GateConfig gate{};
  std::vector<StateInterval> state_schedule;
  double background_rate_hz = 0.0;  // uniform rate while the rx shutter is open
  std::uint64_t rng_seed = 1;
  double pulse_rate_hz = 1e8;
  LinkModel model = LinkModel::kDownlink;
  double mu_sat = 1.0;  // source strength for the downlink model
  /// When positive, fixes the channel transmissivity instead of computing it
  /// from the link parameters and pass geometry.
  double transmissivity_override = 0.0;
  double fr_angle = 0.0;  // [rad] Faraday rotator setting at the satellite
  /// True: the receiver follows the state schedule, so channel 0 is always
  /// the port matching the prepared state. False: fixed analyzer pair below.
  bool analyzer_tracks_state = true;
  PolarizationState analyzer0 = PolarizationState::horizontal();
  PolarizationState analyzer1 = PolarizationState::vertical();
  /// Synthetic azimuth sweep over the pass for the Coude-path pose.
  double azimuth_start = 0.0;  // [rad]
  double azimuth_end = 3.0;    // [rad]
  double analysis_interval_s = 5.0;
  std::uint64_t subdivisions = 10000000;
  double tagger_resolution = 81e-12;      // [s]
  bool intensity_monitor_present = true;  // reported flag only

  void validate() const;
};

struct FeasibilityVerdict {
  double qber = 0.0;
  double mu_sat = 0.0;
  double qber_threshold = 0.11;
  double mu_threshold = 2.0;
  bool qber_ok = false;
  bool mu_ok = false;
  bool overall = false;
};

/// Secret-key feasibility flags: QBER strictly below 11% and mean photon
/// number per pulse at the satellite at most 2.
FeasibilityVerdict feasibility_verdict(double qber, double mu_sat);

struct SessionIntervalReport {
  IntervalRecord timing;
  double return_rate_hz = 0.0;   // background-subtracted, capture-corrected
  double mu_sat_estimate = 0.0;
  double mean_slant_range = 0.0; // [m] over the interval's slots
  double mean_airmass = 1.0;
  double transmissivity = 0.0;   // mean channel transmissivity used forward
};

struct SessionReport {
  std::vector<SessionIntervalReport> intervals;
  std::size_t qualified_count = 0;
  std::uint64_t n_corr_total = 0;   // pooled over qualified intervals
  std::uint64_t n_wrong_total = 0;
  double mean_qber = 0.5;           // pooled Bayesian estimate
  double mean_qber_bg_subtracted = 0.5;
  double mean_duty_cycle = 0.0;     // over all slots of the pass
  double mean_return_rate_hz = 0.0; // pooled over qualified intervals
  double mu_sat_mean = 0.0;         // mean over qualified intervals
  double pulse_rate_hz = 0.0;
  FeasibilityVerdict verdict;
  bool intensity_monitor_present = true;
  /// rho = 1 for metallic retroreflectors makes mu_sat an upper bound.
  bool mu_sat_is_upper_bound = true;
};

struct SimulationResult {
  SessionReport report;
  TimeTagStream tags;
  std::vector<double> slr_epochs;
};

/// Monte-Carlo simulation of a full pass: per-slot effective receive
/// windows, Poisson photon detection at the link-budget rate, Born-rule
/// channel routing through the full polarization chain, Doppler-stretched
/// arrival times with Gaussian detector jitter, uniform background during
/// open receive windows, then the standard gating analysis of the generated
/// stream. Bit-reproducible for a fixed rng_seed.
SimulationResult simulate_pass(const SessionConfig& cfg);

/// Per-qualified-interval mean photon number leaving the satellite, from
/// each interval's return rate and its mean geometry. Throws
/// InsufficientDataError when no interval qualified.
std::vector<double> estimate_pass_mu_sat(const SessionReport& report,
                                         const LinkBudgetParams& link);

/// Two-way key session configuration. The Faraday-rotator alphabet is
/// ordered as (basis0,bit0), (basis0,bit1), (basis1,bit0), ...; entries
/// 2b and 2b+1 must encode orthogonal received states.
struct TwoWaySessionConfig {
  std::vector<double> fr_alphabet = {0.0, constants::kPi / 4.0,
                                     3.0 * constants::kPi / 8.0,
                                     constants::kPi / 8.0};
  /// Per-slot poses, cycled; empty uses the session's synthetic pose sweep.
  std::vector<TelescopePose> pose_track;
  /// Probability that the attenuated single-photon return is detected in a
  /// slot (attenuator, channel and detector losses folded together).
  double detection_probability = 1.0;
  bool intensity_monitor_present = true;

  void validate() const;
};

struct TwoWayResult {
  std::vector<std::uint8_t> sifted_bits;     // receiver
  std::vector<std::uint8_t> satellite_bits;  // encoder, same sifted slots
  std::size_t n_slots = 0;
  std::size_t n_detected = 0;
  std::size_t n_sifted = 0;
  double qber = 0.5;
  bool intensity_monitor_present = true;
};

/// Two-way session: the ground injects |H>, the satellite encodes key bits
/// by choosing the Faraday angle, and the receiver measures the returned
/// state in a random basis. Slots with matching bases are kept. The sifted
/// key is independent of the telescope pose track.
TwoWayResult two_way_session(const TwoWaySessionConfig& cfg,
                             const SessionConfig& session);

}  // namespace qsatlink
