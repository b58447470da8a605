#include "qsatlink/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "qsatlink/error.hpp"
#include "qsatlink/random.hpp"

namespace qsatlink {

namespace {

using constants::kElevationFloor;
using constants::kPi;

constexpr std::uint64_t kSignalStream = 0x51;
constexpr std::uint64_t kBackgroundStream = 0xB6;
constexpr std::uint64_t kTwoWaySatelliteStream = 0x2A;
constexpr std::uint64_t kTwoWayGroundStream = 0x6D;

/// Born probabilities within 1e-12 of a certain outcome are snapped so the
/// exact pose-independence of the compensated chain survives rounding.
double snap_probability(double p) {
  if (p < 1e-12) return 0.0;
  if (p > 1.0 - 1e-12) return 1.0;
  return p;
}

void require(bool ok, const char* what) {
  if (!ok) throw InvalidArgumentError(what);
}

double wrap_azimuth(double az) {
  double w = std::fmod(az, 2.0 * kPi);
  return w < 0.0 ? w + 2.0 * kPi : w;
}

struct GeometrySums {
  double range = 0.0;
  double airmass = 0.0;
  double transmissivity = 0.0;
  std::size_t count = 0;
};

}  // namespace

void SessionConfig::validate() const {
  satellite.validate();
  schedule.validate();
  gate.validate();
  double total = 0.0;
  for (const auto& si : state_schedule) {
    require(si.duration > 0.0, "state interval durations must be positive");
    total += si.duration;
  }
  require(total <= pass.duration() + 1e-9,
          "state schedule longer than the pass");
  require(background_rate_hz >= 0.0, "background rate must be >= 0");
  require(pulse_rate_hz > 0.0, "pulse rate must be positive");
  require(std::isfinite(fr_angle), "fr_angle must be finite");
  require(transmissivity_override >= 0.0 && transmissivity_override <= 1.0,
          "transmissivity override must be in [0, 1]");
  if (model == LinkModel::kDownlink) {
    require(mu_sat > 0.0, "mu_sat must be positive for the downlink model");
  }
  require(analysis_interval_s > 0.0, "analysis interval must be positive");
  require(subdivisions >= 1, "subdivisions must be >= 1");
  require(std::isfinite(azimuth_start) && std::isfinite(azimuth_end),
          "azimuth sweep must be finite");
  if (!analyzer_tracks_state) {
    require(fidelity(analyzer0, analyzer1) < 1e-9,
            "fixed analyzer ports must be orthogonal");
  }
  if (model == LinkModel::kRadar || transmissivity_override == 0.0) {
    LinkBudgetParams probe = link;
    probe.slant_range = 1.0;
    probe.airmass = 1.0;
    probe.cross_section = satellite.cross_section;
    probe.ccr_reflectivity = satellite.ccr_reflectivity;
    probe.ccr_effective_area = satellite.ccr_effective_area;
    probe.validate();
  }
}

FeasibilityVerdict feasibility_verdict(double qber, double mu_sat) {
  require(qber >= 0.0 && qber <= 1.0 && std::isfinite(qber),
          "qber must be in [0, 1]");
  require(mu_sat >= 0.0 && std::isfinite(mu_sat), "mu_sat must be >= 0");
  FeasibilityVerdict v;
  v.qber = qber;
  v.mu_sat = mu_sat;
  v.qber_ok = qber < v.qber_threshold;
  v.mu_ok = mu_sat <= v.mu_threshold;
  v.overall = v.qber_ok && v.mu_ok;
  return v;
}

SimulationResult simulate_pass(const SessionConfig& cfg) {
  cfg.validate();
  const double slot = cfg.schedule.slot_period;
  const double pass_start = cfg.pass.start_time();
  auto n_slots = static_cast<std::size_t>(
      std::floor(cfg.pass.duration() / slot + 1e-9));
  require(n_slots >= 1, "pass must cover at least one slot");

  // Ranging echoes anchor the receiver clock: epoch i is the arrival of the
  // pulse emitted at the start of slot i.
  std::vector<double> epochs;
  epochs.reserve(n_slots + 1);
  for (std::size_t i = 0; i <= n_slots; ++i) {
    double tau = static_cast<double>(i) * slot;
    epochs.push_back(tau +
                     round_trip_time(cfg.pass.range_at(pass_start + tau)));
  }

  // Cumulative state schedule boundaries.
  std::vector<double> state_ends;
  double acc = 0.0;
  for (const auto& si : cfg.state_schedule) {
    acc += si.duration;
    state_ends.push_back(acc);
  }

  auto prepared_at = [&](double tau) -> const StateInterval* {
    for (std::size_t j = 0; j < state_ends.size(); ++j) {
      if (tau < state_ends[j]) return &cfg.state_schedule[j];
    }
    return nullptr;
  };

  const double pulse_period = 1.0 / cfg.pulse_rate_hz;
  const double jitter_sigma = cfg.gate.sigma;
  const double bg_lo_off = cfg.schedule.rx_start + cfg.schedule.shutter_open_delay;
  const double bg_hi_off = cfg.schedule.rx_end - cfg.schedule.shutter_close_delay;

  std::vector<TimeTag> events;
  std::map<std::size_t, GeometrySums> geometry;
  double duty_sum = 0.0;

  for (std::size_t i = 0; i < n_slots; ++i) {
    double tau0 = static_cast<double>(i) * slot;
    double rtt = epochs[i] - tau0;
    if (!(rtt > 0.0) || !(rtt < slot)) {
      throw OutOfModelError(
          "round-trip time outside the slot period; the time-division "
          "schedule does not apply");
    }
    RxWindow win = effective_rx_window(rtt, cfg.schedule);
    duty_sum += win.duty_cycle;

    double e0 = std::max(cfg.schedule.tx_start,
                         cfg.schedule.rx_start +
                             cfg.schedule.shutter_open_delay - rtt);
    double tau_mid = tau0 + e0 + win.duration / 2.0;
    const StateInterval* prepared = prepared_at(tau_mid);
    double elevation = cfg.pass.elevation_at(pass_start + tau_mid);

    bool active = win.duration > 0.0 && prepared != nullptr &&
                  elevation > kElevationFloor;
    if (active) {
      LinkBudgetParams p = cfg.link;
      p.cross_section = cfg.satellite.cross_section;
      p.ccr_reflectivity = cfg.satellite.ccr_reflectivity;
      p.ccr_effective_area = cfg.satellite.ccr_effective_area;
      p.slant_range = cfg.pass.range_at(pass_start + tau_mid);
      p.airmass = airmass_from_elevation(elevation);
      double transmissivity = cfg.transmissivity_override > 0.0
                                  ? cfg.transmissivity_override
                                  : downlink_transmissivity(p);
      double mu_rx = cfg.model == LinkModel::kDownlink
                         ? cfg.mu_sat * transmissivity
                         : radar_mu_rx(p);

      auto& sums = geometry[static_cast<std::size_t>(
          std::floor(tau0 / cfg.analysis_interval_s))];
      sums.range += p.slant_range;
      sums.airmass += p.airmass;
      sums.transmissivity += transmissivity;
      sums.count += 1;

      TelescopePose pose{
          wrap_azimuth(cfg.azimuth_start +
                       (cfg.azimuth_end - cfg.azimuth_start) *
                           (tau_mid / cfg.pass.duration())),
          elevation};
      PolarizationState received =
          round_trip(pose, cfg.fr_angle, prepared->state);
      // The tracking receiver expects the round-trip image of the prepared
      // state (the channel's net rotation-by-2phi and mirror flip are known),
      // so its "correct" port is that image, not the prepared state itself.
      PolarizationState port0 =
          cfg.analyzer_tracks_state
              ? (rotation(2.0 * cfg.fr_angle) * mirror_flip())
                    .apply(prepared->state)
              : cfg.analyzer0;
      double p0 = cfg.satellite.polarization_preserving
                      ? snap_probability(detection_probability(received, port0))
                      : 0.5;

      Rng rng(derive_stream(cfg.rng_seed, kSignalStream, i));
      double p_detect = -std::expm1(-mu_rx);
      // The laser comb fires at exact multiples of the pulse period within
      // the slot; the shutter window only selects which pulses make it out.
      auto comb_first = static_cast<std::uint64_t>(
          std::ceil(e0 / pulse_period - 1e-9));
      auto n_pulses = static_cast<std::uint64_t>(std::max(
          0.0, std::floor((e0 + win.duration) / pulse_period + 1e-9) -
                   static_cast<double>(comb_first)));
      std::uint64_t idx = rng.geometric_failures(p_detect);
      while (idx < n_pulses) {
        std::uint64_t photons = rng.poisson_positive(mu_rx);
        std::uint64_t to_port0 = 0;
        for (std::uint64_t m = 0; m < photons; ++m) {
          if (rng.bernoulli(p0)) ++to_port0;
        }
        double tau_e =
            tau0 + static_cast<double>(comb_first + idx) * pulse_period;
        double arrival =
            tau_e + round_trip_time(cfg.pass.range_at(pass_start + tau_e));
        if (to_port0 > 0) {
          events.push_back({arrival + rng.gaussian(jitter_sigma), 0});
        }
        if (photons - to_port0 > 0) {
          events.push_back({arrival + rng.gaussian(jitter_sigma), 1});
        }
        std::uint64_t skip = rng.geometric_failures(p_detect);
        if (skip >= n_pulses) break;
        idx += 1 + skip;
      }
    }

    if (cfg.background_rate_hz > 0.0 && bg_hi_off > bg_lo_off) {
      Rng rng(derive_stream(cfg.rng_seed, kBackgroundStream, i));
      double span = bg_hi_off - bg_lo_off;
      std::uint64_t n_bg = rng.poisson(cfg.background_rate_hz * span);
      for (std::uint64_t k = 0; k < n_bg; ++k) {
        double t = tau0 + bg_lo_off + rng.uniform() * span;
        events.push_back({t, rng.bernoulli(0.5) ? 1 : 0});
      }
    }
  }

  std::sort(events.begin(), events.end(),
            [](const TimeTag& a, const TimeTag& b) {
              return a.time != b.time ? a.time < b.time
                                      : a.channel < b.channel;
            });
  TimeTagStream tags =
      TimeTagStream::quantized(std::move(events), cfg.tagger_resolution);

  StreamAnalysis analysis =
      analyze_stream(tags, epochs, cfg.gate, cfg.analysis_interval_s,
                     cfg.subdivisions, cfg.schedule, 0);

  SessionReport report;
  report.pulse_rate_hz = cfg.pulse_rate_hz;
  report.intensity_monitor_present = cfg.intensity_monitor_present;
  report.mu_sat_is_upper_bound = cfg.satellite.ccr_reflectivity >= 1.0;
  report.mean_duty_cycle =
      duty_sum / static_cast<double>(n_slots);

  double capture = gate_capture_fraction(cfg.gate);
  GatedCounts pooled;
  double pooled_window = 0.0;
  double pooled_signal = 0.0;
  double mu_sum = 0.0;

  for (std::size_t k = 0; k < analysis.intervals.size(); ++k) {
    const IntervalRecord& rec = analysis.intervals[k];
    SessionIntervalReport r;
    r.timing = rec;
    auto it = geometry.find(k);
    if (it != geometry.end() && it->second.count > 0) {
      double n = static_cast<double>(it->second.count);
      r.mean_slant_range = it->second.range / n;
      r.mean_airmass = it->second.airmass / n;
      r.transmissivity = it->second.transmissivity / n;
    }
    double gated = static_cast<double>(rec.n_corr + rec.n_wrong);
    double bg_in_gates =
        rec.counts.exterior_span > 0.0
            ? static_cast<double>(rec.counts.n_background_exterior) *
                  (rec.counts.gate_span / rec.counts.exterior_span)
            : 0.0;
    double net_signal = std::max(0.0, gated - bg_in_gates);
    r.return_rate_hz = rec.effective_window_s > 0.0
                           ? net_signal / (rec.effective_window_s * capture)
                           : 0.0;
    r.mu_sat_estimate =
        r.transmissivity > 0.0
            ? r.return_rate_hz / cfg.pulse_rate_hz / r.transmissivity
            : 0.0;

    if (rec.qualified) {
      report.qualified_count += 1;
      report.n_corr_total += rec.n_corr;
      report.n_wrong_total += rec.n_wrong;
      pooled.n_signal_correct += rec.counts.n_signal_correct;
      pooled.n_signal_wrong += rec.counts.n_signal_wrong;
      pooled.n_background_exterior += rec.counts.n_background_exterior;
      pooled.gate_span += rec.counts.gate_span;
      pooled.exterior_span += rec.counts.exterior_span;
      pooled_window += rec.effective_window_s;
      pooled_signal += net_signal;
      mu_sum += r.mu_sat_estimate;
    }
    report.intervals.push_back(r);
  }

  if (report.qualified_count > 0) {
    report.mean_qber =
        qber_bayesian(static_cast<double>(report.n_corr_total),
                      static_cast<double>(report.n_wrong_total));
    report.mean_qber_bg_subtracted =
        pooled.exterior_span > 0.0 ? qber_background_subtracted(pooled)
                                   : report.mean_qber;
    report.mean_return_rate_hz =
        pooled_window > 0.0 ? pooled_signal / (pooled_window * capture) : 0.0;
    report.mu_sat_mean =
        mu_sum / static_cast<double>(report.qualified_count);
  }
  report.verdict =
      feasibility_verdict(report.mean_qber, report.mu_sat_mean);

  return {std::move(report), std::move(tags), std::move(epochs)};
}

std::vector<double> estimate_pass_mu_sat(const SessionReport& report,
                                         const LinkBudgetParams& link) {
  std::vector<double> estimates;
  for (const auto& r : report.intervals) {
    if (!r.timing.qualified) continue;
    if (r.timing.n_corr + r.timing.n_wrong == 0) {
      estimates.push_back(0.0);
      continue;
    }
    LinkBudgetParams p = link;
    p.slant_range = r.mean_slant_range;
    p.airmass = r.mean_airmass;
    estimates.push_back(
        estimate_mu_sat(r.return_rate_hz, report.pulse_rate_hz, p));
  }
  if (estimates.empty()) {
    throw InsufficientDataError(
        "no qualified intervals to estimate mu_sat from");
  }
  return estimates;
}

void TwoWaySessionConfig::validate() const {
  require(!fr_alphabet.empty(), "Faraday angle alphabet must not be empty");
  require(fr_alphabet.size() % 2 == 0,
          "Faraday angle alphabet must pair bit values per basis");
  for (double a : fr_alphabet) {
    require(std::isfinite(a), "Faraday angles must be finite");
  }
  for (std::size_t i = 0; i < fr_alphabet.size(); ++i) {
    for (std::size_t j = i + 1; j < fr_alphabet.size(); ++j) {
      double d = std::remainder(fr_alphabet[i] - fr_alphabet[j], kPi);
      require(std::abs(d) > 1e-9,
              "Faraday angles must be distinct modulo pi");
    }
  }
  require(detection_probability >= 0.0 && detection_probability <= 1.0,
          "detection probability must be in [0, 1]");
  for (const auto& pose : pose_track) pose.validate();
}

TwoWayResult two_way_session(const TwoWaySessionConfig& cfg,
                             const SessionConfig& session) {
  cfg.validate();
  session.schedule.validate();

  const double slot = session.schedule.slot_period;
  auto n_slots = static_cast<std::size_t>(
      std::floor(session.pass.duration() / slot + 1e-9));
  require(n_slots >= 1, "pass must cover at least one slot");

  // Received state per alphabet entry; entries 2b and 2b+1 must land on
  // orthogonal states, which makes them a measurement basis.
  const PolarizationState injected = PolarizationState::horizontal();
  std::vector<PolarizationState> received_for;
  received_for.reserve(cfg.fr_alphabet.size());
  for (double phi : cfg.fr_alphabet) {
    received_for.push_back(
        (rotation(2.0 * phi) * mirror_flip()).apply(injected));
  }
  std::size_t n_bases = cfg.fr_alphabet.size() / 2;
  for (std::size_t b = 0; b < n_bases; ++b) {
    require(fidelity(received_for[2 * b], received_for[2 * b + 1]) < 1e-9,
            "alphabet entries 2b and 2b+1 must encode orthogonal states");
  }

  const double pass_start = session.pass.start_time();
  TwoWayResult result;
  result.n_slots = n_slots;
  result.intensity_monitor_present = cfg.intensity_monitor_present;

  std::size_t n_wrong = 0;
  for (std::size_t i = 0; i < n_slots; ++i) {
    Rng sat(derive_stream(session.rng_seed, kTwoWaySatelliteStream, i));
    Rng ground(derive_stream(session.rng_seed, kTwoWayGroundStream, i));

    auto basis_s = std::min(
        n_bases - 1, static_cast<std::size_t>(sat.uniform() *
                                              static_cast<double>(n_bases)));
    int bit_s = sat.bernoulli(0.5) ? 1 : 0;
    double phi = cfg.fr_alphabet[2 * basis_s + static_cast<std::size_t>(bit_s)];

    TelescopePose pose;
    if (cfg.pose_track.empty()) {
      double tau_mid = (static_cast<double>(i) + 0.5) * slot;
      pose = TelescopePose{
          wrap_azimuth(session.azimuth_start +
                       (session.azimuth_end - session.azimuth_start) *
                           (tau_mid / session.pass.duration())),
          session.pass.elevation_at(pass_start + tau_mid)};
    } else {
      pose = cfg.pose_track[i % cfg.pose_track.size()];
    }

    PolarizationState arrived = round_trip(pose, phi, injected);

    auto basis_g = std::min(
        n_bases - 1, static_cast<std::size_t>(
                         ground.uniform() * static_cast<double>(n_bases)));
    bool detected = ground.uniform() < cfg.detection_probability;
    double p0 =
        snap_probability(detection_probability(arrived, received_for[2 * basis_g]));
    int bit_g = ground.uniform() < p0 ? 0 : 1;

    if (!detected) continue;
    ++result.n_detected;
    if (basis_g != basis_s) continue;
    result.sifted_bits.push_back(static_cast<std::uint8_t>(bit_g));
    result.satellite_bits.push_back(static_cast<std::uint8_t>(bit_s));
    if (bit_g != bit_s) ++n_wrong;
  }
  result.n_sifted = result.sifted_bits.size();
  result.qber = qber_bayesian(
      static_cast<double>(result.n_sifted - n_wrong),
      static_cast<double>(n_wrong));
  return result;
}

}  // namespace qsatlink
