#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace qsatlink {

/// Transmit/receive time-division schedule within one ranging slot.
/// Defaults follow the half/half split of a 100 ms slot with mechanical
/// shutters that need 2 ms to open and 2.5 ms to close; both delays are
/// charged against the receive window.
struct SlotSchedule {
  double slot_period = 0.1;          // [s]
  double tx_start = 0.0;             // [s] within the slot
  double tx_end = 0.05;
  double rx_start = 0.05;
  double rx_end = 0.1;
  double shutter_open_delay = 0.002;   // [s]
  double shutter_close_delay = 0.0025; // [s]

  double tx_length() const { return tx_end - tx_start; }
  double rx_length() const { return rx_end - rx_start; }

  void validate() const;
};

struct RxWindow {
  double duration = 0.0;    // [s] usable detection time per slot
  double duty_cycle = 0.0;  // duration / slot_period
};

/// Usable detection window for a slot given the round-trip time. The window
/// cannot exceed the round-trip time or the transmit half, loses the shutter
/// open+close overhead, and is capped by the receive half.
/// Throws OutOfModelError unless 0 < rtt < slot_period.
RxWindow effective_rx_window(double rtt, const SlotSchedule& schedule);

struct TimeTag {
  double time = 0.0;  // [s]
  int channel = 0;    // 0 or 1
};

/// Detector event stream, non-decreasing in time, quantized to the tagger
/// resolution grid.
struct TimeTagStream {
  std::vector<TimeTag> events;
  double resolution = 81e-12;  // [s]

  /// Quantizes, validates channels, and checks ordering.
  static TimeTagStream quantized(std::vector<TimeTag> events,
                                 double resolution = 81e-12);

  static double quantize(double t, double resolution);
};

/// Signal/background gate geometry around the expected arrival times.
/// sigma is the detection accuracy (detector time jitter); the signal gate
/// spans +-signal_halfwidth*sigma, background is estimated beyond
/// background_exclusion*sigma, and events between the two are discarded.
struct GateConfig {
  double sigma = 0.5e-9;             // [s]
  double signal_halfwidth = 1.0;     // multiples of sigma
  double background_exclusion = 3.0; // multiples of sigma

  void validate() const;
};

/// Fraction of Gaussian-jittered signal expected inside the signal gate,
/// erf(halfwidth / sqrt(2)).
double gate_capture_fraction(const GateConfig& cfg);

/// Per-gate tallies. Channel 0 is the "correct" detector by stream
/// convention; callers orient channels before gating.
struct GatedCounts {
  std::uint64_t n_signal_correct = 0;      // channel 0 inside the gate
  std::uint64_t n_signal_wrong = 0;        // channel 1 inside the gate
  std::uint64_t n_background_exterior = 0; // both channels beyond exclusion
  std::uint64_t n_guard_discarded = 0;     // both channels, between the two
  std::uint64_t n_background_by_channel[2] = {0, 0};
  std::uint64_t n_guard_by_channel[2] = {0, 0};
  double exterior_span = 0.0;  // [s] total time beyond the exclusion zones
  double gate_span = 0.0;      // [s] total time inside the signal gates
};

/// Expected qubit arrival times: every interval between consecutive anchor
/// epochs divided into `subdivisions` equal parts. The grid stretches and
/// compresses with the epochs, following the range-rate of the satellite.
/// Emits subdivisions points per epoch pair (right endpoints excluded).
std::vector<double> expected_arrivals(std::span<const double> epochs,
                                      std::uint64_t subdivisions);

/// Implicit form of the expected-arrival grid. Nearest-point queries are
/// computed arithmetically per epoch pair, so the full 1e7-point-per-pair
/// grid is never materialized.
class ArrivalGrid {
public:
  ArrivalGrid(std::vector<double> epochs, std::uint64_t subdivisions);

  /// Signed distance t - (nearest grid point). Ties at cell midpoints
  /// resolve to the earlier point.
  double nearest_offset(double t) const;

  const std::vector<double>& epochs() const { return epochs_; }
  std::uint64_t subdivisions() const { return subdivisions_; }
  double first() const { return epochs_.front(); }
  double last() const { return epochs_.back(); }

  struct Coverage {
    std::uint64_t points = 0;
    double span = 0.0;  // [s]
  };
  /// Grid points and covered time within [t_lo, t_hi).
  Coverage coverage(double t_lo, double t_hi) const;

private:
  std::vector<double> epochs_;
  std::uint64_t subdivisions_;
};

/// Classifies every event by its distance to the nearest expected arrival:
/// signal within the gate, background beyond the exclusion zone, discarded
/// in between. Conserves events per channel across the three tallies.
GatedCounts gate_events(const TimeTagStream& stream, const ArrivalGrid& grid,
                        const GateConfig& cfg);

/// Same classification against an explicit grid of arrival times.
GatedCounts gate_events(const TimeTagStream& stream,
                        std::span<const double> grid, const GateConfig& cfg);

/// Bayesian QBER estimate (n_wrong + 1) / (n_corr + n_wrong + 2).
/// Accepts real-valued counts so background-subtracted residuals can reuse
/// it. Always in (0, 1).
double qber_bayesian(double n_corr, double n_wrong);

/// QBER after subtracting the expected in-gate background, which is split
/// evenly between the channels, from each channel's signal count (floored
/// at zero). Throws InsufficientDataError when exterior_span is zero.
double qber_background_subtracted(const GatedCounts& counts);

/// One row of the per-interval analysis.
struct IntervalRecord {
  double t_start = 0.0;
  std::uint64_t n_corr = 0;
  std::uint64_t n_wrong = 0;
  double background_rate_hz = 0.0;  // exterior counts / exterior span
  double duty_cycle = 0.0;          // mean over the slots of the interval
  double qber_raw = 0.5;
  double qber_bg_subtracted = 0.5;
  bool qualified = false;
  double effective_window_s = 0.0;  // summed usable detection time
  GatedCounts counts;
};

struct StreamAnalysis {
  std::vector<IntervalRecord> intervals;
  double interval_length = 5.0;
};

/// Full gating pipeline: partitions the epoch span into consecutive
/// intervals, gates each interval's events, estimates per-interval
/// background, computes QBERs and applies the qualification test (signal on
/// at least one channel more than five Poisson standard deviations above the
/// expected in-gate background). Duty cycles are derived from the epochs by
/// interpreting epoch i as the echo of the slot-i ranging pulse, i.e.
/// rtt_i = epochs[i] - i * slot_period with t = 0 at the first emission.
StreamAnalysis analyze_stream(const TimeTagStream& stream,
                              const std::vector<double>& epochs,
                              const GateConfig& cfg,
                              double interval_length = 5.0,
                              std::uint64_t subdivisions = 10000000,
                              const SlotSchedule& schedule = SlotSchedule{},
                              int correct_channel = 0);

/// The intervals of analyze_stream that pass the qualification test.
std::vector<IntervalRecord> select_intervals(
    const TimeTagStream& stream, const std::vector<double>& epochs,
    const GateConfig& cfg, double interval_length = 5.0,
    std::uint64_t subdivisions = 10000000,
    const SlotSchedule& schedule = SlotSchedule{}, int correct_channel = 0);

/// Histogram of event offsets from the nearest expected arrival, one count
/// vector per channel; bin i covers [-half_range + i*bin_width, ...).
struct OffsetHistogram {
  double bin_width = 0.0;
  double half_range = 0.0;
  std::vector<std::uint64_t> channel0;
  std::vector<std::uint64_t> channel1;
};

OffsetHistogram offset_histogram(const TimeTagStream& stream,
                                 const ArrivalGrid& grid, double bin_width,
                                 double half_range);

/// Time-tag CSV: header time_s,channel. Times are written exactly and
/// re-quantized on load (idempotent for files this library wrote).
TimeTagStream load_time_tags(const std::string& path,
                             double resolution = 81e-12);
std::string time_tags_to_csv(const TimeTagStream& stream);

/// Anchor-epoch text file: one arrival time per line, seconds.
std::vector<double> load_epochs(const std::string& path);
std::string epochs_to_text(std::span<const double> epochs);

}  // namespace qsatlink
