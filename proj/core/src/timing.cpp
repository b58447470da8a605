#include "qsatlink/timing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qsatlink/error.hpp"
#include "qsatlink/textio.hpp"

namespace qsatlink {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw InvalidArgumentError(what);
}

void check_epochs(std::span<const double> epochs) {
  require(epochs.size() >= 2, "need at least 2 anchor epochs");
  for (std::size_t i = 1; i < epochs.size(); ++i) {
    require(epochs[i] > epochs[i - 1], "epochs must be strictly increasing");
  }
}

}  // namespace

void SlotSchedule::validate() const {
  require(slot_period > 0.0, "slot_period must be positive");
  require(tx_start >= 0.0 && tx_start < tx_end, "tx window must be ordered");
  require(tx_end <= rx_start, "tx and rx windows must be disjoint");
  require(rx_start < rx_end && rx_end <= slot_period,
          "rx window must fit in the slot");
  require(shutter_open_delay >= 0.0 && shutter_close_delay >= 0.0,
          "shutter delays must be >= 0");
}

RxWindow effective_rx_window(double rtt, const SlotSchedule& schedule) {
  schedule.validate();
  if (!(rtt > 0.0) || !(rtt < schedule.slot_period)) {
    throw OutOfModelError(
        "round-trip time must lie inside (0, slot_period) for the "
        "time-division schedule");
  }
  double overhead = schedule.shutter_open_delay + schedule.shutter_close_delay;
  double duration = std::min(rtt, schedule.tx_length()) - overhead;
  duration = std::clamp(duration, 0.0, schedule.rx_length());
  return {duration, duration / schedule.slot_period};
}

double TimeTagStream::quantize(double t, double resolution) {
  return std::round(t / resolution) * resolution;
}

TimeTagStream TimeTagStream::quantized(std::vector<TimeTag> events,
                                       double resolution) {
  require(resolution > 0.0, "resolution must be positive");
  for (auto& e : events) {
    require(e.channel == 0 || e.channel == 1, "channel must be 0 or 1");
    e.time = quantize(e.time, resolution);
  }
  for (std::size_t i = 1; i < events.size(); ++i) {
    require(events[i].time >= events[i - 1].time,
            "event times must be non-decreasing");
  }
  return TimeTagStream{std::move(events), resolution};
}

void GateConfig::validate() const {
  require(sigma > 0.0, "sigma must be positive");
  require(signal_halfwidth > 0.0, "signal halfwidth must be positive");
  require(background_exclusion >= signal_halfwidth,
          "background exclusion must be >= signal halfwidth");
}

double gate_capture_fraction(const GateConfig& cfg) {
  cfg.validate();
  return std::erf(cfg.signal_halfwidth / std::sqrt(2.0));
}

std::vector<double> expected_arrivals(std::span<const double> epochs,
                                      std::uint64_t subdivisions) {
  check_epochs(epochs);
  require(subdivisions >= 1, "subdivisions must be >= 1");
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(subdivisions) * (epochs.size() - 1));
  for (std::size_t i = 0; i + 1 < epochs.size(); ++i) {
    double pitch =
        (epochs[i + 1] - epochs[i]) / static_cast<double>(subdivisions);
    for (std::uint64_t k = 0; k < subdivisions; ++k) {
      grid.push_back(epochs[i] + static_cast<double>(k) * pitch);
    }
  }
  return grid;
}

ArrivalGrid::ArrivalGrid(std::vector<double> epochs,
                         std::uint64_t subdivisions)
    : epochs_(std::move(epochs)), subdivisions_(subdivisions) {
  check_epochs(epochs_);
  require(subdivisions_ >= 1, "subdivisions must be >= 1");
}

double ArrivalGrid::nearest_offset(double t) const {
  std::size_t i;
  if (t <= epochs_.front()) {
    i = 0;
  } else if (t >= epochs_.back()) {
    i = epochs_.size() - 2;
  } else {
    i = static_cast<std::size_t>(
            std::upper_bound(epochs_.begin(), epochs_.end(), t) -
            epochs_.begin()) -
        1;
  }
  double n = static_cast<double>(subdivisions_);
  double pitch = (epochs_[i + 1] - epochs_[i]) / n;
  double x = t - epochs_[i];
  double k = std::ceil(x / pitch - 0.5);  // ties resolve to the earlier point
  k = std::clamp(k, 0.0, n);
  return x - k * pitch;
}

ArrivalGrid::Coverage ArrivalGrid::coverage(double t_lo, double t_hi) const {
  Coverage cov;
  if (!(t_hi > t_lo)) return cov;
  double n = static_cast<double>(subdivisions_);
  for (std::size_t i = 0; i + 1 < epochs_.size(); ++i) {
    double a = epochs_[i];
    double b = epochs_[i + 1];
    double lo = std::max(a, t_lo);
    double hi = std::min(b, t_hi);
    if (hi <= lo) continue;
    cov.span += hi - lo;
    double pitch = (b - a) / n;
    // Points a + k*pitch with lo <= point < hi, 0 <= k <= n-1.
    double k_lo = std::max(0.0, std::ceil((lo - a) / pitch));
    double k_hi = std::min(n - 1.0, std::ceil((hi - a) / pitch) - 1.0);
    if (k_hi >= k_lo) {
      cov.points += static_cast<std::uint64_t>(k_hi - k_lo + 1.0);
    }
  }
  return cov;
}

namespace {

struct GateWidths {
  double signal;     // [s]
  double exclusion;  // [s]
};

GateWidths widths(const GateConfig& cfg) {
  return {cfg.signal_halfwidth * cfg.sigma,
          cfg.background_exclusion * cfg.sigma};
}

void classify(GatedCounts& out, double offset, int channel,
              const GateWidths& w) {
  double d = std::abs(offset);
  if (d <= w.signal) {
    if (channel == 0) {
      ++out.n_signal_correct;
    } else {
      ++out.n_signal_wrong;
    }
  } else if (d > w.exclusion) {
    ++out.n_background_exterior;
    ++out.n_background_by_channel[channel];
  } else {
    ++out.n_guard_discarded;
    ++out.n_guard_by_channel[channel];
  }
}

void fill_spans(GatedCounts& out, std::uint64_t points, double span,
                const GateConfig& cfg) {
  auto w = widths(cfg);
  out.gate_span = static_cast<double>(points) * 2.0 * w.signal;
  out.exterior_span =
      std::max(0.0, span - static_cast<double>(points) * 2.0 * w.exclusion);
}

}  // namespace

GatedCounts gate_events(const TimeTagStream& stream, const ArrivalGrid& grid,
                        const GateConfig& cfg) {
  cfg.validate();
  GatedCounts out;
  auto w = widths(cfg);
  for (const auto& e : stream.events) {
    classify(out, grid.nearest_offset(e.time), e.channel, w);
  }
  auto cov = grid.coverage(grid.first(), grid.last());
  fill_spans(out, cov.points, cov.span, cfg);
  return out;
}

GatedCounts gate_events(const TimeTagStream& stream,
                        std::span<const double> grid, const GateConfig& cfg) {
  cfg.validate();
  require(!grid.empty(), "arrival grid must not be empty");
  GatedCounts out;
  auto w = widths(cfg);
  for (const auto& e : stream.events) {
    auto it = std::lower_bound(grid.begin(), grid.end(), e.time);
    double offset;
    if (it == grid.begin()) {
      offset = e.time - *it;
    } else if (it == grid.end()) {
      offset = e.time - *(it - 1);
    } else {
      double d_hi = *it - e.time;
      double d_lo = e.time - *(it - 1);
      // Ties at the midpoint resolve to the earlier point.
      offset = d_lo <= d_hi ? d_lo : -d_hi;
    }
    classify(out, offset, e.channel, w);
  }
  fill_spans(out, grid.size(), grid.back() - grid.front(), cfg);
  return out;
}

double qber_bayesian(double n_corr, double n_wrong) {
  require(n_corr >= 0.0 && std::isfinite(n_corr), "n_corr must be >= 0");
  require(n_wrong >= 0.0 && std::isfinite(n_wrong), "n_wrong must be >= 0");
  return (n_wrong + 1.0) / (n_corr + n_wrong + 2.0);
}

namespace {

/// Expected in-gate background per channel: exterior counts scaled to the
/// gate span and split evenly over the two detectors.
double expected_in_gate_background_per_channel(const GatedCounts& c) {
  if (c.exterior_span <= 0.0) {
    throw InsufficientDataError(
        "no exterior time available for background estimation");
  }
  return static_cast<double>(c.n_background_exterior) *
         (c.gate_span / c.exterior_span) / 2.0;
}

}  // namespace

double qber_background_subtracted(const GatedCounts& counts) {
  double b = expected_in_gate_background_per_channel(counts);
  double corr =
      std::max(0.0, static_cast<double>(counts.n_signal_correct) - b);
  double wrong =
      std::max(0.0, static_cast<double>(counts.n_signal_wrong) - b);
  return qber_bayesian(corr, wrong);
}

StreamAnalysis analyze_stream(const TimeTagStream& stream,
                              const std::vector<double>& epochs,
                              const GateConfig& cfg, double interval_length,
                              std::uint64_t subdivisions,
                              const SlotSchedule& schedule,
                              int correct_channel) {
  cfg.validate();
  schedule.validate();
  require(interval_length > 0.0, "interval length must be positive");
  require(correct_channel == 0 || correct_channel == 1,
          "correct_channel must be 0 or 1");
  ArrivalGrid grid(epochs, subdivisions);

  double horizon = epochs.back();
  if (!stream.events.empty()) {
    horizon = std::max(horizon, stream.events.back().time);
  }
  auto n_intervals = static_cast<std::size_t>(
      std::max(1.0, std::ceil(horizon / interval_length - 1e-12)));

  std::vector<GatedCounts> buckets(n_intervals);
  auto w = widths(cfg);
  for (const auto& e : stream.events) {
    auto idx = static_cast<std::size_t>(std::clamp(
        std::floor(e.time / interval_length), 0.0,
        static_cast<double>(n_intervals - 1)));
    int channel = e.channel == correct_channel ? 0 : 1;
    classify(buckets[idx], grid.nearest_offset(e.time), channel, w);
  }

  StreamAnalysis analysis;
  analysis.interval_length = interval_length;
  analysis.intervals.reserve(n_intervals);
  for (std::size_t k = 0; k < n_intervals; ++k) {
    IntervalRecord rec;
    rec.t_start = static_cast<double>(k) * interval_length;
    double t_end = rec.t_start + interval_length;

    auto cov = grid.coverage(rec.t_start, t_end);
    fill_spans(buckets[k], cov.points, cov.span, cfg);
    rec.counts = buckets[k];
    rec.n_corr = rec.counts.n_signal_correct;
    rec.n_wrong = rec.counts.n_signal_wrong;
    rec.background_rate_hz =
        rec.counts.exterior_span > 0.0
            ? static_cast<double>(rec.counts.n_background_exterior) /
                  rec.counts.exterior_span
            : 0.0;

    // Slots whose ranging pulse was emitted inside this interval.
    double duty_sum = 0.0;
    double window_sum = 0.0;
    std::size_t n_slots = 0;
    auto first_slot = static_cast<std::size_t>(
        std::max(0.0, std::ceil(rec.t_start / schedule.slot_period - 1e-9)));
    for (std::size_t i = first_slot; i + 1 < epochs.size(); ++i) {
      double emission = static_cast<double>(i) * schedule.slot_period;
      if (emission >= t_end) break;
      double rtt = epochs[i] - emission;
      if (rtt > 0.0 && rtt < schedule.slot_period) {
        RxWindow win = effective_rx_window(rtt, schedule);
        duty_sum += win.duty_cycle;
        window_sum += win.duration;
      }
      ++n_slots;
    }
    rec.duty_cycle = n_slots > 0 ? duty_sum / static_cast<double>(n_slots) : 0.0;
    rec.effective_window_s = window_sum;

    rec.qber_raw = qber_bayesian(static_cast<double>(rec.n_corr),
                                 static_cast<double>(rec.n_wrong));
    double b = 0.0;
    if (rec.counts.exterior_span > 0.0) {
      b = expected_in_gate_background_per_channel(rec.counts);
      rec.qber_bg_subtracted = qber_background_subtracted(rec.counts);
    } else {
      rec.qber_bg_subtracted = rec.qber_raw;
    }
    auto exceeds = [b](std::uint64_t n) {
      return static_cast<double>(n) > b + 5.0 * std::sqrt(b);
    };
    rec.qualified = exceeds(rec.n_corr) || exceeds(rec.n_wrong);

    analysis.intervals.push_back(rec);
  }
  return analysis;
}

std::vector<IntervalRecord> select_intervals(
    const TimeTagStream& stream, const std::vector<double>& epochs,
    const GateConfig& cfg, double interval_length, std::uint64_t subdivisions,
    const SlotSchedule& schedule, int correct_channel) {
  auto analysis = analyze_stream(stream, epochs, cfg, interval_length,
                                 subdivisions, schedule, correct_channel);
  std::vector<IntervalRecord> out;
  for (auto& rec : analysis.intervals) {
    if (rec.qualified) out.push_back(rec);
  }
  return out;
}

OffsetHistogram offset_histogram(const TimeTagStream& stream,
                                 const ArrivalGrid& grid, double bin_width,
                                 double half_range) {
  require(bin_width > 0.0, "bin width must be positive");
  require(half_range > 0.0, "half range must be positive");
  auto n_bins = static_cast<std::size_t>(
      std::max(1.0, std::round(2.0 * half_range / bin_width)));
  OffsetHistogram h;
  h.bin_width = bin_width;
  h.half_range = half_range;
  h.channel0.assign(n_bins, 0);
  h.channel1.assign(n_bins, 0);
  for (const auto& e : stream.events) {
    double off = grid.nearest_offset(e.time);
    double pos = (off + half_range) / bin_width;
    if (pos < 0.0 || pos >= static_cast<double>(n_bins)) continue;
    auto idx = static_cast<std::size_t>(pos);
    (e.channel == 0 ? h.channel0 : h.channel1)[idx] += 1;
  }
  return h;
}

TimeTagStream load_time_tags(const std::string& path, double resolution) {
  auto lines = textio::read_lines(path);
  if (lines.empty()) throw ParseError("empty time-tag file '" + path + "'");
  if (std::string(textio::trim(lines[0])) != "time_s,channel") {
    throw ParseError("time-tag header must be 'time_s,channel'", 1);
  }
  std::vector<TimeTag> events;
  double prev = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < lines.size(); ++i) {
    auto line = textio::trim(lines[i]);
    if (line.empty() || line.front() == '#') continue;
    auto fields = textio::split(line, ',');
    if (fields.size() != 2) throw ParseError("expected 2 fields", i + 1);
    TimeTag tag;
    tag.time = textio::parse_double(fields[0], i + 1);
    auto ch = textio::parse_uint(fields[1], i + 1);
    if (ch > 1) throw ParseError("channel must be 0 or 1", i + 1);
    tag.channel = static_cast<int>(ch);
    if (tag.time < prev) {
      throw ParseError("time_s must be non-decreasing", i + 1);
    }
    prev = tag.time;
    events.push_back(tag);
  }
  return TimeTagStream::quantized(std::move(events), resolution);
}

std::string time_tags_to_csv(const TimeTagStream& stream) {
  std::string out = "time_s,channel\n";
  for (const auto& e : stream.events) {
    out += textio::format_exact(e.time);
    out += ',';
    out += e.channel == 0 ? '0' : '1';
    out += '\n';
  }
  return out;
}

std::vector<double> load_epochs(const std::string& path) {
  auto lines = textio::read_lines(path);
  std::vector<double> epochs;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    auto line = textio::trim(lines[i]);
    if (line.empty() || line.front() == '#') continue;
    double t = textio::parse_double(line, i + 1);
    if (!epochs.empty() && t <= epochs.back()) {
      throw ParseError("epochs must be strictly increasing", i + 1);
    }
    epochs.push_back(t);
  }
  if (epochs.size() < 2) {
    throw ParseError("need at least 2 epochs in '" + path + "'");
  }
  return epochs;
}

std::string epochs_to_text(std::span<const double> epochs) {
  std::string out;
  for (double e : epochs) {
    out += textio::format_exact(e);
    out += '\n';
  }
  return out;
}

}  // namespace qsatlink
