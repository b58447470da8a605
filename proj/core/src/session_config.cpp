#include "qsatlink/session_config.hpp"

#include <cmath>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>

#include "qsatlink/error.hpp"
#include "qsatlink/textio.hpp"

namespace qsatlink {

namespace {

struct Entry {
  std::string value;
  std::size_t line = 0;
};

using Section = std::map<std::string, Entry>;

struct IniFile {
  std::map<std::string, Section> sections;

  const Section* section(const std::string& name) const {
    auto it = sections.find(name);
    return it == sections.end() ? nullptr : &it->second;
  }
};

IniFile parse_ini(const std::string& path) {
  IniFile ini;
  auto lines = textio::read_lines(path);
  std::string current;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    auto line = textio::trim(lines[i]);
    if (line.empty() || line.front() == '#' || line.front() == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ParseError("unterminated section header", i + 1);
      }
      current = std::string(textio::trim(line.substr(1, line.size() - 2)));
      if (current.empty()) throw ParseError("empty section name", i + 1);
      ini.sections[current];
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError("expected 'key = value'", i + 1);
    }
    if (current.empty()) {
      throw ParseError("key outside of any [section]", i + 1);
    }
    std::string key(textio::trim(line.substr(0, eq)));
    std::string value(textio::trim(line.substr(eq + 1)));
    if (key.empty()) throw ParseError("empty key", i + 1);
    auto [it, inserted] =
        ini.sections[current].emplace(key, Entry{value, i + 1});
    if (!inserted) {
      throw ParseError("duplicate key '" + key + "' in [" + current + "]",
                       i + 1);
    }
  }
  return ini;
}

class SectionReader {
public:
  SectionReader(const IniFile& ini, std::string name)
      : section_(ini.section(name)), name_(std::move(name)) {}

  bool present() const { return section_ != nullptr; }

  std::optional<std::string> get(const std::string& key) const {
    if (!section_) return std::nullopt;
    auto it = section_->find(key);
    if (it == section_->end()) return std::nullopt;
    return it->second.value;
  }

  std::size_t line_of(const std::string& key) const {
    if (!section_) return 0;
    auto it = section_->find(key);
    return it == section_->end() ? 0 : it->second.line;
  }

  std::string require(const std::string& key) const {
    auto v = get(key);
    if (!v) {
      throw ParseError("missing required key '" + key + "' in [" + name_ +
                       "]");
    }
    return *v;
  }

  double number(const std::string& key, double fallback) const {
    auto v = get(key);
    return v ? textio::parse_double(*v, line_of(key)) : fallback;
  }

  double require_number(const std::string& key) const {
    return textio::parse_double(require(key), line_of(key));
  }

  void reject_unknown(const std::set<std::string>& known) const {
    if (!section_) return;
    for (const auto& [key, entry] : *section_) {
      if (!known.count(key)) {
        throw ParseError("unknown key '" + key + "' in [" + name_ + "]",
                         entry.line);
      }
    }
  }

private:
  const Section* section_;
  std::string name_;
};

std::string resolve(const std::filesystem::path& base,
                    const std::string& rel) {
  std::filesystem::path p(rel);
  return p.is_absolute() ? p.string() : (base / p).string();
}

PolarizationState state_for_label(const std::string& label,
                                  std::size_t line) {
  if (label == "H") return PolarizationState::horizontal();
  if (label == "V") return PolarizationState::vertical();
  if (label == "D") return PolarizationState::diagonal();
  if (label == "A") return PolarizationState::antidiagonal();
  if (label == "L") return PolarizationState::circular_left();
  if (label == "R") return PolarizationState::circular_right();
  throw ParseError("unknown state label '" + label + "' (use H,V,D,A,L,R)",
                   line);
}

}  // namespace

SessionConfig load_session_config(const std::string& path) {
  IniFile ini = parse_ini(path);
  for (const auto& [name, _] : ini.sections) {
    static const std::set<std::string> known = {
        "satellite", "pass", "link", "session", "gate", "schedule"};
    if (!known.count(name)) {
      throw ParseError("unknown section [" + name + "]");
    }
  }
  auto base = std::filesystem::path(path).parent_path();

  // Satellite.
  SectionReader sat_sec(ini, "satellite");
  if (!sat_sec.present()) throw ParseError("missing [satellite] section");
  sat_sec.reject_unknown({"catalog", "name"});
  auto catalog = load_catalog(resolve(base, sat_sec.require("catalog")));
  SatelliteSpec satellite = find_satellite(catalog, sat_sec.require("name"));

  // Pass: file or generator parameters.
  SectionReader pass_sec(ini, "pass");
  if (!pass_sec.present()) throw ParseError("missing [pass] section");
  std::optional<PassGeometry> pass;
  if (auto file = pass_sec.get("file")) {
    pass_sec.reject_unknown({"file"});
    pass = load_pass(resolve(base, *file));
  } else {
    pass_sec.reject_unknown({"altitude_km", "max_elevation_deg",
                             "sample_period_s", "duration_s"});
    double altitude_km = pass_sec.number("altitude_km",
                                         satellite.altitude / 1000.0);
    pass = circular_pass(
        altitude_km * 1000.0,
        constants::deg_to_rad(pass_sec.require_number("max_elevation_deg")),
        pass_sec.number("sample_period_s", 0.1),
        pass_sec.number("duration_s", 0.0));
  }

  // Link parameters.
  SectionReader link_sec(ini, "link");
  if (!link_sec.present()) throw ParseError("missing [link] section");
  link_sec.reject_unknown({"mu_tx", "average_power_w", "wavelength_nm",
                           "pulse_rate_hz", "eta_tx", "gain_t", "t_zenith",
                           "telescope_area_m2", "eta_rx", "eta_det"});
  double pulse_rate = link_sec.number("pulse_rate_hz", 1e8);
  LinkBudgetParams link;
  if (auto mu = link_sec.get("mu_tx")) {
    link.mu_tx = textio::parse_double(*mu, link_sec.line_of("mu_tx"));
  } else {
    link.mu_tx = mu_tx_from_power(
        link_sec.require_number("average_power_w"), pulse_rate,
        link_sec.require_number("wavelength_nm") * 1e-9);
  }
  link.eta_tx = link_sec.require_number("eta_tx");
  link.gain_t = link_sec.number("gain_t", 1.1e9);
  link.t_zenith = link_sec.require_number("t_zenith");
  link.telescope_area = link_sec.require_number("telescope_area_m2");
  link.eta_rx = link_sec.require_number("eta_rx");
  link.eta_det = link_sec.require_number("eta_det");

  // Session settings.
  SectionReader ses(ini, "session");
  if (!ses.present()) throw ParseError("missing [session] section");
  ses.reject_unknown({"model", "mu_sat", "transmissivity_override",
                      "background_rate_hz", "seed", "states", "fr_angle_deg",
                      "analyzer", "azimuth_start_deg", "azimuth_end_deg"});

  SessionConfig cfg{satellite, std::move(*pass), link};
  cfg.pulse_rate_hz = pulse_rate;

  std::string model = ses.get("model").value_or("downlink");
  if (model == "downlink") {
    cfg.model = LinkModel::kDownlink;
  } else if (model == "radar") {
    cfg.model = LinkModel::kRadar;
  } else {
    throw ParseError("model must be 'downlink' or 'radar'",
                     ses.line_of("model"));
  }
  cfg.mu_sat = ses.number("mu_sat", 1.0);
  cfg.transmissivity_override = ses.number("transmissivity_override", 0.0);
  cfg.background_rate_hz = ses.number("background_rate_hz", 0.0);
  if (auto seed = ses.get("seed")) {
    cfg.rng_seed = textio::parse_uint(*seed, ses.line_of("seed"));
  }
  cfg.fr_angle = constants::deg_to_rad(ses.number("fr_angle_deg", 0.0));
  cfg.azimuth_start =
      constants::deg_to_rad(ses.number("azimuth_start_deg", 0.0));
  cfg.azimuth_end = constants::deg_to_rad(ses.number("azimuth_end_deg", 170.0));

  std::string analyzer = ses.get("analyzer").value_or("track");
  if (analyzer == "track") {
    cfg.analyzer_tracks_state = true;
  } else if (analyzer == "HV" || analyzer == "DA" || analyzer == "LR") {
    cfg.analyzer_tracks_state = false;
    std::size_t line = ses.line_of("analyzer");
    cfg.analyzer0 = state_for_label(analyzer.substr(0, 1), line);
    cfg.analyzer1 = state_for_label(analyzer.substr(1, 1), line);
  } else {
    throw ParseError("analyzer must be track, HV, DA or LR",
                     ses.line_of("analyzer"));
  }

  {
    std::string states = ses.require("states");
    std::size_t line = ses.line_of("states");
    for (auto token : textio::split(states, ',')) {
      token = textio::trim(token);
      if (token.empty()) continue;
      auto parts = textio::split(token, ':');
      if (parts.size() != 2) {
        throw ParseError(
            "states entries must be LABEL:SECONDS, e.g. H:10", line);
      }
      StateInterval si;
      si.label = std::string(textio::trim(parts[0]));
      si.state = state_for_label(si.label, line);
      si.duration = textio::parse_double(parts[1], line);
      cfg.state_schedule.push_back(std::move(si));
    }
    if (cfg.state_schedule.empty()) {
      throw ParseError("states must list at least one interval", line);
    }
  }

  // Gate / analysis settings.
  SectionReader gate_sec(ini, "gate");
  gate_sec.reject_unknown({"sigma_ns", "signal_halfwidth",
                           "background_exclusion", "interval_s",
                           "subdivisions", "resolution_ps"});
  cfg.gate.sigma = gate_sec.number("sigma_ns", 0.5) * 1e-9;
  cfg.gate.signal_halfwidth = gate_sec.number("signal_halfwidth", 1.0);
  cfg.gate.background_exclusion =
      gate_sec.number("background_exclusion", 3.0);
  cfg.analysis_interval_s = gate_sec.number("interval_s", 5.0);
  cfg.subdivisions = static_cast<std::uint64_t>(
      gate_sec.number("subdivisions", 10000000.0));
  cfg.tagger_resolution = gate_sec.number("resolution_ps", 81.0) * 1e-12;

  // Slot schedule overrides.
  SectionReader sched(ini, "schedule");
  sched.reject_unknown({"slot_period_s", "tx_start_s", "tx_end_s",
                        "rx_start_s", "rx_end_s", "shutter_open_delay_s",
                        "shutter_close_delay_s"});
  cfg.schedule.slot_period = sched.number("slot_period_s", 0.1);
  cfg.schedule.tx_start = sched.number("tx_start_s", 0.0);
  cfg.schedule.tx_end = sched.number("tx_end_s", 0.05);
  cfg.schedule.rx_start = sched.number("rx_start_s", 0.05);
  cfg.schedule.rx_end = sched.number("rx_end_s", 0.1);
  cfg.schedule.shutter_open_delay = sched.number("shutter_open_delay_s", 0.002);
  cfg.schedule.shutter_close_delay =
      sched.number("shutter_close_delay_s", 0.0025);

  cfg.validate();
  return cfg;
}

}  // namespace qsatlink
