#include "qsatlink/linkbudget.hpp"

#include <cmath>

#include "qsatlink/constants.hpp"
#include "qsatlink/error.hpp"
#include "qsatlink/textio.hpp"

namespace qsatlink {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw InvalidArgumentError(what);
}

bool in_unit_interval(double x) { return x > 0.0 && x <= 1.0; }

}  // namespace

void LinkBudgetParams::validate() const {
  require(mu_tx > 0.0 && std::isfinite(mu_tx), "mu_tx must be positive");
  require(in_unit_interval(eta_tx), "eta_tx must be in (0,1]");
  require(gain_t > 0.0, "gain_t must be positive");
  require(cross_section > 0.0, "cross_section must be positive");
  require(slant_range > 0.0, "slant_range must be positive");
  require(in_unit_interval(t_zenith), "t_zenith must be in (0,1]");
  require(airmass >= 1.0, "airmass must be >= 1");
  require(telescope_area > 0.0, "telescope_area must be positive");
  require(in_unit_interval(eta_rx), "eta_rx must be in (0,1]");
  require(in_unit_interval(eta_det), "eta_det must be in (0,1]");
  require(in_unit_interval(ccr_reflectivity),
          "ccr_reflectivity must be in (0,1]");
  require(ccr_effective_area > 0.0, "ccr_effective_area must be positive");
}

void SatelliteSpec::validate() const {
  require(!name.empty(), "satellite name must not be empty");
  require(altitude > 200e3 && altitude < 2000e3,
          "altitude must be in the LEO range (200 km, 2000 km)");
  require(cross_section > 0.0, "cross_section must be positive");
  require(in_unit_interval(ccr_reflectivity),
          "ccr_reflectivity must be in (0,1]");
  require(ccr_effective_area > 0.0, "ccr_effective_area must be positive");
}

double transmitter_gain(double divergence, double pointing_error) {
  require(divergence > 0.0 && std::isfinite(divergence),
          "divergence must be positive");
  require(pointing_error >= 0.0 && std::isfinite(pointing_error),
          "pointing_error must be non-negative");
  double ratio = pointing_error / divergence;
  return 8.0 / (divergence * divergence) * std::exp(-2.0 * ratio * ratio);
}

double airmass_from_elevation(double elevation) {
  require(std::isfinite(elevation), "elevation must be finite");
  if (elevation > constants::kPi / 2.0) {
    throw InvalidArgumentError("elevation must be <= pi/2");
  }
  if (elevation <= constants::kElevationFloor) {
    throw OutOfModelError(
        "elevation below the 5 degree floor of the plane-parallel airmass "
        "model");
  }
  return 1.0 / std::sin(elevation);
}

double atmospheric_transmissivity(double airmass, double t_zenith) {
  require(airmass >= 1.0 && std::isfinite(airmass), "airmass must be >= 1");
  require(in_unit_interval(t_zenith), "t_zenith must be in (0,1]");
  return std::pow(t_zenith, airmass);
}

double radar_mu_rx(const LinkBudgetParams& p) {
  p.validate();
  double t_a = atmospheric_transmissivity(p.airmass, p.t_zenith);
  double spread = 1.0 / (4.0 * constants::kPi * p.slant_range * p.slant_range);
  return p.mu_tx * p.eta_tx * p.gain_t * p.cross_section * spread * spread *
         t_a * t_a * p.telescope_area * p.eta_rx * p.eta_det;
}

double downlink_transmissivity(const LinkBudgetParams& p) {
  p.validate();
  double t_a = atmospheric_transmissivity(p.airmass, p.t_zenith);
  double spread = 1.0 / (4.0 * constants::kPi * p.slant_range * p.slant_range);
  double downlink_gain =
      p.cross_section / (p.ccr_reflectivity * p.ccr_effective_area);
  return downlink_gain * spread * t_a * p.telescope_area * p.eta_rx *
         p.eta_det;
}

double estimate_mu_sat(double detected_rate_in_window, double pulse_rate,
                       const LinkBudgetParams& p) {
  require(detected_rate_in_window >= 0.0, "detected rate must be >= 0");
  require(pulse_rate > 0.0, "pulse rate must be positive");
  double transmissivity = downlink_transmissivity(p);
  require(transmissivity > 0.0, "channel transmissivity must be positive");
  return detected_rate_in_window / pulse_rate / transmissivity;
}

double mu_tx_from_power(double average_power, double pulse_rate,
                        double wavelength) {
  require(average_power >= 0.0, "average power must be >= 0");
  require(pulse_rate > 0.0, "pulse rate must be positive");
  require(wavelength > 0.0, "wavelength must be positive");
  double photon_energy =
      constants::kPlanck * constants::kSpeedOfLight / wavelength;
  return average_power / pulse_rate / photon_energy;
}

double attenuation_db(double linear) {
  require(linear > 0.0, "linear transmissivity must be positive");
  return -10.0 * std::log10(linear);
}

std::vector<SatelliteSpec> load_catalog(const std::string& path) {
  auto lines = textio::read_lines(path);
  if (lines.empty()) throw ParseError("empty catalog '" + path + "'");
  const std::string expected =
      "name,altitude_m,cross_section_m2,rho,a_eff_m2,polarization_preserving";
  if (std::string(textio::trim(lines[0])) != expected) {
    throw ParseError("catalog header must be '" + expected + "'", 1);
  }
  std::vector<SatelliteSpec> catalog;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    auto line = textio::trim(lines[i]);
    if (line.empty() || line.front() == '#') continue;
    auto fields = textio::split(line, ',');
    if (fields.size() != 6) {
      throw ParseError("expected 6 fields", i + 1);
    }
    SatelliteSpec s;
    s.name = std::string(textio::trim(fields[0]));
    s.altitude = textio::parse_double(fields[1], i + 1);
    s.cross_section = textio::parse_double(fields[2], i + 1);
    s.ccr_reflectivity = textio::parse_double(fields[3], i + 1);
    s.ccr_effective_area = textio::parse_double(fields[4], i + 1);
    auto flag = textio::trim(fields[5]);
    if (flag == "true" || flag == "1") {
      s.polarization_preserving = true;
    } else if (flag == "false" || flag == "0") {
      s.polarization_preserving = false;
    } else {
      throw ParseError("polarization_preserving must be true/false", i + 1);
    }
    try {
      s.validate();
    } catch (const InvalidArgumentError& e) {
      throw ParseError(std::string(e.what()), i + 1);
    }
    catalog.push_back(std::move(s));
  }
  return catalog;
}

const SatelliteSpec& find_satellite(const std::vector<SatelliteSpec>& catalog,
                                    const std::string& name) {
  for (const auto& s : catalog) {
    if (s.name == name) return s;
  }
  throw InvalidArgumentError("satellite '" + name + "' not found in catalog");
}

}  // namespace qsatlink
