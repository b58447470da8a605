#pragma once

#include <string>
#include <vector>

namespace qsatlink {

/// Every symbol of the two-way link budget, SI units throughout.
struct LinkBudgetParams {
  double mu_tx = 0.0;              // photons per pulse leaving the laser
  double eta_tx = 1.0;             // transmit optics efficiency, (0,1]
  double gain_t = 1.0;             // transmitter gain (dimensionless)
  double cross_section = 0.0;      // satellite optical cross-section [m^2]
  double slant_range = 0.0;        // station-to-satellite distance [m]
  double t_zenith = 1.0;           // one-way zenith transmissivity, (0,1]
  double airmass = 1.0;            // optical path / zenith path, >= 1
  double telescope_area = 0.0;     // receive aperture area [m^2]
  double eta_rx = 1.0;             // receive optics efficiency, (0,1]
  double eta_det = 1.0;            // detector efficiency, (0,1]
  double ccr_reflectivity = 1.0;   // rho, (0,1]
  double ccr_effective_area = 0.0; // retroreflective area [m^2]

  /// Throws InvalidArgumentError on any out-of-domain field.
  void validate() const;
};

/// One satellite catalog record. Cross-section and effective area are
/// operator-sourced inputs; the bundled catalog documents its provenance.
struct SatelliteSpec {
  std::string name;
  double altitude = 0.0;            // [m], LEO scope (200 km, 2000 km)
  double cross_section = 0.0;       // [m^2]
  double ccr_reflectivity = 1.0;    // rho
  double ccr_effective_area = 0.0;  // [m^2]
  bool polarization_preserving = true;

  void validate() const;
};

/// Gaussian-beam transmitter gain for the given full divergence angle and
/// pointing error, both in radians: (8/div^2) * exp(-2 (err/div)^2).
double transmitter_gain(double divergence, double pointing_error);

/// Plane-parallel airmass 1/sin(elevation). Valid above the 5 degree floor;
/// throws OutOfModelError below it.
double airmass_from_elevation(double elevation);

/// One-way atmospheric transmissivity t_zenith^airmass.
double atmospheric_transmissivity(double airmass, double t_zenith);

/// Full two-way radar-equation prediction of the mean detected photons per
/// pulse. Scales as slant_range^-4 and transmissivity squared.
double radar_mu_rx(const LinkBudgetParams& p);

/// Downlink (quantum channel) transmission mu_rx / mu_sat: the part of the
/// radar product with the cross-section replaced by its downlink gain
/// cross_section / (rho * effective_area). Scales as slant_range^-2.
double downlink_transmissivity(const LinkBudgetParams& p);

/// Mean photons per pulse leaving the satellite, inverted from the detected
/// rate while the receive window is open (duty-cycle corrected by caller).
double estimate_mu_sat(double detected_rate_in_window, double pulse_rate,
                       const LinkBudgetParams& p);

/// Photons per pulse for a pulsed source of the given average power [W],
/// repetition rate [Hz] and wavelength [m].
double mu_tx_from_power(double average_power, double pulse_rate,
                        double wavelength);

/// Attenuation in dB of a linear transmissivity: -10*log10(linear).
double attenuation_db(double linear);

/// Loads a satellite catalog CSV with header
/// name,altitude_m,cross_section_m2,rho,a_eff_m2,polarization_preserving.
std::vector<SatelliteSpec> load_catalog(const std::string& path);

/// Catalog lookup by exact name; throws InvalidArgumentError naming the
/// missing entry.
const SatelliteSpec& find_satellite(const std::vector<SatelliteSpec>& catalog,
                                    const std::string& name);

}  // namespace qsatlink
