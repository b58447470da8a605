#include "qsatlink/linkbudget.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "qsatlink/constants.hpp"
#include "qsatlink/error.hpp"

using namespace qsatlink;
using constants::kPi;

namespace {

LinkBudgetParams paper_params() {
  LinkBudgetParams p;
  p.mu_tx = mu_tx_from_power(0.11, 1e8, 532e-9);
  p.eta_tx = 0.1;
  p.gain_t = 1.1e9;
  p.cross_section = 5.6e5;
  p.slant_range = 1.1717e6;
  p.t_zenith = 0.87;
  p.airmass = 1.887;
  p.telescope_area = 1.73;
  p.eta_rx = 0.13;
  p.eta_det = 0.1;
  p.ccr_reflectivity = 1.0;
  p.ccr_effective_area = 1.27e-3;
  return p;
}

std::string write_temp(const std::string& name, const std::string& content) {
  auto path = (std::filesystem::temp_directory_path() / name).string();
  std::ofstream out(path, std::ios::trunc);
  out << content;
  return path;
}

}  // namespace

TEST_CASE("transmitter gain formula") {
  double theta_t = 85e-6;
  CHECK(transmitter_gain(theta_t, 0.0) ==
        doctest::Approx(8.0 / (theta_t * theta_t)).epsilon(1e-14));
  CHECK(transmitter_gain(theta_t, theta_t) ==
        doctest::Approx(8.0 / (theta_t * theta_t) * std::exp(-2.0))
            .epsilon(1e-14));
  CHECK_THROWS_AS(transmitter_gain(0.0, 0.0), InvalidArgumentError);
  CHECK_THROWS_AS(transmitter_gain(1e-5, -1.0), InvalidArgumentError);

  // Strictly decreasing in the pointing error.
  double prev = transmitter_gain(theta_t, 0.0);
  for (double err = 1e-6; err < 3e-4; err += 1e-6) {
    double g = transmitter_gain(theta_t, err);
    CHECK(g < prev);
    prev = g;
  }
}

TEST_CASE("divergence matching the effective gain") {
  // Invert 8/theta^2 = 1.1e9 at zero pointing error.
  double theta_t = std::sqrt(8.0 / 1.1e9);
  CHECK(theta_t == doctest::Approx(85.3e-6).epsilon(0.002));
  CHECK(transmitter_gain(theta_t, 0.0) == doctest::Approx(1.1e9).epsilon(1e-12));
}

TEST_CASE("airmass from elevation") {
  CHECK(airmass_from_elevation(kPi / 2.0) == doctest::Approx(1.0));
  CHECK(airmass_from_elevation(kPi / 6.0) == doctest::Approx(2.0));
  CHECK(airmass_from_elevation(0.3) ==
        doctest::Approx(1.0 / std::sin(0.3)).epsilon(1e-14));
  CHECK(1.0 / std::sin(0.3) == doctest::Approx(3.384).epsilon(1e-3));
  CHECK_THROWS_AS(airmass_from_elevation(0.05), OutOfModelError);
  CHECK_THROWS_AS(airmass_from_elevation(2.0), InvalidArgumentError);
}

TEST_CASE("atmospheric transmissivity") {
  CHECK(atmospheric_transmissivity(1.0, 0.87) == doctest::Approx(0.87));
  CHECK(atmospheric_transmissivity(2.0, 0.87) ==
        doctest::Approx(0.7569).epsilon(1e-12));
  CHECK(atmospheric_transmissivity(7.3, 1.0) == 1.0);
  CHECK_THROWS_AS(atmospheric_transmissivity(0.5, 0.87), InvalidArgumentError);
  CHECK_THROWS_AS(atmospheric_transmissivity(1.0, 1.0001),
                  InvalidArgumentError);

  // Strictly decreasing in airmass below unit zenith transmissivity.
  double prev = atmospheric_transmissivity(1.0, 0.87);
  for (double am = 1.2; am < 12.0; am += 0.2) {
    double t = atmospheric_transmissivity(am, 0.87);
    CHECK(t < prev);
    prev = t;
  }
}

TEST_CASE("radar equation scalings") {
  LinkBudgetParams p = paper_params();
  double base = radar_mu_rx(p);
  LinkBudgetParams doubled = p;
  doubled.slant_range *= 2.0;
  CHECK(radar_mu_rx(doubled) == doctest::Approx(base / 16.0).epsilon(1e-12));

  // Factors cancel by construction when every efficiency is 1, the gain
  // counteracts both spreading losses and the telescope aperture is unit.
  LinkBudgetParams unit;
  unit.mu_tx = 123.0;
  unit.eta_tx = 1.0;
  unit.cross_section = 7.7;
  unit.slant_range = 5.5e5;
  double r2 = unit.slant_range * unit.slant_range;
  unit.gain_t = 16.0 * kPi * kPi * r2 * r2 / unit.cross_section;
  unit.t_zenith = 1.0;
  unit.airmass = 3.0;
  unit.telescope_area = 1.0;
  unit.eta_rx = 1.0;
  unit.eta_det = 1.0;
  unit.ccr_reflectivity = 1.0;
  unit.ccr_effective_area = 1.0;
  CHECK(radar_mu_rx(unit) == doctest::Approx(unit.mu_tx).epsilon(1e-12));

  // Monotone in range.
  double prev = radar_mu_rx(p);
  for (double f = 1.1; f < 3.0; f += 0.1) {
    LinkBudgetParams q = p;
    q.slant_range = p.slant_range * f;
    double v = radar_mu_rx(q);
    CHECK(v < prev);
    prev = v;
  }
}

TEST_CASE("downlink transmissivity and factorization") {
  LinkBudgetParams p = paper_params();
  double t = downlink_transmissivity(p);

  LinkBudgetParams doubled = p;
  doubled.slant_range *= 2.0;
  CHECK(downlink_transmissivity(doubled) ==
        doctest::Approx(t / 4.0).epsilon(1e-12));

  // radar = downlink * uplink with the uplink factor computed independently.
  double t_a = std::pow(p.t_zenith, p.airmass);
  double uplink = p.mu_tx * p.eta_tx * p.gain_t * p.ccr_reflectivity *
                  p.ccr_effective_area /
                  (4.0 * kPi * p.slant_range * p.slant_range) * t_a;
  CHECK(radar_mu_rx(p) == doctest::Approx(t * uplink).epsilon(1e-12));
}

TEST_CASE("mu_sat estimation inverts the forward model") {
  LinkBudgetParams p = paper_params();
  double t = downlink_transmissivity(p);
  double pulse_rate = 1e8;
  double mu_sat = 3.4;
  double rate = mu_sat * t * pulse_rate;
  CHECK(estimate_mu_sat(rate, pulse_rate, p) ==
        doctest::Approx(mu_sat).epsilon(1e-9));
  CHECK(estimate_mu_sat(0.0, pulse_rate, p) == 0.0);
  CHECK_THROWS_AS(estimate_mu_sat(-1.0, pulse_rate, p), InvalidArgumentError);
  CHECK_THROWS_AS(estimate_mu_sat(1.0, 0.0, p), InvalidArgumentError);
}

TEST_CASE("photons per pulse from average power") {
  // Oracle: E_photon = h c / lambda, pulse energy P / f.
  double photon_energy =
      constants::kPlanck * constants::kSpeedOfLight / 532e-9;
  double expected = (0.11 / 1e8) / photon_energy;
  CHECK(mu_tx_from_power(0.11, 1e8, 532e-9) ==
        doctest::Approx(expected).epsilon(1e-14));
  CHECK(expected == doctest::Approx(2.9e9).epsilon(0.02));

  CHECK(mu_tx_from_power(0.0, 1e8, 532e-9) == 0.0);
  CHECK(mu_tx_from_power(0.11, 2e8, 532e-9) ==
        doctest::Approx(expected / 2.0).epsilon(1e-14));
  CHECK_THROWS_AS(mu_tx_from_power(0.11, 0.0, 532e-9), InvalidArgumentError);
  CHECK_THROWS_AS(mu_tx_from_power(0.11, 1e8, 0.0), InvalidArgumentError);
}

TEST_CASE("gain ratio matches the exponential law") {
  double theta_t = 8.5e-5;
  for (double err = 0.0; err < 4e-4; err += 2.5e-5) {
    double ratio =
        transmitter_gain(theta_t, err) / transmitter_gain(theta_t, 0.0);
    CHECK(ratio == doctest::Approx(std::exp(-2.0 * err * err /
                                            (theta_t * theta_t)))
                       .epsilon(1e-12));
  }
}

TEST_CASE("attenuation in dB") {
  CHECK(attenuation_db(4.3e-7) == doctest::Approx(63.6653).epsilon(1e-4));
  CHECK(std::floor(attenuation_db(4.3e-7)) == 63.0);
  CHECK(attenuation_db(1.0) == 0.0);
  CHECK_THROWS_AS(attenuation_db(0.0), InvalidArgumentError);
}

TEST_CASE("parameter validation") {
  LinkBudgetParams p = paper_params();
  p.eta_det = 0.0;
  CHECK_THROWS_AS(p.validate(), InvalidArgumentError);
  p = paper_params();
  p.airmass = 0.9;
  CHECK_THROWS_AS(p.validate(), InvalidArgumentError);
  p = paper_params();
  p.slant_range = -1.0;
  CHECK_THROWS_AS(p.validate(), InvalidArgumentError);

  SatelliteSpec s{"X", 150e3, 1e5, 1.0, 1e-3, true};
  CHECK_THROWS_AS(s.validate(), InvalidArgumentError);
  s.altitude = 700e3;
  CHECK_NOTHROW(s.validate());
}

TEST_CASE("satellite catalog io") {
  auto path = write_temp(
      "qsl_catalog_test.csv",
      "name,altitude_m,cross_section_m2,rho,a_eff_m2,polarization_preserving\n"
      "# comment line\n"
      "Larets,691000,5.6e5,1.0,1.27e-3,true\n"
      "Ajisai,1490000,1.2e7,0.8,0.12,false\n");
  auto catalog = load_catalog(path);
  REQUIRE(catalog.size() == 2);
  const auto& larets = find_satellite(catalog, "Larets");
  CHECK(larets.altitude == 691000.0);
  CHECK(larets.polarization_preserving);
  CHECK_FALSE(find_satellite(catalog, "Ajisai").polarization_preserving);
  CHECK_THROWS_AS(find_satellite(catalog, "Lageos"), InvalidArgumentError);

  auto bad = write_temp(
      "qsl_catalog_bad.csv",
      "name,altitude_m,cross_section_m2,rho,a_eff_m2,polarization_preserving\n"
      "Larets,691000,5.6e5,1.0\n");
  try {
    load_catalog(bad);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
}
