// qsatlink command-line front end: synthesize passes, run link budgets,
// simulate retroreflector downlink sessions and analyze time-tag files.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qsatlink/error.hpp"
#include "qsatlink/linkbudget.hpp"
#include "qsatlink/orbitpass.hpp"
#include "qsatlink/polarization.hpp"
#include "qsatlink/protocol.hpp"
#include "qsatlink/session_config.hpp"
#include "qsatlink/textio.hpp"
#include "qsatlink/timing.hpp"

namespace {

namespace fs = std::filesystem;
using namespace qsatlink;

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;

void check_overwrite(const std::string& path, bool force) {
  if (!force && fs::exists(path)) {
    throw InvalidArgumentError("refusing to overwrite '" + path +
                               "' (use --force)");
  }
}

std::string g9(double v) { return textio::format_g9(v); }

// ---------------------------------------------------------------------------
// Shared report/histogram writers.

std::string interval_report_csv(const std::vector<IntervalRecord>& records,
                                bool extended,
                                const std::vector<SessionIntervalReport>* ext) {
  std::string out =
      "t_start_s,n_corr,n_wrong,background_rate_hz,duty_cycle,qber_raw,"
      "qber_bg_subtracted,qualified";
  if (extended) out += ",return_rate_hz,mu_sat_estimate";
  out += '\n';
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    out += g9(r.t_start);
    out += ',' + std::to_string(r.n_corr);
    out += ',' + std::to_string(r.n_wrong);
    out += ',' + g9(r.background_rate_hz);
    out += ',' + g9(r.duty_cycle);
    out += ',' + g9(r.qber_raw);
    out += ',' + g9(r.qber_bg_subtracted);
    out += r.qualified ? ",1" : ",0";
    if (extended) {
      out += ',' + g9((*ext)[i].return_rate_hz);
      out += ',' + g9((*ext)[i].mu_sat_estimate);
    }
    out += '\n';
  }
  return out;
}

std::string histogram_csv(const OffsetHistogram& h) {
  std::string out = "offset_ns,counts_ch0,counts_ch1\n";
  for (std::size_t i = 0; i < h.channel0.size(); ++i) {
    double center = -h.half_range + (static_cast<double>(i) + 0.5) * h.bin_width;
    out += g9(center * 1e9);
    out += ',' + std::to_string(h.channel0[i]);
    out += ',' + std::to_string(h.channel1[i]);
    out += '\n';
  }
  return out;
}

struct HistogramOptions {
  double bin_ns = 0.1;
  double half_range_ns = 5.0;
};

// ---------------------------------------------------------------------------
// simulate

struct SimulateOptions {
  std::string config_path;
  std::string out_dir;
  bool force = false;
  HistogramOptions hist;
};

int run_simulate(const SimulateOptions& opt) {
  SessionConfig cfg = load_session_config(opt.config_path);
  if (const char* env = std::getenv("QSATLINK_SEED")) {
    cfg.rng_seed = textio::parse_uint(env, 0);
  }

  fs::create_directories(opt.out_dir);
  auto path = [&](const char* name) {
    return (fs::path(opt.out_dir) / name).string();
  };
  check_overwrite(path("report.csv"), opt.force);
  check_overwrite(path("timetags.csv"), opt.force);
  check_overwrite(path("histogram.csv"), opt.force);
  check_overwrite(path("slr_epochs.txt"), opt.force);

  SimulationResult result = simulate_pass(cfg);

  std::vector<IntervalRecord> records;
  records.reserve(result.report.intervals.size());
  for (const auto& r : result.report.intervals) records.push_back(r.timing);
  textio::atomic_write(
      path("report.csv"),
      interval_report_csv(records, true, &result.report.intervals));
  textio::atomic_write(path("timetags.csv"), time_tags_to_csv(result.tags));
  textio::atomic_write(path("slr_epochs.txt"),
                       epochs_to_text(result.slr_epochs));

  ArrivalGrid grid(result.slr_epochs, cfg.subdivisions);
  OffsetHistogram hist =
      offset_histogram(result.tags, grid, opt.hist.bin_ns * 1e-9,
                       opt.hist.half_range_ns * 1e-9);
  textio::atomic_write(path("histogram.csv"), histogram_csv(hist));

  const SessionReport& rep = result.report;
  std::cout << "pass: " << cfg.satellite.name << ", "
            << rep.intervals.size() << " intervals, " << rep.qualified_count
            << " qualified\n";
  std::cout << "mean duty cycle: " << textio::format_percent(rep.mean_duty_cycle)
            << "\n";
  std::cout << "mean QBER: " << textio::format_percent(rep.mean_qber)
            << " (background-subtracted: "
            << textio::format_percent(rep.mean_qber_bg_subtracted) << ")\n";
  std::cout << "in-window return rate: " << g9(rep.mean_return_rate_hz)
            << " Hz\n";
  std::cout << "mu_sat estimate: " << g9(rep.mu_sat_mean)
            << (rep.mu_sat_is_upper_bound ? " (upper bound, rho = 1)" : "")
            << "\n";
  std::cout << "feasibility: QBER<11% " << (rep.verdict.qber_ok ? "yes" : "no")
            << ", mu_sat<=2 " << (rep.verdict.mu_ok ? "yes" : "no")
            << " -> overall " << (rep.verdict.overall ? "yes" : "no") << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// analyze

struct AnalyzeOptions {
  std::string timetags_path;
  std::string epochs_path;
  std::string out_dir;
  bool force = false;
  double sigma_ns = 0.5;
  double signal_halfwidth = 1.0;
  double background_exclusion = 3.0;
  double interval_s = 5.0;
  double subdivisions = 1e7;
  double resolution_ps = 81.0;
  double slot_period_s = 0.1;
  int correct_channel = 0;
  HistogramOptions hist;
};

int run_analyze(const AnalyzeOptions& opt) {
  TimeTagStream tags =
      load_time_tags(opt.timetags_path, opt.resolution_ps * 1e-12);
  std::vector<double> epochs = load_epochs(opt.epochs_path);

  GateConfig gate;
  gate.sigma = opt.sigma_ns * 1e-9;
  gate.signal_halfwidth = opt.signal_halfwidth;
  gate.background_exclusion = opt.background_exclusion;

  SlotSchedule schedule;
  schedule.slot_period = opt.slot_period_s;
  schedule.tx_end = opt.slot_period_s / 2.0;
  schedule.rx_start = opt.slot_period_s / 2.0;
  schedule.rx_end = opt.slot_period_s;

  auto subdivisions = static_cast<std::uint64_t>(opt.subdivisions);
  StreamAnalysis analysis =
      analyze_stream(tags, epochs, gate, opt.interval_s, subdivisions,
                     schedule, opt.correct_channel);

  fs::create_directories(opt.out_dir);
  auto path = [&](const char* name) {
    return (fs::path(opt.out_dir) / name).string();
  };
  check_overwrite(path("report.csv"), opt.force);
  check_overwrite(path("histogram.csv"), opt.force);

  textio::atomic_write(path("report.csv"),
                       interval_report_csv(analysis.intervals, false, nullptr));
  ArrivalGrid grid(epochs, subdivisions);
  OffsetHistogram hist = offset_histogram(
      tags, grid, opt.hist.bin_ns * 1e-9, opt.hist.half_range_ns * 1e-9);
  textio::atomic_write(path("histogram.csv"), histogram_csv(hist));

  std::size_t qualified = 0;
  std::uint64_t n_corr = 0;
  std::uint64_t n_wrong = 0;
  for (const auto& r : analysis.intervals) {
    if (!r.qualified) continue;
    ++qualified;
    n_corr += r.n_corr;
    n_wrong += r.n_wrong;
  }
  std::cout << analysis.intervals.size() << " intervals, " << qualified
            << " qualified, " << n_corr << " correct / " << n_wrong
            << " wrong counts";
  if (qualified > 0) {
    std::cout << ", QBER "
              << textio::format_percent(qber_bayesian(
                     static_cast<double>(n_corr), static_cast<double>(n_wrong)));
  }
  std::cout << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// linkbudget

struct LinkBudgetOptions {
  std::string catalog_path;
  std::string satellite;
  std::string pass_file;
  double max_elevation_deg = 90.0;
  double sample_period_s = 1.0;
  double duration_s = 0.0;
  std::string out_path;
  bool force = false;
  double power_w = 0.11;
  double pulse_rate_hz = 1e8;
  double wavelength_nm = 532.0;
  double mu_tx = 0.0;  // overrides power/wavelength when > 0
  double eta_tx = 0.1;
  double gain_t = 1.1e9;
  double t_zenith = 0.87;
  double telescope_area_m2 = 1.73;
  double eta_rx = 0.13;
  double eta_det = 0.1;
};

int run_linkbudget(const LinkBudgetOptions& opt) {
  auto catalog = load_catalog(opt.catalog_path);
  const SatelliteSpec& sat = find_satellite(catalog, opt.satellite);

  LinkBudgetParams base;
  base.mu_tx = opt.mu_tx > 0.0
                   ? opt.mu_tx
                   : mu_tx_from_power(opt.power_w, opt.pulse_rate_hz,
                                      opt.wavelength_nm * 1e-9);
  base.eta_tx = opt.eta_tx;
  base.gain_t = opt.gain_t;
  base.t_zenith = opt.t_zenith;
  base.telescope_area = opt.telescope_area_m2;
  base.eta_rx = opt.eta_rx;
  base.eta_det = opt.eta_det;
  base.cross_section = sat.cross_section;
  base.ccr_reflectivity = sat.ccr_reflectivity;
  base.ccr_effective_area = sat.ccr_effective_area;

  PassGeometry pass =
      opt.pass_file.empty()
          ? circular_pass(sat.altitude,
                          constants::deg_to_rad(opt.max_elevation_deg),
                          opt.sample_period_s, opt.duration_s)
          : load_pass(opt.pass_file);

  check_overwrite(opt.out_path, opt.force);

  std::string csv =
      "elevation_deg,slant_range_m,airmass,t_a,transmissivity,"
      "transmissivity_db,mu_rx,expected_rate_hz\n";
  std::size_t omitted = 0;
  for (const auto& s : pass.samples()) {
    if (s.elevation <= constants::kElevationFloor) {
      ++omitted;
      continue;
    }
    LinkBudgetParams p = base;
    p.slant_range = s.slant_range;
    p.airmass = airmass_from_elevation(s.elevation);
    double t_a = atmospheric_transmissivity(p.airmass, p.t_zenith);
    double transmissivity = downlink_transmissivity(p);
    double mu_rx = radar_mu_rx(p);
    // Exact shortest round-trip formatting so derived identities (e.g. the
    // dB column against the linear one) survive re-parsing.
    csv += textio::format_exact(constants::rad_to_deg(s.elevation));
    csv += ',' + textio::format_exact(s.slant_range);
    csv += ',' + textio::format_exact(p.airmass);
    csv += ',' + textio::format_exact(t_a);
    csv += ',' + textio::format_exact(transmissivity);
    csv += ',' + textio::format_exact(attenuation_db(transmissivity));
    csv += ',' + textio::format_exact(mu_rx);
    csv += ',' + textio::format_exact(mu_rx * opt.pulse_rate_hz);
    csv += '\n';
  }
  textio::atomic_write(opt.out_path, csv);
  if (omitted > 0) {
    std::cerr << "warning: omitted " << omitted
              << " samples below the 5 degree elevation floor\n";
  }

  LinkBudgetParams zenith = base;
  zenith.slant_range = sat.altitude;
  zenith.airmass = 1.0;
  double zt = downlink_transmissivity(zenith);
  std::cout << "zenith pass over " << sat.name << ": R = " << g9(sat.altitude)
            << " m, transmissivity = " << g9(zt) << " ("
            << g9(attenuation_db(zt)) << " dB), mu_rx = "
            << g9(radar_mu_rx(zenith)) << ", expected rate = "
            << g9(radar_mu_rx(zenith) * opt.pulse_rate_hz) << " Hz\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// polcheck

struct PolCheckOptions {
  double az_deg = 0.0;
  double el_deg = 45.0;
  double fr_deg = 0.0;
  std::string state = "H";
};

PolarizationState parse_state(const std::string& spec) {
  if (spec == "H") return PolarizationState::horizontal();
  if (spec == "V") return PolarizationState::vertical();
  if (spec == "D") return PolarizationState::diagonal();
  if (spec == "A") return PolarizationState::antidiagonal();
  if (spec == "L") return PolarizationState::circular_left();
  if (spec == "R") return PolarizationState::circular_right();
  auto fields = textio::split(spec, ',');
  if (fields.size() != 4) {
    throw InvalidArgumentError(
        "state must be one of H,V,D,A,L,R or four comma-separated reals "
        "reH,imH,reV,imV");
  }
  double re_h = textio::parse_double(fields[0], 0);
  double im_h = textio::parse_double(fields[1], 0);
  double re_v = textio::parse_double(fields[2], 0);
  double im_v = textio::parse_double(fields[3], 0);
  return {Complex(re_h, im_h), Complex(re_v, im_v)};
}

std::string state_string(const PolarizationState& s) {
  return "(" + g9(s.amplitude_h().real()) +
         (s.amplitude_h().imag() < 0 ? "" : "+") + g9(s.amplitude_h().imag()) +
         "i, " + g9(s.amplitude_v().real()) +
         (s.amplitude_v().imag() < 0 ? "" : "+") + g9(s.amplitude_v().imag()) +
         "i)";
}

int run_polcheck(const PolCheckOptions& opt) {
  PolarizationState input = parse_state(opt.state);
  TelescopePose pose{constants::deg_to_rad(opt.az_deg),
                     constants::deg_to_rad(opt.el_deg)};
  double fr = constants::deg_to_rad(opt.fr_deg);

  PolarizationState received = round_trip(pose, fr, input);
  PolarizationState predicted =
      (rotation(2.0 * fr) * mirror_flip()).apply(input);
  double f = fidelity(predicted, received);

  std::cout << "input:     " << state_string(input) << "\n";
  std::cout << "received:  " << state_string(received) << "\n";
  std::cout << "predicted: " << state_string(predicted) << "\n";
  std::cout << "fidelity:  " << g9(f) << "\n";
  return f >= 1.0 - 1e-9 ? kExitOk : kExitRuntime;
}

// ---------------------------------------------------------------------------
// pass-gen

struct PassGenOptions {
  double altitude_km = 691.0;
  double max_elevation_deg = 90.0;
  double sample_period_s = 0.1;
  double duration_s = 0.0;
  std::string out_path;
  bool force = false;
};

int run_pass_gen(const PassGenOptions& opt) {
  check_overwrite(opt.out_path, opt.force);
  PassGeometry pass = circular_pass(
      opt.altitude_km * 1000.0, constants::deg_to_rad(opt.max_elevation_deg),
      opt.sample_period_s, opt.duration_s);
  save_pass(pass, opt.out_path);
  std::cout << pass.size() << " samples, slant range "
            << g9(pass.range_at(pass.start_time() + pass.duration() / 2.0))
            << " m at culmination\n";
  return kExitOk;
}

void add_histogram_flags(CLI::App* cmd, HistogramOptions& hist) {
  cmd->add_option("--hist-bin-ns", hist.bin_ns, "Histogram bin width [ns]");
  cmd->add_option("--hist-half-range-ns", hist.half_range_ns,
                  "Histogram half range around the expected arrival [ns]");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Retroreflector satellite quantum-link simulator and analyzer"};
  app.require_subcommand(1);

  SimulateOptions sim;
  auto* sim_cmd = app.add_subcommand(
      "simulate", "Simulate a full downlink session from a config file");
  sim_cmd->add_option("--config", sim.config_path, "Session config file")
      ->required();
  sim_cmd->add_option("--out", sim.out_dir, "Output directory")->required();
  sim_cmd->add_flag("--force", sim.force, "Overwrite existing outputs");
  add_histogram_flags(sim_cmd, sim.hist);

  AnalyzeOptions ana;
  auto* ana_cmd = app.add_subcommand(
      "analyze", "Gate and analyze a time-tag file against ranging epochs");
  ana_cmd->add_option("--timetags", ana.timetags_path, "Time-tag CSV")
      ->required();
  ana_cmd->add_option("--epochs", ana.epochs_path, "Ranging epoch file")
      ->required();
  ana_cmd->add_option("--out", ana.out_dir, "Output directory")->required();
  ana_cmd->add_flag("--force", ana.force, "Overwrite existing outputs");
  ana_cmd->add_option("--sigma-ns", ana.sigma_ns, "Detection accuracy [ns]");
  ana_cmd->add_option("--signal-halfwidth", ana.signal_halfwidth,
                      "Signal gate halfwidth in sigmas");
  ana_cmd->add_option("--background-exclusion", ana.background_exclusion,
                      "Background exclusion in sigmas");
  ana_cmd->add_option("--interval-s", ana.interval_s,
                      "Analysis interval length [s]");
  ana_cmd->add_option("--subdivisions", ana.subdivisions,
                      "Subdivisions between consecutive epochs");
  ana_cmd->add_option("--resolution-ps", ana.resolution_ps,
                      "Time tagger resolution [ps]");
  ana_cmd->add_option("--slot-period-s", ana.slot_period_s,
                      "Ranging slot period [s]");
  ana_cmd->add_option("--correct-channel", ana.correct_channel,
                      "Channel carrying the expected polarization (0 or 1)");
  add_histogram_flags(ana_cmd, ana.hist);

  LinkBudgetOptions lb;
  auto* lb_cmd = app.add_subcommand(
      "linkbudget", "Elevation-resolved link budget over a pass");
  lb_cmd->add_option("--catalog", lb.catalog_path, "Satellite catalog CSV")
      ->required();
  lb_cmd->add_option("--satellite", lb.satellite, "Catalog entry name")
      ->required();
  lb_cmd->add_option("--pass-file", lb.pass_file,
                     "Pass CSV (otherwise a synthetic pass is generated)");
  lb_cmd->add_option("--max-elevation-deg", lb.max_elevation_deg,
                     "Culmination elevation for the synthetic pass");
  lb_cmd->add_option("--sample-period-s", lb.sample_period_s,
                     "Synthetic pass sampling period");
  lb_cmd->add_option("--duration-s", lb.duration_s,
                     "Synthetic pass duration (0 = full above-floor pass)");
  lb_cmd->add_option("--out", lb.out_path, "Output CSV path")->required();
  lb_cmd->add_flag("--force", lb.force, "Overwrite existing outputs");
  lb_cmd->add_option("--power-w", lb.power_w, "Average transmit power [W]");
  lb_cmd->add_option("--pulse-rate-hz", lb.pulse_rate_hz,
                     "Pulse repetition rate [Hz]");
  lb_cmd->add_option("--wavelength-nm", lb.wavelength_nm, "Wavelength [nm]");
  lb_cmd->add_option("--mu-tx", lb.mu_tx,
                     "Photons per pulse at the source (overrides --power-w)");
  lb_cmd->add_option("--eta-tx", lb.eta_tx, "Transmit optics efficiency");
  lb_cmd->add_option("--gain-t", lb.gain_t, "Transmitter gain");
  lb_cmd->add_option("--t-zenith", lb.t_zenith, "Zenith transmissivity");
  lb_cmd->add_option("--telescope-area-m2", lb.telescope_area_m2,
                     "Receive telescope area [m^2]");
  lb_cmd->add_option("--eta-rx", lb.eta_rx, "Receive optics efficiency");
  lb_cmd->add_option("--eta-det", lb.eta_det, "Detector efficiency");

  PolCheckOptions pol;
  auto* pol_cmd = app.add_subcommand(
      "polcheck",
      "Round-trip polarization check against the rotation-by-2phi rule");
  pol_cmd->add_option("--az-deg", pol.az_deg, "Telescope azimuth [deg]");
  pol_cmd->add_option("--el-deg", pol.el_deg, "Telescope elevation [deg]");
  pol_cmd->add_option("--fr-deg", pol.fr_deg, "Faraday rotator angle [deg]");
  pol_cmd->add_option("--state", pol.state,
                      "Input state: H,V,D,A,L,R or reH,imH,reV,imV");

  PassGenOptions pg;
  auto* pg_cmd =
      app.add_subcommand("pass-gen", "Generate a synthetic pass CSV");
  pg_cmd->add_option("--altitude-km", pg.altitude_km, "Orbit altitude [km]");
  pg_cmd->add_option("--max-elevation-deg", pg.max_elevation_deg,
                     "Culmination elevation [deg]");
  pg_cmd->add_option("--sample-period-s", pg.sample_period_s,
                     "Sampling period [s]");
  pg_cmd->add_option("--duration-s", pg.duration_s,
                     "Pass duration (0 = full above-floor pass)");
  pg_cmd->add_option("--out", pg.out_path, "Output pass CSV")->required();
  pg_cmd->add_flag("--force", pg.force, "Overwrite existing outputs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*sim_cmd) return run_simulate(sim);
    if (*ana_cmd) return run_analyze(ana);
    if (*lb_cmd) return run_linkbudget(lb);
    if (*pol_cmd) return run_polcheck(pol);
    if (*pg_cmd) return run_pass_gen(pg);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const InvalidArgumentError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const OutOfModelError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}
