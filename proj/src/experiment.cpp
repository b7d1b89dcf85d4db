#include "hawking/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace hawking {

using nlohmann::json;

namespace {

std::string sanitize(std::string s) {
  std::replace(s.begin(), s.end(), ',', ';');
  std::replace(s.begin(), s.end(), '\n', ' ');
  std::replace(s.begin(), s.end(), '"', '\'');
  return s;
}

double nan() { return std::numeric_limits<double>::quiet_NaN(); }

// Tail-mass check with the offending config field in the message.
void place(const WavePacket& w, double x_b, double x_w, const std::string& field,
           std::vector<std::string>& warnings) {
  try {
    if (auto msg = check_placement(w, x_b, x_w)) warnings.push_back(field + ": " + *msg);
  } catch (const ValidationError& e) {
    throw ValidationError(field, e.what());
  }
}

ResultTable spectrum_table() {
  return ResultTable("spectrum", 1,
                     {{"series", "-"},
                      {"branch", "-"},
                      {"omega", "1/time"},
                      {"k0", "1/a"},
                      {"x0", "a"},
                      {"t_f", "time"},
                      {"occupation", "1"},
                      {"occupation_t0", "1"},
                      {"theory", "1"},
                      {"quality", "-"}});
}

ResultTable fit_table() {
  return ResultTable("spectrum_fit", 1,
                     {{"series", "-"},
                      {"T_fit", "energy"},
                      {"T_theory", "energy"},
                      {"relative_error", "1"},
                      {"residual_max", "1"},
                      {"theory_residual_max", "1"},
                      {"omega_min", "1/time"},
                      {"omega_max", "1/time"},
                      {"n_used", "1"},
                      {"orientation", "-"},
                      {"quality", "-"}});
}

void add_fit_row(ResultTable& t, const std::string& series, const std::optional<HawkingFit>& fit,
                 const std::string& error, double kappa) {
  if (fit) {
    t.add_row({series, fit->T_fit, fit->T_theory, fit->relative_error(), fit->residual_max,
               fit->theory_residual_max, fit->omega_min, fit->omega_max,
               static_cast<long long>(fit->n_used), to_string(fit->orientation), std::string("ok")});
  } else {
    t.add_row({series, nan(), kappa / (2.0 * std::numbers::pi), nan(), nan(), nan(), nan(), nan(),
               0LL, std::string("-"), "fit_failed: " + sanitize(error)});
  }
}

json fit_json(const std::optional<HawkingFit>& fit, const std::string& error) {
  if (!fit) return {{"status", "failed"}, {"error", error}};
  return {{"status", "ok"},
          {"T_fit", fit->T_fit},
          {"T_theory", fit->T_theory},
          {"relative_error", fit->relative_error()},
          {"residual_max", fit->residual_max},
          {"theory_residual_max", fit->theory_residual_max},
          {"omega_min", fit->omega_min},
          {"omega_max", fit->omega_max},
          {"n_used", fit->n_used},
          {"orientation", to_string(fit->orientation)}};
}

using CarrierFn = std::function<double(double, Branch)>;
using QuenchAt = std::function<Quench(double)>;

struct Horizons {
  double x_b = 0.0;
  double x_w = 0.0;
  bool check = true;
};

SpectrumSeriesResult measure_series(const ExperimentConfig& cfg, std::size_t index, double j_b,
                                    const Horizons& horizons, const CarrierFn& carrier,
                                    const QuenchAt& quench_at,
                                    const std::shared_ptr<const GaussianState>& ground, double kappa,
                                    std::vector<std::string>& warnings) {
  const SpectrumSeries& s = cfg.spectrum[index];
  const std::string field = "spectrum[" + std::to_string(index) + "].x0_from_horizon";
  SpectrumSeriesResult r;
  r.series = s;
  std::vector<WavePacket> packets;
  const double x0 = j_b + s.x0_from_horizon;
  bool warned = false;
  for (double w : cfg.omega.points()) {
    const double k0 = carrier(w, s.branch);
    packets.push_back(make_packet(x0, k0, cfg.sigma, cfg.lattice, w));
    r.k0.push_back(k0);
    if (horizons.check && !warned) {
      const std::size_t before = warnings.size();
      place(packets.back(), horizons.x_b, horizons.x_w, field, warnings);
      warned = warnings.size() > before;
    }
  }
  const Quench q = quench_at(s.t_f);
  const auto occ = occupations(q, packets, cfg.threads);
  r.initial = occupations(Quench::frozen(ground), packets, cfg.threads);
  for (std::size_t i = 0; i < packets.size(); ++i) {
    r.points.push_back({packets[i].omega, occ[i], s.t_f, x0});
    const double w = packets[i].omega;
    r.theory.push_back(fermi_dirac(s.branch == Branch::inside_zero ? -w : w, kappa));
  }
  try {
    r.fit = fit_hawking_temperature(r.points, kappa);
  } catch (const FitError& e) {
    r.fit_error = e.what();
  }
  return r;
}

void spectrum_tables(ExperimentOutput& out, const std::vector<SpectrumSeriesResult>& spectra,
                     double kappa, bool placement_warned) {
  ResultTable table = spectrum_table();
  ResultTable fits = fit_table();
  json fit_summary = json::object();
  for (const auto& r : spectra) {
    for (std::size_t i = 0; i < r.points.size(); ++i) {
      table.add_row({r.series.name, to_string(r.series.branch), r.points[i].omega, r.k0[i],
                     r.points[i].x0, r.series.t_f, r.points[i].occupation, r.initial[i], r.theory[i],
                     std::string(placement_warned ? "placement_warning" : "ok")});
    }
    add_fit_row(fits, r.series.name, r.fit, r.fit_error, kappa);
    json f = fit_json(r.fit, r.fit_error);
    f["max_drift"] = r.max_drift();
    fit_summary[r.series.name] = f;
  }
  out.tables.emplace_back("spectrum", std::move(table));
  out.tables.emplace_back("spectrum_fit", std::move(fits));
  out.summary["spectrum"] = fit_summary;
}

FloquetKinematics uniform_kinematics(const ExperimentConfig& cfg) {
  FloquetKinematics kin;
  kin.v_floquet = cfg.lattice.floquet_velocity();
  kin.v_outside = kin.v_inside = cfg.uniform_hopping * kin.v_floquet;
  kin.v_out = kin.v_outside - kin.v_floquet;
  kin.v_in = kin.v_floquet - kin.v_inside;
  if (kin.v_outside > kin.v_floquet) {
    kin.k_star = floquet_doubler_momentum(kin.v_outside, kin.v_floquet);
    kin.v_star = std::abs(kin.v_outside * std::cos(kin.k_star) - kin.v_floquet);
  }
  return kin;
}

long whole_steps(double t, double dt) { return std::lround(t / dt); }

std::vector<std::string> floquet_warnings(const FloquetSystem& sys) {
  std::vector<std::string> out = config_warnings(sys.cfg);
  if (sys.cfg.profile_kind == ProfileKind::uniform) {
    out.push_back("profile.kind: uniform hopping has no horizon; occupations should stay at their t = 0 values");
  }
  return out;
}

}  // namespace

const ResultTable& ExperimentOutput::table(const std::string& suffix) const {
  for (const auto& [name, t] : tables) {
    if (name == suffix) return t;
  }
  throw std::out_of_range("no table " + suffix);
}

double SpectrumSeriesResult::max_drift() const {
  double m = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    m = std::max(m, std::abs(points[i].occupation - initial[i]));
  }
  return m;
}

FloquetSystem prepare_floquet(const ExperimentConfig& cfg) {
  if (cfg.model != Model::floquet) throw ValidationError("model", "expected a floquet config");
  validate(cfg);
  FloquetSystem sys;
  sys.cfg = cfg;
  sys.x_b = floquet_black_hole_position(cfg.floquet, cfg.lattice);
  sys.x_w = floquet_white_hole_position(cfg.floquet, cfg.lattice);
  sys.j_b = static_cast<int>(std::floor(sys.x_b));
  sys.kappa = surface_gravity_floquet(cfg.floquet, cfg.lattice).kappa;
  if (cfg.profile_kind == ProfileKind::uniform) {
    sys.profile = uniform_profile(cfg.lattice.n_sites, cfg.uniform_hopping * cfg.lattice.floquet_velocity());
    sys.kin = uniform_kinematics(cfg);
  } else {
    sys.profile = floquet_hopping_profile(cfg.floquet, cfg.lattice);
    sys.kin = floquet_kinematics(cfg.floquet, cfg.lattice);
  }
  sys.step = std::make_shared<const StepOperator>(floquet_step(sys.profile, cfg.lattice));
  sys.ground = std::make_shared<const GaussianState>(minkowski_ground_state(cfg.lattice));
  return sys;
}

FloquetQuenchResult run_floquet_quench(const ExperimentConfig& cfg) {
  return run_floquet_quench(prepare_floquet(cfg));
}

FloquetQuenchResult run_floquet_quench(const FloquetSystem& sys) {
  const ExperimentConfig& cfg = sys.cfg;
  FloquetQuenchResult out;
  out.kappa = sys.kappa;
  out.warnings = floquet_warnings(sys);
  const double dt = cfg.lattice.dt;
  const Horizons horizons{sys.x_b, sys.x_w, cfg.profile_kind == ProfileKind::tanh};
  auto carrier = [&](double w, Branch b) { return carrier_momentum(w, b, sys.kin); };
  auto quench_at = [&](double t) {
    return Quench::stroboscopic(sys.ground, sys.step, whole_steps(t, dt), dt);
  };

  const std::size_t warnings_before = out.warnings.size();
  for (std::size_t i = 0; i < cfg.spectrum.size(); ++i) {
    out.spectra.push_back(measure_series(cfg, i, sys.j_b, horizons, carrier, quench_at, sys.ground,
                                         sys.kappa, out.warnings));
  }
  spectrum_tables(out, out.spectra, sys.kappa, out.warnings.size() > warnings_before);
  out.summary["kappa"] = sys.kappa;
  out.summary["kinematics"] = {{"v_out", sys.kin.v_out},   {"v_in", sys.kin.v_in},
                               {"k_star", sys.kin.k_star}, {"v_star", sys.kin.v_star},
                               {"x_b", sys.x_b},           {"x_w", sys.x_w}};

  const auto& cc = cfg.floquet_correlations;
  if (cc.enabled) {
    const auto omegas = cc.omega.points();
    const double sigma_out = cfg.sigma * std::abs(sys.kin.v_in / sys.kin.v_out);
    const double expected = cc.j_in * sys.kin.v_out / sys.kin.v_in;
    const Quench q = quench_at(cc.t_f);
    std::vector<CorrelationScan> scans(omegas.size());
    std::vector<WavePacket> inner;
    for (double w : omegas) {
      inner.push_back(make_packet(sys.j_b - cc.j_in, carrier(w, Branch::inside_zero), cfg.sigma,
                                  cfg.lattice, w));
    }
    if (horizons.check) place(inner.front(), sys.x_b, sys.x_w, "correlations.j_in", out.warnings);
    parallel_chunks(static_cast<int>(omegas.size()), cfg.threads, [&](int i) {
      const double w = omegas[i];
      const WavePacket base =
          make_packet(sys.j_b, carrier(w, Branch::outside_zero), sigma_out, cfg.lattice, w);
      scans[i] = correlation_scan(q, inner[i], base, cc.scan_first, cc.scan_last);
    });
    ResultTable summary("correlations", 1,
                        {{"omega", "1/time"},
                         {"j_in", "a"},
                         {"argmax_offset", "a"},
                         {"expected_offset", "a"},
                         {"relative_offset_error", "1"},
                         {"c_max", "1"},
                         {"theory", "1"},
                         {"difference", "1"}});
    ResultTable scan_table("correlation_scan", 1,
                           {{"omega", "1/time"}, {"offset", "a"}, {"magnitude", "1"}});
    double worst_offset = 0.0;
    double worst_magnitude = 0.0;
    for (std::size_t i = 0; i < omegas.size(); ++i) {
      CorrelationPoint p;
      p.omega = omegas[i];
      p.argmax_offset = scans[i].argmax_offset;
      p.expected_offset = expected;
      p.magnitude = scans[i].max_magnitude;
      p.theory = pair_correlation(omegas[i], sys.kappa);
      out.correlations.push_back(p);
      const double rel = p.argmax_offset / expected - 1.0;
      worst_offset = std::max(worst_offset, std::abs(rel));
      worst_magnitude = std::max(worst_magnitude, std::abs(p.magnitude - p.theory));
      summary.add_row({p.omega, static_cast<long long>(cc.j_in), static_cast<long long>(p.argmax_offset),
                       expected, rel, p.magnitude, p.theory, p.magnitude - p.theory});
      for (std::size_t k = 0; k < scans[i].offsets.size(); ++k) {
        scan_table.add_row({p.omega, static_cast<long long>(scans[i].offsets[k]), scans[i].magnitudes[k]});
      }
    }
    out.tables.emplace_back("correlations", std::move(summary));
    out.tables.emplace_back("correlation_scan", std::move(scan_table));
    out.summary["correlations"] = {{"expected_offset", expected},
                                   {"max_relative_offset_error", worst_offset},
                                   {"max_magnitude_difference", worst_magnitude}};
  }

  const auto& ec = cfg.entropy;
  if (ec.enabled) {
    EntropyResult e;
    const int j1 = sys.j_b + ec.j1_from_horizon;
    const int j2 = sys.j_b + ec.j2_from_horizon;
    e.curve = entropy_curve(*sys.ground, *sys.step, j1, j2, ec.steps, ec.stride, dt);
    e.window_start = ec.window_start;
    // Crossing time of the fastest inside-moving mode: afterwards the interval
    // holds its final share of partners and the entropy saturates.
    e.window_end = ec.window_end ? *ec.window_end
                                 : (j2 - j1 + 1) / (sys.kin.v_floquet + sys.kin.v_inside);
    std::vector<double> ts;
    std::vector<double> ss;
    for (std::size_t i = 0; i < e.curve.times.size(); ++i) {
      if (e.curve.times[i] >= e.window_start && e.curve.times[i] <= e.window_end) {
        ts.push_back(e.curve.times[i]);
        ss.push_back(e.curve.entropies[i]);
      }
    }
    e.rate_theory = entropy_rate_theory(sys.kappa);
    ResultTable curve("entropy", 1, {{"time", "time"}, {"entropy", "nats"}, {"in_window", "1"}});
    for (std::size_t i = 0; i < e.curve.times.size(); ++i) {
      const bool in = e.curve.times[i] >= e.window_start && e.curve.times[i] <= e.window_end;
      curve.add_row({e.curve.times[i], e.curve.entropies[i], static_cast<long long>(in)});
    }
    ResultTable fit("entropy_fit", 1,
                    {{"window_start", "time"},
                     {"window_end", "time"},
                     {"points", "1"},
                     {"slope", "nats/time"},
                     {"intercept", "nats"},
                     {"r_squared", "1"},
                     {"rate_theory", "nats/time"},
                     {"relative_rate_difference", "1"},
                     {"quality", "-"}});
    if (ts.size() >= 3) {
      e.fit = linear_fit(ts, ss);
      fit.add_row({e.window_start, e.window_end, static_cast<long long>(ts.size()), e.fit.slope,
                   e.fit.intercept, e.fit.r_squared, e.rate_theory, e.fit.slope / e.rate_theory - 1.0,
                   std::string("ok")});
    } else {
      e.fit = {nan(), nan(), nan()};
      fit.add_row({e.window_start, e.window_end, static_cast<long long>(ts.size()), nan(), nan(), nan(),
                   e.rate_theory, nan(), std::string("too_few_points")});
      out.warnings.push_back("entropy: fewer than 3 samples in the growth window");
    }
    out.summary["entropy"] = {{"window_start", e.window_start}, {"window_end", e.window_end},
                              {"slope", e.fit.slope},           {"r_squared", e.fit.r_squared},
                              {"rate_theory", e.rate_theory}};
    out.tables.emplace_back("entropy", std::move(curve));
    out.tables.emplace_back("entropy_fit", std::move(fit));
    out.entropy = std::move(e);
  }
  return out;
}

LocalSystem prepare_local(const ExperimentConfig& cfg) {
  if (cfg.model != Model::local) throw ValidationError("model", "expected a local config");
  validate(cfg);
  LocalSystem sys;
  sys.cfg = cfg;
  sys.profile = local_hopping_profile(cfg.local, cfg.lattice);
  sys.kin = {1.0, cfg.local.mu};
  sys.kappa = surface_gravity_local(cfg.local);
  sys.evolution = std::make_shared<const SpectralEvolution>(build_local_hamiltonian(sys.profile, cfg.local.mu));
  sys.ground = std::make_shared<const GaussianState>(minkowski_ground_state(cfg.lattice));
  return sys;
}

LocalQuenchResult run_local_quench(const ExperimentConfig& cfg) {
  return run_local_quench(prepare_local(cfg));
}

LocalQuenchResult run_local_quench(const LocalSystem& sys) {
  const ExperimentConfig& cfg = sys.cfg;
  LocalQuenchResult out;
  out.kappa = sys.kappa;
  out.warnings = config_warnings(cfg);
  const Horizons horizons{static_cast<double>(cfg.local.j_b), static_cast<double>(cfg.local.j_w), true};
  auto carrier = [&](double w, Branch b) { return carrier_momentum(w, b, sys.kin); };
  auto quench_at = [&](double t) { return Quench::continuous(sys.ground, sys.evolution, t); };

  const std::size_t warnings_before = out.warnings.size();
  for (std::size_t i = 0; i < cfg.spectrum.size(); ++i) {
    out.spectra.push_back(measure_series(cfg, i, cfg.local.j_b, horizons, carrier, quench_at,
                                         sys.ground, sys.kappa, out.warnings));
  }
  spectrum_tables(out, out.spectra, sys.kappa, out.warnings.size() > warnings_before);
  out.summary["kappa"] = sys.kappa;

  // Same omegas through the stationary kink solution.
  for (const auto& r : out.spectra) {
    if (r.series.branch != Branch::outside_zero) continue;
    const KinkGeometry geometry = kink_geometry(cfg.local.kappa_hat, 1.0);
    std::vector<double> energies;
    for (const auto& p : r.points) energies.push_back(p.omega);
    const auto points = scattering_spectrum(geometry, cfg.local.mu, energies);
    ResultTable table("cross_method", 1,
                      {{"omega", "1/time"},
                       {"quench", "1"},
                       {"scattering", "1"},
                       {"difference", "1"},
                       {"quality", "-"}});
    for (std::size_t i = 0; i < points.size(); ++i) {
      const double n = points[i].occupation();
      out.scattering_occupation.push_back(n);
      const double d = r.points[i].occupation - n;
      if (std::isfinite(d)) out.cross_method_max = std::max(out.cross_method_max, std::abs(d));
      table.add_row({r.points[i].omega, r.points[i].occupation, n, d,
                     std::string(points[i].solution ? "ok" : "solver_failed: " + sanitize(points[i].failure))});
    }
    out.tables.emplace_back("cross_method", std::move(table));
    out.summary["cross_method"] = {{"series", r.series.name}, {"max_difference", out.cross_method_max}};
    break;
  }

  const auto& cc = cfg.local_correlations;
  if (cc.enabled) {
    const auto omegas = cc.omega.points();
    const Quench q = quench_at(cc.t_f);
    const double x_in = cfg.local.j_b + cc.in_from_horizon;
    const double x_out = cfg.local.j_b + cc.out_from_horizon;
    out.correlations.resize(omegas.size());
    std::vector<WavePacket> ins;
    std::vector<WavePacket> outs;
    for (double w : omegas) {
      ins.push_back(make_packet(x_in, carrier(w, Branch::inside_zero), cfg.sigma, cfg.lattice, w));
      outs.push_back(make_packet(x_out, carrier(w, Branch::outside_zero), cfg.sigma, cfg.lattice, w));
    }
    place(ins.front(), horizons.x_b, horizons.x_w, "correlations.in_from_horizon", out.warnings);
    place(outs.front(), horizons.x_b, horizons.x_w, "correlations.out_from_horizon", out.warnings);
    parallel_chunks(static_cast<int>(omegas.size()), cfg.threads, [&](int i) {
      out.correlations[i] = {omegas[i], std::abs(cross_correlation(q, ins[i], outs[i])),
                             pair_correlation(omegas[i], sys.kappa)};
    });
    ResultTable table("pair_correlations", 1,
                      {{"omega", "1/time"},
                       {"x_in", "a"},
                       {"x_out", "a"},
                       {"t_f", "time"},
                       {"c_abs", "1"},
                       {"theory", "1"},
                       {"difference", "1"}});
    double worst = 0.0;
    for (const auto& p : out.correlations) {
      table.add_row({p.omega, x_in, x_out, cc.t_f, p.magnitude, p.theory, p.magnitude - p.theory});
      worst = std::max(worst, std::abs(p.magnitude - p.theory));
    }
    out.tables.emplace_back("correlations", std::move(table));
    out.summary["correlations"] = {{"max_magnitude_difference", worst}};
  }
  return out;
}

ScatteringResult run_scattering(const ExperimentConfig& cfg) {
  if (cfg.model != Model::scattering) throw ValidationError("model", "expected a scattering config");
  validate(cfg);
  const auto& sc = cfg.scattering;
  ScatteringResult out;
  out.warnings = config_warnings(cfg);
  out.kappa = sc.kappa_hat * sc.t;
  const KinkGeometry geometry = kink_geometry(sc.kappa_hat, sc.t);
  const auto energies = sc.energy.points();
  out.points.resize(energies.size());
  // One energy per chunk; solve_recursion is independent per energy.
  parallel_chunks(static_cast<int>(energies.size()), cfg.threads, [&](int i) {
    std::vector<double> one{energies[i]};
    out.points[i] = scattering_spectrum(geometry, sc.mu, one).front();
  });

  ResultTable table("spectrum_TE", 1,
                    {{"E", "energy"},
                     {"q2", "1/a"},
                     {"k1", "1/a"},
                     {"k2", "1/a"},
                     {"AL2", "1"},
                     {"AR2", "1"},
                     {"T", "1"},
                     {"R", "1"},
                     {"N", "1"},
                     {"theory", "1"},
                     {"flux_residual", "1"},
                     {"current_residual", "1"},
                     {"quality", "-"}});
  std::vector<SpectrumPoint> good;
  for (const auto& p : out.points) {
    const double theory = fermi_dirac(p.E, out.kappa);
    if (!p.solution) {
      table.add_row({p.E, nan(), nan(), nan(), nan(), nan(), nan(), nan(), nan(), theory, nan(), nan(),
                     "failed: " + sanitize(p.failure)});
      continue;
    }
    const auto& s = *p.solution;
    const auto tr = transmission_reflection(s.A_L, s.A_R);
    out.max_flux_residual = std::max(out.max_flux_residual, s.flux_residual);
    out.max_current_residual = std::max(out.max_current_residual, s.current_residual);
    table.add_row({p.E, s.q2, s.k1, s.k2, std::norm(s.A_L), std::norm(s.A_R), tr.T, tr.R,
                   p.occupation(), theory, s.flux_residual, s.current_residual, std::string("ok")});
    good.push_back({p.E, p.occupation(), 0.0, 0.0});
  }
  try {
    out.fit = fit_hawking_temperature(good, out.kappa);
  } catch (const FitError& e) {
    out.fit_error = e.what();
  }
  ResultTable fits = fit_table();
  add_fit_row(fits, "scattering", out.fit, out.fit_error, out.kappa);
  out.tables.emplace_back("spectrum_TE", std::move(table));
  out.tables.emplace_back("spectrum_fit", std::move(fits));
  out.summary["kappa"] = out.kappa;
  out.summary["fit"] = fit_json(out.fit, out.fit_error);
  out.summary["max_flux_residual"] = out.max_flux_residual;
  out.summary["max_current_residual"] = out.max_current_residual;
  out.summary["failed_points"] = out.points.size() - good.size();
  out.summary["geometry"] = {{"j_L", geometry.j_L}, {"j_b", geometry.j_b}, {"j_R", geometry.j_R}};
  return out;
}

SnapshotResult run_snapshots(const ExperimentConfig& cfg) {
  if (cfg.model == Model::scattering) {
    throw ValidationError("model", "snapshots need a floquet or local config");
  }
  validate(cfg);
  const auto& sn = cfg.snapshots;
  SnapshotResult out;
  out.warnings = config_warnings(cfg);
  const double sign = sn.direction == Direction::forward ? 1.0 : -1.0;

  double j_b = 0.0;
  int lobe_b = 0;
  int lobe_w = 0;
  double x_b = 0.0;
  double x_w = 0.0;
  double k0 = 0.0;
  std::function<Vec(const Vec&, double)> evolve;
  if (cfg.model == Model::floquet) {
    FloquetSystem sys = prepare_floquet(cfg);
    j_b = sys.j_b;
    x_b = sys.x_b;
    x_w = sys.x_w;
    lobe_b = static_cast<int>(std::floor(sys.x_b));
    lobe_w = static_cast<int>(std::floor(sys.x_w));
    k0 = carrier_momentum(sn.omega, sn.branch, sys.kin);
    auto step = sys.step;
    const double dt = cfg.lattice.dt;
    evolve = [step, dt, sign](const Vec& w, double t) -> Vec {
      const long n = whole_steps(t, dt);
      return sign > 0 ? step->forward(w, n) : step->backward(w, n);
    };
    out.summary["kappa"] = sys.kappa;
  } else {
    LocalSystem sys = prepare_local(cfg);
    j_b = cfg.local.j_b;
    x_b = lobe_b = cfg.local.j_b;
    x_w = lobe_w = cfg.local.j_w;
    k0 = carrier_momentum(sn.omega, sn.branch, sys.kin);
    auto ev = sys.evolution;
    evolve = [ev, sign](const Vec& w, double t) -> Vec { return ev->evolve(w, sign * t); };
    out.summary["kappa"] = sys.kappa;
  }
  const WavePacket packet = make_packet(j_b + sn.x0_from_horizon, k0, cfg.sigma, cfg.lattice, sn.omega);
  if (cfg.model == Model::local || cfg.profile_kind == ProfileKind::tanh) {
    place(packet, x_b, x_w, "snapshots.x0_from_horizon", out.warnings);
  }

  ResultTable profiles("snapshots", 1, {{"time", "time"}, {"site", "a"}, {"probability", "1"}});
  ResultTable lobes("snapshot_lobes", 1,
                    {{"time", "time"},
                     {"inside", "1"},
                     {"outside", "1"},
                     {"total", "1"},
                     {"centroid", "a"}});
  const long frames = static_cast<long>(std::floor(sn.t_max / sn.stride + 1e-9));
  Vec current = packet.amplitudes;
  double previous = 0.0;
  for (long f = 0; f <= frames; ++f) {
    const double t = f * sn.stride;
    // Floquet frames advance from the previous one; the local model evolves
    // exactly from t = 0 each time.
    if (cfg.model == Model::floquet) {
      current = evolve(current, t - previous);
      previous = t;
    } else {
      current = evolve(packet.amplitudes, t);
    }
    const auto prob = snapshot(current);
    const auto lw = lobe_weights(prob, lobe_b, lobe_w);
    out.times.push_back(sign * t);
    out.profiles.push_back(prob);
    out.lobes.push_back(lw);
    for (std::size_t j = 0; j < prob.size(); ++j) {
      profiles.add_row({sign * t, static_cast<long long>(j), prob[j]});
    }
    lobes.add_row({sign * t, lw.inside, lw.outside, lw.inside + lw.outside, centroid(prob)});
  }
  out.summary["packet"] = {{"x0", packet.x0}, {"k0", packet.k0}, {"omega", sn.omega},
                           {"branch", to_string(sn.branch)}};
  out.summary["final_lobes"] = {{"inside", out.lobes.back().inside}, {"outside", out.lobes.back().outside}};
  out.tables.emplace_back("snapshots", std::move(profiles));
  out.tables.emplace_back("snapshot_lobes", std::move(lobes));
  return out;
}

CjResult run_cj_equivalence(const ExperimentConfig& cfg) {
  return run_cj_equivalence(prepare_floquet(cfg));
}

CjResult run_cj_equivalence(const FloquetSystem& sys) {
  const ExperimentConfig& cfg = sys.cfg;
  if (cfg.spectrum.empty()) throw ValidationError("spectrum", "cj-check needs at least one series");
  CjResult out;
  out.warnings = floquet_warnings(sys);
  const SpectrumSeries& s = cfg.spectrum.front();
  const double dt = cfg.lattice.dt;
  const long steps = whole_steps(s.t_f, dt);

  std::function<double(double)> hopping;
  if (cfg.profile_kind == ProfileKind::uniform) {
    const double t = cfg.uniform_hopping * cfg.lattice.floquet_velocity();
    hopping = [t](double) { return t; };
  } else {
    hopping = floquet_hopping_function(cfg.floquet, cfg.lattice);
  }
  auto cj = std::make_shared<const StepOperator>(cj_step(hopping, cfg.lattice, cfg.cj.n_sub));
  auto refined = std::make_shared<const StepOperator>(cj_step(hopping, cfg.lattice, cfg.cj.n_sub_refined));

  std::vector<WavePacket> packets;
  const double x0 = sys.j_b + s.x0_from_horizon;
  for (double w : cfg.omega.points()) {
    packets.push_back(make_packet(x0, carrier_momentum(w, s.branch, sys.kin), cfg.sigma, cfg.lattice, w));
    out.omega.push_back(w);
  }
  out.occupation_exact = occupations(Quench::stroboscopic(sys.ground, sys.step, steps, dt), packets, cfg.threads);
  out.occupation_cj = occupations(Quench::stroboscopic(sys.ground, cj, steps, dt), packets, cfg.threads);
  out.occupation_refined = occupations(Quench::stroboscopic(sys.ground, refined, steps, dt), packets, cfg.threads);

  ResultTable table("cj_comparison", 1,
                    {{"omega", "1/time"},
                     {"occupation_U", "1"},
                     {"occupation_cj", "1"},
                     {"occupation_cj_refined", "1"},
                     {"difference", "1"},
                     {"refinement_change", "1"}});
  for (std::size_t i = 0; i < packets.size(); ++i) {
    const double d = out.occupation_cj[i] - out.occupation_exact[i];
    const double r = out.occupation_refined[i] - out.occupation_cj[i];
    out.max_difference = std::max(out.max_difference, std::abs(d));
    out.max_refinement_change = std::max(out.max_refinement_change, std::abs(r));
    table.add_row({out.omega[i], out.occupation_exact[i], out.occupation_cj[i], out.occupation_refined[i], d, r});
  }
  out.tables.emplace_back("cj_comparison", std::move(table));
  out.summary["series"] = s.name;
  out.summary["n_sub"] = cfg.cj.n_sub;
  out.summary["n_sub_refined"] = cfg.cj.n_sub_refined;
  out.summary["max_difference"] = out.max_difference;
  out.summary["max_refinement_change"] = out.max_refinement_change;
  return out;
}

bool SelftestResult::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const SelftestCheck& c) { return c.passed; });
}

SelftestResult run_selftest(int threads) {
  SelftestResult out;
  auto check = [&](std::string name, double value, double tol) {
    out.checks.push_back({std::move(name), value, tol, std::isfinite(value) && value <= tol});
  };

  const LatticeParams lat{200, 1.0};
  const FloquetProfileParams fp{0.1, 3.0, 100.0};
  const double x_b = floquet_black_hole_position(fp, lat);
  const double x_w = floquet_white_hole_position(fp, lat);
  const auto profile = floquet_hopping_profile(fp, lat);
  const auto kin = floquet_kinematics(fp, lat);
  const Propagator u = floquet_step(profile, lat);
  const auto step = std::make_shared<const StepOperator>(u);
  const auto ground = std::make_shared<const GaussianState>(minkowski_ground_state(lat));

  check("floquet_step_unitarity", unitarity_error(u.matrix()), 1e-10);
  const LocalProfileParams lp{0.1, 50, 150, 0.5};
  const SpectralEvolution local(build_local_hamiltonian(local_hopping_profile(lp, lat), lp.mu));
  check("local_propagator_unitarity", unitarity_error(local.propagator(100.0).matrix()), 1e-10);

  check("ground_state_purity", ground->purity_error(), 1e-8);
  Propagator u50 = Propagator::identity(lat.n_sites);
  for (int i = 0; i < 50; ++i) u50 = u50.then(u);
  const GaussianState evolved = evolve_state(*ground, u50);
  check("evolved_state_purity", evolved.purity_error(), 1e-8);

  // Backward packet against the forward-evolved state.
  double dual = 0.0;
  const auto q50 = Quench::stroboscopic(ground, step, 50, lat.dt);
  for (double w : {-0.05, 0.0, 0.05}) {
    const auto pk = make_packet(x_b + 30.0, carrier_momentum(w, Branch::outside_zero, kin), 0.05, lat, w);
    const double a = occupation(q50, pk);
    const double b = correlation(evolved, pk.amplitudes, pk.amplitudes).real();
    dual = std::max(dual, std::abs(a - b));
  }
  check("dual_method_occupation", dual, 1e-8);

  double lobe = 0.0;
  for (double w : {0.0, 0.014}) {
    const auto pk = make_packet(x_b + 50.0, carrier_momentum(w, Branch::floquet_doubler, kin), 0.05, lat, w);
    const Vec v = step->forward(pk.amplitudes, 60);
    const auto lw = lobe_weights(snapshot(v), static_cast<int>(std::floor(x_b)), static_cast<int>(std::floor(x_w)));
    lobe = std::max(lobe, std::abs(lw.inside + lw.outside - 1.0));
  }
  check("lobe_weight_sum", lobe, 1e-8);

  // No horizon: occupations of stationary packets do not move.
  const double t_uniform = 3.0;
  const auto flat_step = std::make_shared<const StepOperator>(floquet_step(uniform_profile(lat.n_sites, t_uniform), lat));
  std::vector<WavePacket> flat_packets;
  for (int i = 0; i <= 20; ++i) {
    const double k0 = -0.3 + 0.03 * i;
    flat_packets.push_back(make_packet(100.0, k0, 0.05, lat));
  }
  const auto before = occupations(Quench::frozen(ground), flat_packets, threads);
  const auto after = occupations(Quench::stroboscopic(ground, flat_step, 100, lat.dt), flat_packets, threads);
  double drift = 0.0;
  for (std::size_t i = 0; i < before.size(); ++i) drift = std::max(drift, std::abs(after[i] - before[i]));
  check("uniform_profile_null", drift, 1e-3);

  double fd = 0.0;
  for (int i = 0; i <= 20; ++i) {
    const double w = 0.015 * i;
    fd = std::max(fd, std::abs(fermi_dirac(w, 0.1) + fermi_dirac(-w, 0.1) - 1.0));
  }
  check("fermi_dirac_symmetry", fd, 0.03);
  {
    const KinkGeometry g = kink_geometry(0.1, 1.0);
    std::vector<double> energies;
    for (int i = 1; i <= 10; ++i) {
      energies.push_back(0.03 * i);
      energies.push_back(-0.03 * i);
    }
    const auto pts = scattering_spectrum(g, 0.5, energies);
    double sym = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); i += 2) {
      sym = std::max(sym, std::abs(pts[i].occupation() + pts[i + 1].occupation() - 1.0));
    }
    check("measured_particle_hole_symmetry", sym, 0.03);
  }

  // Plane waves are eigenvectors of the uniform step with phase -omega(k) dt.
  {
    const Propagator uf = floquet_step(uniform_profile(lat.n_sites, t_uniform), lat);
    double phase = 0.0;
    for (int m = -lat.n_sites / 2 + 1; m <= lat.n_sites / 2; m += 7) {
      const double k = 2.0 * std::numbers::pi * m / lat.n_sites;
      Vec e(lat.n_sites);
      for (int j = 0; j < lat.n_sites; ++j) e(j) = std::polar(1.0 / std::sqrt(lat.n_sites), k * j);
      const double w = floquet_dispersion(k, t_uniform, lat.floquet_velocity(), lat.dt);
      const Vec r = uf.apply(e) - std::polar(1.0, -w * lat.dt) * e;
      phase = std::max(phase, r.cwiseAbs().maxCoeff());
    }
    check("floquet_eigenphases", phase, 1e-10);
  }

  ResultTable table("selftest", 1, {{"check", "-"}, {"value", "1"}, {"tolerance", "1"}, {"passed", "1"}});
  for (const auto& c : out.checks) {
    table.add_row({c.name, c.value, c.tolerance, static_cast<long long>(c.passed)});
    out.summary[c.name] = {{"value", c.value}, {"tolerance", c.tolerance}, {"passed", c.passed}};
  }
  out.tables.emplace_back("selftest", std::move(table));
  out.summary["particle_number"] = ground->particle_number();
  return out;
}

void write_outputs(const ExperimentOutput& out, const ExperimentConfig& cfg, double wall_time_s) {
  Provenance prov;
  prov.config = to_json(cfg);
  prov.config_hash = config_hash(physics_json(cfg));
  prov.code_version = code_version();
  prov.wall_time_s = wall_time_s;
  prov.warnings = out.warnings;
  prov.summary = out.summary;
  const std::string prefix = cfg.output.prefix.empty() ? to_string(cfg.model) : cfg.output.prefix;
  for (const auto& [suffix, table] : out.tables) {
    write_table(table, prov, cfg.output.directory, prefix + "_" + suffix);
  }
}

}  // namespace hawking
