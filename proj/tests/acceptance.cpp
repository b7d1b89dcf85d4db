// Acceptance run: one PASS/FAIL line per criterion at the default
// (publication-scale) parameters. Exit status 1 if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <thread>

#include "hawking/experiment.hpp"

using namespace hawking;
using nlohmann::json;

namespace {

// Tolerances.
constexpr double kFitTolerance = 0.05;           // |T_fit / (kappa / 2 pi) - 1|
constexpr double kPointwiseTolerance = 0.02;     // |N(omega) - f(omega)| on the fitted window
constexpr double kScaledSeconds = 30.0;          // N = 1000 variant, setup included
constexpr double kArgmaxTolerance = 0.10;        // relative, against j_in v_out / v_in
constexpr double kCorrelationTolerance = 0.02;   // |C_max - sqrt(f f_bar)|
constexpr double kEntropyR2 = 0.98;
constexpr double kEntropyRateBand = 0.25;        // reported only
constexpr double kScatteringFitTolerance = 0.02;
constexpr double kFluxTolerance = 1e-8;
constexpr double kCurrentTolerance = 1e-10;
constexpr double kCrossMethodTolerance = 0.02;
constexpr double kCjTolerance = 0.01;
constexpr double kSelftestSeconds = 60.0;

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

int failures = 0;

void verdict(bool ok, const char* name, const std::string& detail) {
  if (!ok) ++failures;
  std::printf("%s %s: %s\n", ok ? "PASS" : "FAIL", name, detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), f, args...);
  return buf;
}

bool fit_ok(const SpectrumSeriesResult& r, double tol) {
  return r.fit && std::abs(r.fit->relative_error()) < tol && r.fit->theory_residual_max <= kPointwiseTolerance;
}

std::string fit_text(const SpectrumSeriesResult& r) {
  if (!r.fit) return "fit failed: " + r.fit_error;
  return fmt("T_fit/T_H - 1 = %+.4f, max |N - f| = %.4f over [%.3f, %.3f] (%zu points, %s)",
             r.fit->relative_error(), r.fit->theory_residual_max, r.fit->omega_min, r.fit->omega_max,
             r.fit->n_used, to_string(r.fit->orientation).c_str());
}

int thread_count() {
  if (const char* t = std::getenv("HAWKING_THREADS")) return std::max(1, std::atoi(t));
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace

int main() {
  const int threads = thread_count();
  const auto start = Clock::now();

  // Floquet model at full size: spectra, correlations, entropy, CJ comparison.
  ExperimentConfig fcfg = default_config(Model::floquet);
  fcfg.threads = threads;
  auto t0 = Clock::now();
  const FloquetSystem fsys = prepare_floquet(fcfg);
  const FloquetQuenchResult fq = run_floquet_quench(fsys);
  std::printf("# floquet N=3000 run: %.1f s\n", since(t0));

  // Scaled variant, timed from configuration to fit.
  t0 = Clock::now();
  const json scaled_doc = {
      {"lattice", {{"n_sites", 1000}}},
      {"profile", {{"width", 666.0}}},
      {"packets", {{"sigma", 0.005}}},
      {"spectrum", json::array({{{"name", "outside"}, {"branch", "outside_zero"},
                                 {"x0_from_horizon", 333.0}, {"t_f", 400.0}}})},
      {"correlations", {{"enabled", false}}},
      {"entropy", {{"enabled", false}}},
      {"threads", threads}};
  const FloquetQuenchResult scaled = run_floquet_quench(parse_config(scaled_doc, Model::floquet));
  const double scaled_seconds = since(t0);

  const auto& outside = fq.spectra.at(0);
  const auto& inside = fq.spectra.at(1);
  const auto& small = scaled.spectra.at(0);
  verdict(fit_ok(outside, kFitTolerance) && fit_ok(small, kFitTolerance) && scaled_seconds < kScaledSeconds,
          "floquet_spectrum",
          "N=3000: " + fit_text(outside) + "; N=1000: " + fit_text(small) +
              fmt(", %.1f s (limit %.0f s)", scaled_seconds, kScaledSeconds));

  verdict(fit_ok(inside, kFitTolerance) && inside.fit->orientation == Orientation::negative,
          "floquet_inside_spectrum", fit_text(inside) + " against f(-omega)");

  {
    double worst_pos = 0.0;
    double worst_mag = 0.0;
    for (const auto& c : fq.correlations) {
      worst_pos = std::max(worst_pos, std::abs(c.argmax_offset / c.expected_offset - 1.0));
      worst_mag = std::max(worst_mag, std::abs(c.magnitude - c.theory));
    }
    const bool ok = !fq.correlations.empty() && worst_pos <= kArgmaxTolerance && worst_mag <= kCorrelationTolerance;
    verdict(ok, "cross_horizon_correlations",
            fmt("%zu omegas, max argmax offset error %.4f (limit %.2f) vs expected %.1f, "
                "max |C - sqrt(f f_bar)| = %.4f (limit %.2f)",
                fq.correlations.size(), worst_pos, kArgmaxTolerance,
                fq.correlations.empty() ? 0.0 : fq.correlations[0].expected_offset, worst_mag,
                kCorrelationTolerance));
  }

  {
    const auto& e = *fq.entropy;
    const double rate = e.fit.slope / e.rate_theory - 1.0;
    const bool ok = e.fit.r_squared > kEntropyR2 && e.fit.slope > 0.0;
    verdict(ok, "entropy_growth",
            fmt("window [%.1f, %.1f], R^2 = %.4f (limit %.2f), slope %.5f > 0; rate vs kappa/12 = %.5f: "
                "%+.3f (%s the %.0f%% band, reported only)",
                e.window_start, e.window_end, e.fit.r_squared, kEntropyR2, e.fit.slope, e.rate_theory, rate,
                std::abs(rate) <= kEntropyRateBand ? "inside" : "outside", 100 * kEntropyRateBand));
  }

  // Falling-lattice step against the Floquet step at the same parameters.
  t0 = Clock::now();
  const CjResult cj = run_cj_equivalence(fsys);
  verdict(cj.max_difference < kCjTolerance, "corley_jacobson_equivalence",
          fmt("n_sub=%d: max |N_U - N_cj| = %.2e (limit %.2f), n_sub %d->%d change %.2e, %.1f s",
              fcfg.cj.n_sub, cj.max_difference, kCjTolerance, fcfg.cj.n_sub, fcfg.cj.n_sub_refined,
              cj.max_refinement_change, since(t0)));

  // Local model.
  ExperimentConfig lcfg = default_config(Model::local);
  lcfg.threads = threads;
  t0 = Clock::now();
  const LocalQuenchResult lq = run_local_quench(lcfg);
  std::printf("# local N=4000 run: %.1f s\n", since(t0));
  {
    double worst = 0.0;
    for (const auto& c : lq.correlations) worst = std::max(worst, std::abs(c.magnitude - c.theory));
    const bool ok = fit_ok(lq.spectra.at(0), kFitTolerance) && !lq.correlations.empty() &&
                    worst <= kCorrelationTolerance;
    verdict(ok, "local_model_spectrum",
            fit_text(lq.spectra.at(0)) +
                fmt("; correlations max |C - sqrt(f f_bar)| = %.4f (limit %.2f)", worst, kCorrelationTolerance));
  }

  // Stationary scattering.
  t0 = Clock::now();
  ExperimentConfig scfg = default_config(Model::scattering);
  scfg.threads = threads;
  const ScatteringResult sc = run_scattering(scfg);
  const double scattering_seconds = since(t0);
  {
    bool all = sc.fit.has_value();
    for (const auto& p : sc.points) all = all && p.solution.has_value();
    const bool ok = all && std::abs(sc.fit->relative_error()) < kScatteringFitTolerance &&
                    sc.max_flux_residual <= kFluxTolerance && sc.max_current_residual <= kCurrentTolerance;
    verdict(ok, "stationary_scattering",
            (sc.fit ? fmt("%zu energies, T_fit/T_H - 1 = %+.4f (limit %.2f)", sc.points.size(),
                          sc.fit->relative_error(), kScatteringFitTolerance)
                    : "fit failed: " + sc.fit_error) +
                fmt(", max flux residual %.1e (limit %.0e), max current residual %.1e (limit %.0e), %.2f s",
                    sc.max_flux_residual, kFluxTolerance, sc.max_current_residual, kCurrentTolerance,
                    scattering_seconds));
  }

  {
    bool finite = !lq.scattering_occupation.empty();
    for (double n : lq.scattering_occupation) finite = finite && std::isfinite(n);
    verdict(finite && lq.cross_method_max <= kCrossMethodTolerance, "quench_vs_scattering",
            fmt("%zu shared omegas, max |N_quench - N_scattering| = %.4f (limit %.2f)",
                lq.scattering_occupation.size(), lq.cross_method_max, kCrossMethodTolerance));
  }

  t0 = Clock::now();
  const SelftestResult st = run_selftest(threads);
  const double selftest_seconds = since(t0);
  {
    std::string failed;
    for (const auto& c : st.checks) {
      if (!c.passed) failed += " " + c.name + fmt("=%.2e", c.value);
    }
    verdict(st.passed() && selftest_seconds < kSelftestSeconds, "property_suite",
            fmt("%zu checks at N=200 in %.1f s (limit %.0f s)", st.checks.size(), selftest_seconds,
                kSelftestSeconds) +
                (failed.empty() ? "" : ", failed:" + failed));
  }

  std::printf("# %d failed, total %.1f s, %d threads\n", failures, since(start), threads);
  return failures == 0 ? 0 : 1;
}
