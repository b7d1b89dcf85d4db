#pragma once

// Experiment runners behind the command-line tool. Each runner resolves a
// configuration into the physical system, performs the sweeps and returns the
// measured values together with the tables written to disk.

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "hawking/analysis.hpp"
#include "hawking/config.hpp"
#include "hawking/gaussian_dynamics.hpp"
#include "hawking/result_table.hpp"
#include "hawking/scattering.hpp"
#include "hawking/wavepackets.hpp"

namespace hawking {

struct ExperimentOutput {
  // (file stem suffix, table), written as <prefix>_<suffix>.csv
  std::vector<std::pair<std::string, ResultTable>> tables;
  nlohmann::json summary = nlohmann::json::object();
  std::vector<std::string> warnings;

  const ResultTable& table(const std::string& suffix) const;
};

struct SpectrumSeriesResult {
  SpectrumSeries series;
  std::vector<SpectrumPoint> points;  // at t_f
  std::vector<double> k0;
  std::vector<double> initial;  // occupation at t = 0
  std::vector<double> theory;   // f(omega), or f(-omega) on the inside branch
  std::optional<HawkingFit> fit;
  std::string fit_error;

  double max_drift() const;  // max |N(t_f) - N(0)|
};

struct CorrelationPoint {
  double omega = 0.0;
  int argmax_offset = 0;         // outer packet centre minus j_b at the maximum
  double expected_offset = 0.0;  // j_in v_out / v_in
  double magnitude = 0.0;
  double theory = 0.0;
};

struct EntropyResult {
  EntropyCurve curve;
  double window_start = 0.0;
  double window_end = 0.0;
  LinearFit fit;
  double rate_theory = 0.0;
};

// Everything shared by the Floquet runners.
struct FloquetSystem {
  ExperimentConfig cfg;
  HoppingProfile profile;
  FloquetKinematics kin;
  double kappa = 0.0;
  double x_b = 0.0;
  double x_w = 0.0;
  int j_b = 0;
  std::shared_ptr<const StepOperator> step;
  std::shared_ptr<const GaussianState> ground;
};

FloquetSystem prepare_floquet(const ExperimentConfig& cfg);

struct FloquetQuenchResult : ExperimentOutput {
  double kappa = 0.0;
  std::vector<SpectrumSeriesResult> spectra;
  std::vector<CorrelationPoint> correlations;
  std::optional<EntropyResult> entropy;
};

FloquetQuenchResult run_floquet_quench(const ExperimentConfig& cfg);
FloquetQuenchResult run_floquet_quench(const FloquetSystem& sys);

struct LocalSystem {
  ExperimentConfig cfg;
  HoppingProfile profile;
  LocalKinematics kin;
  double kappa = 0.0;
  std::shared_ptr<const SpectralEvolution> evolution;
  std::shared_ptr<const GaussianState> ground;
};

LocalSystem prepare_local(const ExperimentConfig& cfg);

struct PairCorrelation {
  double omega = 0.0;
  double magnitude = 0.0;
  double theory = 0.0;
};

struct LocalQuenchResult : ExperimentOutput {
  double kappa = 0.0;
  std::vector<SpectrumSeriesResult> spectra;
  // Stationary kink solution at the omegas of the first outside_zero series.
  std::vector<double> scattering_occupation;
  double cross_method_max = 0.0;
  std::vector<PairCorrelation> correlations;
};

LocalQuenchResult run_local_quench(const ExperimentConfig& cfg);
LocalQuenchResult run_local_quench(const LocalSystem& sys);

struct ScatteringResult : ExperimentOutput {
  double kappa = 0.0;
  std::vector<ScatteringPoint> points;
  std::optional<HawkingFit> fit;
  std::string fit_error;
  double max_flux_residual = 0.0;
  double max_current_residual = 0.0;
};

ScatteringResult run_scattering(const ExperimentConfig& cfg);

struct SnapshotResult : ExperimentOutput {
  std::vector<double> times;
  std::vector<std::vector<double>> profiles;
  std::vector<LobeWeights> lobes;
};

SnapshotResult run_snapshots(const ExperimentConfig& cfg);

struct CjResult : ExperimentOutput {
  std::vector<double> omega;
  std::vector<double> occupation_exact;    // U(dt)
  std::vector<double> occupation_cj;       // n_sub factors
  std::vector<double> occupation_refined;  // n_sub_refined factors
  double max_difference = 0.0;             // U against n_sub
  double max_refinement_change = 0.0;      // n_sub against n_sub_refined
};

CjResult run_cj_equivalence(const ExperimentConfig& cfg);
CjResult run_cj_equivalence(const FloquetSystem& sys);

struct SelftestCheck {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

struct SelftestResult : ExperimentOutput {
  std::vector<SelftestCheck> checks;

  bool passed() const;
};

// Invariant suite on N = 200 lattices.
SelftestResult run_selftest(int threads = 1);

// Writes every table of `out` under cfg.output with a provenance sidecar.
void write_outputs(const ExperimentOutput& out, const ExperimentConfig& cfg, double wall_time_s);

}  // namespace hawking
