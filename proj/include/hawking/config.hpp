#pragma once

// Experiment configuration: one JSON document per experiment. Missing keys
// take the defaults of the chosen model; unknown keys and out-of-range values
// are rejected with a ValidationError naming the field path. The effective
// configuration (every value resolved) is echoed into each provenance file and
// parses back to the same configuration.

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hawking/gaussian_dynamics.hpp"
#include "hawking/lattice_model.hpp"
#include "hawking/wavepackets.hpp"

namespace hawking {

enum class Model { floquet, local, scattering };
enum class ProfileKind { tanh, uniform };

std::string to_string(Model m);
std::string to_string(ProfileKind k);
std::string to_string(Direction d);

// Either an explicit list or count evenly spaced values in [min, max].
struct Grid {
  double min = 0.0;
  double max = 0.0;
  int count = 0;
  std::vector<double> values;

  std::vector<double> points() const;
  bool operator==(const Grid&) const = default;
};

struct SpectrumSeries {
  std::string name;
  Branch branch = Branch::outside_zero;
  double x0_from_horizon = 0.0;  // packet centre minus the black-hole horizon site
  double t_f = 0.0;

  bool operator==(const SpectrumSeries&) const = default;
};

// Inner packet at j_b - j_in, outer packet scanned over j_b + [scan_first, scan_last].
struct FloquetCorrelations {
  bool enabled = true;
  Grid omega;
  int j_in = 450;
  double t_f = 1000.0;
  int scan_first = 100;
  int scan_last = 1900;

  bool operator==(const FloquetCorrelations&) const = default;
};

struct LocalCorrelations {
  bool enabled = true;
  Grid omega;
  int in_from_horizon = -900;
  int out_from_horizon = 900;
  double t_f = 1850.0;

  bool operator==(const LocalCorrelations&) const = default;
};

// S of sites j_b + j1_from_horizon .. j_b + j2_from_horizon at every stride-th
// step up to steps. The slope is fitted on [window_start, window_end]; an
// absent window_end means the crossing time of the fastest inside mode.
struct EntropySettings {
  bool enabled = true;
  int j1_from_horizon = -100;
  int j2_from_horizon = 0;
  long steps = 400;
  long stride = 4;
  double window_start = 0.0;
  std::optional<double> window_end;

  bool operator==(const EntropySettings&) const = default;
};

struct SnapshotSettings {
  Branch branch = Branch::floquet_doubler;
  double x0_from_horizon = 700.0;
  double omega = 0.014;
  Direction direction = Direction::forward;
  double t_max = 900.0;
  double stride = 50.0;

  bool operator==(const SnapshotSettings&) const = default;
};

struct CjSettings {
  int n_sub = 8;
  int n_sub_refined = 16;

  bool operator==(const CjSettings&) const = default;
};

struct ScatteringSettings {
  double kappa_hat = 0.1;
  double mu = 0.5;
  double t = 1.0;
  Grid energy;

  bool operator==(const ScatteringSettings&) const = default;
};

struct OutputSettings {
  std::string directory = "results";
  std::string prefix;

  bool operator==(const OutputSettings&) const = default;
};

struct ExperimentConfig {
  Model model = Model::floquet;
  LatticeParams lattice;
  ProfileKind profile_kind = ProfileKind::tanh;
  FloquetProfileParams floquet;
  double uniform_hopping = 3.0;  // in units of 1/dt, for ProfileKind::uniform
  LocalProfileParams local;
  double sigma = 0.0;
  Grid omega;
  std::vector<SpectrumSeries> spectrum;
  FloquetCorrelations floquet_correlations;
  LocalCorrelations local_correlations;
  EntropySettings entropy;
  SnapshotSettings snapshots;
  CjSettings cj;
  ScatteringSettings scattering;
  OutputSettings output;
  int threads = 1;

  bool operator==(const ExperimentConfig& o) const;
};

ExperimentConfig default_config(Model model);

// Parses a configuration document. When `model` is given it must agree with the
// document's "model" key, if present.
ExperimentConfig parse_config(const nlohmann::json& doc, std::optional<Model> model = std::nullopt);

// Every setting relevant to the model, fully resolved.
nlohmann::json to_json(const ExperimentConfig& cfg);

// to_json without the output and thread settings, which do not affect results.
nlohmann::json physics_json(const ExperimentConfig& cfg);

// Throws ValidationError with a field path on the first violated invariant.
void validate(const ExperimentConfig& cfg);

// Conditions that are allowed but outside the regime the models are meant for.
std::vector<std::string> config_warnings(const ExperimentConfig& cfg);

}  // namespace hawking
