// hawking-sim: runs the horizon experiments and writes CSV tables.
//
//   hawking-sim floquet    [-c config.json] [-o dir] [-j threads]
//   hawking-sim local      ...
//   hawking-sim scattering ...
//   hawking-sim snapshots  [--model floquet|local] ...
//   hawking-sim cj-check   ...
//   hawking-sim selftest   [-o dir] [-j threads]
//
// Exit codes: 0 success, 1 invalid input or run failure, 2 selftest failure.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "hawking/config.hpp"
#include "hawking/experiment.hpp"

using namespace hawking;
using nlohmann::json;

namespace {

struct Options {
  std::string config_path;
  std::string output_dir;
  int threads = 0;
  bool print_config = false;
  std::string model;  // snapshots only
};

std::optional<std::string> env(const char* name) {
  const char* v = std::getenv(name);
  if (!v || !*v) return std::nullopt;
  return std::string(v);
}

json read_document(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream in(path);
  if (!in) throw ValidationError("--config", "cannot open " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("--config", std::string("not valid JSON: ") + e.what());
  }
  // A provenance sidecar carries the configuration that produced its table.
  if (doc.is_object() && doc.contains("config") && doc.contains("config_hash")) return doc["config"];
  return doc;
}

ExperimentConfig load(const Options& opt, std::optional<Model> model) {
  json doc = read_document(opt.config_path);
  if (!model && !opt.model.empty()) {
    if (opt.model == "floquet") model = Model::floquet;
    else if (opt.model == "local") model = Model::local;
    else throw ValidationError("--model", "expected floquet or local");
  }
  if (!model && (!doc.is_object() || !doc.contains("model"))) model = Model::floquet;
  if (doc.is_object()) {
    if (!doc.contains("threads")) {
      if (auto t = env("HAWKING_THREADS")) {
        try {
          doc["threads"] = std::stoi(*t);
        } catch (const std::exception&) {
          throw ValidationError("HAWKING_THREADS", "expected an integer, got '" + *t + "'");
        }
      }
    }
    if (auto d = env("HAWKING_OUTPUT_DIR"); d && !(doc.contains("output") && doc["output"].contains("directory"))) {
      doc["output"]["directory"] = *d;
    }
  }
  ExperimentConfig cfg = parse_config(doc, model);
  if (opt.threads > 0) cfg.threads = opt.threads;
  if (!opt.output_dir.empty()) cfg.output.directory = opt.output_dir;
  validate(cfg);
  return cfg;
}

void report(const ExperimentOutput& out, const ExperimentConfig& cfg, double seconds) {
  for (const auto& w : out.warnings) std::cerr << "warning: " << w << "\n";
  write_outputs(out, cfg, seconds);
  const std::string prefix = cfg.output.prefix.empty() ? to_string(cfg.model) : cfg.output.prefix;
  for (const auto& [suffix, table] : out.tables) {
    std::cout << "wrote " << cfg.output.directory << "/" << prefix << "_" << suffix << ".csv ("
              << table.rows() << " rows)\n";
  }
  std::cout << out.summary.dump(2) << "\n";
  std::printf("wall time %.1f s\n", seconds);
}

template <class Run>
int run_experiment(const Options& opt, std::optional<Model> model, Run&& run) {
  const ExperimentConfig cfg = load(opt, model);
  for (const auto& w : config_warnings(cfg)) std::cerr << "warning: " << w << "\n";
  if (opt.print_config) {
    std::cout << to_json(cfg).dump(2) << "\n";
    return 0;
  }
  const auto start = std::chrono::steady_clock::now();
  auto out = run(cfg);
  out.warnings.erase(std::remove_if(out.warnings.begin(), out.warnings.end(),
                                    [&](const std::string& w) {
                                      for (const auto& c : config_warnings(cfg)) {
                                        if (c == w) return true;
                                      }
                                      return false;
                                    }),
                     out.warnings.end());
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  report(out, cfg, seconds);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Analogue Hawking radiation on fermionic lattices"};
  app.require_subcommand(1);

  Options opt;
  auto add_common = [&](CLI::App* sub, bool with_config) {
    if (with_config) {
      sub->add_option("-c,--config", opt.config_path, "JSON experiment config (or a provenance file)");
      sub->add_flag("--print-config", opt.print_config, "Print the effective config and exit");
    }
    sub->add_option("-o,--output-dir", opt.output_dir, "Output directory (env HAWKING_OUTPUT_DIR)");
    sub->add_option("-j,--threads", opt.threads, "Worker threads (env HAWKING_THREADS)")->check(CLI::PositiveNumber);
  };

  auto* floquet = app.add_subcommand("floquet", "Floquet horizon quench: spectra, correlations, entropy");
  auto* local = app.add_subcommand("local", "Local-model quench: spectrum and correlations");
  auto* scattering = app.add_subcommand("scattering", "Stationary scattering off a single kink");
  auto* snapshots = app.add_subcommand("snapshots", "Packet probability profiles over time");
  auto* cj = app.add_subcommand("cj-check", "Falling-lattice step against the Floquet step");
  auto* selftest = app.add_subcommand("selftest", "Invariant suite at N = 200");
  for (auto* sub : {floquet, local, scattering, snapshots, cj}) add_common(sub, true);
  add_common(selftest, false);
  snapshots->add_option("--model", opt.model, "floquet or local (default: from config, else floquet)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*floquet) return run_experiment(opt, Model::floquet, [](const ExperimentConfig& c) { return run_floquet_quench(c); });
    if (*local) return run_experiment(opt, Model::local, [](const ExperimentConfig& c) { return run_local_quench(c); });
    if (*scattering) return run_experiment(opt, Model::scattering, [](const ExperimentConfig& c) { return run_scattering(c); });
    if (*snapshots) return run_experiment(opt, std::nullopt, [](const ExperimentConfig& c) { return run_snapshots(c); });
    if (*cj) return run_experiment(opt, Model::floquet, [](const ExperimentConfig& c) { return run_cj_equivalence(c); });
    if (*selftest) {
      const int threads = opt.threads > 0 ? opt.threads : std::stoi(env("HAWKING_THREADS").value_or("1"));
      const auto start = std::chrono::steady_clock::now();
      const SelftestResult r = run_selftest(threads);
      const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      for (const auto& c : r.checks) {
        std::printf("%-4s %-34s %.3e (tolerance %.1e)\n", c.passed ? "ok" : "FAIL", c.name.c_str(), c.value,
                    c.tolerance);
      }
      std::printf("selftest %s in %.1f s\n", r.passed() ? "passed" : "FAILED", seconds);
      const std::string dir = !opt.output_dir.empty() ? opt.output_dir : env("HAWKING_OUTPUT_DIR").value_or("");
      if (!dir.empty()) {
        Provenance prov;
        prov.config = {{"selftest", {{"n_sites", 200}}}};
        prov.config_hash = config_hash(prov.config);
        prov.code_version = code_version();
        prov.wall_time_s = seconds;
        prov.summary = r.summary;
        write_table(r.table("selftest"), prov, dir, "selftest");
      }
      return r.passed() ? 0 : 2;
    }
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
