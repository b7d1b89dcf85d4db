#include "hawking/config.hpp"

#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

namespace hawking {

using nlohmann::json;
using std::numbers::pi;

std::string to_string(Model m) {
  switch (m) {
    case Model::floquet: return "floquet";
    case Model::local: return "local";
    case Model::scattering: return "scattering";
  }
  return "unknown";
}

std::string to_string(ProfileKind k) { return k == ProfileKind::tanh ? "tanh" : "uniform"; }

std::string to_string(Direction d) { return d == Direction::forward ? "forward" : "backward"; }

std::vector<double> Grid::points() const {
  if (!values.empty()) return values;
  std::vector<double> out;
  if (count == 1) {
    out.push_back(min);
  } else {
    // Measured from the nearer end, so both ends and a centred zero are exact.
    const double span = max - min;
    for (int i = 0; i < count; ++i) {
      out.push_back(2 * i < count - 1 ? min + span * i / (count - 1)
                                      : max - span * (count - 1 - i) / (count - 1));
    }
  }
  return out;
}

namespace {

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

// Strict view of one JSON object: every key must be consumed.
class Obj {
 public:
  Obj(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j.is_object()) throw ValidationError(path_.empty() ? "(root)" : path_, "expected an object");
  }

  std::string at(const std::string& key) const { return join(path_, key); }

  const json* find(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  bool number(const std::string& key, double& out) {
    const json* v = find(key);
    if (!v) return false;
    if (!v->is_number()) throw ValidationError(at(key), "expected a number");
    out = v->get<double>();
    if (!std::isfinite(out)) throw ValidationError(at(key), "must be finite");
    return true;
  }

  template <class Int>
  bool integer(const std::string& key, Int& out) {
    const json* v = find(key);
    if (!v) return false;
    if (!v->is_number_integer()) throw ValidationError(at(key), "expected an integer");
    out = v->get<Int>();
    return true;
  }

  bool boolean(const std::string& key, bool& out) {
    const json* v = find(key);
    if (!v) return false;
    if (!v->is_boolean()) throw ValidationError(at(key), "expected true or false");
    out = v->get<bool>();
    return true;
  }

  bool string(const std::string& key, std::string& out) {
    const json* v = find(key);
    if (!v) return false;
    if (!v->is_string()) throw ValidationError(at(key), "expected a string");
    out = v->get<std::string>();
    return true;
  }

  void finish() const {
    for (const auto& item : j_.items()) {
      if (!seen_.count(item.key())) throw ValidationError(at(item.key()), "unknown key");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

Branch parse_branch(const std::string& s, const std::string& path) {
  for (Branch b : {Branch::outside_zero, Branch::inside_zero, Branch::floquet_doubler,
                   Branch::local_doubler_in, Branch::local_doubler_out}) {
    if (to_string(b) == s) return b;
  }
  throw ValidationError(path, "unknown branch '" + s + "'");
}

Model parse_model(const std::string& s, const std::string& path) {
  for (Model m : {Model::floquet, Model::local, Model::scattering}) {
    if (to_string(m) == s) return m;
  }
  throw ValidationError(path, "expected floquet, local or scattering, got '" + s + "'");
}

Grid parse_grid(const json& j, const std::string& path) {
  Grid g;
  if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) {
      if (!j[i].is_number()) throw ValidationError(path + "[" + std::to_string(i) + "]", "expected a number");
      g.values.push_back(j[i].get<double>());
    }
    if (g.values.empty()) throw ValidationError(path, "empty list");
    return g;
  }
  Obj o(j, path);
  o.number("min", g.min);
  o.number("max", g.max);
  o.integer("count", g.count);
  o.finish();
  return g;
}

json grid_json(const Grid& g) {
  if (!g.values.empty()) return g.values;
  return {{"min", g.min}, {"max", g.max}, {"count", g.count}};
}

void read_grid(Obj& o, const std::string& key, Grid& g, bool* given = nullptr) {
  if (const json* v = o.find(key)) {
    g = parse_grid(*v, o.at(key));
    if (given) *given = true;
  }
}

bool is_step_multiple(double t, double dt) {
  const double r = t / dt;
  return std::abs(r - std::round(r)) < 1e-9;
}

void check_grid(const Grid& g, const std::string& path) {
  if (!g.values.empty()) {
    for (double v : g.values) {
      if (!std::isfinite(v)) throw ValidationError(path, "values must be finite");
    }
    return;
  }
  if (g.count < 1) throw ValidationError(path + ".count", "must be at least 1");
  if (!(g.min <= g.max)) throw ValidationError(path + ".max", "must not be below min");
}

// Rethrows a module-level ValidationError under a config path.
template <class F>
void with_prefix(const std::string& prefix, F&& f) {
  try {
    f();
  } catch (const ValidationError& e) {
    std::string what = e.what();
    const std::string head = e.field() + ": ";
    if (what.rfind(head, 0) == 0) what = what.substr(head.size());
    // Module errors may already carry the section name.
    if (e.field().rfind(prefix + ".", 0) == 0) throw;
    throw ValidationError(join(prefix, e.field()), what);
  }
}

double floquet_horizon(const ExperimentConfig& cfg) {
  return std::floor(floquet_black_hole_position(cfg.floquet, cfg.lattice));
}

}  // namespace

ExperimentConfig default_config(Model model) {
  ExperimentConfig c;
  c.model = model;
  c.output.prefix = to_string(model);
  switch (model) {
    case Model::floquet:
      c.lattice = {3000, 1.0};
      c.floquet = {0.1, 3.0, 2000.0};
      c.sigma = 2.0 * (2.0 * pi / 3000.0);
      c.omega = {-0.15, 0.15, 41, {}};
      c.spectrum = {{"outside", Branch::outside_zero, 700.0, 1000.0},
                    {"inside", Branch::inside_zero, -450.0, 1200.0}};
      c.floquet_correlations.omega = {-0.06, 0.06, 13, {}};
      c.snapshots = {Branch::floquet_doubler, 700.0, 0.014, Direction::forward, 900.0, 50.0};
      break;
    case Model::local:
      c.lattice = {4000, 1.0};
      c.local = {0.1, 1700, 3900, 0.5};
      c.sigma = 0.0025;
      c.omega = {-0.15, 0.15, 41, {}};
      c.spectrum = {{"outside", Branch::outside_zero, 900.0, 1850.0}};
      c.local_correlations.omega = {-0.06, 0.06, 13, {}};
      c.snapshots = {Branch::local_doubler_in, -900.0, 0.0157, Direction::forward, 1850.0, 50.0};
      break;
    case Model::scattering:
      c.scattering.energy = {-0.3, 0.3, 41, {}};
      break;
  }
  return c;
}

ExperimentConfig parse_config(const json& doc, std::optional<Model> model) {
  Obj root(doc, "");
  std::string model_name;
  if (root.string("model", model_name)) {
    const Model m = parse_model(model_name, "model");
    if (model && *model != m) {
      throw ValidationError("model", "config is for '" + model_name + "' but '" + to_string(*model) +
                                         "' was requested");
    }
    model = m;
  }
  if (!model) throw ValidationError("model", "missing; expected floquet, local or scattering");

  ExperimentConfig c = default_config(*model);
  bool sigma_given = false;
  bool scan_last_given = false;
  bool energy_given = false;

  if (const json* out = root.find("output")) {
    Obj o(*out, "output");
    o.string("directory", c.output.directory);
    o.string("prefix", c.output.prefix);
    o.finish();
  }
  root.integer("threads", c.threads);

  if (c.model == Model::scattering) {
    if (const json* s = root.find("scattering")) {
      Obj o(*s, "scattering");
      o.number("kappa_hat", c.scattering.kappa_hat);
      o.number("mu", c.scattering.mu);
      o.number("t", c.scattering.t);
      read_grid(o, "energy", c.scattering.energy, &energy_given);
      o.finish();
    }
  } else {
    if (const json* l = root.find("lattice")) {
      Obj o(*l, "lattice");
      o.integer("n_sites", c.lattice.n_sites);
      o.number("dt", c.lattice.dt);
      o.finish();
    }
    if (const json* p = root.find("profile")) {
      Obj o(*p, "profile");
      if (c.model == Model::floquet) {
        std::string kind;
        if (o.string("kind", kind)) {
          if (kind == "tanh") c.profile_kind = ProfileKind::tanh;
          else if (kind == "uniform") c.profile_kind = ProfileKind::uniform;
          else throw ValidationError("profile.kind", "expected tanh or uniform, got '" + kind + "'");
        }
        o.number("kappa_tilde", c.floquet.kappa_tilde);
        o.number("b", c.floquet.b);
        o.number("width", c.floquet.width);
        o.number("uniform_hopping", c.uniform_hopping);
      } else {
        o.number("kappa_hat", c.local.kappa_hat);
        o.integer("j_b", c.local.j_b);
        o.integer("j_w", c.local.j_w);
        o.number("mu", c.local.mu);
      }
      o.finish();
    }
    if (const json* p = root.find("packets")) {
      Obj o(*p, "packets");
      sigma_given = o.number("sigma", c.sigma);
      read_grid(o, "omega", c.omega);
      o.finish();
    }
    if (const json* s = root.find("spectrum")) {
      if (!s->is_array()) throw ValidationError("spectrum", "expected a list of series");
      c.spectrum.clear();
      for (std::size_t i = 0; i < s->size(); ++i) {
        const std::string path = "spectrum[" + std::to_string(i) + "]";
        Obj o((*s)[i], path);
        SpectrumSeries series;
        if (!o.string("name", series.name)) throw ValidationError(path + ".name", "required");
        std::string branch;
        if (!o.string("branch", branch)) throw ValidationError(path + ".branch", "required");
        series.branch = parse_branch(branch, path + ".branch");
        if (!o.number("x0_from_horizon", series.x0_from_horizon)) {
          throw ValidationError(path + ".x0_from_horizon", "required");
        }
        if (!o.number("t_f", series.t_f)) throw ValidationError(path + ".t_f", "required");
        o.finish();
        c.spectrum.push_back(series);
      }
    }
    if (const json* s = root.find("correlations")) {
      Obj o(*s, "correlations");
      if (c.model == Model::floquet) {
        auto& k = c.floquet_correlations;
        o.boolean("enabled", k.enabled);
        read_grid(o, "omega", k.omega);
        o.integer("j_in", k.j_in);
        o.number("t_f", k.t_f);
        o.integer("scan_first", k.scan_first);
        scan_last_given = o.integer("scan_last", k.scan_last);
      } else {
        auto& k = c.local_correlations;
        o.boolean("enabled", k.enabled);
        read_grid(o, "omega", k.omega);
        o.integer("in_from_horizon", k.in_from_horizon);
        o.integer("out_from_horizon", k.out_from_horizon);
        o.number("t_f", k.t_f);
      }
      o.finish();
    }
    if (c.model == Model::floquet) {
      if (const json* s = root.find("entropy")) {
        Obj o(*s, "entropy");
        auto& e = c.entropy;
        o.boolean("enabled", e.enabled);
        o.integer("j1_from_horizon", e.j1_from_horizon);
        o.integer("j2_from_horizon", e.j2_from_horizon);
        o.integer("steps", e.steps);
        o.integer("stride", e.stride);
        o.number("window_start", e.window_start);
        if (const json* w = o.find("window_end"); w && !w->is_null()) {
          if (!w->is_number()) throw ValidationError("entropy.window_end", "expected a number or null");
          e.window_end = w->get<double>();
        }
        o.finish();
      }
      if (const json* s = root.find("cj")) {
        Obj o(*s, "cj");
        o.integer("n_sub", c.cj.n_sub);
        o.integer("n_sub_refined", c.cj.n_sub_refined);
        o.finish();
      }
    }
    if (const json* s = root.find("snapshots")) {
      Obj o(*s, "snapshots");
      auto& sn = c.snapshots;
      std::string text;
      if (o.string("branch", text)) sn.branch = parse_branch(text, "snapshots.branch");
      o.number("x0_from_horizon", sn.x0_from_horizon);
      o.number("omega", sn.omega);
      if (o.string("direction", text)) {
        if (text == "forward") sn.direction = Direction::forward;
        else if (text == "backward") sn.direction = Direction::backward;
        else throw ValidationError("snapshots.direction", "expected forward or backward");
      }
      o.number("t_max", sn.t_max);
      o.number("stride", sn.stride);
      o.finish();
    }
  }
  root.finish();

  // Defaults that follow other settings.
  if (c.model == Model::floquet) {
    if (!sigma_given && c.lattice.n_sites > 0) c.sigma = 2.0 * (2.0 * pi / c.lattice.n_sites);
    if (!scan_last_given) c.floquet_correlations.scan_last = static_cast<int>(c.floquet.width) - 100;
  }
  if (c.model == Model::scattering && !energy_given) {
    const double kappa = c.scattering.kappa_hat * c.scattering.t;
    c.scattering.energy = {-3.0 * kappa, 3.0 * kappa, 41, {}};
  }
  validate(c);
  return c;
}

json to_json(const ExperimentConfig& c) {
  json j;
  j["model"] = to_string(c.model);
  j["output"] = {{"directory", c.output.directory}, {"prefix", c.output.prefix}};
  j["threads"] = c.threads;
  if (c.model == Model::scattering) {
    j["scattering"] = {{"kappa_hat", c.scattering.kappa_hat},
                       {"mu", c.scattering.mu},
                       {"t", c.scattering.t},
                       {"energy", grid_json(c.scattering.energy)}};
    return j;
  }
  j["lattice"] = {{"n_sites", c.lattice.n_sites}, {"dt", c.lattice.dt}};
  if (c.model == Model::floquet) {
    j["profile"] = {{"kind", to_string(c.profile_kind)},
                    {"kappa_tilde", c.floquet.kappa_tilde},
                    {"b", c.floquet.b},
                    {"width", c.floquet.width},
                    {"uniform_hopping", c.uniform_hopping}};
  } else {
    j["profile"] = {{"kappa_hat", c.local.kappa_hat},
                    {"j_b", c.local.j_b},
                    {"j_w", c.local.j_w},
                    {"mu", c.local.mu}};
  }
  j["packets"] = {{"sigma", c.sigma}, {"omega", grid_json(c.omega)}};
  json series = json::array();
  for (const auto& s : c.spectrum) {
    series.push_back({{"name", s.name},
                      {"branch", to_string(s.branch)},
                      {"x0_from_horizon", s.x0_from_horizon},
                      {"t_f", s.t_f}});
  }
  j["spectrum"] = series;
  if (c.model == Model::floquet) {
    const auto& k = c.floquet_correlations;
    j["correlations"] = {{"enabled", k.enabled},     {"omega", grid_json(k.omega)},
                         {"j_in", k.j_in},           {"t_f", k.t_f},
                         {"scan_first", k.scan_first}, {"scan_last", k.scan_last}};
    const auto& e = c.entropy;
    j["entropy"] = {{"enabled", e.enabled},
                    {"j1_from_horizon", e.j1_from_horizon},
                    {"j2_from_horizon", e.j2_from_horizon},
                    {"steps", e.steps},
                    {"stride", e.stride},
                    {"window_start", e.window_start},
                    {"window_end", e.window_end ? json(*e.window_end) : json(nullptr)}};
    j["cj"] = {{"n_sub", c.cj.n_sub}, {"n_sub_refined", c.cj.n_sub_refined}};
  } else {
    const auto& k = c.local_correlations;
    j["correlations"] = {{"enabled", k.enabled},
                         {"omega", grid_json(k.omega)},
                         {"in_from_horizon", k.in_from_horizon},
                         {"out_from_horizon", k.out_from_horizon},
                         {"t_f", k.t_f}};
  }
  const auto& sn = c.snapshots;
  j["snapshots"] = {{"branch", to_string(sn.branch)},       {"x0_from_horizon", sn.x0_from_horizon},
                    {"omega", sn.omega},                     {"direction", to_string(sn.direction)},
                    {"t_max", sn.t_max},                     {"stride", sn.stride}};
  return j;
}

json physics_json(const ExperimentConfig& cfg) {
  json j = to_json(cfg);
  j.erase("output");
  j.erase("threads");
  return j;
}

bool ExperimentConfig::operator==(const ExperimentConfig& o) const {
  return model == o.model && to_json(*this) == to_json(o);
}

void validate(const ExperimentConfig& c) {
  if (c.threads < 1) throw ValidationError("threads", "must be at least 1");
  if (c.model == Model::scattering) {
    const auto& s = c.scattering;
    if (!(s.kappa_hat > 0.0)) throw ValidationError("scattering.kappa_hat", "must be positive");
    if (!(s.t > 0.0)) throw ValidationError("scattering.t", "must be positive");
    if (!(s.mu >= 0.0)) throw ValidationError("scattering.mu", "must not be negative");
    check_grid(s.energy, "scattering.energy");
    return;
  }
  with_prefix("lattice", [&] { c.lattice.validate(); });
  const int n = c.lattice.n_sites;
  double j_b = 0.0;
  if (c.model == Model::floquet) {
    with_prefix("profile", [&] { c.floquet.validate(c.lattice); });
    if (c.profile_kind == ProfileKind::uniform && !(c.uniform_hopping > 0.0)) {
      throw ValidationError("profile.uniform_hopping", "must be positive");
    }
    j_b = floquet_horizon(c);
  } else {
    with_prefix("profile", [&] { c.local.validate(c.lattice); });
    j_b = c.local.j_b;
  }
  if (!(c.sigma > 0.0)) throw ValidationError("packets.sigma", "must be positive");
  check_grid(c.omega, "packets.omega");

  auto branch_ok = [&](Branch b) {
    if (c.model == Model::floquet) {
      return b == Branch::outside_zero || b == Branch::inside_zero || b == Branch::floquet_doubler;
    }
    return b != Branch::floquet_doubler;
  };
  auto check_time = [&](double t, const std::string& path) {
    if (!(t >= 0.0)) throw ValidationError(path, "must not be negative");
    if (c.model == Model::floquet && !is_step_multiple(t, c.lattice.dt)) {
      throw ValidationError(path, "must be a whole number of periods dt");
    }
  };
  auto check_site = [&](double x, const std::string& path) {
    if (!(x >= 0.0 && x < n)) {
      std::ostringstream msg;
      msg << "puts the packet at " << x << ", outside the lattice [0, " << n << ")";
      throw ValidationError(path, msg.str());
    }
  };

  std::set<std::string> names;
  for (std::size_t i = 0; i < c.spectrum.size(); ++i) {
    const auto& s = c.spectrum[i];
    const std::string path = "spectrum[" + std::to_string(i) + "]";
    if (s.name.empty() || s.name.find_first_of(",\n\"") != std::string::npos) {
      throw ValidationError(path + ".name", "must be a non-empty label without commas or quotes");
    }
    if (!names.insert(s.name).second) throw ValidationError(path + ".name", "duplicate series name");
    if (!branch_ok(s.branch)) {
      throw ValidationError(path + ".branch", to_string(s.branch) + " is not a branch of this model");
    }
    check_site(j_b + s.x0_from_horizon, path + ".x0_from_horizon");
    check_time(s.t_f, path + ".t_f");
  }

  if (c.model == Model::floquet) {
    const auto& k = c.floquet_correlations;
    if (k.enabled) {
      check_grid(k.omega, "correlations.omega");
      if (k.j_in <= 0) throw ValidationError("correlations.j_in", "must be positive");
      check_site(j_b - k.j_in, "correlations.j_in");
      check_time(k.t_f, "correlations.t_f");
      if (k.scan_first > k.scan_last) {
        throw ValidationError("correlations.scan_last", "must not be below scan_first");
      }
      check_site(j_b + k.scan_first, "correlations.scan_first");
      check_site(j_b + k.scan_last, "correlations.scan_last");
    }
    const auto& e = c.entropy;
    if (e.enabled) {
      if (e.j1_from_horizon > e.j2_from_horizon) {
        throw ValidationError("entropy.j2_from_horizon", "must not be below j1_from_horizon");
      }
      check_site(j_b + e.j1_from_horizon, "entropy.j1_from_horizon");
      check_site(j_b + e.j2_from_horizon, "entropy.j2_from_horizon");
      if (e.steps < 1) throw ValidationError("entropy.steps", "must be at least 1");
      if (e.stride < 1) throw ValidationError("entropy.stride", "must be at least 1");
      if (e.window_end && !(*e.window_end > e.window_start)) {
        throw ValidationError("entropy.window_end", "must exceed window_start");
      }
    }
    if (c.cj.n_sub < 1) throw ValidationError("cj.n_sub", "must be at least 1");
    if (c.cj.n_sub_refined < 1) throw ValidationError("cj.n_sub_refined", "must be at least 1");
  } else {
    const auto& k = c.local_correlations;
    if (k.enabled) {
      check_grid(k.omega, "correlations.omega");
      check_site(j_b + k.in_from_horizon, "correlations.in_from_horizon");
      check_site(j_b + k.out_from_horizon, "correlations.out_from_horizon");
      check_time(k.t_f, "correlations.t_f");
    }
  }

  const auto& sn = c.snapshots;
  if (!branch_ok(sn.branch)) {
    throw ValidationError("snapshots.branch", to_string(sn.branch) + " is not a branch of this model");
  }
  check_site(j_b + sn.x0_from_horizon, "snapshots.x0_from_horizon");
  check_time(sn.t_max, "snapshots.t_max");
  if (!(sn.stride > 0.0)) throw ValidationError("snapshots.stride", "must be positive");
  if (c.model == Model::floquet && (!is_step_multiple(sn.stride, c.lattice.dt) || sn.stride < c.lattice.dt)) {
    throw ValidationError("snapshots.stride", "must be a whole number of periods dt, at least one");
  }
}

std::vector<std::string> config_warnings(const ExperimentConfig& c) {
  std::vector<std::string> out;
  auto mu_check = [&](double mu, double kappa_hat, double t, const std::string& path) {
    if (!(mu > kappa_hat * t)) {
      std::ostringstream msg;
      msg << path << ": mu = " << mu << " is not larger than the surface gravity kappa_hat t = "
          << kappa_hat * t << "; the horizon is not in the adiabatic regime and the spectrum is "
          << "not expected to be thermal";
      out.push_back(msg.str());
    }
  };
  if (c.model == Model::local) mu_check(c.local.mu, c.local.kappa_hat, 1.0, "profile.mu");
  if (c.model == Model::scattering) {
    mu_check(c.scattering.mu, c.scattering.kappa_hat, c.scattering.t, "scattering.mu");
  }
  return out;
}

}  // namespace hawking
