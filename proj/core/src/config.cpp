#include <cmath>
#include <type_traits>
#include <limits>
#include <set>
#include <string>

#include "robustrl/errors.hpp"
#include "robustrl/experiment.hpp"
#include "robustrl/mdp_io.hpp"

namespace robustrl {

namespace {

using nlohmann::json;

/// Read-only view of one section that remembers which keys were consumed,
/// so leftovers can be reported as typos.
class Section {
 public:
  Section(const json& doc, std::string name) : doc_(doc), name_(std::move(name)) {
    if (!doc_.is_object()) throw ValidationError("config: '" + name_ + "' must be an object");
  }

  const json* find(const std::string& key) {
    seen_.insert(key);
    const auto it = doc_.find(key);
    return it == doc_.end() ? nullptr : &*it;
  }

  void real(const std::string& key, double& out) {
    if (const json* v = find(key)) {
      if (!v->is_number()) fail(key, "expected a number");
      out = v->get<double>();
    }
  }

  /// Accepts a number or the strings "inf" / "infinity".
  void extended_real(const std::string& key, double& out) {
    if (const json* v = find(key)) {
      if (v->is_string() && (*v == "inf" || *v == "infinity")) {
        out = std::numeric_limits<double>::infinity();
      } else if (v->is_number()) {
        out = v->get<double>();
      } else {
        fail(key, "expected a number or \"inf\"");
      }
    }
  }

  template <class Int>
  void integer(const std::string& key, Int& out) {
    if (const json* v = find(key)) {
      if (!v->is_number_integer()) fail(key, "expected an integer");
      if constexpr (std::is_unsigned_v<Int>) {
        if (v->is_number_unsigned()) {
          out = v->get<Int>();
        } else if (v->get<long long>() >= 0) {
          out = static_cast<Int>(v->get<long long>());
        } else {
          fail(key, "expected a non-negative integer");
        }
      } else {
        out = v->get<Int>();
      }
    }
  }

  void string(const std::string& key, std::string& out) {
    if (const json* v = find(key)) {
      if (!v->is_string()) fail(key, "expected a string");
      out = v->get<std::string>();
    }
  }

  void cell(const std::string& key, Cell& out) {
    if (const json* v = find(key)) out = parse_cell(*v, key);
  }

  Cell parse_cell(const json& v, const std::string& key) const {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number_integer() ||
        !v[1].is_number_integer())
      fail(key, "expected [x, y]");
    return {v[0].get<int>(), v[1].get<int>()};
  }

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    throw ValidationError("config: " + name_ + "." + key + ": " + what);
  }

  void finish() const {
    for (const auto& item : doc_.items())
      if (!seen_.count(item.key()))
        throw ValidationError("config: unknown key '" + name_ + "." + item.key() + "'");
  }

 private:
  const json& doc_;
  std::string name_;
  std::set<std::string> seen_;
};

void parse_env(const json& doc, const std::filesystem::path& base_dir, EnvConfig& env) {
  Section sec(doc, "env");
  std::string kind = "gridworld";
  sec.string("kind", kind);
  if (kind == "gridworld") {
    env.kind = EnvKind::gridworld;
    GridworldParams& g = env.gridworld;
    sec.integer("width", g.width);
    sec.integer("height", g.height);
    sec.cell("start", g.start);
    sec.cell("goal", g.goal);
    if (const json* c = sec.find("cliff")) {
      if (!c->is_array()) sec.fail("cliff", "expected a list of [x, y] cells");
      g.cliff.clear();
      for (const json& cell : *c) g.cliff.push_back(sec.parse_cell(cell, "cliff"));
    }
    sec.real("slip_prob", g.slip_prob);
    sec.real("step_reward", g.step_reward);
    sec.real("goal_reward", g.goal_reward);
    sec.real("cliff_penalty", g.cliff_penalty);
    sec.real("discount", g.discount);
  } else if (kind == "garnet") {
    env.kind = EnvKind::garnet;
    sec.integer("n_states", env.garnet.n_states);
    sec.integer("n_actions", env.garnet.n_actions);
    sec.integer("branching", env.garnet.branching);
    sec.real("discount", env.garnet.discount);
    sec.integer("seed", env.garnet.seed);
  } else if (kind == "file") {
    env.kind = EnvKind::file;
    std::string path;
    sec.string("path", path);
    if (path.empty()) sec.fail("path", "required for kind \"file\"");
    env.path = std::filesystem::path(path);
    if (env.path.is_relative()) env.path = base_dir / env.path;
  } else {
    sec.fail("kind", "expected gridworld, garnet or file");
  }
  sec.finish();
}

void parse_agent(const json& doc, ExperimentConfig& cfg) {
  Section sec(doc, "agent");
  TrainingSchedule& a = cfg.agent;
  sec.integer("total_steps", a.total_steps);
  sec.real("learning_rate", a.learning_rate);
  sec.real("epsilon_start", a.epsilon_start);
  sec.real("epsilon_end", a.epsilon_end);
  sec.real("decay_fraction", a.decay_fraction);
  sec.integer("max_episode_steps", a.max_episode_steps);
  sec.string("method", cfg.method);
  sec.finish();
}

void parse_sampler(const json& doc, SamplerConfig& s) {
  Section sec(doc, "sampler");
  sec.integer("n_samples", s.n_samples);
  sec.extended_real("kappa", s.kappa);
  sec.finish();
}

void parse_uncertainty(const json& doc, UncertaintyConfig& u) {
  Section sec(doc, "uncertainty");
  std::string kind = "kl";
  sec.string("kind", kind);
  if (kind == "kl")
    u.kind = DivergenceKind::kl;
  else if (kind == "l2")
    u.kind = DivergenceKind::l2;
  else
    sec.fail("kind", "expected kl or l2");

  if (const json* b = sec.find("beta")) {
    if (b->is_number()) {
      u.beta = b->get<double>();
    } else if (b->is_array()) {
      for (const json& row : *b) {
        if (!row.is_array()) sec.fail("beta", "a table must be a list of per-state lists");
        std::vector<double> radii;
        for (const json& x : row) {
          if (!x.is_number()) sec.fail("beta", "table entries must be numbers");
          radii.push_back(x.get<double>());
        }
        u.table.push_back(std::move(radii));
      }
    } else if (b->is_object()) {
      Section match(*b, "uncertainty.beta");
      std::string param;
      match.string("match_param", param);
      match.real("match_value", u.match_value);
      match.finish();
      if (param.empty()) sec.fail("beta", "match_param is required");
      u.match_param = param;
    } else {
      sec.fail("beta", "expected a number, a [s][a] table or {match_param, match_value}");
    }
  }
  sec.finish();
}

void parse_sweep(const json& doc, SweepConfig& s) {
  Section sec(doc, "sweep");
  sec.string("param", s.param);
  if (const json* v = sec.find("values")) {
    if (!v->is_array() || v->empty()) sec.fail("values", "expected a non-empty list");
    s.values.clear();
    for (const json& x : *v) {
      if (!x.is_number()) sec.fail("values", "expected numbers");
      s.values.push_back(x.get<double>());
    }
  }
  sec.integer("seeds", s.seeds);
  sec.integer("eval_episodes", s.eval_episodes);
  sec.integer("bootstrap_resamples", s.bootstrap_resamples);
  sec.real("level", s.level);
  sec.finish();
}

void parse_oracle(const json& doc, OracleCheckConfig& o) {
  Section sec(doc, "oracle");
  sec.integer("kl_instances", o.kl_instances);
  sec.real("resolution", o.resolution);
  sec.real("beta_min", o.beta_min);
  sec.real("beta_max", o.beta_max);
  sec.real("value_factor", o.value_factor);
  sec.real("tv_tol", o.tv_tol);
  sec.integer("sampler_steps", o.sampler_steps);
  sec.integer("sampler_candidates", o.sampler_candidates);
  sec.real("sampler_kappa", o.sampler_kappa);
  sec.real("sampler_tv_tol", o.sampler_tv_tol);
  sec.real("chi2_min_p", o.chi2_min_p);
  sec.finish();
}

void validate(ExperimentConfig& cfg) {
  auto check = [](bool ok, const std::string& what) {
    if (!ok) throw ValidationError("config: " + what);
  };
  if (cfg.env.kind == EnvKind::gridworld) {
    try {
      WindyGridworld probe(cfg.env.gridworld);
    } catch (const ContractError& e) {
      throw ValidationError(std::string("config: env: ") + e.what());
    }
  }
  const double discount = cfg.env.kind == EnvKind::gridworld ? cfg.env.gridworld.discount
                          : cfg.env.kind == EnvKind::garnet  ? cfg.env.garnet.discount
                                                             : 0.0;
  if (cfg.env.kind != EnvKind::file) cfg.agent.discount = discount;
  try {
    cfg.agent.validate();
    cfg.sampler.validate();
  } catch (const ContractError& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
  check(cfg.method == kMethodBaseline || cfg.method == kMethodAdversarial,
        "agent.method must be baseline or adversarial");
  if (cfg.uncertainty) {
    check(cfg.uncertainty->match_param || cfg.uncertainty->beta >= 0.0,
          "uncertainty.beta must be non-negative");
  }
  const SweepConfig& s = cfg.sweep;
  check(s.seeds >= 4, "sweep.seeds must be at least 4 (IQM needs four samples)");
  check(s.eval_episodes >= 1, "sweep.eval_episodes must be positive");
  check(s.bootstrap_resamples >= 1, "sweep.bootstrap_resamples must be positive");
  check(s.level > 0.0 && s.level < 1.0, "sweep.level must lie in (0, 1)");
  const OracleCheckConfig& o = cfg.oracle;
  check(o.kl_instances >= 1, "oracle.kl_instances must be positive");
  check(o.resolution > 0.0 && o.resolution <= 0.5, "oracle.resolution must lie in (0, 0.5]");
  check(o.beta_min >= 0.0 && o.beta_min <= o.beta_max, "oracle beta range is empty");
  check(o.sampler_steps >= 1 && o.sampler_candidates >= 1, "oracle sampler counts must be positive");
  check(o.sampler_kappa > 0.0, "oracle.sampler_kappa must be positive");
}

}  // namespace

ExperimentConfig parse_config(const json& doc, const std::filesystem::path& base_dir) {
  ExperimentConfig cfg;
  Section top(doc, "config");
  top.integer("seed", cfg.seed);
  if (const json* e = top.find("env")) parse_env(*e, base_dir, cfg.env);
  if (const json* a = top.find("agent")) parse_agent(*a, cfg);
  if (const json* s = top.find("sampler")) parse_sampler(*s, cfg.sampler);
  if (const json* u = top.find("uncertainty")) {
    cfg.uncertainty.emplace();
    parse_uncertainty(*u, *cfg.uncertainty);
  }
  if (const json* s = top.find("sweep")) parse_sweep(*s, cfg.sweep);
  if (const json* o = top.find("oracle")) parse_oracle(*o, cfg.oracle);
  top.finish();
  validate(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  return parse_config(load_json(path), path.parent_path());
}

void apply_overrides(ExperimentConfig& cfg, const ConfigOverrides& overrides) {
  if (overrides.seed) cfg.seed = *overrides.seed;
  if (overrides.kappa) cfg.sampler.kappa = *overrides.kappa;
  if (overrides.n_samples) cfg.sampler.n_samples = *overrides.n_samples;
  try {
    cfg.sampler.validate();
  } catch (const ContractError& e) {
    throw ValidationError(std::string("override: ") + e.what());
  }
}

std::unique_ptr<GenerativeEnv> make_env(const EnvConfig& cfg) {
  if (cfg.kind == EnvKind::gridworld) return std::make_unique<WindyGridworld>(cfg.gridworld);
  return std::make_unique<TabularEnv>(make_mdp(cfg));
}

TabularMDP make_mdp(const EnvConfig& cfg) {
  switch (cfg.kind) {
    case EnvKind::gridworld:
      return WindyGridworld(cfg.gridworld).exact_mdp();
    case EnvKind::garnet:
      try {
        return make_garnet(cfg.garnet);
      } catch (const ContractError& e) {
        throw ValidationError(std::string("config: env: ") + e.what());
      }
    case EnvKind::file:
      return mdp_from_json(load_json(cfg.path));
  }
  throw ValidationError("config: unsupported environment kind");
}

double matched_kl_radius(const WindyGridworld& env, const std::string& param, double value) {
  WindyGridworld perturbed = env;
  try {
    perturbed = env.with_parameter(param, value);
  } catch (const ContractError& e) {
    throw ValidationError(e.what());
  }
  const TabularMDP nominal = env.exact_mdp();
  const TabularMDP shifted = perturbed.exact_mdp();
  double radius = 0.0;
  for (int s = 0; s < nominal.n_states(); ++s)
    for (int a = 0; a < nominal.n_actions(); ++a)
      radius = std::max(radius, kl_divergence(shifted.row(s, a), nominal.row(s, a)));
  if (!std::isfinite(radius))
    throw ValidationError("matched radius: perturbed kernel leaves the nominal support");
  return radius;
}

UncertaintySpec make_uncertainty(const ExperimentConfig& cfg, const TabularMDP& mdp) {
  if (!cfg.uncertainty) throw ValidationError("config: an uncertainty section is required");
  const UncertaintyConfig& u = *cfg.uncertainty;
  if (!u.table.empty()) {
    if (u.table.size() != static_cast<std::size_t>(mdp.n_states()))
      throw ValidationError("config: uncertainty.beta table needs one row per state");
    std::vector<double> radii;
    for (const auto& row : u.table) {
      if (row.size() != static_cast<std::size_t>(mdp.n_actions()))
        throw ValidationError("config: uncertainty.beta table needs one entry per action");
      radii.insert(radii.end(), row.begin(), row.end());
    }
    try {
      return UncertaintySpec(u.kind, mdp.n_states(), mdp.n_actions(), std::move(radii));
    } catch (const ContractError& e) {
      throw ValidationError(std::string("config: ") + e.what());
    }
  }
  double beta = u.beta;
  if (u.match_param) {
    if (cfg.env.kind != EnvKind::gridworld)
      throw ValidationError("config: uncertainty.beta matching needs a gridworld env");
    if (u.kind != DivergenceKind::kl)
      throw ValidationError("config: uncertainty.beta matching is defined for kl only");
    beta = matched_kl_radius(WindyGridworld(cfg.env.gridworld), *u.match_param, u.match_value);
  }
  try {
    return UncertaintySpec::uniform(u.kind, mdp.n_states(), mdp.n_actions(), beta);
  } catch (const ContractError& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
}

}  // namespace robustrl
