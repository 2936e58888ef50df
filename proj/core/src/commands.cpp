#include <cmath>
#include <fstream>
#include <ostream>

#include "robustrl/errors.hpp"
#include "robustrl/experiment.hpp"
#include "robustrl/format.hpp"
#include "robustrl/mdp_io.hpp"
#include "robustrl/robust_dp.hpp"

namespace robustrl {

namespace {

constexpr std::uint64_t kTrainCommandTag = 4;
constexpr std::uint64_t kOracleTag = 5;

ExperimentConfig resolve_config(const CommandOptions& opts) {
  ExperimentConfig cfg =
      opts.config_path.empty() ? parse_config(nlohmann::json::object()) : load_config(opts.config_path);
  apply_overrides(cfg, opts.overrides);
  return cfg;
}

std::filesystem::path prepare_out_dir(const CommandOptions& opts) {
  std::error_code ec;
  std::filesystem::create_directories(opts.out_dir, ec);
  if (ec) throw ValidationError("cannot create output directory '" + opts.out_dir.string() + "'");
  return opts.out_dir;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot open '" + path.string() + "' for writing");
  return out;
}

nlohmann::json actions_to_json(const Policy& policy) {
  nlohmann::json a = nlohmann::json::array();
  for (int s = 0; s < policy.n_states(); ++s) a.push_back(policy.action(s));
  return a;
}

}  // namespace

int cmd_solve(const CommandOptions& opts, std::ostream& log) {
  const ExperimentConfig cfg = resolve_config(opts);
  const TabularMDP mdp = make_mdp(cfg.env);
  const UncertaintySpec spec = make_uncertainty(cfg, mdp);
  if (spec.kind() != DivergenceKind::kl)
    throw ValidationError("solve: only kl uncertainty has an exact robust solver");

  const RobustSolution sol = robust_value_iteration(mdp, spec);
  nlohmann::json doc = mdp_to_json(mdp);
  doc["robust_values"] = sol.robust_values;
  doc["adversarial_kernel"] = kernel_to_json(mdp.n_states(), mdp.n_actions(), sol.adversarial_kernel);
  doc["policy"] = actions_to_json(sol.policy);
  doc["beta"] = spec.radius(0, 0);

  const auto path = prepare_out_dir(opts) / "solution.json";
  save_json(path, doc);
  log << "solve: " << sol.iterations << " sweeps, robust return "
      << format_double(robust_return(mdp, sol.policy, spec)) << " -> " << path.string() << '\n';
  return kExitOk;
}

int cmd_train(const CommandOptions& opts, std::ostream& log) {
  const ExperimentConfig cfg = resolve_config(opts);
  const auto env = make_env(cfg.env);
  TrainingSchedule schedule = cfg.agent;
  if (cfg.env.kind == EnvKind::file) schedule.discount = make_mdp(cfg.env).discount();

  std::optional<SamplerConfig> sampler;
  if (cfg.method == kMethodAdversarial) sampler = cfg.sampler;
  const std::uint64_t seed = derive_seed(cfg.seed, {kTrainCommandTag});
  const TrainingResult result = [&] {
    try {
      return train(*env, sampler, schedule, seed);
    } catch (const ContractError& e) {
      throw ValidationError(std::string("train: ") + e.what());
    }
  }();

  const QTable& q = result.q;
  nlohmann::json qdoc = nlohmann::json::array();
  for (int s = 0; s < q.n_states(); ++s) {
    nlohmann::json row = nlohmann::json::array();
    for (int a = 0; a < q.n_actions(); ++a) row.push_back(q.at(s, a));
    qdoc.push_back(std::move(row));
  }
  nlohmann::json model;
  model["method"] = cfg.method;
  model["seed"] = cfg.seed;
  model["n_states"] = q.n_states();
  model["n_actions"] = q.n_actions();
  model["q"] = std::move(qdoc);
  model["policy"] = actions_to_json(greedy_policy(q));
  if (sampler) {
    model["n_samples"] = sampler->n_samples;
    model["kappa"] = std::isinf(sampler->kappa) ? nlohmann::json("inf") : nlohmann::json(sampler->kappa);
  }

  const auto dir = prepare_out_dir(opts);
  save_json(dir / "model.json", model);
  auto out = open_output(dir / "training_log.csv");
  write_training_log(out, result.log);
  log << "train: " << result.log.size() << " episodes (" << cfg.method << ") -> " << dir.string()
      << '\n';
  return kExitOk;
}

int cmd_sweep(const CommandOptions& opts, std::ostream& log) {
  const ExperimentConfig cfg = resolve_config(opts);
  const SweepOutput result = run_sweep(cfg, opts.jobs);
  const auto summary =
      summarize(result.records, cfg.sweep.bootstrap_resamples, cfg.sweep.level, cfg.seed);

  const auto dir = prepare_out_dir(opts);
  {
    auto raw = open_output(dir / "raw.csv");
    write_raw_csv(raw, result.records);
  }
  {
    auto sum = open_output(dir / "summary.csv");
    write_summary_csv(sum, summary);
  }
  if (cfg.uncertainty) {
    const TabularMDP mdp = make_mdp(cfg.env);
    const UncertaintySpec spec = make_uncertainty(cfg, mdp);
    if (spec.kind() != DivergenceKind::kl)
      throw ValidationError("sweep: robust returns need kl uncertainty");
    auto out = open_output(dir / "robust.csv");
    out << "method,seed,beta,robust_return\n";
    for (const TrainedPolicy& p : result.policies)
      out << p.method << ',' << p.seed << ',' << format_double(spec.radius(0, 0)) << ','
          << format_double(robust_return(mdp, p.policy, spec, 1e-8)) << '\n';
  }
  log << "sweep: " << result.records.size() << " records -> " << dir.string() << '\n';
  for (const SummaryRecord& s : summary)
    log << "  " << s.method << ' ' << s.param << '=' << format_double(s.param_value)
        << "  iqm " << format_double(s.iqm) << "  [" << format_double(s.ci_lo) << ", "
        << format_double(s.ci_hi) << "]\n";
  return kExitOk;
}

int cmd_oracle_check(const CommandOptions& opts, std::ostream& log) {
  const ExperimentConfig cfg = resolve_config(opts);
  const KlBatteryReport kl = run_kl_battery(cfg.oracle, derive_seed(cfg.seed, {kOracleTag, 1}));
  const SamplerBatteryReport sampler =
      run_sampler_battery(cfg.oracle, derive_seed(cfg.seed, {kOracleTag, 2}));

  log << "dual vs grid: " << kl.instances << " instances, max |value gap| / (res*|v|) "
      << format_double(kl.max_value_ratio) << " (limit " << format_double(cfg.oracle.value_factor)
      << ", " << kl.value_failures << " over), max TV " << format_double(kl.max_tv) << " (limit "
      << format_double(cfg.oracle.tv_tol) << ", " << kl.tv_failures << " over) -> "
      << (kl.passed ? "PASS" : "FAIL") << '\n';
  log << "sampler: N=" << cfg.oracle.sampler_candidates << " TV to Gibbs "
      << format_double(sampler.limit_tv) << " (limit " << format_double(cfg.oracle.sampler_tv_tol)
      << "), N=1 chi-squared p " << format_double(sampler.nominal_p_value) << " (min "
      << format_double(cfg.oracle.chi2_min_p) << ") -> " << (sampler.passed ? "PASS" : "FAIL")
      << '\n';
  return kl.passed && sampler.passed ? kExitOk : kExitOracleFailure;
}

}  // namespace robustrl
