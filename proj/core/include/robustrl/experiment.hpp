#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "robustrl/adversarial_sampler.hpp"
#include "robustrl/envs.hpp"
#include "robustrl/qlearning.hpp"
#include "robustrl/stats.hpp"
#include "robustrl/uncertainty.hpp"

namespace robustrl {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitOracleFailure = 3;

inline constexpr const char* kMethodBaseline = "baseline";
inline constexpr const char* kMethodAdversarial = "adversarial";

// ---------------------------------------------------------------------------
// Configuration document
// ---------------------------------------------------------------------------

enum class EnvKind { gridworld, garnet, file };

struct EnvConfig {
  EnvKind kind = EnvKind::gridworld;
  GridworldParams gridworld = WindyGridworld::standard().params();
  GarnetParams garnet;
  /// MDP document for kind == file; relative paths resolve against the
  /// directory of the config file.
  std::filesystem::path path;
};

struct UncertaintyConfig {
  DivergenceKind kind = DivergenceKind::kl;
  double beta = 0.1;
  /// Optional per-(s, a) radii, table[s][a]; takes precedence over beta.
  std::vector<std::vector<double>> table;
  /// When set, beta is replaced by the smallest uniform radius whose ball
  /// contains every row of the environment's kernel at match_param = match_value.
  std::optional<std::string> match_param;
  double match_value = 0.0;
};

struct SweepConfig {
  std::string param = "slip_prob";
  std::vector<double> values = {0.0, 0.05, 0.1, 0.2, 0.3, 0.4};
  int seeds = 20;
  int eval_episodes = 30;
  int bootstrap_resamples = 2000;
  double level = 0.95;
};

struct OracleCheckConfig {
  int kl_instances = 200;
  double resolution = 0.002;
  double beta_min = 0.01;
  double beta_max = 0.5;
  /// Allowed |dual - grid| in units of resolution * ||v||_inf.
  double value_factor = 2.0;
  double tv_tol = 5e-3;
  int sampler_steps = 100000;
  int sampler_candidates = 1000;
  double sampler_kappa = 0.5;
  double sampler_tv_tol = 0.02;
  double chi2_min_p = 0.01;
};

struct ExperimentConfig {
  std::uint64_t seed = 0;
  EnvConfig env;
  TrainingSchedule agent;
  /// cmd_train only: "baseline" or "adversarial".
  std::string method = kMethodAdversarial;
  SamplerConfig sampler{10, 0.5, 0};
  std::optional<UncertaintyConfig> uncertainty;
  SweepConfig sweep;
  OracleCheckConfig oracle;
};

/// Parses a configuration document. Every section is optional; unknown keys
/// and out-of-range values throw ValidationError. The agent discount is
/// always taken from the environment.
ExperimentConfig parse_config(const nlohmann::json& doc,
                              const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

/// Command-line values that take precedence over the document.
struct ConfigOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<double> kappa;
  std::optional<int> n_samples;
};

void apply_overrides(ExperimentConfig& cfg, const ConfigOverrides& overrides);

// ---------------------------------------------------------------------------
// Environment and uncertainty construction
// ---------------------------------------------------------------------------

std::unique_ptr<GenerativeEnv> make_env(const EnvConfig& cfg);
/// Exact tabular model of the configured environment.
TabularMDP make_mdp(const EnvConfig& cfg);

/// max over (s, a) of KL(P_perturbed(s, a) || P_nominal(s, a)) where
/// P_perturbed is the kernel at param = value. Throws ValidationError when
/// some row is not absolutely continuous with respect to the nominal one.
double matched_kl_radius(const WindyGridworld& env, const std::string& param, double value);

UncertaintySpec make_uncertainty(const ExperimentConfig& cfg, const TabularMDP& mdp);

// ---------------------------------------------------------------------------
// Sweep
// ---------------------------------------------------------------------------

struct SweepRecord {
  std::string method;
  int seed = 0;
  std::string param;
  double param_value = 0.0;
  double mean_return = 0.0;
};

struct SummaryRecord {
  std::string method;
  std::string param;
  double param_value = 0.0;
  double iqm = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
};

struct TrainedPolicy {
  std::string method;
  int seed = 0;
  Policy policy;
};

struct SweepOutput {
  /// Sorted by (method, seed, param_value).
  std::vector<SweepRecord> records;
  /// Sorted by (method, seed).
  std::vector<TrainedPolicy> policies;
};

/// For every method and seed index: train on the nominal gridworld, then
/// evaluate the greedy policy for eval_episodes episodes at each grid value.
///
/// Seeds come from the master seed alone:
///   training   derive_seed(master, {1, seed})        shared by both methods
///   evaluation derive_seed(master, {2, seed, j})     j = grid value index
/// so the output does not depend on `jobs` or scheduling order.
SweepOutput run_sweep(const ExperimentConfig& cfg, int jobs);

/// Per (method, param_value): IQM across seeds and a bootstrap interval
/// seeded by derive_seed(master, {3, fnv1a(method), bits(param_value)}).
/// The interval is widened to contain the IQM when the percentile bounds
/// fall on one side of it.
std::vector<SummaryRecord> summarize(const std::vector<SweepRecord>& records,
                                     int n_resamples, double level,
                                     std::uint64_t master_seed);

void write_raw_csv(std::ostream& out, const std::vector<SweepRecord>& records);
std::vector<SweepRecord> read_raw_csv(std::istream& in);
void write_summary_csv(std::ostream& out, const std::vector<SummaryRecord>& summary);

/// Stable 64-bit FNV-1a hash of a string.
std::uint64_t fnv1a(const std::string& text);

// ---------------------------------------------------------------------------
// Verification batteries
// ---------------------------------------------------------------------------

struct KlBatteryReport {
  int instances = 0;
  /// Largest |dual - grid| / (resolution * ||v||_inf).
  double max_value_ratio = 0.0;
  double max_tv = 0.0;
  int value_failures = 0;
  int tv_failures = 0;
  bool passed = false;
};

/// Random KL instances (support 3 or 4 inside a length-6 vector, values in
/// [-5, 5], beta uniform in [beta_min, beta_max]) compared with the
/// simplex-grid oracle.
KlBatteryReport run_kl_battery(const OracleCheckConfig& cfg, std::uint64_t seed);

struct SamplerBatteryReport {
  /// TV between the N-candidate empirical next-state law and the Gibbs row.
  double limit_tv = 0.0;
  /// Chi-squared p-value of the N = 1 empirical law against the nominal row.
  double nominal_p_value = 0.0;
  bool passed = false;
};

/// Empirical next-state distribution of wrapped_step on a single-row
/// environment with nominal row q and fixed next-state values v.
std::vector<double> sampler_empirical_distribution(const std::vector<double>& q,
                                                   const std::vector<double>& v,
                                                   const SamplerConfig& cfg, int steps,
                                                   Rng& rng);

/// Pearson chi-squared goodness-of-fit p-value of counts against probs.
double chi_squared_p_value(const std::vector<long>& counts, const std::vector<double>& probs);

SamplerBatteryReport run_sampler_battery(const OracleCheckConfig& cfg, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

struct CommandOptions {
  std::filesystem::path config_path;
  std::filesystem::path out_dir = ".";
  ConfigOverrides overrides;
  int jobs = 1;
};

/// Writes <out>/solution.json: the MDP keys plus robust_values,
/// adversarial_kernel, policy and beta. KL uncertainty only.
int cmd_solve(const CommandOptions& opts, std::ostream& log);
/// Writes <out>/model.json (Q table and greedy policy) and
/// <out>/training_log.csv.
int cmd_train(const CommandOptions& opts, std::ostream& log);
/// Writes <out>/raw.csv and <out>/summary.csv, plus <out>/robust.csv
/// (method,seed,beta,robust_return) when an uncertainty section is present.
int cmd_sweep(const CommandOptions& opts, std::ostream& log);
/// Runs both batteries and returns kExitOracleFailure if either fails.
int cmd_oracle_check(const CommandOptions& opts, std::ostream& log);

}  // namespace robustrl
