#include <algorithm>
#include <atomic>
#include <bit>
#include <istream>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>
#include <tuple>

#include "robustrl/errors.hpp"
#include "robustrl/experiment.hpp"
#include "robustrl/format.hpp"

namespace robustrl {

namespace {

// Tags of the seed derivation tree; changing them changes every output.
constexpr std::uint64_t kTrainTag = 1;
constexpr std::uint64_t kEvalTag = 2;
constexpr std::uint64_t kBootstrapTag = 3;

const char* const kMethods[] = {kMethodBaseline, kMethodAdversarial};

struct RunCell {
  int method = 0;
  int seed = 0;
};

double evaluate(const WindyGridworld& env, const Policy& policy, int episodes, int max_steps,
                std::uint64_t seed) {
  Rng rng(seed);
  const SamplerConfig nominal{};
  const ValueFn no_values = [](int) { return 0.0; };
  double total = 0.0;
  for (int e = 0; e < episodes; ++e)
    total += run_episode(env, policy, no_values, nominal, rng, max_steps).episodic_return;
  return total / episodes;
}

bool record_less(const SweepRecord& a, const SweepRecord& b) {
  return std::tie(a.method, a.seed, a.param_value) < std::tie(b.method, b.seed, b.param_value);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

int parse_int(const std::string& text) {
  std::size_t used = 0;
  int value = 0;
  try {
    value = std::stoi(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || text.empty()) throw ValidationError("not an integer: '" + text + "'");
  return value;
}

}  // namespace

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

SweepOutput run_sweep(const ExperimentConfig& cfg, int jobs) {
  if (cfg.env.kind != EnvKind::gridworld)
    throw ValidationError("sweep: the perturbation grid needs a gridworld env");
  if (jobs < 1) throw ValidationError("sweep: --jobs must be positive");
  const SweepConfig& sc = cfg.sweep;
  const WindyGridworld nominal(cfg.env.gridworld);

  std::vector<WindyGridworld> test_envs;
  PerturbationGrid grid;
  try {
    grid = {sc.param, nominal.parameter(sc.param), sc.values};
    grid.validate();
    for (double v : sc.values) test_envs.push_back(nominal.with_parameter(sc.param, v));
  } catch (const ContractError& e) {
    throw ValidationError(std::string("sweep: ") + e.what());
  }

  TrainingSchedule schedule = cfg.agent;
  schedule.discount = cfg.env.gridworld.discount;
  const std::size_t n_values = sc.values.size();

  std::vector<RunCell> cells;
  for (int m = 0; m < 2; ++m)
    for (int s = 0; s < sc.seeds; ++s) cells.push_back({m, s});

  std::vector<std::vector<double>> returns(cells.size());
  std::vector<std::optional<Policy>> policies(cells.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      try {
        const RunCell c = cells[i];
        const std::uint64_t train_seed =
            derive_seed(cfg.seed, {kTrainTag, static_cast<std::uint64_t>(c.seed)});
        std::optional<SamplerConfig> sampler;
        if (c.method == 1) sampler = cfg.sampler;
        const TrainingResult trained = train(nominal, sampler, schedule, train_seed);
        Policy policy = greedy_policy(trained.q);
        std::vector<double> means(n_values);
        for (std::size_t j = 0; j < n_values; ++j) {
          const std::uint64_t eval_seed = derive_seed(
              cfg.seed, {kEvalTag, static_cast<std::uint64_t>(c.seed), static_cast<std::uint64_t>(j)});
          means[j] = evaluate(test_envs[j], policy, sc.eval_episodes,
                              schedule.max_episode_steps, eval_seed);
        }
        returns[i] = std::move(means);
        policies[i] = std::move(policy);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };

  const int n_threads = std::min<int>(jobs, static_cast<int>(cells.size()));
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  SweepOutput out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const char* method = kMethods[cells[i].method];
    for (std::size_t j = 0; j < n_values; ++j)
      out.records.push_back({method, cells[i].seed, sc.param, sc.values[j], returns[i][j]});
    out.policies.push_back({method, cells[i].seed, std::move(*policies[i])});
  }
  std::sort(out.records.begin(), out.records.end(), record_less);
  std::sort(out.policies.begin(), out.policies.end(), [](const auto& a, const auto& b) {
    return std::tie(a.method, a.seed) < std::tie(b.method, b.seed);
  });
  return out;
}

std::vector<SummaryRecord> summarize(const std::vector<SweepRecord>& records, int n_resamples,
                                     double level, std::uint64_t master_seed) {
  std::map<std::tuple<std::string, std::string, double>, std::vector<double>> groups;
  for (const SweepRecord& r : records)
    groups[{r.method, r.param, r.param_value}].push_back(r.mean_return);

  std::vector<SummaryRecord> summary;
  for (auto& [key, samples] : groups) {
    const auto& [method, param, value] = key;
    // order inside a group must not depend on input order
    std::sort(samples.begin(), samples.end());
    Rng rng(derive_seed(master_seed, {kBootstrapTag, fnv1a(method),
                                      std::bit_cast<std::uint64_t>(value)}));
    const double center = iqm(samples);
    Interval ci = bootstrap_ci(samples, n_resamples, level, rng);
    ci.lower = std::min(ci.lower, center);
    ci.upper = std::max(ci.upper, center);
    summary.push_back({method, param, value, center, ci.lower, ci.upper});
  }
  return summary;
}

void write_raw_csv(std::ostream& out, const std::vector<SweepRecord>& records) {
  out << "method,seed,param,param_value,mean_return\n";
  for (const SweepRecord& r : records)
    out << r.method << ',' << r.seed << ',' << r.param << ',' << format_double(r.param_value)
        << ',' << format_double(r.mean_return) << '\n';
}

std::vector<SweepRecord> read_raw_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "method,seed,param,param_value,mean_return")
    throw ValidationError("raw csv: unexpected header");
  std::vector<SweepRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 5) throw ValidationError("raw csv: expected 5 fields in '" + line + "'");
    records.push_back({f[0], parse_int(f[1]), f[2], parse_double(f[3]), parse_double(f[4])});
  }
  return records;
}

void write_summary_csv(std::ostream& out, const std::vector<SummaryRecord>& summary) {
  out << "method,param,param_value,iqm,ci_lo,ci_hi\n";
  for (const SummaryRecord& s : summary)
    out << s.method << ',' << s.param << ',' << format_double(s.param_value) << ','
        << format_double(s.iqm) << ',' << format_double(s.ci_lo) << ','
        << format_double(s.ci_hi) << '\n';
}

}  // namespace robustrl
