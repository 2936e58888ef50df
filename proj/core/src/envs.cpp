#include "robustrl/envs.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "robustrl/errors.hpp"

namespace robustrl {
namespace {

constexpr int kDx[4] = {0, 1, 0, -1};
constexpr int kDy[4] = {-1, 0, 1, 0};

bool in_grid(const GridworldParams& p, Cell c) {
  return c.x >= 0 && c.x < p.width && c.y >= 0 && c.y < p.height;
}

}  // namespace

WindyGridworld::WindyGridworld(GridworldParams params) : params_(std::move(params)) {
  const auto& p = params_;
  if (p.width < 1 || p.height < 1) throw ContractError("gridworld: empty grid");
  if (!(p.slip_prob >= 0.0 && p.slip_prob <= 1.0))
    throw ContractError("gridworld: slip_prob must lie in [0, 1]");
  if (!in_grid(p, p.start) || !in_grid(p, p.goal))
    throw ContractError("gridworld: start or goal outside the grid");
  if (!(p.discount >= 0.0 && p.discount < 1.0))
    throw ContractError("gridworld: discount must lie in [0, 1)");
  cliff_mask_.assign(static_cast<std::size_t>(p.width) * p.height, 0);
  for (const Cell& c : p.cliff) {
    if (!in_grid(p, c)) throw ContractError("gridworld: cliff cell outside the grid");
    if (c == p.goal) throw ContractError("gridworld: goal cannot be a cliff cell");
    if (c == p.start) throw ContractError("gridworld: start cannot be a cliff cell");
    cliff_mask_[state_of(c)] = 1;
  }
}

WindyGridworld WindyGridworld::standard() {
  GridworldParams p;
  // Start and goal sit on row 1 with a single cliff cell under the middle of
  // that row. Walking straight is shortest but passes next to the cliff; the
  // detour along the top wall costs two extra steps.
  p.start = {0, 1};
  p.goal = {6, 1};
  p.cliff = {{3, 2}};
  return WindyGridworld(std::move(p));
}

Cell WindyGridworld::cell_of(int state) const {
  return {state % params_.width, state / params_.width};
}

bool WindyGridworld::is_cliff(Cell c) const {
  return in_grid(params_, c) && cliff_mask_[state_of(c)] != 0;
}

Cell WindyGridworld::move(Cell c, int action) const {
  const Cell next{c.x + kDx[action], c.y + kDy[action]};
  return in_grid(params_, next) ? next : c;
}

int WindyGridworld::initial(Rng&) const { return state_of(params_.start); }

Outcome WindyGridworld::sample(int state, int action, Rng& rng) const {
  if (state < 0 || state >= n_states()) throw ContractError("gridworld: state out of range");
  if (action < 0 || action >= kActions) throw ContractError("gridworld: action out of range");
  if (state == sink_state()) return {state, 0.0, true};
  const Cell c = cell_of(state);
  if (c == params_.goal) return {sink_state(), params_.goal_reward, true};
  if (is_cliff(c)) return {sink_state(), params_.cliff_penalty, true};
  int effective = action;
  if (uniform01(rng) < params_.slip_prob)
    effective = static_cast<int>(rng() % static_cast<std::uint64_t>(kActions));
  return {state_of(move(c, effective)), params_.step_reward, false};
}

TabularMDP WindyGridworld::exact_mdp() const {
  const int n = n_states();
  const int sink = sink_state();
  std::vector<double> kernel(static_cast<std::size_t>(n) * kActions * n, 0.0);
  std::vector<double> reward(static_cast<std::size_t>(n) * kActions, 0.0);
  auto at = [&](int s, int a, int t) -> double& {
    return kernel[(static_cast<std::size_t>(s) * kActions + a) * n + t];
  };
  for (int s = 0; s < n; ++s) {
    for (int a = 0; a < kActions; ++a) {
      double& r = reward[static_cast<std::size_t>(s) * kActions + a];
      if (s == sink) {
        at(s, a, sink) = 1.0;
        continue;
      }
      const Cell c = cell_of(s);
      if (c == params_.goal || is_cliff(c)) {
        r = c == params_.goal ? params_.goal_reward : params_.cliff_penalty;
        at(s, a, sink) = 1.0;
        continue;
      }
      r = params_.step_reward;
      at(s, a, state_of(move(c, a))) += 1.0 - params_.slip_prob;
      for (int b = 0; b < kActions; ++b) at(s, a, state_of(move(c, b))) += params_.slip_prob / kActions;
    }
  }
  std::vector<double> mu(n, 0.0);
  mu[state_of(params_.start)] = 1.0;
  return TabularMDP(n, kActions, std::move(kernel), std::move(reward), params_.discount,
                    std::move(mu));
}

namespace {

template <class Params>
auto* parameter_slot(Params& p, std::string_view name) {
  if (name == "slip_prob") return &p.slip_prob;
  if (name == "step_reward") return &p.step_reward;
  if (name == "goal_reward") return &p.goal_reward;
  if (name == "cliff_penalty") return &p.cliff_penalty;
  if (name == "discount") return &p.discount;
  throw ContractError("gridworld: unknown parameter '" + std::string(name) + "'");
}

}  // namespace

double WindyGridworld::parameter(std::string_view name) const {
  return *parameter_slot(params_, name);
}

WindyGridworld WindyGridworld::with_parameter(std::string_view name, double value) const {
  GridworldParams p = params_;
  *parameter_slot(p, name) = value;
  return WindyGridworld(std::move(p));
}

TabularMDP make_garnet(const GarnetParams& params) {
  const int n = params.n_states;
  const int m = params.n_actions;
  if (n < 1 || m < 1) throw ContractError("garnet: counts must be positive");
  if (params.branching < 1 || params.branching > n)
    throw ContractError("garnet: branching must lie in [1, n_states]");
  Rng rng(params.seed);
  std::vector<double> kernel(static_cast<std::size_t>(n) * m * n, 0.0);
  std::vector<double> reward(static_cast<std::size_t>(n) * m);
  std::vector<int> states(n);
  std::vector<double> cuts(params.branching + 1);
  for (int s = 0; s < n; ++s)
    for (int a = 0; a < m; ++a) {
      std::iota(states.begin(), states.end(), 0);
      // partial Fisher-Yates for the successor set
      for (int k = 0; k < params.branching; ++k) {
        const int j = k + static_cast<int>(rng() % static_cast<std::uint64_t>(n - k));
        std::swap(states[k], states[j]);
      }
      cuts.front() = 0.0;
      cuts.back() = 1.0;
      for (int k = 1; k < params.branching; ++k) cuts[k] = uniform01(rng);
      std::sort(cuts.begin() + 1, cuts.end() - 1);
      double* row = kernel.data() + (static_cast<std::size_t>(s) * m + a) * n;
      for (int k = 0; k < params.branching; ++k) row[states[k]] = cuts[k + 1] - cuts[k];
      // renormalize so that the row sums to one to the last bit we can manage
      const double sum = std::accumulate(row, row + n, 0.0);
      for (int t = 0; t < n; ++t) row[t] /= sum;
      reward[static_cast<std::size_t>(s) * m + a] = uniform01(rng);
    }
  return TabularMDP(n, m, std::move(kernel), std::move(reward), params.discount,
                    std::vector<double>(n, 1.0 / n));
}

TabularEnv::TabularEnv(TabularMDP mdp) : mdp_(std::move(mdp)) {}

int TabularEnv::initial(Rng& rng) const {
  return static_cast<int>(sample_categorical(mdp_.initial_dist(), rng));
}

Outcome TabularEnv::sample(int state, int action, Rng& rng) const {
  if (state < 0 || state >= n_states() || action < 0 || action >= n_actions())
    throw ContractError("tabular env: state or action out of range");
  return {static_cast<int>(sample_categorical(mdp_.row(state, action), rng)),
          mdp_.reward(state, action), false};
}

void PerturbationGrid::validate() const {
  if (param.empty()) throw ContractError("perturbation grid: missing parameter name");
  if (values.empty()) throw ContractError("perturbation grid: no values");
  nominal_index();
}

std::size_t PerturbationGrid::nominal_index() const {
  const auto it = std::find(values.begin(), values.end(), nominal);
  if (it == values.end())
    throw ContractError("perturbation grid: nominal value must appear in the grid");
  return static_cast<std::size_t>(it - values.begin());
}

PerturbationGrid standard_slip_grid() {
  return {"slip_prob", 0.1, {0.0, 0.05, 0.1, 0.2, 0.3, 0.4}};
}

}  // namespace robustrl
