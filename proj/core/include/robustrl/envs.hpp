#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "robustrl/adversarial_sampler.hpp"
#include "robustrl/mdp.hpp"

namespace robustrl {

struct Cell {
  int x = 0;
  int y = 0;
  bool operator==(const Cell&) const = default;
};

/// Actions: 0 up, 1 right, 2 down, 3 left (y grows downward). A move into a
/// wall leaves the agent in place.
struct GridworldParams {
  int width = 7;
  int height = 7;
  Cell start{0, 6};
  Cell goal{6, 6};
  std::vector<Cell> cliff;
  /// Probability that the intended move is replaced by a uniformly random one
  /// (the random move may coincide with the intended one).
  double slip_prob = 0.1;
  double step_reward = -1.0;
  double goal_reward = 20.0;
  double cliff_penalty = -50.0;
  double discount = 0.99;
};

/// Gridworld with slippery moves, a goal and cliff cells.
///
/// Goal and cliff cells are states of their own: entering one costs the step
/// reward, and any action taken there pays goal_reward / cliff_penalty and
/// ends the episode in an absorbing sink. Rewards therefore depend only on
/// (s, a), so exact_mdp() matches the simulator exactly.
class WindyGridworld final : public GenerativeEnv {
 public:
  static constexpr int kActions = 4;

  explicit WindyGridworld(GridworldParams params);

  /// The 7x7 default used by the experiments: start (0,1), goal (6,1) and one
  /// cliff cell at (3,2).
  static WindyGridworld standard();

  const GridworldParams& params() const { return params_; }
  int state_of(Cell c) const { return c.y * params_.width + c.x; }
  Cell cell_of(int state) const;
  int sink_state() const { return params_.width * params_.height; }
  bool is_cliff(Cell c) const;

  int n_states() const override { return sink_state() + 1; }
  int n_actions() const override { return kActions; }
  int initial(Rng& rng) const override;
  Outcome sample(int state, int action, Rng& rng) const override;

  TabularMDP exact_mdp() const;

  /// Current value of a named parameter (same names as with_parameter).
  double parameter(std::string_view name) const;

  /// Copy with one parameter replaced: slip_prob, step_reward, goal_reward,
  /// cliff_penalty or discount. Unknown names throw ContractError.
  WindyGridworld with_parameter(std::string_view name, double value) const;

 private:
  Cell move(Cell c, int action) const;

  GridworldParams params_;
  std::vector<char> cliff_mask_;
};

/// Random tabular MDP: each (s, a) row has `branching` distinct successors
/// with probabilities from sorted uniform cuts; rewards ~ U[0, 1]; uniform
/// initial distribution. Bit-reproducible per seed.
struct GarnetParams {
  int n_states = 10;
  int n_actions = 2;
  int branching = 3;
  double discount = 0.9;
  std::uint64_t seed = 0;
};

TabularMDP make_garnet(const GarnetParams& params);

/// GenerativeEnv view of a TabularMDP; never terminal.
class TabularEnv final : public GenerativeEnv {
 public:
  explicit TabularEnv(TabularMDP mdp);

  const TabularMDP& mdp() const { return mdp_; }
  int n_states() const override { return mdp_.n_states(); }
  int n_actions() const override { return mdp_.n_actions(); }
  int initial(Rng& rng) const override;
  Outcome sample(int state, int action, Rng& rng) const override;

 private:
  TabularMDP mdp_;
};

/// Named parameter with its nominal value and the ordered test values.
struct PerturbationGrid {
  std::string param;
  double nominal = 0.0;
  std::vector<double> values;

  /// Throws ContractError unless nominal is one of the values.
  void validate() const;
  std::size_t nominal_index() const;
};

/// slip_prob grid for the standard gridworld: nominal 0.1.
PerturbationGrid standard_slip_grid();

}  // namespace robustrl
