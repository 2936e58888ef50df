#include "robustrl/mdp_io.hpp"

#include <fstream>
#include <string>

#include "robustrl/errors.hpp"

namespace robustrl {

namespace {

using nlohmann::json;

const json& require(const json& doc, const char* key) {
  if (!doc.is_object() || !doc.contains(key))
    throw ValidationError(std::string("missing key '") + key + "'");
  return doc.at(key);
}

int require_count(const json& doc, const char* key) {
  const json& v = require(doc, key);
  if (!v.is_number_integer() || v.get<long long>() <= 0)
    throw ValidationError(std::string("'") + key + "' must be a positive integer");
  return v.get<int>();
}

double as_real(const json& v, const std::string& where) {
  if (!v.is_number()) throw ValidationError(where + ": expected a number");
  return v.get<double>();
}

std::vector<double> real_array(const json& v, std::size_t n, const std::string& where) {
  if (!v.is_array() || v.size() != n)
    throw ValidationError(where + ": expected an array of length " + std::to_string(n));
  std::vector<double> out;
  out.reserve(n);
  for (const json& x : v) out.push_back(as_real(x, where));
  return out;
}

}  // namespace

json kernel_to_json(int n_states, int n_actions, const std::vector<double>& kernel) {
  json k = json::array();
  std::size_t i = 0;
  for (int s = 0; s < n_states; ++s) {
    json per_action = json::array();
    for (int a = 0; a < n_actions; ++a) {
      json row = json::array();
      for (int t = 0; t < n_states; ++t) row.push_back(kernel[i++]);
      per_action.push_back(std::move(row));
    }
    k.push_back(std::move(per_action));
  }
  return k;
}

std::vector<double> kernel_from_json(const json& doc, int n_states, int n_actions) {
  if (!doc.is_array() || doc.size() != static_cast<std::size_t>(n_states))
    throw ValidationError("kernel: expected n_states entries");
  std::vector<double> kernel;
  kernel.reserve(static_cast<std::size_t>(n_states) * n_actions * n_states);
  for (int s = 0; s < n_states; ++s) {
    const json& per_action = doc[static_cast<std::size_t>(s)];
    if (!per_action.is_array() || per_action.size() != static_cast<std::size_t>(n_actions))
      throw ValidationError("kernel[" + std::to_string(s) + "]: expected n_actions rows");
    for (int a = 0; a < n_actions; ++a) {
      const auto row = real_array(per_action[static_cast<std::size_t>(a)],
                                  static_cast<std::size_t>(n_states),
                                  "kernel[" + std::to_string(s) + "][" + std::to_string(a) + "]");
      kernel.insert(kernel.end(), row.begin(), row.end());
    }
  }
  return kernel;
}

json mdp_to_json(const TabularMDP& mdp) {
  const int n = mdp.n_states();
  const int m = mdp.n_actions();
  json reward = json::array();
  for (int s = 0; s < n; ++s) {
    json row = json::array();
    for (int a = 0; a < m; ++a) row.push_back(mdp.reward(s, a));
    reward.push_back(std::move(row));
  }
  json doc;
  doc["n_states"] = n;
  doc["n_actions"] = m;
  doc["discount"] = mdp.discount();
  doc["kernel"] = kernel_to_json(n, m, mdp.kernel());
  doc["reward"] = std::move(reward);
  doc["initial_dist"] = mdp.initial_dist();
  return doc;
}

TabularMDP mdp_from_json(const json& doc) {
  const int n = require_count(doc, "n_states");
  const int m = require_count(doc, "n_actions");
  const double discount = as_real(require(doc, "discount"), "discount");
  std::vector<double> kernel = kernel_from_json(require(doc, "kernel"), n, m);

  const json& rj = require(doc, "reward");
  if (!rj.is_array() || rj.size() != static_cast<std::size_t>(n))
    throw ValidationError("reward: expected n_states rows");
  std::vector<double> reward;
  reward.reserve(static_cast<std::size_t>(n) * m);
  for (int s = 0; s < n; ++s) {
    const auto row = real_array(rj[static_cast<std::size_t>(s)], static_cast<std::size_t>(m),
                                "reward[" + std::to_string(s) + "]");
    reward.insert(reward.end(), row.begin(), row.end());
  }
  std::vector<double> initial =
      real_array(require(doc, "initial_dist"), static_cast<std::size_t>(n), "initial_dist");

  try {
    return TabularMDP(n, m, std::move(kernel), std::move(reward), discount, std::move(initial));
  } catch (const ContractError& e) {
    throw ValidationError(e.what());
  }
}

void save_json(const std::filesystem::path& path, const json& doc) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot open '" + path.string() + "' for writing");
  out << doc.dump(2) << '\n';
  if (!out) throw ValidationError("write to '" + path.string() + "' failed");
}

json load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

}  // namespace robustrl
