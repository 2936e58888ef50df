#include <gtest/gtest.h>

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "robustrl/envs.hpp"
#include "robustrl/errors.hpp"
#include "robustrl/mdp_io.hpp"
#include "test_support.hpp"

namespace rt = robustrl::testing;
using robustrl::TabularMDP;
using robustrl::ValidationError;

namespace {

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

void expect_identical(const TabularMDP& a, const TabularMDP& b) {
  EXPECT_EQ(a.n_states(), b.n_states());
  EXPECT_EQ(a.n_actions(), b.n_actions());
  EXPECT_EQ(std::bit_cast<std::uint64_t>(a.discount()), std::bit_cast<std::uint64_t>(b.discount()));
  EXPECT_TRUE(same_bits(a.kernel(), b.kernel()));
  EXPECT_TRUE(same_bits(a.rewards(), b.rewards()));
  EXPECT_TRUE(same_bits(a.initial_dist(), b.initial_dist()));
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "robustrl_io_test";
  std::filesystem::create_directories(dir);
  return dir / name;
}

nlohmann::json small_doc() {
  return nlohmann::json::parse(R"({
    "n_states": 2, "n_actions": 1, "discount": 0.5,
    "kernel": [[[0.25, 0.75]], [[1, 0]]],
    "reward": [[1.5], [-2]],
    "initial_dist": [1, 0]
  })");
}

}  // namespace

TEST(MdpIo, DocumentLayoutUsesNestedKernel) {
  const TabularMDP mdp = robustrl::mdp_from_json(small_doc());
  EXPECT_EQ(mdp.row(0, 0)[1], 0.75);
  EXPECT_EQ(mdp.reward(1, 0), -2.0);
  const auto doc = robustrl::mdp_to_json(mdp);
  EXPECT_EQ(doc["kernel"][0][0][1].get<double>(), 0.75);
  EXPECT_EQ(doc["reward"][1][0].get<double>(), -2.0);
  EXPECT_EQ(doc["n_states"].get<int>(), 2);
}

TEST(MdpIo, RandomModelsRoundTripBitExactThroughFiles) {
  robustrl::Rng rng(1);
  for (int i = 0; i < 20; ++i) {
    const TabularMDP mdp = rt::random_mdp(2 + i % 7, 1 + i % 3, 0.9 + 0.0999 * robustrl::uniform01(rng), rng);
    const auto path = scratch("model_" + std::to_string(i) + ".json");
    robustrl::save_json(path, robustrl::mdp_to_json(mdp));
    expect_identical(mdp, robustrl::mdp_from_json(robustrl::load_json(path)));
  }
}

TEST(MdpIo, SeventeenDigitLiteralsSurvive) {
  auto doc = small_doc();
  doc["kernel"][0][0] = {0.33333333333333331, 0.66666666666666674};
  doc["discount"] = 0.98999999999999999;
  doc["reward"][0][0] = 1.0000000000000002;
  const TabularMDP a = robustrl::mdp_from_json(doc);
  const auto path = scratch("literals.json");
  robustrl::save_json(path, robustrl::mdp_to_json(a));
  const TabularMDP b = robustrl::mdp_from_json(robustrl::load_json(path));
  expect_identical(a, b);
  EXPECT_EQ(b.reward(0, 0), 1.0000000000000002);
}

TEST(MdpIo, GridworldModelRoundTrips) {
  const TabularMDP mdp = robustrl::WindyGridworld::standard().exact_mdp();
  const auto text = robustrl::mdp_to_json(mdp).dump();
  expect_identical(mdp, robustrl::mdp_from_json(nlohmann::json::parse(text)));
}

TEST(MdpIo, MalformedDocumentsAreValidationErrors) {
  auto missing = small_doc();
  missing.erase("initial_dist");
  EXPECT_THROW(robustrl::mdp_from_json(missing), ValidationError);

  auto bad_row = small_doc();
  bad_row["kernel"][0][0] = {0.5, 0.6};
  EXPECT_THROW(robustrl::mdp_from_json(bad_row), ValidationError);

  auto wrong_shape = small_doc();
  wrong_shape["kernel"][1] = nlohmann::json::array();
  EXPECT_THROW(robustrl::mdp_from_json(wrong_shape), ValidationError);

  auto text = small_doc();
  text["reward"][0][0] = "1.5";
  EXPECT_THROW(robustrl::mdp_from_json(text), ValidationError);

  auto gamma = small_doc();
  gamma["discount"] = 1.0;
  EXPECT_THROW(robustrl::mdp_from_json(gamma), ValidationError);

  auto count = small_doc();
  count["n_states"] = 0;
  EXPECT_THROW(robustrl::mdp_from_json(count), ValidationError);
}

TEST(MdpIo, UnreadableFilesAreValidationErrors) {
  EXPECT_THROW(robustrl::load_json(scratch("does_not_exist.json")), ValidationError);
  const auto path = scratch("garbage.json");
  std::ofstream(path) << "{ not json";
  EXPECT_THROW(robustrl::load_json(path), ValidationError);
}

TEST(MdpIo, KernelHelpersRoundTrip) {
  robustrl::Rng rng(2);
  const TabularMDP mdp = rt::random_mdp(3, 2, 0.9, rng);
  const auto doc = robustrl::kernel_to_json(3, 2, mdp.kernel());
  EXPECT_TRUE(same_bits(robustrl::kernel_from_json(doc, 3, 2), mdp.kernel()));
  EXPECT_THROW(robustrl::kernel_from_json(doc, 2, 2), ValidationError);
}
