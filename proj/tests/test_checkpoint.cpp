#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>

#include "rsrn/checkpoint.hpp"
#include "rsrn/mlp.hpp"
#include "rsrn/rng.hpp"

using rsrn::Activation;

TEST_CASE("mlp json round trip is bitwise") {
  rsrn::RandomStream rng(31);
  const auto net = rsrn::mlp_init({14, 64, 64, 2}, Activation::tanh, rng);
  const auto restored = rsrn::mlp_from_json(rsrn::mlp_to_json(net));
  CHECK(restored.layer_sizes == net.layer_sizes);
  CHECK(restored.hidden_activation == net.hidden_activation);
  CHECK(restored.output_activation == net.output_activation);
  for (std::size_t l = 0; l < net.n_layers(); ++l) {
    CHECK(restored.weights[l] == net.weights[l]);
    CHECK(restored.biases[l] == net.biases[l]);
  }
}

TEST_CASE("mlp file round trip is bitwise") {
  rsrn::RandomStream rng(32);
  const auto net = rsrn::mlp_init({6, 9, 3}, Activation::identity, rng);
  const auto path = std::filesystem::temp_directory_path() / "rsrn_mlp_roundtrip.json";
  rsrn::save_mlp(net, path.string());
  const auto restored = rsrn::load_mlp(path.string());
  for (std::size_t l = 0; l < net.n_layers(); ++l) {
    CHECK(restored.weights[l] == net.weights[l]);
    CHECK(restored.biases[l] == net.biases[l]);
  }
  std::filesystem::remove(path);
}

TEST_CASE("loading rejects unknown or corrupt documents") {
  CHECK_THROWS_AS(rsrn::mlp_from_json(nlohmann::json{{"format", "other/1"}}), std::runtime_error);
  CHECK_THROWS_AS(rsrn::mlp_from_json(nlohmann::json::array()), std::runtime_error);

  rsrn::RandomStream rng(33);
  auto j = rsrn::mlp_to_json(rsrn::mlp_init({2, 3, 1}, Activation::identity, rng));
  j["weights"][0].erase(0);  // drop one coefficient
  CHECK_THROWS_AS(rsrn::mlp_from_json(j), std::runtime_error);

  CHECK_THROWS_AS(rsrn::load_mlp("/nonexistent/path.json"), std::runtime_error);
}
