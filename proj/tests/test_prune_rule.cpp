#include <doctest.h>

#include <json.hpp>

#include "graphcvx/errors.hpp"
#include "graphcvx/prune_rule.hpp"
#include "graphcvx/rng.hpp"

using namespace graphcvx;

namespace {

ConvexityCurve curve_of(std::vector<double> scores, std::int64_t first = 1) {
  ConvexityCurve c;
  for (double s : scores) c.push_back({first++, s});
  return c;
}

}  // namespace

TEST_CASE("plateau picks the first layer within epsilon of the best") {
  const auto c = curve_of({0.10, 0.50, 0.70, 0.75, 0.755, 0.752}, 0);
  const auto d = select_prune_layer(c, PruneMode::plateau, 0.01);
  CHECK(d.selected_layer == 3);
  CHECK(d.mode == PruneMode::plateau);
  CHECK(d.epsilon == 0.01);
  CHECK(d.curve.size() == 6);
  CHECK(select_prune_layer(c, PruneMode::argmax).selected_layer == 4);
}

TEST_CASE("strictly increasing curve with epsilon 0 keeps every layer") {
  const auto c = curve_of({0.1, 0.2, 0.3, 0.4});
  CHECK(select_prune_layer(c, PruneMode::plateau, 0.0).selected_layer == 4);
}

TEST_CASE("ties for the maximum go to the earliest layer") {
  ConvexityCurve c;
  for (std::int64_t l = 1; l <= 12; ++l) c.push_back({l, l == 8 || l == 10 ? 0.9 : 0.5});
  CHECK(select_prune_layer(c, PruneMode::argmax).selected_layer == 8);
  CHECK(select_prune_layer(c, PruneMode::plateau, 0.0).selected_layer == 8);
}

TEST_CASE("argmax with a unique maximum") {
  CHECK(select_prune_layer(curve_of({0.3, 0.8, 0.6}), PruneMode::argmax).selected_layer == 2);
  CHECK(select_prune_layer(curve_of({0.3}), PruneMode::plateau).selected_layer == 1);
}

TEST_CASE("larger epsilon never selects a later layer") {
  rng::Engine eng(42);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t len = 1 + rng::below(eng, 24);
    std::vector<double> scores(len);
    for (auto& s : scores) s = rng::unit(eng);
    const auto c = curve_of(scores);
    std::int64_t previous = select_prune_layer(c, PruneMode::plateau, 0.0).selected_layer;
    CHECK(previous == select_prune_layer(c, PruneMode::argmax).selected_layer);
    for (double eps = 0.005; eps <= 1.0; eps += 0.005) {
      const auto layer = select_prune_layer(c, PruneMode::plateau, eps).selected_layer;
      CHECK(layer <= previous);
      previous = layer;
    }
  }
}

TEST_CASE("invalid curves and arguments") {
  CHECK_THROWS_AS(select_prune_layer({}, PruneMode::argmax), Error);
  CHECK_THROWS_AS(select_prune_layer({{2, 0.1}, {2, 0.2}}, PruneMode::argmax), Error);
  CHECK_THROWS_AS(select_prune_layer(curve_of({0.1}), PruneMode::plateau, -0.1), Error);
  CHECK_THROWS_AS(parse_prune_mode("best"), Error);
  CHECK(parse_prune_mode("argmax") == PruneMode::argmax);
}

TEST_CASE("parameter reduction") {
  CHECK(parameter_reduction_estimate(12, 12, 7e6, 1e7) == 0.0);
  CHECK(parameter_reduction_estimate(12, 8, 7e6, 0.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(parameter_reduction_estimate(12, 0, 5.0, 0.0) == 1.0);
  CHECK_THROWS_AS(parameter_reduction_estimate(12, 13, 7e6, 1e7), Error);
  CHECK_THROWS_AS(parameter_reduction_estimate(12, -1, 7e6, 1e7), Error);
  // Base-size encoder geometry: 12 layers of 768 wide blocks with 3072 wide
  // feed-forward, everything else lumped into the remainder.
  const double per_layer = 4 * (768.0 * 768 + 768) + 2 * 768 * 3072 + 3072 + 768 + 4 * 768;
  const double reduction = parameter_reduction_estimate(12, 8, per_layer, 94.4e6 - 12 * per_layer);
  CHECK(reduction > 0.2);
  CHECK(reduction < 0.33);
}

TEST_CASE("decision JSON layout") {
  const auto d = select_prune_layer(curve_of({0.25, 0.5}), PruneMode::plateau, 0.01);
  const auto j = nlohmann::json::parse(decision_to_json(d));
  CHECK(j["mode"] == "plateau");
  CHECK(j["epsilon"] == 0.01);
  CHECK(j["selected_layer"] == 2);
  CHECK(j["curve"] == nlohmann::json::parse("[[1,0.25],[2,0.5]]"));
  CHECK(decision_to_json(d) == decision_to_json(d));
}
