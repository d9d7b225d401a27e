#include <doctest.h>

#include <string>

#include "levyld/config.hpp"
#include "levyld/errors.hpp"

using namespace levyld;

namespace {

const std::string kMinimal = R"({
  "chain": {"states": ["a", "b"], "Q": [[-2, 2], [1, -1]]},
  "jumps": {
    "a": {"a1": 0.5, "a": 0.1, "c": 2},
    "b": {"a1": -1.0, "a": 0.0, "c": 2, "gamma0": [[0.5, 0.3]]}
  }
})";

void check_same(const ModelConfig& x, const ModelConfig& y) {
  CHECK(x.states == y.states);
  CHECK(x.chain.generator() == y.chain.generator());
  REQUIRE(x.jumps.size() == y.jumps.size());
  for (std::size_t s = 0; s < x.jumps.size(); ++s) {
    const StateJumps& a = x.jumps.state(s);
    const StateJumps& b = y.jumps.state(s);
    CHECK(a.a1 == b.a1);
    CHECK(a.a == b.a);
    CHECK(a.c == b.c);
    REQUIRE(a.gamma0.size() == b.gamma0.size());
    for (std::size_t k = 0; k < a.gamma0.size(); ++k) {
      CHECK(a.gamma0[k].jump == b.gamma0[k].jump);
      CHECK(a.gamma0[k].rate == b.gamma0[k].rate);
    }
  }
  CHECK(x.defaults.u_grid == y.defaults.u_grid);
  CHECK(x.defaults.lambda_grid == y.defaults.lambda_grid);
  CHECK(x.defaults.eps_list == y.defaults.eps_list);
  CHECK(x.defaults.delta_rule.ratio == y.defaults.delta_rule.ratio);
  CHECK(x.defaults.seed == y.defaults.seed);
}

std::string with(std::string text, const std::string& from, const std::string& to) {
  const auto pos = text.find(from);
  REQUIRE(pos != std::string::npos);
  return text.replace(pos, from.size(), to);
}

}  // namespace

TEST_CASE("minimal config gets defaults") {
  const ModelConfig cfg = parse_config(kMinimal);
  CHECK(cfg.states == std::vector<std::string>{"a", "b"});
  CHECK(cfg.jumps.state(1).gamma0.size() == 1);
  CHECK(cfg.defaults.eps_list == std::vector<double>{0.2, 0.1, 0.05, 0.025});
  CHECK(cfg.defaults.u_grid.size() == 41);
  CHECK(cfg.defaults.delta_rule.name() == "equal");
}

TEST_CASE("canonical round trip") {
  for (const char* name : {"two_state.json", "three_state.json"}) {
    const ModelConfig a = load_config(std::string(LEVYLD_MODELS_DIR) + "/" + name);
    const std::string text = to_canonical_json(a);
    const ModelConfig b = parse_config(text);
    check_same(a, b);
    CHECK(to_canonical_json(b) == text);
  }
  const ModelConfig m = parse_config(kMinimal);
  check_same(m, parse_config(to_canonical_json(m)));
}

TEST_CASE("shipped models") {
  const ModelConfig two = load_config(std::string(LEVYLD_MODELS_DIR) + "/two_state.json");
  CHECK(two.states == std::vector<std::string>{"up", "down"});
  CHECK(two.defaults.seed == 20240601u);
  const ModelConfig three = load_config(std::string(LEVYLD_MODELS_DIR) + "/three_state.json");
  CHECK(three.jumps.size() == 3);
}

TEST_CASE("rejections") {
  CHECK_THROWS_AS(parse_config("{"), InvalidModel);
  CHECK_THROWS_AS(parse_config("[]"), InvalidModel);
  CHECK_THROWS_AS(parse_config(with(kMinimal, "\"chain\"", "\"extra\": 1, \"chain\"")), InvalidModel);
  CHECK_THROWS_AS(parse_config(with(kMinimal, "\"a1\": 0.5", "\"a1\": 0.5, \"b1\": 0")), InvalidModel);
  CHECK_THROWS_AS(parse_config(with(kMinimal, "[[-2, 2], [1, -1]]", "[[-2, 2, 0], [1, -1, 0]]")), InvalidModel);
  CHECK_THROWS_AS(parse_config(with(kMinimal, "[[-2, 2], [1, -1]]", "[[-2, 2], [1, -2]]")), InvalidModel);
  CHECK_THROWS_AS(parse_config(with(kMinimal, "\"a\": {", "\"z\": {")), InvalidModel);
  CHECK_THROWS_AS(parse_config(with(kMinimal, "\"a1\": 0.5", "\"a1\": \"x\"")), InvalidModel);
  CHECK_THROWS_AS(parse_config(with(kMinimal, "[[0.5, 0.3]]", "[[0.5]]")), InvalidModel);
  // c - c0 must exceed |a1|.
  CHECK_THROWS_AS(parse_config(with(kMinimal, "\"a1\": 0.5, \"a\": 0.1, \"c\": 2", "\"a1\": 0.5, \"a\": 0.1, \"c\": 0.5")),
                  InvalidModel);
  const std::string defaults = with(kMinimal, "\"jumps\"", "\"defaults\": {\"delta_rule\": \"ratio:5\"}, \"jumps\"");
  CHECK_THROWS_AS(parse_config(defaults), InvalidModel);
  const std::string seed = with(kMinimal, "\"jumps\"", "\"defaults\": {\"seed\": -1}, \"jumps\"");
  CHECK_THROWS_AS(parse_config(seed), InvalidModel);
  CHECK_THROWS_AS(load_config("/nonexistent/model.json"), InvalidModel);
}
