#include "doctest.h"
#include "dmatch/error.hpp"
#include "dmatch/io.hpp"

using namespace dmatch;

TEST_CASE("instance round trip") {
  const std::string text =
      R"({"types": ["a", "b"], "lambda": [1, 0.5], "mu": [2, 1], "r": [[1, 2], [3, 4]]})";
  const Instance inst = parse_instance_json(text);
  CHECK(inst.type_ids() == std::vector<std::string>{"a", "b"});
  CHECK(inst.reward(1, 0) == 3.0);
  const Instance again = parse_instance_json(instance_to_json(inst));
  CHECK(again.raw().r == inst.raw().r);
  CHECK(again.lambda() == inst.lambda());
}

TEST_CASE("instance schema errors") {
  CHECK_THROWS_AS(parse_instance_json(R"({"lambda": [1], "mu": [1], "r": [[1]], "x": 1})"), Error);
  CHECK_THROWS_AS(parse_instance_json(R"({"lambda": [1], "mu": [1]})"), Error);
  CHECK_THROWS_AS(parse_instance_json(R"({"lambda": [1], "mu": [0], "r": [[1]]})"), ValidationError);
  try {
    parse_instance_json("{\n  \"lambda\": [1,,]\n}");
    FAIL("expected a parse error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kParseError);
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
}

TEST_CASE("policy files use type ids") {
  const Instance inst = parse_instance_json(
      R"({"types": ["x", "y"], "lambda": [1, 1], "mu": [1, 1], "r": [[1, 1], [1, 1]]})");
  const GreedyPolicy p = parse_policy_json(R"({"preferences": {"y": ["x", "y"]}})", inst);
  CHECK(p.preferences(0).empty());
  CHECK(p.preferences(1) == std::vector<TypeIndex>{0, 1});
  CHECK(parse_policy_json(policy_to_json(p, inst), inst) == p);
  CHECK_THROWS_AS(parse_policy_json(R"({"preferences": {"z": []}})", inst), Error);
}
