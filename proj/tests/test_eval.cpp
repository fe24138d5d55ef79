#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace spanline;

TEST(Evaluate, Examples) {
  auto a = compile("x{a*} b a* | a* b x{a*}");
  // the second match is the empty span at the end of "aab"
  EXPECT_EQ(evaluate(a, Document("aab")), (MappingSet{{{"x", Span(0, 2)}}, {{"x", Span(3, 3)}}}));
  EXPECT_TRUE(evaluate(compile("empty"), Document("ab")).empty());
  EXPECT_EQ(evaluate(compile("x{a}|a"), Document("a")), (MappingSet{{{"x", Span(0, 1)}}, Mapping{}}));
}

TEST(Evaluate, AgreesWithNaiveRuns) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    auto a = random_va(seed);
    auto d = random_doc(seed * 31 + 1, seed % 5);
    ASSERT_EQ(evaluate(a, d), oracle::brute_evaluate(a, d)) << "seed " << seed;
  }
}

TEST(Contains, Examples) {
  auto a = compile("x{a}");
  EXPECT_TRUE(contains(a, Document("a"), {{"x", Span(0, 1)}}));
  EXPECT_FALSE(contains(a, Document("a"), {}));
}

TEST(Contains, AgreesWithEvaluate) {
  std::mt19937_64 rng(5);
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    auto a = random_va(seed + 500);
    auto d = random_doc(seed, seed % 4);
    auto out = evaluate(a, d);
    auto all = all_mappings(a.variables, d.size());
    const auto& m = all[rng() % all.size()];
    EXPECT_EQ(contains(a, d, m), out.contains(m));
    for (const auto& hit : out) EXPECT_TRUE(contains(a, d, hit));
  }
}

TEST(BoolAbstraction, Examples) {
  auto b = bool_abstraction(compile("x{a}|a"), Document("a"));
  EXPECT_EQ(b, (BoolSet{{{"x", true}}, {{"x", false}}}));
  auto f = bool_abstraction(compile("x{a*} y{b*}"), Document("ab"));
  EXPECT_EQ(f, (BoolSet{{{"x", true}, {"y", true}}}));
  EXPECT_TRUE(bool_abstraction(compile("empty"), Document("a")).empty());
}

TEST(Json, MappingAndAutomatonRoundTrip) {
  Mapping m{{"x", Span(0, 2)}};
  auto j = to_json(m, {"x", "y"});
  EXPECT_EQ(j.dump(), R"({"x":[0,2],"y":null})");
  EXPECT_EQ(mapping_from_json(j), m);
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    auto a = random_va(seed);
    auto back = automaton_from_json(to_json(a));
    a.dedupe_transitions();
    EXPECT_EQ(to_json(back), to_json(a));
    auto d = random_doc(seed, 3);
    EXPECT_EQ(evaluate(back, d), evaluate(a, d));
  }
  EXPECT_THROW(automaton_from_json(Json::parse(R"({"states": 1})")), ValidationError);
}
