#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace spanline;

namespace {

const Document kRowsDoc("aaaaaaaaaaa");

MappingSet example_rows() {
  return {Mapping{{"x", Span(1, 2)}, {"y", Span(2, 3)}}, Mapping{{"y", Span(2, 3)}},
          Mapping{{"x", Span(0, 2)}, {"y", Span(2, 3)}}, Mapping{{"x", Span(4, 6)}, {"y", Span(4, 10)}}};
}

}  // namespace

TEST(Filter, ExampleRows) {
  Mapping r1{{"x", Span(1, 2)}, {"y", Span(2, 3)}}, r2{{"y", Span(2, 3)}}, r3{{"x", Span(0, 2)}, {"y", Span(2, 3)}},
      r4{{"x", Span(4, 6)}, {"y", Span(4, 10)}};
  EXPECT_EQ(skyline_filter(example_rows(), kRowsDoc, builtin_rule("varinc")), (MappingSet{r1, r3, r4}));
  EXPECT_EQ(skyline_filter(example_rows(), kRowsDoc, builtin_rule("spaninc")), (MappingSet{r2, r3, r4}));
  EXPECT_EQ(skyline_filter(example_rows(), kRowsDoc, builtin_rule("spanlen")), (MappingSet{r2, r4}));
}

TEST(Filter, ThreadsDoNotChangeResult) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto a = random_va(seed);
    auto d = random_doc(seed, 4);
    auto p = evaluate(a, d);
    EXPECT_EQ(skyline_filter(p, d, builtin_rule("spaninc"), 1), skyline_filter(p, d, builtin_rule("spaninc"), 3));
  }
}

// property: maximality and dominance of every dropped mapping
TEST(Filter, OutputIsTheMaximalElements) {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    auto a = random_va(seed + 40);
    auto d = random_doc(seed, seed % 5);
    auto p = evaluate(a, d);
    for (const auto& name : builtin_rule_names()) {
      Dominance leq(builtin_rule(name, true), d);
      auto sky = skyline_filter(p, d, builtin_rule(name, true));
      EXPECT_EQ(sky, oracle::skyline(p, [&](const Mapping& m1, const Mapping& m2) { return leq(m1, m2); }));
      EXPECT_LE(sky.size(), p.size());
      if (!p.empty()) EXPECT_FALSE(sky.empty());
    }
  }
}

TEST(Direct, Examples) {
  EXPECT_EQ(skyline_direct(compile("x{a}|a"), Document("a"), builtin_rule("varinc")), (MappingSet{{{"x", Span(0, 1)}}}));
  EXPECT_EQ(skyline_direct(compile("x{a*}ba*|a*bx{a*}"), Document("aab"), builtin_rule("spanlen")),
            (MappingSet{{{"x", Span(0, 2)}}}));
}

TEST(Compiled, Examples) {
  auto a = compile("x{a}");
  auto self = skyline_compiled(a, builtin_rule("self"));
  for (const auto& text : {"", "a", "aa", "ab"}) EXPECT_EQ(evaluate(self, Document(text)), evaluate(a, Document(text)));
  EXPECT_EQ(evaluate(skyline_compiled(compile("x{a}|a"), builtin_rule("varinc")), Document("a")),
            (MappingSet{{{"x", Span(0, 1)}}}));
  auto none = skyline_compiled(compile("empty"), builtin_rule("spaninc"));
  EXPECT_TRUE(evaluate(none, Document("ab")).empty());
  EXPECT_THROW(skyline_compiled(a, builtin_rule("spanlen")), NonRegularRule);
}

TEST(Compiled, SequentialOutput) {
  auto b = skyline_compiled(compile("x{a*} b a* | a* b x{a*} | y{a*b}x{a*}"), builtin_rule("ltr"));
  EXPECT_TRUE(is_sequential(b));
}

TEST(Compiled, AgreesWithDirectOnRandomInstances) {
  SkylineCompiler compiler;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    auto a = random_va(seed * 3 + 1);
    auto d = random_doc(seed, seed % 5);
    for (const std::string name : {"self", "varinc", "spaninc", "ltr"}) {
      auto b = compiler.compile(a, builtin_rule(name));
      ASSERT_EQ(evaluate(b, d), skyline_direct(a, d, builtin_rule(name))) << name << " seed " << seed;
    }
  }
}

TEST(Compiled, ExplicitRegularRule) {
  auto inst = instantiate_variable_wise(std::get<VariableWiseRule>(builtin_rule("varinc")), {"x"}, {'a'});
  auto b = skyline_compiled(compile("x{a}|a"), inst);
  EXPECT_EQ(evaluate(b, Document("a")), (MappingSet{{{"x", Span(0, 1)}}}));
  EXPECT_THROW(skyline_compiled(compile("y{a}"), inst), DomainError);
}

TEST(Analysis, SpanInclusionPairs) {
  auto r = analyze_rule(builtin_rule("spaninc"), Document("aaa"));
  auto has = [&](Span l, Span h) {
    return std::any_of(r.pairs.begin(), r.pairs.end(), [&](const auto& p) { return p.lhs == l && p.rhs == h; });
  };
  EXPECT_TRUE(has(Span(0, 0), Span(0, 1)));
  EXPECT_TRUE(has(Span(1, 1), Span(1, 2)));
  EXPECT_TRUE(has(Span(2, 2), Span(2, 3)));
  EXPECT_EQ(r.max_disjoint, 3u);
  EXPECT_FALSE(r.variable_inclusion_like);
}

TEST(Analysis, VariableInclusionPairs) {
  Document d("aa");
  auto r = analyze_rule(builtin_rule("varinc"), d);
  EXPECT_TRUE(r.variable_inclusion_like);
  EXPECT_TRUE(r.has_empty_rhs);
  EXPECT_EQ(r.pairs.size(), all_spans(d.size()).size());
  for (const auto& p : r.pairs) EXPECT_FALSE(p.lhs.has_value());
  EXPECT_FALSE(r.hitting_number.has_value());
}

TEST(Analysis, HittingExample) {
  std::vector<Span> s{Span(0, 2), Span(1, 3), Span(4, 5)};
  EXPECT_EQ(hitting_number(s), 2u);
  EXPECT_EQ(max_disjoint(s), 2u);
  EXPECT_EQ(oracle::brute_hitting(s), 2u);
  EXPECT_EQ(oracle::brute_max_disjoint(s), 2u);
  EXPECT_THROW(hitting_number({Span(1, 1)}), DomainError);
}

// property: greedy optima match brute force and k_p <= k_h <= 2 k_p
TEST(Analysis, GreedyMatchesBruteForce) {
  std::mt19937_64 rng(99);
  for (int it = 0; it < 400; ++it) {
    std::size_t n = 1 + rng() % 12;
    std::vector<Span> s;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t b = rng() % 9;
      s.emplace_back(b, b + 1 + rng() % 4);
    }
    auto kp = max_disjoint(s), kh = hitting_number(s);
    ASSERT_EQ(kp, oracle::brute_max_disjoint(s));
    ASSERT_EQ(kh, oracle::brute_hitting(s));
    EXPECT_LE(kp, kh);
  }
}
