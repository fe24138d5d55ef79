#include <iostream>

#include "spanline/spanline.hpp"

using namespace spanline;

// prints every match of x, then only the maximal ones under span inclusion
int main(int argc, char** argv) {
  std::string text = argc > 1 ? argv[1] : "aabaa";
  Document d(text);
  auto a = compile("a* x{a*} (b|eps) a*");
  std::cout << "all:\n";
  for (const auto& m : evaluate(a, d)) std::cout << "  " << to_json(m).dump() << "\n";
  std::cout << "maximal (direct):\n";
  for (const auto& m : skyline_direct(a, d, builtin_rule("spaninc"))) std::cout << "  " << to_json(m).dump() << "\n";
  auto b = skyline_compiled(a, builtin_rule("spaninc"));
  std::cout << "maximal (compiled, " << b.num_states << " states):\n";
  for (const auto& m : evaluate(b, d)) std::cout << "  " << to_json(m).dump() << "\n";
}
