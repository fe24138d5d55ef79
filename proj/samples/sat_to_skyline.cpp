#include <iostream>

#include "spanline/spanline.hpp"

using namespace spanline;

// decides a DIMACS formula on stdin through the skyline reduction
int main() {
  std::string src((std::istreambuf_iterator<char>(std::cin)), std::istreambuf_iterator<char>());
  auto f = parse_dimacs(src);
  auto inst = sat_to_skyline(f);
  auto sky = skyline_direct(inst.automaton, inst.document, builtin_rule(inst.rule));
  bool sat = sky.size() >= inst.threshold + 1;
  std::cout << (sat ? "SAT" : "UNSAT") << " (" << sky.size() << " skyline mappings, threshold " << inst.threshold
            << ")\n";
  return sat ? 0 : 1;
}
