#include "tscope/experiments.hpp"

#include <cstdlib>
#include <iostream>
#include <string>

// One PASS/FAIL line per acceptance criterion; optional arguments select criterion ids.
int main(int argc, char** argv) {
  tscope::AcceptanceOptions opt;
  for (int i = 1; i < argc; ++i) opt.only.push_back(std::atoi(argv[i]));
  bool ok = true;
  tscope::run_acceptance(opt, [&](const tscope::CriterionResult& r) {
    std::cout << tscope::format_result(r) << std::endl;
    ok = ok && r.pass;
  });
  return ok ? 0 : 1;
}
