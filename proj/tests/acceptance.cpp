// Acceptance criteria 1-9, one PASS/FAIL line each. Exit status 0 only if all pass.
#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "pisynth/cli/acceptance.hpp"

int main(int argc, char** argv) {
  std::vector<int> only;
  for (int i = 1; i < argc; ++i) only.push_back(std::atoi(argv[i]));
  return pisynth::cli::selftest(std::cout, only);
}
