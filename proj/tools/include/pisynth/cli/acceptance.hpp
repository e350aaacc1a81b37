#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

#include "pisynth/expr.hpp"

namespace pisynth::cli {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
};

// Runs criteria 1..9 (all when `only` is empty) and prints one
// "criterion N <name>: PASS|FAIL  detail" line each.
std::vector<CriterionResult> run_acceptance(std::ostream& out, const std::vector<int>& only = {});

// 0 when every selected criterion passes, 1 otherwise.
int selftest(std::ostream& out, const std::vector<int>& only = {});

// Random smooth expression over vars, defined everywhere on R^n (no ln,
// sqrt or unguarded quotients). depth bounds the tree height.
Expr random_expression(std::mt19937_64& rng, const std::vector<std::string>& vars, int depth = 3);

}  // namespace pisynth::cli
