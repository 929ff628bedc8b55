// Randomized cross-verification of the joint decoder against enumeration.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "jparse/decode.hpp"

namespace jparse {

struct OracleCase {
  int n = 0;
  bool second_order = false;
  bool with_cost = false;
  int trials = 0;
  int mismatches = 0;
};

struct OracleReport {
  std::vector<OracleCase> cases;
  bool all_passed() const {
    for (const auto& c : cases) {
      if (c.mismatches > 0) return false;
    }
    return true;
  }
};

// For every n in [2, max_n], both orders, with and without cost
// augmentation: draw `trials` random score tables and require the decoder
// score to match the enumeration argmax within rel_tol.
OracleReport run_oracle_verification(int trials, int max_n,
                                     std::uint64_t seed,
                                     double rel_tol = 1e-9);

std::string format_report(const OracleReport& report);

}  // namespace jparse
