#include "jparse/oracle.hpp"

#include <cmath>
#include <sstream>

namespace jparse {

namespace {

bool close(double a, double b, double rel_tol) {
  const double scale = std::max({std::abs(a), std::abs(b), 1.0});
  return std::abs(a - b) <= rel_tol * scale;
}

// a plausible reference tree for the cost term: decode under fresh random
// scores so the reference is itself a valid l-tree
LTree random_reference(int n, Rng& rng) {
  const ScoreTables t = random_tables(n, false, rng);
  return eisner_satta(t, false).tree;
}

}  // namespace

OracleReport run_oracle_verification(int trials, int max_n,
                                     std::uint64_t seed, double rel_tol) {
  OracleReport report;
  for (int n = 2; n <= max_n; ++n) {
    for (const bool second_order : {false, true}) {
      for (const bool with_cost : {false, true}) {
        OracleCase c{n, second_order, with_cost, trials, 0};
        Rng rng(seed ^ (static_cast<std::uint64_t>(n) << 32) ^
                (second_order ? 2u : 0u) ^ (with_cost ? 1u : 0u));
        for (int t = 0; t < trials; ++t) {
          const ScoreTables tables = random_tables(n, second_order, rng);
          CostConfig cost;
          if (with_cost) {
            cost.reference = random_reference(n, rng);
            cost.span_cost = rng.uniform(0.1, 2.0);
            cost.arc_cost = rng.uniform(0.1, 2.0);
          }
          const CostConfig* cp = with_cost ? &cost : nullptr;
          const DecodeResult fast = eisner_satta(tables, second_order, cp);
          const DecodeResult slow = brute_force_argmax(tables, second_order, cp);
          const Scalar recomputed =
              with_cost
                  ? score_ltree(cost_augment(tables, cost), fast.tree,
                                second_order)
                  : score_ltree(tables, fast.tree, second_order);
          if (!close(fast.score, slow.score, rel_tol) ||
              !close(fast.score, recomputed, rel_tol)) {
            ++c.mismatches;
          }
        }
        report.cases.push_back(c);
      }
    }
  }
  return report;
}

std::string format_report(const OracleReport& report) {
  std::ostringstream out;
  for (const auto& c : report.cases) {
    out << "n=" << c.n << " order=" << (c.second_order ? 2 : 1)
        << " cost=" << (c.with_cost ? "yes" : "no ") << " trials=" << c.trials
        << " mismatches=" << c.mismatches
        << (c.mismatches == 0 ? " ok" : " FAIL") << "\n";
  }
  out << (report.all_passed() ? "all passed" : "verification failed") << "\n";
  return out.str();
}

}  // namespace jparse
