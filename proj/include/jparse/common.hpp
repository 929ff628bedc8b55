// Shared scalar type, error codes and deterministic RNG.
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace jparse {

using Scalar = double;

// Every thrown Error carries one of these codes. Tests match on the code,
// the message is for humans.
enum class errc {
  length_mismatch,
  incompatible,
  empty_sentence,
  empty_corpus,
  too_large,
  parse_error,
  unbalanced_parens,
  bad_column_count,
  cycle_detected,
  multi_root,
  alignment_mismatch,
  unknown_label,
  stale_tape,
  invalid_score,
  io_error,
};

const char* errc_name(errc code);

class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what),
        code_(code) {}
  errc code() const { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) {
  throw Error(code, what);
}

// xoshiro256** seeded through splitmix64. uniform_real_distribution and
// std::shuffle are implementation-defined, so we avoid them to keep streams
// identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    state_[0] = seed;
    discard_warmup();
  }

  std::uint64_t bits();

  // uniform in [0, 1)
  double unit() { return static_cast<double>(bits() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }

  // unbiased uniform integer in [0, n)
  std::uint64_t below(std::uint64_t n);

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[below(i)]);
    }
  }

 private:
  void discard_warmup();
  std::uint64_t state_[4];
};

}  // namespace jparse
