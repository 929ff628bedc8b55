#include "jparse/common.hpp"

namespace jparse {

const char* errc_name(errc code) {
  switch (code) {
    case errc::length_mismatch: return "LENGTH_MISMATCH";
    case errc::incompatible: return "INCOMPATIBLE";
    case errc::empty_sentence: return "EMPTY_SENTENCE";
    case errc::empty_corpus: return "EMPTY_CORPUS";
    case errc::too_large: return "TOO_LARGE";
    case errc::parse_error: return "PARSE_ERROR";
    case errc::unbalanced_parens: return "UNBALANCED_PARENS";
    case errc::bad_column_count: return "BAD_COLUMN_COUNT";
    case errc::cycle_detected: return "CYCLE_DETECTED";
    case errc::multi_root: return "MULTI_ROOT";
    case errc::alignment_mismatch: return "ALIGNMENT_MISMATCH";
    case errc::unknown_label: return "UNKNOWN_LABEL";
    case errc::stale_tape: return "STALE_TAPE";
    case errc::invalid_score: return "INVALID_SCORE";
    case errc::io_error: return "IO_ERROR";
  }
  return "UNKNOWN";
}

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
  x += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

}  // namespace

void Rng::discard_warmup() {
  std::uint64_t seed = state_[0];
  for (int i = 0; i < 4; ++i) state_[i] = splitmix64(seed);
}

std::uint64_t Rng::bits() {
  const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
  const std::uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = rotl(state_[3], 45);
  return result;
}

std::uint64_t Rng::below(std::uint64_t n) {
  // rejection sampling to stay unbiased
  const std::uint64_t limit = n * ((~std::uint64_t{0}) / n);
  std::uint64_t u;
  do {
    u = bits();
  } while (u >= limit);
  return u % n;
}

}  // namespace jparse
