// Dense score tables consumed by the chart decoders.
#pragma once

#include <Eigen/Dense>
#include <vector>

#include "jparse/common.hpp"
#include "jparse/trees.hpp"

namespace jparse {

// (extent)^3 dense cube indexed (i, j, h) with h contiguous, so per-(i, j)
// slices map onto Eigen segments.
template <typename T>
class Cube {
 public:
  Cube() = default;
  Cube(int extent, T fill)
      : extent_(extent),
        data_(static_cast<std::size_t>(extent) * extent * extent, fill) {}

  int extent() const { return extent_; }
  bool empty() const { return extent_ == 0; }

  T& operator()(int i, int j, int h) { return data_[offset(i, j, h)]; }
  const T& operator()(int i, int j, int h) const {
    return data_[offset(i, j, h)];
  }

  Eigen::Map<Eigen::Array<T, Eigen::Dynamic, 1>> slice(int i, int j, int h0,
                                                       int len) {
    return {data_.data() + offset(i, j, h0), len};
  }
  Eigen::Map<const Eigen::Array<T, Eigen::Dynamic, 1>> slice(int i, int j,
                                                             int h0,
                                                             int len) const {
    return {data_.data() + offset(i, j, h0), len};
  }

  friend bool operator==(const Cube&, const Cube&) = default;

 private:
  std::size_t offset(int i, int j, int h) const {
    return (static_cast<std::size_t>(i) * extent_ + j) * extent_ + h;
  }

  int extent_ = 0;
  std::vector<T> data_;
};

// Input scores for one sentence of n words.
//   span_c(i, j)     constituent score, 1 <= i <= j <= n
//   arc_d(h, m)      dependency score, h in 0..n, m in 1..n
//   span2o(i, j, h)  second-order span score for word h paired with span
//                    (i, j); h ranges over 0..n and covers both the headed
//                    (i <= h <= j) and hooked (h outside) cases
struct ScoreTables {
  int n = 0;
  Eigen::MatrixXd span_c;
  Eigen::MatrixXd arc_d;
  Cube<Scalar> span2o;

  ScoreTables() = default;
  explicit ScoreTables(int n, bool second_order)
      : n(n),
        span_c(Eigen::MatrixXd::Zero(n + 1, n + 1)),
        arc_d(Eigen::MatrixXd::Zero(n + 1, n + 1)) {
    if (second_order) span2o = Cube<Scalar>(n + 1, 0.0);
  }

  bool has_second_order() const { return !span2o.empty(); }
  void require_finite() const;  // throws Error on non-finite entries
};

ScoreTables random_tables(int n, bool second_order, Rng& rng, double lo = -1.0,
                          double hi = 1.0);

// Hamming-style decoding costs relative to a reference tree: span_cost is
// added to every non-reference constituent span and arc_cost to every
// non-reference arc (the root arc included).
struct CostConfig {
  LTree reference;
  Scalar span_cost = 1.0;
  Scalar arc_cost = 1.0;
};

// Returns a copy of the tables with the costs folded in; second-order scores
// are left untouched.
ScoreTables cost_augment(const ScoreTables& scores, const CostConfig& cost);

}  // namespace jparse
