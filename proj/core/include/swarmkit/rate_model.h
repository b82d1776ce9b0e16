#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "swarmkit/matrix.h"

namespace swarmkit {

/// Instantaneous picture of an unpopular swarm as seen by the fluid model.
///
/// Rates are in kB/s. Leechers are identified by their position in
/// `piece_counts`; equal counts mean the leechers are synchronized.
struct SwarmState {
  std::vector<std::int64_t> piece_counts;
  double seed_capacity = 0.0;
  std::vector<double> leecher_capacities;
  bool seed_present = true;

  std::size_t size() const { return piece_counts.size(); }

  /// Throws std::invalid_argument when the state is empty, sizes disagree,
  /// or any count/capacity is negative or non-finite.
  void validate() const;

  /// Download rate each leecher gets directly from the seed.
  double seed_share() const;

  /// Convenience for homogeneous swarms.
  static SwarmState homogeneous(std::vector<std::int64_t> piece_counts,
                                double seed_capacity, double leecher_capacity,
                                bool seed_present = true);
};

/// Upper bound on the rate at which one leecher can push interesting data to
/// another. Unbounded when the uploader holds strictly more pieces.
class RateBound {
 public:
  RateBound() = default;
  static RateBound unbounded() { return RateBound(true, 0.0); }
  static RateBound finite(double v) { return RateBound(false, v); }

  bool is_unbounded() const { return unbounded_; }
  // Only meaningful when finite.
  double value() const { return value_; }

  // True when `rate` does not exceed the bound (with absolute slack).
  bool admits(double rate, double slack = 0.0) const {
    return unbounded_ || rate <= value_ + slack;
  }

  friend bool operator<=(const RateBound& a, const RateBound& b) {
    if (b.unbounded_) return true;
    if (a.unbounded_) return false;
    return a.value_ <= b.value_;
  }
  bool operator==(const RateBound&) const = default;

 private:
  RateBound(bool unbounded, double v) : unbounded_(unbounded), value_(v) {}
  bool unbounded_ = false;
  double value_ = 0.0;
};

using InterestBoundMatrix = SquareMatrix<RateBound>;

/// Output of the fluid model: who uploads to whom and what everyone gets.
struct RateMatrix {
  SquareMatrix<double> upload;  // upload(i, j): leecher i -> leecher j
  double seed_share = 0.0;
  std::vector<double> download;

  std::size_t size() const { return download.size(); }
  double row_sum(std::size_t i) const;
  double column_sum(std::size_t j) const;
};

/// Interest bounds g given a (possibly partial) upload matrix.
///
/// g(i, j) is unbounded when b[i] > b[j]; otherwise it is the seed share
/// plus everything leechers with more pieces than j upload to i. Diagonal
/// entries are finite zero.
InterestBoundMatrix compute_interest_bounds(const SwarmState& state,
                                            const SquareMatrix<double>& upload);

/// Progressive-filling allocation of every leecher's upload capacity.
///
/// Rows are evaluated class by class in decreasing piece count. Within a
/// row, target classes are visited in decreasing piece count; each target
/// gets min(g, remaining capacity / targets still sharing it), which is the
/// water-filling result because g is non-decreasing along that order.
RateMatrix compute_rates(const SwarmState& state);

/// Highest download rate reachable by the single leecher that is not
/// synchronized with the n - 1 others. Requires n > 1.
double max_download_rate(int n, double seed_capacity, double leecher_capacity);

/// Brute-force water-filling used to cross-check compute_rates.
///
/// Every round grants up to `step` kB/s to each flow that is below both its
/// interest bound and its uploader's remaining capacity, recomputing the
/// bounds from the current matrix between rounds. Throws std::runtime_error
/// if `max_rounds` is hit (0 picks a bound from the capacities).
RateMatrix progressive_fill_oracle(const SwarmState& state, double step,
                                   std::size_t max_rounds = 0);

}  // namespace swarmkit
