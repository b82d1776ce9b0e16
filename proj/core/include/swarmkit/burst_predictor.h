#pragma once

#include <cstdint>

namespace swarmkit {

// Inputs for the burst-departure bounds around the leecher that opens a
// busy period. Rates in kB/s, content size in kB, arrival rate in 1/s.
struct BurstScenario {
  double arrival_rate = 0.0;
  double seed_capacity = 0.0;
  double leecher_capacity = 0.0;
  double content_size = 0.0;
  double percentile = 0.99;

  void validate() const;
};

struct BurstBounds {
  double first_download_time = 0.0;  // T = S / c_s
  double expected_arrivals = 0.0;    // lambda * T
  std::int64_t arrivals_quantile = 0;  // n at the configured percentile
  double d_min = 0.0;
  double d_max = 0.0;
  double b_min = 0.0;
  double b_max = 0.0;
  bool burst_possible = false;
};

struct ExtremeRates {
  double d_min = 0.0;
  double d_max = 0.0;
};

/// Smallest k with P[Poisson(mean) <= k] >= p.
///
/// Terms are summed in log space so large means do not underflow the first
/// term. Throws std::invalid_argument for mean <= 0, p outside (0, 1), or
/// mean > 1e6.
std::int64_t poisson_quantile(double mean, double p);

/// Extreme download rates of the n + 1 leecher swarm: d_min when only the
/// first leecher holds the maximal piece count, d_max when every leecher but
/// one does. Both come from compute_rates.
ExtremeRates extreme_rates(std::int64_t n, double seed_capacity,
                           double leecher_capacity);

/// Lower/upper bounds on the expected number of leechers leaving together
/// with the first leecher of a busy period. Bounds are clamped at zero, and
/// are zero when leechers cannot drain the seed's pieces fast enough
/// (c_l < c_s * n / (n + 1)) or when no arrival is expected at the quantile.
BurstBounds predict_bounds(const BurstScenario& scenario);

}  // namespace swarmkit
