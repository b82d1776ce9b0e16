#include "swarmkit/burst_predictor.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "swarmkit/rate_model.h"

namespace swarmkit {

void BurstScenario::validate() const {
  if (!(arrival_rate > 0.0)) throw std::invalid_argument("arrival rate must be > 0");
  if (!(seed_capacity > 0.0)) throw std::invalid_argument("seed capacity must be > 0");
  if (!(leecher_capacity >= 0.0)) {
    throw std::invalid_argument("leecher capacity must be >= 0");
  }
  if (!(content_size > 0.0)) throw std::invalid_argument("content size must be > 0");
  if (!(percentile > 0.0 && percentile < 1.0)) {
    throw std::invalid_argument("percentile must lie in (0, 1)");
  }
}

std::int64_t poisson_quantile(double mean, double p) {
  if (!(mean > 0.0)) throw std::invalid_argument("poisson mean must be > 0");
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("p must lie in (0, 1)");
  if (mean > 1e6) throw std::invalid_argument("poisson mean above 1e6 is out of range");

  const double log_mean = std::log(mean);
  double cdf = 0.0;
  for (std::int64_t k = 0;; ++k) {
    const double kd = static_cast<double>(k);
    cdf += std::exp(-mean + kd * log_mean - std::lgamma(kd + 1.0));
    if (cdf >= p) return k;
    // Past the mode the remaining mass is negligible; rounding kept cdf < p.
    if (kd > mean + 50.0 * std::sqrt(mean) + 100.0) return k;
  }
}

ExtremeRates extreme_rates(std::int64_t n, double seed_capacity,
                           double leecher_capacity) {
  if (n < 1) throw std::invalid_argument("extreme_rates needs n >= 1");
  const auto size = static_cast<std::size_t>(n + 1);

  // Only the first leecher is ahead; everyone else strictly descending.
  std::vector<std::int64_t> spread(size);
  for (std::size_t i = 0; i < size; ++i) {
    spread[i] = static_cast<std::int64_t>(size - i);
  }
  const auto lone = compute_rates(
      SwarmState::homogeneous(std::move(spread), seed_capacity, leecher_capacity));
  const double d_min =
      *std::min_element(lone.download.begin() + 1, lone.download.end());

  // Everyone synchronized with the first leecher except the last one.
  std::vector<std::int64_t> packed(size, 2);
  packed.back() = 1;
  const auto crowd = compute_rates(
      SwarmState::homogeneous(std::move(packed), seed_capacity, leecher_capacity));

  return {d_min, crowd.download.back()};
}

BurstBounds predict_bounds(const BurstScenario& sc) {
  sc.validate();
  BurstBounds out;
  out.first_download_time = sc.content_size / sc.seed_capacity;
  out.expected_arrivals = sc.arrival_rate * out.first_download_time;
  out.arrivals_quantile = poisson_quantile(out.expected_arrivals, sc.percentile);

  const auto n = static_cast<double>(out.arrivals_quantile);
  out.burst_possible = out.arrivals_quantile >= 1 &&
                       sc.leecher_capacity >= sc.seed_capacity * n / (n + 1.0);
  if (!out.burst_possible) return out;

  const auto rates =
      extreme_rates(out.arrivals_quantile, sc.seed_capacity, sc.leecher_capacity);
  out.d_min = rates.d_min;
  out.d_max = rates.d_max;
  const double t = out.first_download_time;
  out.b_min = std::max(0.0, sc.arrival_rate * (t - sc.content_size / out.d_min));
  out.b_max = std::max(0.0, sc.arrival_rate * (t - sc.content_size / out.d_max));
  return out;
}

}  // namespace swarmkit
