#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <vector>

#include "swarmkit/trace.h"

namespace swarmkit {

// Only leechers arriving in [warmup, end) and busy periods starting there
// contribute to the statistics.
struct MetricsWindow {
  double warmup = 0.0;
  double end = std::numeric_limits<double>::infinity();

  bool admits(double t) const { return t >= warmup && t < end; }
};

// Empirical CCDF. probabilities[k] = P[X > values[k]]; with n distinct
// samples the smallest one maps to 1 - 1/n and the largest to 0.
struct CcdfCurve {
  std::vector<double> values;
  std::vector<double> probabilities;

  std::size_t size() const { return values.size(); }
  bool empty() const { return values.empty(); }
  // Fraction of samples strictly below x.
  double fraction_below(double x) const;
};

CcdfCurve empirical_ccdf(std::vector<double> samples);

// Nearest-rank percentile, q in (0, 100]. Throws on an empty sample.
double nearest_rank_percentile(std::vector<double> samples, double q);

struct BusyPeriod {
  double start = 0.0;
  std::optional<double> end;  // empty if the trace stops mid-period
  std::vector<std::int64_t> members;  // arrival order
};

/// Maximal intervals with at least one downloading leecher. A leecher
/// counts from Arrival until DownloadComplete. Throws std::invalid_argument
/// on records that reference unknown leechers.
std::vector<BusyPeriod> busy_periods(const EventTrace& trace);

/// Gaps between consecutive Departures of leechers that belong to the same
/// busy period, for busy periods starting inside the window.
CcdfCurve interdeparture_ccdf(const EventTrace& trace, const MetricsWindow& window = {});
std::vector<double> interdeparture_gaps(const EventTrace& trace,
                                        const MetricsWindow& window = {});

struct DownloadSample {
  std::int64_t leecher = 0;
  double arrival = 0.0;
  double download_time = 0.0;
  std::int64_t occupancy_at_arrival = 0;
};

/// One sample per completed leecher arriving inside the window, taken as
/// DownloadComplete time minus Arrival time.
std::vector<DownloadSample> download_samples(const EventTrace& trace,
                                             const MetricsWindow& window = {});

struct SampleSummary {
  std::size_t count = 0;
  double mean = 0.0;
  double variance = 0.0;  // unbiased; 0 for fewer than two samples
  double min = 0.0;
  double max = 0.0;
};

SampleSummary summarize(const std::vector<double>& samples);

struct OrderStat {
  std::int64_t index = 0;  // leechers downloading when this one arrived
  std::size_t count = 0;
  double mean = 0.0;
  double stddev = 0.0;
};

/// Mean download time grouped by occupancy at arrival, ascending index.
std::vector<OrderStat> arrival_order_stats(const EventTrace& trace,
                                           const MetricsWindow& window = {});
std::vector<OrderStat> arrival_order_stats(const std::vector<DownloadSample>& samples);

enum class SyncQuantifier {
  // No other leecher holds more than `threshold` pieces this one lacks.
  ForAllOthers,
  // Some other leecher differs from this one by at most `threshold` pieces
  // in both directions.
  ExistsPartner,
};

struct SyncOptions {
  std::int64_t threshold = 50;
  double cadence = 10.0;
  SyncQuantifier quantifier = SyncQuantifier::ForAllOthers;
  MetricsWindow window;
};

struct SyncStats {
  double avg_leechers = 0.0;      // conditioned on N(t) > 1
  double avg_synchronized = 0.0;  // conditioned on N(t) > 1
  double observed_time = 0.0;     // total time with N(t) > 1
  std::size_t samples = 0;
};

/// Time averages sampled every `cadence` seconds inside the window, with
/// bitmaps rebuilt from PieceComplete records. Throws std::invalid_argument
/// when leechers arrive but the trace carries no piece records.
SyncStats sync_stats(const EventTrace& trace, std::int64_t num_pieces,
                     const SyncOptions& options = {});

// Near-equal piece counts, used to label synchronization instants.
inline bool counts_synchronized(std::int64_t a, std::int64_t b, std::int64_t tol = 3) {
  return (a > b ? a - b : b - a) < tol;
}

void write_ccdf_csv(std::ostream& out, const CcdfCurve& curve);
void write_order_stats_csv(std::ostream& out, const std::vector<OrderStat>& stats);

}  // namespace swarmkit
