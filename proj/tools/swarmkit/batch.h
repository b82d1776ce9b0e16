#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "swarmkit/metrics.h"
#include "swarmkit/scenario.h"
#include "swarmkit/trace.h"

namespace swarmkit::cli {

// 64-bit FNV-1a over raw bytes; identifies the config a run came from.
std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t v);

// Distinct for distinct replication indices under the same base seed.
std::uint64_t replication_seed(std::uint64_t base, int replication);

struct AggregateOptions {
  std::int64_t sync_threshold = 50;
  double sync_cadence = 10.0;
  SyncQuantifier quantifier = SyncQuantifier::ForAllOthers;
  double burst_gap = 10.0;  // s; gaps below this count as bursty
};

// Statistics of one replication, kept instead of the full trace.
struct ReplicationMetrics {
  int replication = 0;
  std::uint64_t seed = 0;
  std::vector<double> gaps;
  std::vector<DownloadSample> downloads;
  SyncStats sync;
};

ReplicationMetrics compute_metrics(const EventTrace& trace, std::int64_t num_pieces,
                                   const MetricsWindow& window,
                                   const AggregateOptions& options);

struct MetricsRow {
  std::string label;  // replication index or "pooled"
  std::size_t completed = 0;
  double mean_download = 0.0;
  double stddev_download = 0.0;
  double p50_download = 0.0;
  double p95_download = 0.0;
  double avg_leechers = 0.0;
  double avg_synchronized = 0.0;
  std::size_t gaps = 0;
  double frac_gaps_below = 0.0;
};

struct Aggregate {
  std::vector<MetricsRow> rows;  // one per replication, then pooled
  CcdfCurve interdeparture;
  CcdfCurve download;
  std::vector<OrderStat> order;
};

Aggregate aggregate(const std::vector<ReplicationMetrics>& reps, double burst_gap);

// metrics.csv, interdeparture_ccdf.csv, download_ccdf.csv, order_stats.csv
void write_aggregate(const std::filesystem::path& dir, const Aggregate& agg);

struct BatchOptions {
  std::filesystem::path out_root = "out";
  std::vector<std::uint64_t> seeds;  // one per replication
  int jobs = 0;                      // 0 = hardware concurrency
  std::string config_path;
  std::uint64_t config_hash = 0;
  AggregateOptions metrics;
};

struct ReplicationRecord {
  int replication = 0;
  std::uint64_t seed = 0;
  std::filesystem::path dir;
  std::size_t arrivals = 0;
  std::size_t completed = 0;
  double end_time = 0.0;
};

struct BatchResult {
  std::string scenario;
  std::filesystem::path dir;
  std::vector<ReplicationRecord> replications;
  Aggregate metrics;
};

/// Runs every replication (possibly in parallel), writing
/// out_root/<scenario>/<r>/{trace.csv, summary.csv, manifest.json} and the
/// aggregated CSVs plus a batch manifest.json in out_root/<scenario>/.
/// The first failing replication stops the batch; its error is rethrown
/// as std::runtime_error naming the replication.
BatchResult run_batch(const ScenarioConfig& config, const BatchOptions& options);

}  // namespace swarmkit::cli
