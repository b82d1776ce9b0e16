#include "batch.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <thread>

#include "json.hpp"
#include "swarmkit/simulator.h"
#include "swarmkit/version.h"

namespace swarmkit::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string s(16, '0');
  for (int k = 15; k >= 0; --k, v >>= 4) s[static_cast<std::size_t>(k)] = digits[v & 0xf];
  return s;
}

std::uint64_t replication_seed(std::uint64_t base, int replication) {
  // splitmix64 finalizer: a bijection, so distinct inputs give distinct seeds.
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(replication + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

ReplicationMetrics compute_metrics(const EventTrace& trace, std::int64_t num_pieces,
                                   const MetricsWindow& window,
                                   const AggregateOptions& options) {
  ReplicationMetrics m;
  m.gaps = interdeparture_gaps(trace, window);
  m.downloads = download_samples(trace, window);
  SyncOptions so;
  so.threshold = options.sync_threshold;
  so.cadence = options.sync_cadence;
  so.quantifier = options.quantifier;
  so.window = window;
  m.sync = sync_stats(trace, num_pieces, so);
  return m;
}

namespace {

MetricsRow make_row(std::string label, const std::vector<double>& times,
                    const std::vector<double>& gaps, double avg_leechers,
                    double avg_synced, double burst_gap) {
  MetricsRow row;
  row.label = std::move(label);
  const auto s = summarize(times);
  row.completed = s.count;
  row.mean_download = s.mean;
  row.stddev_download = std::sqrt(s.variance);
  if (!times.empty()) {
    row.p50_download = nearest_rank_percentile(times, 50.0);
    row.p95_download = nearest_rank_percentile(times, 95.0);
  }
  row.avg_leechers = avg_leechers;
  row.avg_synchronized = avg_synced;
  row.gaps = gaps.size();
  if (!gaps.empty()) {
    const auto below = std::count_if(gaps.begin(), gaps.end(),
                                     [&](double g) { return g < burst_gap; });
    row.frac_gaps_below = static_cast<double>(below) / static_cast<double>(gaps.size());
  }
  return row;
}

std::vector<double> times_of(const std::vector<DownloadSample>& samples) {
  std::vector<double> t;
  t.reserve(samples.size());
  for (const auto& s : samples) t.push_back(s.download_time);
  return t;
}

ordered_json scenario_json(const ScenarioConfig& config) {
  return ordered_json::parse(scenario_to_json(config));
}

void write_summary_csv(const fs::path& path, const std::vector<LeecherSummary>& leechers) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "id,arrival,capacity,occupancy_at_arrival,completion,departure,download_time,"
         "pieces,received_kb,wasted_kb\n";
  auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : ""; };
  for (const auto& l : leechers) {
    out << l.id << ',' << format_double(l.arrival) << ',' << format_double(l.capacity) << ','
        << l.occupancy_at_arrival << ',' << opt(l.completion) << ',' << opt(l.departure)
        << ',' << opt(l.download_time()) << ',' << l.pieces << ','
        << format_double(l.received_kb) << ',' << format_double(l.wasted_kb) << '\n';
  }
}

void write_json(const fs::path& path, const ordered_json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

MetricsWindow window_of(const ScenarioConfig& c) {
  MetricsWindow w;
  w.warmup = c.warmup;
  if (c.sim_end > 0.0) w.end = c.sim_end;
  return w;
}

}  // namespace

Aggregate aggregate(const std::vector<ReplicationMetrics>& reps, double burst_gap) {
  Aggregate agg;
  std::vector<double> all_times;
  std::vector<double> all_gaps;
  std::vector<DownloadSample> all_samples;
  double leecher_sum = 0.0;
  double synced_sum = 0.0;
  std::size_t samples = 0;
  for (const auto& r : reps) {
    const auto times = times_of(r.downloads);
    agg.rows.push_back(make_row(std::to_string(r.replication), times, r.gaps,
                                r.sync.avg_leechers, r.sync.avg_synchronized, burst_gap));
    all_times.insert(all_times.end(), times.begin(), times.end());
    all_gaps.insert(all_gaps.end(), r.gaps.begin(), r.gaps.end());
    all_samples.insert(all_samples.end(), r.downloads.begin(), r.downloads.end());
    leecher_sum += r.sync.avg_leechers * static_cast<double>(r.sync.samples);
    synced_sum += r.sync.avg_synchronized * static_cast<double>(r.sync.samples);
    samples += r.sync.samples;
  }
  const double s = samples > 0 ? static_cast<double>(samples) : 1.0;
  agg.rows.push_back(make_row("pooled", all_times, all_gaps, leecher_sum / s,
                              synced_sum / s, burst_gap));
  agg.interdeparture = empirical_ccdf(all_gaps);
  agg.download = empirical_ccdf(all_times);
  agg.order = arrival_order_stats(all_samples);
  return agg;
}

void write_aggregate(const fs::path& dir, const Aggregate& agg) {
  fs::create_directories(dir);
  {
    std::ofstream out(dir / "metrics.csv");
    if (!out) throw std::runtime_error("cannot write " + (dir / "metrics.csv").string());
    out << "replication,completed,mean_download_time,stddev_download_time,p50_download_time,"
           "p95_download_time,avg_leechers,avg_synchronized,gaps,frac_gaps_below\n";
    for (const auto& r : agg.rows) {
      out << r.label << ',' << r.completed << ',' << format_double(r.mean_download) << ','
          << format_double(r.stddev_download) << ',' << format_double(r.p50_download) << ','
          << format_double(r.p95_download) << ',' << format_double(r.avg_leechers) << ','
          << format_double(r.avg_synchronized) << ',' << r.gaps << ','
          << format_double(r.frac_gaps_below) << '\n';
    }
  }
  std::ofstream gaps(dir / "interdeparture_ccdf.csv");
  write_ccdf_csv(gaps, agg.interdeparture);
  std::ofstream times(dir / "download_ccdf.csv");
  write_ccdf_csv(times, agg.download);
  std::ofstream order(dir / "order_stats.csv");
  write_order_stats_csv(order, agg.order);
}

BatchResult run_batch(const ScenarioConfig& config, const BatchOptions& options) {
  config.validate();
  if (options.seeds.empty()) throw std::invalid_argument("no replications requested");
  for (std::size_t a = 0; a < options.seeds.size(); ++a) {
    for (std::size_t b = a + 1; b < options.seeds.size(); ++b) {
      if (options.seeds[a] == options.seeds[b]) {
        throw std::invalid_argument("replication seeds must be distinct");
      }
    }
  }

  BatchResult result;
  result.scenario = config.name;
  result.dir = options.out_root / config.name;
  fs::create_directories(result.dir);

  const std::size_t n = options.seeds.size();
  std::vector<ReplicationRecord> records(n);
  std::vector<ReplicationMetrics> metrics(n);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::mutex error_mutex;
  std::optional<std::pair<std::size_t, std::string>> error;

  auto work = [&] {
    for (;;) {
      const std::size_t r = next.fetch_add(1);
      if (r >= n || failed.load()) return;
      try {
        ScenarioConfig c = config;
        c.rng_seed = options.seeds[r];
        const auto run = run_simulation(c);
        const fs::path dir = result.dir / std::to_string(r);
        fs::create_directories(dir);
        {
          std::ofstream out(dir / "trace.csv");
          if (!out) throw std::runtime_error("cannot write " + (dir / "trace.csv").string());
          write_trace_csv(out, run.trace);
        }
        write_summary_csv(dir / "summary.csv", run.leechers);

        auto& rec = records[r];
        rec.replication = static_cast<int>(r);
        rec.seed = c.rng_seed;
        rec.dir = dir;
        rec.arrivals = run.leechers.size();
        rec.completed = static_cast<std::size_t>(std::count_if(
            run.leechers.begin(), run.leechers.end(),
            [](const auto& l) { return l.completion.has_value(); }));
        rec.end_time = run.end_time;

        ordered_json m;
        m["tool"] = "swarmkit";
        m["version"] = kVersion;
        m["config_path"] = options.config_path;
        m["config_hash"] = "fnv1a64:" + hex64(options.config_hash);
        m["replication"] = r;
        m["rng_seed"] = c.rng_seed;
        m["scenario"] = scenario_json(c);
        m["outputs"] = {{"trace", "trace.csv"}, {"summary", "summary.csv"}};
        m["totals"] = {{"arrivals", rec.arrivals},
                       {"completed", rec.completed},
                       {"end_time", run.end_time},
                       {"event_instants", run.steps},
                       {"trace_records", run.trace.size()}};
        write_json(dir / "manifest.json", m);

        metrics[r] = compute_metrics(run.trace, c.num_pieces, window_of(c), options.metrics);
        metrics[r].replication = static_cast<int>(r);
        metrics[r].seed = c.rng_seed;
      } catch (const std::exception& e) {
        std::lock_guard lock(error_mutex);
        if (!error) error.emplace(r, e.what());
        failed.store(true);
        return;
      }
    }
  };

  std::size_t jobs = options.jobs > 0 ? static_cast<std::size_t>(options.jobs)
                                      : std::max(1u, std::thread::hardware_concurrency());
  jobs = std::min(jobs, n);
  if (jobs <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t k = 0; k < jobs; ++k) pool.emplace_back(work);
  }
  if (error) {
    throw std::runtime_error("replication " + std::to_string(error->first) +
                             " failed: " + error->second);
  }

  result.replications = std::move(records);
  result.metrics = aggregate(metrics, options.metrics.burst_gap);
  write_aggregate(result.dir, result.metrics);

  ordered_json m;
  m["tool"] = "swarmkit";
  m["version"] = kVersion;
  m["config_path"] = options.config_path;
  m["config_hash"] = "fnv1a64:" + hex64(options.config_hash);
  m["scenario"] = scenario_json(config);
  m["replications"] = ordered_json::array();
  for (const auto& rec : result.replications) {
    m["replications"].push_back({{"replication", rec.replication},
                                 {"rng_seed", rec.seed},
                                 {"dir", std::to_string(rec.replication)}});
  }
  m["outputs"] = {"metrics.csv", "interdeparture_ccdf.csv", "download_ccdf.csv",
                  "order_stats.csv"};
  write_json(result.dir / "manifest.json", m);
  return result;
}

}  // namespace swarmkit::cli
