#include "swarmkit/metrics.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>
#include <unordered_map>

#include "swarmkit/bitmap.h"

namespace swarmkit {

double CcdfCurve::fraction_below(double x) const {
  if (values.empty()) return 0.0;
  const auto it = std::lower_bound(values.begin(), values.end(), x);
  return static_cast<double>(it - values.begin()) / static_cast<double>(values.size());
}

CcdfCurve empirical_ccdf(std::vector<double> samples) {
  std::sort(samples.begin(), samples.end());
  CcdfCurve c;
  const double n = static_cast<double>(samples.size());
  c.values = samples;
  c.probabilities.resize(samples.size());
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const auto above = samples.end() -
                       std::upper_bound(samples.begin(), samples.end(), samples[k]);
    c.probabilities[k] = static_cast<double>(above) / n;
  }
  return c;
}

double nearest_rank_percentile(std::vector<double> samples, double q) {
  if (samples.empty()) throw std::invalid_argument("percentile of an empty sample");
  if (!(q > 0.0 && q <= 100.0)) throw std::invalid_argument("percentile must lie in (0, 100]");
  std::sort(samples.begin(), samples.end());
  const auto rank = static_cast<std::size_t>(
      std::ceil(q / 100.0 * static_cast<double>(samples.size())));
  return samples[std::max<std::size_t>(rank, 1) - 1];
}

std::vector<BusyPeriod> busy_periods(const EventTrace& trace) {
  std::vector<BusyPeriod> out;
  std::unordered_map<std::int64_t, bool> downloading;
  std::size_t active = 0;
  for (const auto& r : trace) {
    if (r.kind == EventKind::Arrival) {
      if (!downloading.emplace(r.peer, true).second) {
        throw std::invalid_argument("leecher " + std::to_string(r.peer) + " arrives twice");
      }
      if (active++ == 0) out.push_back({r.time, std::nullopt, {}});
      out.back().members.push_back(r.peer);
    } else if (r.kind == EventKind::DownloadComplete) {
      auto it = downloading.find(r.peer);
      if (it == downloading.end() || !it->second) {
        throw std::invalid_argument("completion of unknown leecher " + std::to_string(r.peer));
      }
      it->second = false;
      if (--active == 0) out.back().end = r.time;
    }
  }
  return out;
}

std::vector<double> interdeparture_gaps(const EventTrace& trace,
                                        const MetricsWindow& window) {
  const auto periods = busy_periods(trace);
  std::unordered_map<std::int64_t, std::size_t> period_of;
  for (std::size_t p = 0; p < periods.size(); ++p) {
    for (auto id : periods[p].members) period_of[id] = p;
  }
  std::vector<double> gaps;
  std::optional<std::pair<std::size_t, double>> last;  // (period, time)
  for (const auto& r : trace) {
    if (r.kind != EventKind::Departure) continue;
    const auto it = period_of.find(r.peer);
    if (it == period_of.end()) continue;
    const std::size_t p = it->second;
    if (!window.admits(periods[p].start) || !periods[p].end) continue;
    if (last && last->first == p) gaps.push_back(r.time - last->second);
    last = std::make_pair(p, r.time);
  }
  return gaps;
}

CcdfCurve interdeparture_ccdf(const EventTrace& trace, const MetricsWindow& window) {
  return empirical_ccdf(interdeparture_gaps(trace, window));
}

std::vector<DownloadSample> download_samples(const EventTrace& trace,
                                             const MetricsWindow& window) {
  std::map<std::int64_t, DownloadSample> open;
  std::vector<DownloadSample> out;
  std::int64_t downloading = 0;
  for (const auto& r : trace) {
    if (r.kind == EventKind::Arrival) {
      open[r.peer] = {r.peer, r.time, 0.0, downloading};
      ++downloading;
    } else if (r.kind == EventKind::DownloadComplete) {
      --downloading;
      auto it = open.find(r.peer);
      if (it == open.end()) {
        throw std::invalid_argument("completion of unknown leecher " + std::to_string(r.peer));
      }
      DownloadSample s = it->second;
      open.erase(it);
      if (!window.admits(s.arrival)) continue;
      s.download_time = r.time - s.arrival;
      out.push_back(s);
    }
  }
  return out;
}

SampleSummary summarize(const std::vector<double>& samples) {
  SampleSummary s;
  s.count = samples.size();
  if (samples.empty()) return s;
  const double n = static_cast<double>(samples.size());
  s.mean = std::accumulate(samples.begin(), samples.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : samples) ss += (x - s.mean) * (x - s.mean);
  s.variance = samples.size() > 1 ? ss / (n - 1.0) : 0.0;
  const auto [lo, hi] = std::minmax_element(samples.begin(), samples.end());
  s.min = *lo;
  s.max = *hi;
  return s;
}

std::vector<OrderStat> arrival_order_stats(const EventTrace& trace,
                                           const MetricsWindow& window) {
  return arrival_order_stats(download_samples(trace, window));
}

std::vector<OrderStat> arrival_order_stats(const std::vector<DownloadSample>& samples) {
  std::map<std::int64_t, std::vector<double>> groups;
  for (const auto& s : samples) {
    groups[s.occupancy_at_arrival].push_back(s.download_time);
  }
  std::vector<OrderStat> out;
  for (const auto& [index, times] : groups) {
    const auto sum = summarize(times);
    out.push_back({index, sum.count, sum.mean, std::sqrt(sum.variance)});
  }
  return out;
}

namespace {

std::size_t count_synchronized(const std::vector<const Bitmap*>& bitmaps,
                               const SyncOptions& opt) {
  const auto thr = static_cast<std::size_t>(opt.threshold);
  std::size_t synced = 0;
  for (std::size_t i = 0; i < bitmaps.size(); ++i) {
    bool ok = opt.quantifier == SyncQuantifier::ForAllOthers;
    for (std::size_t j = 0; j < bitmaps.size(); ++j) {
      if (i == j) continue;
      const std::size_t lacking = bitmaps[i]->missing_from(*bitmaps[j]);
      if (opt.quantifier == SyncQuantifier::ForAllOthers) {
        if (lacking > thr) {
          ok = false;
          break;
        }
      } else if (lacking <= thr && bitmaps[j]->missing_from(*bitmaps[i]) <= thr) {
        ok = true;
        break;
      }
    }
    if (ok) ++synced;
  }
  return synced;
}

}  // namespace

SyncStats sync_stats(const EventTrace& trace, std::int64_t num_pieces,
                     const SyncOptions& opt) {
  if (!(opt.cadence > 0.0)) throw std::invalid_argument("cadence must be > 0");
  if (opt.threshold < 0) throw std::invalid_argument("threshold must be >= 0");
  const bool has_arrivals = std::any_of(trace.begin(), trace.end(), [](const auto& r) {
    return r.kind == EventKind::Arrival;
  });
  const bool has_pieces = std::any_of(trace.begin(), trace.end(), [](const auto& r) {
    return r.kind == EventKind::PieceComplete;
  });
  if (has_arrivals && !has_pieces) {
    throw std::invalid_argument("trace has no piece records to rebuild bitmaps from");
  }

  SyncStats out;
  if (trace.empty()) return out;
  const double stop = std::min(opt.window.end, trace.back().time);
  const auto n = static_cast<std::size_t>(num_pieces);

  std::map<std::int64_t, Bitmap> downloading;
  std::vector<const Bitmap*> view;
  double leecher_sum = 0.0;
  double synced_sum = 0.0;
  std::size_t next = 0;
  for (std::size_t k = 0;; ++k) {
    const double t = opt.window.warmup + static_cast<double>(k) * opt.cadence;
    if (t >= stop) break;
    for (; next < trace.size() && trace[next].time <= t; ++next) {
      const auto& r = trace[next];
      if (r.kind == EventKind::Arrival) {
        downloading.emplace(r.peer, Bitmap(n));
      } else if (r.kind == EventKind::PieceComplete) {
        auto it = downloading.find(r.peer);
        if (it != downloading.end()) it->second.set(static_cast<std::size_t>(r.piece));
      } else if (r.kind == EventKind::DownloadComplete) {
        downloading.erase(r.peer);
      }
    }
    if (downloading.size() <= 1) continue;
    view.clear();
    for (const auto& [id, bm] : downloading) view.push_back(&bm);
    leecher_sum += static_cast<double>(view.size());
    synced_sum += static_cast<double>(count_synchronized(view, opt));
    ++out.samples;
  }
  if (out.samples > 0) {
    const double s = static_cast<double>(out.samples);
    out.avg_leechers = leecher_sum / s;
    out.avg_synchronized = synced_sum / s;
    out.observed_time = s * opt.cadence;
  }
  return out;
}

void write_ccdf_csv(std::ostream& out, const CcdfCurve& curve) {
  out << "value,ccdf\n";
  for (std::size_t k = 0; k < curve.size(); ++k) {
    out << format_double(curve.values[k]) << ',' << format_double(curve.probabilities[k])
        << '\n';
  }
}

void write_order_stats_csv(std::ostream& out, const std::vector<OrderStat>& stats) {
  out << "index,count,mean_download_time,stddev\n";
  for (const auto& s : stats) {
    out << s.index << ',' << s.count << ',' << format_double(s.mean) << ','
        << format_double(s.stddev) << '\n';
  }
}

}  // namespace swarmkit
