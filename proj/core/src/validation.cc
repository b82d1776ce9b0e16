#include "swarmkit/validation.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <stdexcept>

#include "swarmkit/rate_model.h"
#include "swarmkit/simulator.h"

namespace swarmkit {

std::string to_string(LabelKind kind) {
  return kind == LabelKind::Arrival ? "arrival" : "sync";
}

namespace {

struct Label {
  double time;
  LabelKind kind;
};

// Arrivals plus the instants at which some pair of downloading leechers
// first comes within `gap` pieces of each other, up to the first completion.
std::vector<Label> find_labels(const EventTrace& trace, std::int64_t gap, double& stop) {
  std::map<std::int64_t, std::int64_t> counts;
  std::set<std::pair<std::int64_t, std::int64_t>> close;
  std::vector<Label> labels;
  stop = trace.empty() ? 0.0 : trace.back().time;

  std::size_t k = 0;
  while (k < trace.size()) {
    const double t = trace[k].time;
    bool arrival = false;
    for (; k < trace.size() && trace[k].time == t; ++k) {
      const auto& r = trace[k];
      if (r.kind == EventKind::Arrival) {
        counts[r.peer] = 0;
        arrival = true;
      } else if (r.kind == EventKind::PieceComplete) {
        ++counts.at(r.peer);
      } else if (r.kind == EventKind::DownloadComplete) {
        stop = t;
        return labels;
      }
    }
    bool synced = false;
    for (auto a = counts.begin(); a != counts.end(); ++a) {
      for (auto b = std::next(a); b != counts.end(); ++b) {
        const auto key = std::make_pair(a->first, b->first);
        const bool now = std::llabs(a->second - b->second) < gap;
        // Sticky: counts jitter around the gap at piece granularity.
        if (now && !close.contains(key)) {
          // A pair that starts out close on arrival is not a transition.
          if (!(arrival && (a->second == 0 || b->second == 0))) synced = true;
          close.insert(key);
        }
      }
    }
    if (arrival) {
      labels.push_back({t, LabelKind::Arrival});
    } else if (synced) {
      labels.push_back({t, LabelKind::Sync});
    }
  }
  return labels;
}

// Leechers whose counts chain within `gap` collapse onto the group maximum.
std::vector<std::int64_t> cluster_counts(const std::vector<std::int64_t>& b, std::int64_t gap) {
  std::vector<std::size_t> order(b.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](auto x, auto y) { return b[x] > b[y]; });
  std::vector<std::int64_t> out(b.size());
  std::int64_t head = 0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const auto v = b[order[k]];
    if (k == 0 || b[order[k - 1]] - v >= gap) head = v;
    out[order[k]] = head;
  }
  return out;
}

void compare_run(const ScenarioConfig& config, const ValidationOptions& opt, int run,
                 std::vector<ValidationPoint>& points) {
  const auto result = run_simulation(config);
  double stop = 0.0;
  const auto labels = find_labels(result.trace, opt.sync_gap, stop);
  for (std::size_t l = 0; l < labels.size(); ++l) {
    const double t0 = labels[l].time;
    const double t1 = l + 1 < labels.size() ? labels[l + 1].time : stop;
    if (!(t1 > t0)) continue;
    auto snap = snapshot_state(result, t0);
    snap.state.piece_counts = cluster_counts(snap.state.piece_counts, opt.sync_gap);
    const auto rates = compute_rates(snap.state);
    for (std::size_t i = 0; i < snap.ids.size(); ++i) {
      ValidationPoint p;
      p.run = run;
      p.label = static_cast<int>(l) + 1;
      p.kind = labels[l].kind;
      p.start = t0;
      p.end = t1;
      p.leecher = snap.ids[i];
      p.pieces = snap.state.piece_counts[i];
      p.model_rate = rates.download[i];
      p.measured_rate = measured_rate(result.trace, p.leecher, t0, t1, config.piece_size);
      p.relative_error = p.model_rate > 0.0
                             ? std::abs(p.measured_rate - p.model_rate) / p.model_rate
                             : std::abs(p.measured_rate);
      points.push_back(p);
    }
  }
}

ScenarioConfig base_config(const ValidationOptions& opt) {
  ScenarioConfig c;
  c.name = "validation";
  c.num_pieces = opt.num_pieces;
  c.piece_size = opt.piece_size;
  c.seed_capacity = opt.seed_capacity;
  c.leecher_capacity = {opt.leecher_capacity, 0.0};
  c.record_progress = true;
  c.rng_seed = opt.rng_seed;
  return c;
}

}  // namespace

ValidationReport run_validation(const ValidationOptions& opt) {
  if (!(opt.tolerance >= 0.0)) throw std::invalid_argument("tolerance must be >= 0");
  if (opt.sync_gap < 1) throw std::invalid_argument("sync gap must be >= 1");
  ValidationReport report;
  report.options = opt;

  if (opt.protocol == ValidationProtocol::FixedArrivals) {
    auto c = base_config(opt);
    c.arrivals = ExplicitArrivals{{0.0, 30.0, 40.0, 50.0, 60.0}};
    compare_run(c, opt, 1, report.points);
  } else {
    if (opt.random_runs < 1) throw std::invalid_argument("random runs must be >= 1");
    if (opt.max_leechers < 2) throw std::invalid_argument("max leechers must be >= 2");
    std::mt19937_64 rng(opt.rng_seed);
    std::uniform_int_distribution<int> size(2, opt.max_leechers);
    std::uniform_real_distribution<double> gap(5.0, 60.0);
    for (int run = 1; run <= opt.random_runs; ++run) {
      auto c = base_config(opt);
      c.rng_seed = rng();
      std::vector<double> times{0.0};
      const int n = size(rng);
      for (int i = 1; i < n; ++i) times.push_back(times.back() + gap(rng));
      c.arrivals = ExplicitArrivals{times};
      compare_run(c, opt, run, report.points);
    }
  }
  for (const auto& p : report.points) {
    report.max_relative_error = std::max(report.max_relative_error, p.relative_error);
  }
  return report;
}

}  // namespace swarmkit
