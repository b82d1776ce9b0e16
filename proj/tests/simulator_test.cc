#include "swarmkit/simulator.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <set>

#include "swarmkit/rate_model.h"

namespace swarmkit {
namespace {

ScenarioConfig explicit_config(std::vector<double> times) {
  ScenarioConfig c;
  c.arrivals = ExplicitArrivals{std::move(times)};
  return c;
}

// Small, busy scenarios exercising every feature.
std::vector<ScenarioConfig> invariant_configs() {
  std::vector<ScenarioConfig> out;
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    ScenarioConfig c;
    c.name = "inv" + std::to_string(seed);
    c.num_pieces = 40 + static_cast<std::int64_t>(seed) * 7;
    c.piece_size = 64.0;
    c.seed_capacity = 24.0 + 12.0 * static_cast<double>(seed % 3);
    c.leecher_capacity = {48.0, seed % 2 ? 0.5 : 0.0};
    c.arrivals = PoissonArrivals{1.0 / 40.0, 1500.0};
    if (seed % 3 == 0) c.seed = OnOffSeed{150.0, 0.5};
    if (seed % 2 == 0) c.seeding_time = 25.0;
    if (seed == 5) c.download_cap = 40.0;
    c.rng_seed = seed * 1000 + 7;
    out.push_back(c);
  }
  return out;
}

struct Observed {
  std::map<std::int64_t, double> max_upload;    // uploader -> peak summed rate
  std::map<std::int64_t, double> max_download;  // downloader -> peak summed rate
  std::vector<std::pair<double, bool>> seed_sending;  // time, any seed flow > 0
  std::size_t duplicate_pieces = 0;
  std::size_t duplicate_pairs = 0;
  std::size_t bad_flows = 0;
};

Observed observe(const ScenarioConfig& c, SimulationResult& result) {
  Observed o;
  result = run_simulation(c, [&](double t, std::span<const FlowView> flows) {
    std::map<std::int64_t, double> up;
    std::map<std::int64_t, double> down;
    std::set<std::pair<std::int64_t, std::int64_t>> pieces;
    std::set<std::pair<std::int64_t, std::int64_t>> pairs;
    bool seed = false;
    for (const auto& f : flows) {
      up[f.uploader] += f.rate;
      down[f.downloader] += f.rate;
      if (!pieces.insert({f.downloader, f.piece}).second) ++o.duplicate_pieces;
      if (!pairs.insert({f.uploader, f.downloader}).second) ++o.duplicate_pairs;
      if (f.rate < 0.0 || !(f.remaining_kb > 0.0) || f.remaining_kb > c.piece_size + 1e-9) {
        ++o.bad_flows;
      }
      if (f.uploader == kSeedPeer && f.rate > 0.0) seed = true;
    }
    for (auto [id, r] : up) o.max_upload[id] = std::max(o.max_upload[id], r);
    for (auto [id, r] : down) o.max_download[id] = std::max(o.max_download[id], r);
    o.seed_sending.emplace_back(t, seed);
  });
  return o;
}

TEST(SimulatorInvariants, CapacityNeverExceeded) {
  for (const auto& c : invariant_configs()) {
    SimulationResult r;
    const auto o = observe(c, r);
    std::map<std::int64_t, double> cap;
    for (const auto& l : r.leechers) cap[l.id] = l.capacity;
    for (auto [id, peak] : o.max_upload) {
      const double limit = id == kSeedPeer ? c.seed_capacity : cap.at(id);
      EXPECT_LE(peak, limit + 1e-6) << c.name << " uploader " << id;
    }
    if (c.download_cap) {
      for (auto [id, peak] : o.max_download) {
        EXPECT_LE(peak, *c.download_cap + 1e-6) << c.name << " downloader " << id;
      }
    }
    EXPECT_EQ(o.bad_flows, 0u) << c.name;
  }
}

TEST(SimulatorInvariants, NoConcurrentDuplicates) {
  for (const auto& c : invariant_configs()) {
    SimulationResult r;
    const auto o = observe(c, r);
    EXPECT_EQ(o.duplicate_pieces, 0u) << c.name;
    EXPECT_EQ(o.duplicate_pairs, 0u) << c.name;
  }
}

TEST(SimulatorInvariants, PiecesComeFromOwnersAndNeverRepeat) {
  for (const auto& c : invariant_configs()) {
    const auto r = run_simulation(c);
    std::map<std::int64_t, std::set<std::int64_t>> owned;
    for (const auto& rec : r.trace) {
      if (rec.kind != EventKind::PieceComplete) continue;
      ASSERT_GE(rec.piece, 0);
      ASSERT_LT(rec.piece, c.num_pieces);
      if (rec.source != kSeedPeer) {
        EXPECT_TRUE(owned[rec.source].count(rec.piece)) << c.name << " t=" << rec.time;
      }
      EXPECT_TRUE(owned[rec.peer].insert(rec.piece).second) << c.name << " duplicate";
    }
  }
}

TEST(SimulatorInvariants, ConservationAtCompletion) {
  for (const auto& c : invariant_configs()) {
    const auto r = run_simulation(c);
    std::map<std::int64_t, std::int64_t> pieces;
    for (const auto& rec : r.trace) {
      if (rec.kind == EventKind::PieceComplete) ++pieces[rec.peer];
      if (rec.kind == EventKind::DownloadComplete) {
        EXPECT_EQ(pieces[rec.peer], c.num_pieces) << c.name;
      }
    }
    for (const auto& l : r.leechers) {
      if (!l.completion) continue;
      EXPECT_EQ(l.pieces, c.num_pieces);
      EXPECT_NEAR(l.received_kb - l.wasted_kb, c.content_size(), 1e-6 * c.content_size())
          << c.name << " leecher " << l.id;
    }
  }
}

TEST(SimulatorInvariants, SeedSilentWhileOff) {
  for (const auto& c : invariant_configs()) {
    if (!std::holds_alternative<OnOffSeed>(c.seed)) continue;
    SimulationResult r;
    const auto o = observe(c, r);
    std::vector<std::pair<double, bool>> toggles;  // time, on after the record
    for (const auto& rec : r.trace) {
      if (rec.kind == EventKind::SeedOn) toggles.emplace_back(rec.time, true);
      if (rec.kind == EventKind::SeedOff) toggles.emplace_back(rec.time, false);
    }
    ASSERT_FALSE(toggles.empty()) << c.name;
    std::size_t k = 0;
    bool on = true;
    std::size_t off_checks = 0;
    for (auto [t, sending] : o.seed_sending) {
      while (k < toggles.size() && toggles[k].first <= t) on = toggles[k++].second;
      if (!on) {
        EXPECT_FALSE(sending) << c.name << " t=" << t;
        ++off_checks;
      }
    }
    EXPECT_GT(off_checks, 0u);
  }
}

TEST(SimulatorInvariants, TraceIsWellFormed) {
  for (const auto& c : invariant_configs()) {
    const auto r = run_simulation(c);
    EXPECT_NO_THROW(check_trace(r.trace)) << c.name;
    for (const auto& l : r.leechers) {
      if (l.departure && l.completion) {
        EXPECT_NEAR(*l.departure - *l.completion, c.seeding_time, 1e-9) << c.name;
      }
      const double lo = c.leecher_capacity.mean * (1.0 - c.leecher_capacity.spread);
      const double hi = c.leecher_capacity.mean * (1.0 + c.leecher_capacity.spread);
      EXPECT_GE(l.capacity, lo);
      EXPECT_LE(l.capacity, hi);
    }
  }
}

TEST(SimulatorDeterminism, SameSeedSameTrace) {
  for (const auto& c : invariant_configs()) {
    EXPECT_EQ(run_simulation(c).trace, run_simulation(c).trace) << c.name;
  }
}

TEST(SimulatorDeterminism, DifferentSeedDifferentTrace) {
  auto c = invariant_configs().front();
  const auto a = run_simulation(c).trace;
  c.rng_seed += 1;
  EXPECT_NE(run_simulation(c).trace, a);
}

TEST(Simulator, SingleLeecherDownloadsFromSeed) {
  const auto r = run_simulation(explicit_config({0.0}));
  ASSERT_EQ(r.leechers.size(), 1u);
  EXPECT_NEAR(*r.leechers[0].download_time(), 4000.0, 40.0);
}

TEST(Simulator, SpacedArrivalsLeaveInArrivalOrder) {
  const auto r = run_simulation(explicit_config({0, 600, 840, 1080, 1320}));
  for (std::size_t i = 1; i < r.leechers.size(); ++i) {
    EXPECT_GE(*r.leechers[i].departure, *r.leechers[i - 1].departure);
  }
}

TEST(Simulator, CloseArrivalsDepartInABurst) {
  const auto r = run_simulation(explicit_config({0, 240, 480, 720, 1320}));
  const double first = *r.leechers[0].download_time();
  EXPECT_NEAR(first, 4000.0, 80.0);
  double lo = 1e18;
  double hi = -1e18;
  for (const auto& l : r.leechers) {
    lo = std::min(lo, *l.departure);
    hi = std::max(hi, *l.departure);
  }
  EXPECT_LE(hi - lo, 0.05 * first);
}

TEST(Simulator, FirstLeecherTracksSeedRate) {
  auto c = explicit_config({0, 240, 480, 720, 1320});
  c.record_progress = true;
  const auto r = run_simulation(c);
  const double done = *r.leechers[0].completion;
  for (double t = 0.0; t + 240.0 <= done; t += 240.0) {
    EXPECT_NEAR(measured_rate(r.trace, 0, t, t + 240.0, c.piece_size), 64.0, 2.0) << t;
  }
}

TEST(Simulator, LaggardStaysBelowClosedFormBound) {
  auto c = explicit_config({0, 240, 480, 720, 1320});
  c.record_progress = true;
  const auto r = run_simulation(c);
  // Leechers 0..3 are synchronized well before leecher 4 catches up.
  const double bound = max_download_rate(5, 64, 64);
  for (double t = 1400.0; t + 100.0 < *r.leechers[0].completion - 200.0; t += 100.0) {
    EXPECT_LE(measured_rate(r.trace, 4, t, t + 100.0, c.piece_size), bound * 1.02) << t;
  }
}

TEST(Simulator, StalledWhileSeedOffAndSynchronized) {
  ScenarioConfig c = explicit_config({0.0});
  c.num_pieces = 100;
  c.seed = OnOffSeed{200.0, 0.5};
  c.record_progress = true;
  c.rng_seed = 3;
  const auto r = run_simulation(c);
  for (std::size_t k = 0; k + 1 < r.trace.size(); ++k) {
    if (r.trace[k].kind != EventKind::SeedOff) continue;
    const double t0 = r.trace[k].time;
    auto next = std::find_if(r.trace.begin() + static_cast<std::ptrdiff_t>(k), r.trace.end(),
                             [](const auto& x) { return x.kind == EventKind::SeedOn; });
    if (next == r.trace.end() || !(next->time > t0)) continue;
    EXPECT_EQ(measured_rate(r.trace, 0, t0, next->time, c.piece_size), 0.0);
  }
}

TEST(Simulator, HorizonStopsTheRun) {
  ScenarioConfig c;
  c.arrivals = PoissonArrivals{1.0 / 100.0, 0.0};
  c.sim_end = 3000.0;
  const auto r = run_simulation(c);
  EXPECT_LE(r.end_time, 3000.0);
  for (const auto& rec : r.trace) EXPECT_LE(rec.time, 3000.0);
}

TEST(Simulator, RejectsInvalidConfig) {
  ScenarioConfig c;
  c.num_pieces = 0;
  EXPECT_THROW(run_simulation(c), std::invalid_argument);
}

TEST(Snapshot, FiveLeechersAfterLastArrival) {
  auto c = explicit_config({0, 30, 40, 50, 60});
  const auto r = run_simulation(c);
  const auto s = snapshot_state(r, 60.0);
  ASSERT_EQ(s.state.size(), 5u);
  for (std::size_t i = 1; i < 5; ++i) {
    EXPECT_LE(s.state.piece_counts[i], s.state.piece_counts[i - 1]);
  }
  EXPECT_GT(s.state.piece_counts[0], s.state.piece_counts[2]);
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_EQ(s.bitmaps[i].count(), static_cast<std::size_t>(s.state.piece_counts[i]));
  }
}

TEST(Snapshot, SynchronizedBeforeBurst) {
  const auto r = run_simulation(explicit_config({0, 240, 480, 720, 1320}));
  const auto s = snapshot_state(r, *r.leechers[0].completion - 60.0);
  ASSERT_EQ(s.state.size(), 5u);
  const auto [lo, hi] = std::minmax_element(s.state.piece_counts.begin(), s.state.piece_counts.end());
  EXPECT_LE(*hi - *lo, 1);
}

TEST(Snapshot, Errors) {
  const auto r = run_simulation(explicit_config({10.0}));
  EXPECT_THROW(snapshot_state(r, 5.0), std::invalid_argument);
  EXPECT_THROW(snapshot_state(r, -1.0), std::out_of_range);
  EXPECT_THROW(snapshot_state(r, r.end_time + 1.0), std::out_of_range);
}

TEST(MeasuredRate, Errors) {
  auto c = explicit_config({0.0});
  c.record_progress = true;
  const auto r = run_simulation(c);
  EXPECT_THROW(measured_rate(r.trace, 0, 5.0, 5.0, 256), std::invalid_argument);
  EXPECT_THROW(measured_rate(r.trace, 0, 0.0, 1e9, 256), std::invalid_argument);
  EXPECT_THROW(measured_rate(r.trace, 7, 0.0, 10.0, 256), std::invalid_argument);
}

TEST(MeasuredRate, PieceFallbackAgreesOverLongWindows) {
  const auto r = run_simulation(explicit_config({0.0}));
  EXPECT_NEAR(measured_rate(r.trace, 0, 0.0, 3000.0, 256.0), 64.0, 0.5);
}

}  // namespace
}  // namespace swarmkit
