#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "swarmkit/bitmap.h"
#include "swarmkit/rate_model.h"
#include "swarmkit/scenario.h"
#include "swarmkit/trace.h"

namespace swarmkit {

struct LeecherSummary {
  std::int64_t id = 0;
  double arrival = 0.0;
  double capacity = 0.0;
  std::int64_t occupancy_at_arrival = 0;  // downloading leechers already there
  std::optional<double> completion;
  std::optional<double> departure;
  std::int64_t pieces = 0;
  double received_kb = 0.0;  // everything that flowed in, aborted pieces included
  double wasted_kb = 0.0;    // partial pieces lost when an uploader left

  std::optional<double> download_time() const {
    if (!completion) return std::nullopt;
    return *completion - arrival;
  }
};

struct SimulationResult {
  ScenarioConfig config;
  EventTrace trace;
  std::vector<LeecherSummary> leechers;
  double end_time = 0.0;
  std::int64_t steps = 0;  // distinct event instants processed
};

// Read-only view of one in-flight piece transfer.
struct FlowView {
  std::int64_t uploader = kSeedPeer;
  std::int64_t downloader = 0;
  std::int64_t piece = 0;
  double remaining_kb = 0.0;
  double rate = 0.0;
};

// Called after every event instant once rates have been recomputed.
using FlowObserver = std::function<void(double time, std::span<const FlowView> flows)>;

/// Piece-level fluid simulation of one unpopular swarm.
///
/// Every uploader (seed, leecher, or finished leecher still seeding) splits
/// its capacity equally over its active transfers. Each uploader/downloader
/// pair moves one piece at a time, chosen rarest-first among pieces the
/// uploader holds and the downloader neither holds nor is already receiving.
/// Deterministic for a given config, including rng_seed.
SimulationResult run_simulation(const ScenarioConfig& config,
                                const FlowObserver& observer = {});

struct SwarmSnapshot {
  SwarmState state;                // downloading leechers only, ordered by id
  std::vector<std::int64_t> ids;
  std::vector<Bitmap> bitmaps;
};

/// Swarm state right after every record with time <= t has been applied.
/// Throws std::out_of_range when t lies outside [0, horizon] and
/// std::invalid_argument when no leecher is downloading at t.
SwarmSnapshot snapshot_state(const EventTrace& trace, std::int64_t num_pieces,
                             double seed_capacity, double t, double horizon);
SwarmSnapshot snapshot_state(const SimulationResult& result, double t);

/// Average inbound rate (kB/s) of a leecher over [t0, t1].
///
/// Uses Progress records when the trace has them for this leecher (exact,
/// the cumulative curve is linear between records); otherwise falls back to
/// completed pieces times `piece_size`. Throws std::invalid_argument for an
/// empty window or one outside the leecher's recorded residence.
double measured_rate(const EventTrace& trace, std::int64_t leecher, double t0,
                     double t1, double piece_size);

}  // namespace swarmkit
