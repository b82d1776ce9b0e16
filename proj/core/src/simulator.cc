#include "swarmkit/simulator.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <map>
#include <queue>
#include <random>
#include <stdexcept>
#include <string>

namespace swarmkit {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kNoFlow = std::numeric_limits<std::size_t>::max();

// Independent RNG streams so changing one process does not shift another.
enum class Stream : std::uint64_t { Arrivals = 1, Capacities, Seed, Pieces };

std::mt19937_64 make_engine(std::uint64_t seed, Stream stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream)};
  return std::mt19937_64(seq);
}

enum class Phase { Downloading, Seeding, Gone };

struct Peer {
  std::int64_t id = 0;
  double capacity = 0.0;
  double arrival = 0.0;
  std::int64_t occupancy_at_arrival = 0;
  Phase phase = Phase::Downloading;
  Bitmap owned;
  Bitmap incoming;  // pieces currently being delivered to this peer
  std::vector<std::size_t> inbound;
  std::vector<std::size_t> outbound;
  double received = 0.0;
  double wasted = 0.0;
  std::optional<double> completion;
  std::optional<double> departure;
};

struct Flow {
  std::int64_t uploader = kSeedPeer;
  std::int64_t downloader = 0;
  std::size_t piece = 0;
  double remaining = 0.0;
  double rate = 0.0;
  bool live = false;
};

void erase_value(std::vector<std::size_t>& v, std::size_t x) {
  auto it = std::find(v.begin(), v.end(), x);
  if (it != v.end()) v.erase(it);
}

void erase_value(std::vector<std::int64_t>& v, std::int64_t x) {
  auto it = std::find(v.begin(), v.end(), x);
  if (it != v.end()) v.erase(it);
}

class Engine {
 public:
  Engine(const ScenarioConfig& config, const FlowObserver& observer)
      : cfg_(config),
        observer_(observer),
        pieces_(static_cast<std::size_t>(config.num_pieces)),
        words_((pieces_ + 63) / 64),
        seed_bitmap_(pieces_, true),
        replicas_(pieces_, 0),
        inflight_(pieces_, 0),
        inflight_any_(words_, 0),
        arrival_rng_(make_engine(config.rng_seed, Stream::Arrivals)),
        capacity_rng_(make_engine(config.rng_seed, Stream::Capacities)),
        seed_rng_(make_engine(config.rng_seed, Stream::Seed)),
        piece_rng_(make_engine(config.rng_seed, Stream::Pieces)) {
    cfg_.validate();
    levels_.emplace_back(words_, 0);
    for (std::size_t p = 0; p < pieces_; ++p) set_level_bit(0, p);
    plan_arrivals();
    if (const auto* oo = std::get_if<OnOffSeed>(&cfg_.seed);
        oo && oo->availability < 1.0) {
      on_off_ = *oo;
      next_toggle_ = std::exponential_distribution<double>(1.0 / oo->mean_on)(seed_rng_);
    }
  }

  SimulationResult run() {
    const double end = cfg_.sim_end > 0.0 ? cfg_.sim_end : kInf;
    while (true) {
      if (++guard_ > kMaxSteps) {
        throw std::runtime_error("simulation exceeded the step limit");
      }
      std::size_t first_flow = kNoFlow;
      const double t_flow = next_flow_completion(first_flow);
      const double t_arrival =
          next_arrival_ < arrivals_.size() ? arrivals_[next_arrival_] : kInf;
      const double t_seeding = seeding_ends_.empty() ? kInf : seeding_ends_.top().first;
      const double t_next = std::min({t_flow, t_arrival, t_seeding, next_toggle_});

      if (t_next < now_) throw std::logic_error("event scheduled in the past");
      if (t_next > end) {
        advance(end - now_);
        now_ = end;
        break;
      }
      if (t_next == kInf) break;  // drained, or stalled with nothing scheduled
      if (cfg_.sim_end == 0.0 && next_arrival_ >= arrivals_.size() &&
          present_.empty()) {
        break;
      }

      advance(t_next - now_);
      now_ = t_next;
      ++steps_;

      while (next_arrival_ < arrivals_.size() && arrivals_[next_arrival_] <= now_) {
        ++next_arrival_;
        admit();
      }
      complete_flows(t_flow == now_ ? first_flow : kNoFlow);
      while (!seeding_ends_.empty() && seeding_ends_.top().first <= now_) {
        const auto id = seeding_ends_.top().second;
        seeding_ends_.pop();
        depart(id);
      }
      if (next_toggle_ <= now_) toggle_seed();

      refill();
      recompute_rates();
      if (cfg_.record_progress) emit_progress();
      notify();
    }
    return finish();
  }

 private:
  static constexpr std::int64_t kMaxSteps = 2'000'000'000;

  void plan_arrivals() {
    if (const auto* ex = std::get_if<ExplicitArrivals>(&cfg_.arrivals)) {
      for (double t : ex->times) {
        if (cfg_.sim_end == 0.0 || t <= cfg_.sim_end) arrivals_.push_back(t);
      }
      return;
    }
    const auto& p = std::get<PoissonArrivals>(cfg_.arrivals);
    double horizon = p.horizon > 0.0 ? p.horizon : cfg_.sim_end;
    if (cfg_.sim_end > 0.0) horizon = std::min(horizon, cfg_.sim_end);
    std::exponential_distribution<double> gap(p.rate);
    for (double t = gap(arrival_rng_); t <= horizon; t += gap(arrival_rng_)) {
      arrivals_.push_back(t);
    }
  }

  // --- replica bookkeeping for rarest-first -------------------------------

  void set_level_bit(std::size_t level, std::size_t p) {
    levels_[level][p / 64] |= std::uint64_t{1} << (p % 64);
  }
  void clear_level_bit(std::size_t level, std::size_t p) {
    levels_[level][p / 64] &= ~(std::uint64_t{1} << (p % 64));
  }
  void bump_replica(std::size_t p, int delta) {
    const auto from = static_cast<std::size_t>(replicas_[p]);
    const auto to = static_cast<std::size_t>(replicas_[p] + delta);
    if (to >= levels_.size()) levels_.resize(to + 1, std::vector<std::uint64_t>(words_, 0));
    clear_level_bit(from, p);
    set_level_bit(to, p);
    replicas_[p] += delta;
  }

  void bump_inflight(std::size_t p, int delta) {
    inflight_[p] += delta;
    const std::uint64_t mask = std::uint64_t{1} << (p % 64);
    if (inflight_[p] > 0) {
      inflight_any_[p / 64] |= mask;
    } else {
      inflight_any_[p / 64] &= ~mask;
    }
  }

  // Rarest piece the uploader can send to `d`. Among equally rare pieces,
  // ones nobody is currently receiving win; remaining ties are uniform.
  std::optional<std::size_t> pick_piece(const Bitmap& source, const Peer& d) {
    const auto& have = source.words();
    const auto& own = d.owned.words();
    const auto& busy = d.incoming.words();
    candidates_.resize(words_);
    std::uint64_t any = 0;
    for (std::size_t w = 0; w < words_; ++w) {
      candidates_[w] = have[w] & ~own[w] & ~busy[w];
      any |= candidates_[w];
    }
    if (!any) return std::nullopt;
    for (const auto& level : levels_) {
      std::size_t total = 0;
      std::size_t idle = 0;
      for (std::size_t w = 0; w < words_; ++w) {
        const std::uint64_t m = candidates_[w] & level[w];
        total += static_cast<std::size_t>(std::popcount(m));
        idle += static_cast<std::size_t>(std::popcount(m & ~inflight_any_[w]));
      }
      if (total == 0) continue;
      const bool prefer_idle = idle > 0;
      auto k = std::uniform_int_distribution<std::size_t>(
          0, (prefer_idle ? idle : total) - 1)(piece_rng_);
      for (std::size_t w = 0; w < words_; ++w) {
        std::uint64_t m = candidates_[w] & level[w];
        if (prefer_idle) m &= ~inflight_any_[w];
        const auto c = static_cast<std::size_t>(std::popcount(m));
        if (k >= c) {
          k -= c;
          continue;
        }
        for (; k > 0; --k) m &= m - 1;
        return w * 64 + static_cast<std::size_t>(std::countr_zero(m));
      }
    }
    throw std::logic_error("replica levels out of sync");
  }

  // --- flows ----------------------------------------------------------------

  Peer& peer(std::int64_t id) { return peers_[static_cast<std::size_t>(id)]; }

  bool has_flow(std::int64_t uploader, const Peer& d) const {
    return std::any_of(d.inbound.begin(), d.inbound.end(), [&](std::size_t f) {
      return flows_[f].uploader == uploader;
    });
  }

  void try_link(std::int64_t uploader, Peer& d) {
    if (d.phase != Phase::Downloading || has_flow(uploader, d)) return;
    const Bitmap* source = &seed_bitmap_;
    if (uploader == kSeedPeer) {
      if (!seed_on_ || cfg_.seed_capacity <= 0.0) return;
    } else {
      const Peer& u = peer(uploader);
      if (u.phase == Phase::Gone || u.capacity <= 0.0) return;
      source = &u.owned;
    }
    const auto piece = pick_piece(*source, d);
    if (!piece) return;

    std::size_t slot;
    if (!free_slots_.empty()) {
      slot = free_slots_.back();
      free_slots_.pop_back();
    } else {
      slot = flows_.size();
      flows_.emplace_back();
    }
    flows_[slot] = Flow{uploader, d.id, *piece, cfg_.piece_size, 0.0, true};
    d.incoming.set(*piece);
    bump_inflight(*piece, +1);
    d.inbound.push_back(slot);
    if (uploader == kSeedPeer) {
      seed_outbound_.push_back(slot);
    } else {
      peer(uploader).outbound.push_back(slot);
    }
  }

  void release(std::size_t slot) {
    Flow& f = flows_[slot];
    Peer& d = peer(f.downloader);
    d.incoming.reset(f.piece);
    bump_inflight(f.piece, -1);
    erase_value(d.inbound, slot);
    if (f.uploader == kSeedPeer) {
      erase_value(seed_outbound_, slot);
    } else {
      erase_value(peer(f.uploader).outbound, slot);
    }
    f.live = false;
    free_slots_.push_back(slot);
  }

  double next_flow_completion(std::size_t& which) const {
    double best = kInf;
    for (std::size_t s = 0; s < flows_.size(); ++s) {
      const Flow& f = flows_[s];
      if (!f.live || f.rate <= 0.0) continue;
      const double t = now_ + f.remaining / f.rate;
      if (t < best) {
        best = t;
        which = s;
      }
    }
    return best;
  }

  void advance(double dt) {
    if (dt <= 0.0) return;
    for (Flow& f : flows_) {
      if (!f.live || f.rate <= 0.0) continue;
      const double moved = std::min(f.remaining, f.rate * dt);
      f.remaining -= moved;
      peer(f.downloader).received += moved;
    }
  }

  // --- exogenous events -----------------------------------------------------

  void admit() {
    Peer p;
    p.id = static_cast<std::int64_t>(peers_.size());
    p.arrival = now_;
    p.occupancy_at_arrival = static_cast<std::int64_t>(downloading_.size());
    const auto& spec = cfg_.leecher_capacity;
    p.capacity = spec.spread > 0.0
                     ? std::uniform_real_distribution<double>(
                           spec.mean * (1.0 - spec.spread),
                           spec.mean * (1.0 + spec.spread))(capacity_rng_)
                     : spec.mean;
    p.owned = Bitmap(pieces_);
    p.incoming = Bitmap(pieces_);
    trace_.push_back({now_, EventKind::Arrival, p.id, -1, kSeedPeer, p.capacity});
    present_.push_back(p.id);
    downloading_.push_back(p.id);
    peers_.push_back(std::move(p));
    touched_downloaders_.push_back(peers_.back().id);
    if (cfg_.record_progress) {
      trace_.push_back({now_, EventKind::Progress, peers_.back().id, -1, kSeedPeer, 0.0});
    }
  }

  void complete_flows(std::size_t forced) {
    const double eps = 1e-9 * cfg_.piece_size;
    done_.clear();
    for (std::size_t s = 0; s < flows_.size(); ++s) {
      const Flow& f = flows_[s];
      if (f.live && (s == forced || (f.rate > 0.0 && f.remaining <= eps))) {
        done_.push_back(s);
      }
    }
    std::sort(done_.begin(), done_.end(), [&](std::size_t a, std::size_t b) {
      const Flow& x = flows_[a];
      const Flow& y = flows_[b];
      return std::tie(x.downloader, x.piece) < std::tie(y.downloader, y.piece);
    });

    finished_.clear();
    for (std::size_t s : done_) {
      const Flow f = flows_[s];
      Peer& d = peer(f.downloader);
      peer(f.downloader).received += flows_[s].remaining;
      release(s);
      d.owned.set(f.piece);
      bump_replica(f.piece, +1);
      trace_.push_back({now_, EventKind::PieceComplete, d.id,
                        static_cast<std::int64_t>(f.piece), f.uploader, 0.0});
      touched_downloaders_.push_back(d.id);
      touched_uploaders_.push_back(d.id);
      if (f.uploader != kSeedPeer) touched_uploaders_.push_back(f.uploader);
      if (d.owned.complete()) finished_.push_back(d.id);
    }

    std::sort(finished_.begin(), finished_.end());
    for (std::int64_t id : finished_) {
      Peer& d = peer(id);
      d.phase = Phase::Seeding;
      d.completion = now_;
      erase_value(downloading_, id);
      if (cfg_.record_progress) {
        trace_.push_back({now_, EventKind::Progress, id, -1, kSeedPeer, d.received});
      }
      trace_.push_back({now_, EventKind::DownloadComplete, id, -1, kSeedPeer,
                        now_ - d.arrival});
      if (cfg_.seeding_time > 0.0) {
        seeding_ends_.push({now_ + cfg_.seeding_time, id});
      } else {
        depart(id);
      }
    }
  }

  void depart(std::int64_t id) {
    Peer& d = peer(id);
    d.phase = Phase::Gone;
    d.departure = now_;
    erase_value(present_, id);
    erase_value(downloading_, id);
    for (std::size_t p = 0; p < pieces_; ++p) {
      if (d.owned.test(p)) bump_replica(p, -1);
    }
    const auto outbound = d.outbound;
    for (std::size_t s : outbound) {
      Peer& x = peer(flows_[s].downloader);
      x.wasted += cfg_.piece_size - flows_[s].remaining;
      touched_downloaders_.push_back(x.id);
      release(s);
    }
    trace_.push_back({now_, EventKind::Departure, id, -1, kSeedPeer, 0.0});
  }

  void toggle_seed() {
    seed_on_ = !seed_on_;
    trace_.push_back({now_, seed_on_ ? EventKind::SeedOn : EventKind::SeedOff,
                      kSeedPeer, -1, kSeedPeer, 0.0});
    const double mean = seed_on_ ? on_off_.mean_on : on_off_.mean_off();
    next_toggle_ = now_ + std::exponential_distribution<double>(1.0 / mean)(seed_rng_);
    if (seed_on_) seed_touched_ = true;
  }

  // Start transfers on every link whose endpoints changed this instant.
  void refill() {
    std::sort(touched_uploaders_.begin(), touched_uploaders_.end());
    touched_uploaders_.erase(
        std::unique(touched_uploaders_.begin(), touched_uploaders_.end()),
        touched_uploaders_.end());
    std::sort(touched_downloaders_.begin(), touched_downloaders_.end());
    touched_downloaders_.erase(
        std::unique(touched_downloaders_.begin(), touched_downloaders_.end()),
        touched_downloaders_.end());

    if (seed_touched_) {
      for (std::int64_t d : downloading_) try_link(kSeedPeer, peer(d));
      seed_touched_ = false;
    }
    for (std::int64_t d : touched_downloaders_) {
      Peer& dp = peer(d);
      if (dp.phase != Phase::Downloading) continue;
      try_link(kSeedPeer, dp);
      for (std::int64_t u : present_) {
        if (u != d) try_link(u, dp);
      }
    }
    for (std::int64_t u : touched_uploaders_) {
      if (peer(u).phase == Phase::Gone) continue;
      for (std::int64_t d : downloading_) {
        if (u != d) try_link(u, peer(d));
      }
    }
    touched_downloaders_.clear();
    touched_uploaders_.clear();
  }

  void recompute_rates() {
    const double seed_rate =
        seed_on_ && !seed_outbound_.empty()
            ? cfg_.seed_capacity / static_cast<double>(seed_outbound_.size())
            : 0.0;
    for (std::size_t s : seed_outbound_) flows_[s].rate = seed_rate;
    for (std::int64_t id : present_) {
      Peer& u = peer(id);
      if (u.outbound.empty()) continue;
      const double r = u.capacity / static_cast<double>(u.outbound.size());
      for (std::size_t s : u.outbound) flows_[s].rate = r;
    }
    if (!cfg_.download_cap) return;
    for (std::int64_t id : downloading_) {
      Peer& d = peer(id);
      double total = 0.0;
      for (std::size_t s : d.inbound) total += flows_[s].rate;
      if (total > *cfg_.download_cap) {
        const double scale = *cfg_.download_cap / total;
        for (std::size_t s : d.inbound) flows_[s].rate *= scale;
      }
    }
  }

  void emit_progress() {
    for (std::int64_t id : downloading_) {
      trace_.push_back({now_, EventKind::Progress, id, -1, kSeedPeer, peer(id).received});
    }
  }

  void notify() {
    if (!observer_) return;
    views_.clear();
    for (const Flow& f : flows_) {
      if (!f.live) continue;
      views_.push_back({f.uploader, f.downloader, static_cast<std::int64_t>(f.piece),
                        f.remaining, f.rate});
    }
    observer_(now_, views_);
  }

  SimulationResult finish() {
    SimulationResult r;
    r.config = cfg_;
    r.trace = std::move(trace_);
    r.end_time = now_;
    r.steps = steps_;
    r.leechers.reserve(peers_.size());
    for (const Peer& p : peers_) {
      LeecherSummary s;
      s.id = p.id;
      s.arrival = p.arrival;
      s.capacity = p.capacity;
      s.occupancy_at_arrival = p.occupancy_at_arrival;
      s.completion = p.completion;
      s.departure = p.departure;
      s.pieces = static_cast<std::int64_t>(p.owned.count());
      s.received_kb = p.received;
      s.wasted_kb = p.wasted;
      r.leechers.push_back(s);
    }
    return r;
  }

  ScenarioConfig cfg_;
  const FlowObserver& observer_;
  std::size_t pieces_;
  std::size_t words_;
  Bitmap seed_bitmap_;

  std::vector<int> replicas_;
  std::vector<int> inflight_;                 // transfers of each piece under way
  std::vector<std::uint64_t> inflight_any_;   // pieces with inflight_ > 0
  std::vector<std::vector<std::uint64_t>> levels_;  // levels_[c]: pieces with c replicas
  std::vector<std::uint64_t> candidates_;

  std::mt19937_64 arrival_rng_;
  std::mt19937_64 capacity_rng_;
  std::mt19937_64 seed_rng_;
  std::mt19937_64 piece_rng_;

  std::vector<double> arrivals_;
  std::size_t next_arrival_ = 0;
  bool seed_on_ = true;
  bool seed_touched_ = true;
  OnOffSeed on_off_;
  double next_toggle_ = kInf;
  std::priority_queue<std::pair<double, std::int64_t>,
                      std::vector<std::pair<double, std::int64_t>>, std::greater<>>
      seeding_ends_;

  std::vector<Peer> peers_;
  std::vector<std::int64_t> present_;
  std::vector<std::int64_t> downloading_;
  std::vector<Flow> flows_;
  std::vector<std::size_t> free_slots_;
  std::vector<std::size_t> seed_outbound_;

  std::vector<std::int64_t> touched_downloaders_;
  std::vector<std::int64_t> touched_uploaders_;
  std::vector<std::size_t> done_;
  std::vector<std::int64_t> finished_;
  std::vector<FlowView> views_;

  EventTrace trace_;
  double now_ = 0.0;
  std::int64_t steps_ = 0;
  std::int64_t guard_ = 0;
};

}  // namespace

SimulationResult run_simulation(const ScenarioConfig& config,
                                const FlowObserver& observer) {
  return Engine(config, observer).run();
}

SwarmSnapshot snapshot_state(const EventTrace& trace, std::int64_t num_pieces,
                             double seed_capacity, double t, double horizon) {
  if (t < 0.0 || t > horizon) {
    throw std::out_of_range("snapshot time " + std::to_string(t) +
                            " outside [0, " + std::to_string(horizon) + "]");
  }
  struct Live {
    double capacity;
    Bitmap owned;
    bool downloading;
  };
  std::map<std::int64_t, Live> live;
  bool seed_on = true;
  const auto n = static_cast<std::size_t>(num_pieces);
  for (const auto& r : trace) {
    if (r.time > t) break;
    switch (r.kind) {
      case EventKind::Arrival:
        live.emplace(r.peer, Live{r.value, Bitmap(n), true});
        break;
      case EventKind::PieceComplete:
        live.at(r.peer).owned.set(static_cast<std::size_t>(r.piece));
        break;
      case EventKind::DownloadComplete:
        live.at(r.peer).downloading = false;
        break;
      case EventKind::Departure:
        live.erase(r.peer);
        break;
      case EventKind::SeedOn:
        seed_on = true;
        break;
      case EventKind::SeedOff:
        seed_on = false;
        break;
      case EventKind::Progress:
        break;
    }
  }

  SwarmSnapshot snap;
  snap.state.seed_capacity = seed_capacity;
  snap.state.seed_present = seed_on;
  for (auto& [id, l] : live) {
    if (!l.downloading) continue;
    snap.ids.push_back(id);
    snap.state.piece_counts.push_back(static_cast<std::int64_t>(l.owned.count()));
    snap.state.leecher_capacities.push_back(l.capacity);
    snap.bitmaps.push_back(std::move(l.owned));
  }
  if (snap.ids.empty()) {
    throw std::invalid_argument("no leecher is downloading at t=" + std::to_string(t));
  }
  return snap;
}

SwarmSnapshot snapshot_state(const SimulationResult& result, double t) {
  return snapshot_state(result.trace, result.config.num_pieces,
                        result.config.seed_capacity, t, result.end_time);
}

double measured_rate(const EventTrace& trace, std::int64_t leecher, double t0,
                     double t1, double piece_size) {
  if (!(t1 > t0)) throw std::invalid_argument("measurement window is empty");

  std::vector<std::pair<double, double>> progress;
  std::vector<std::pair<double, double>> pieces;
  double count = 0.0;
  for (const auto& r : trace) {
    if (r.peer != leecher) continue;
    if (r.kind == EventKind::Arrival) {
      pieces.emplace_back(r.time, 0.0);
    } else if (r.kind == EventKind::Progress) {
      progress.emplace_back(r.time, r.value);
    } else if (r.kind == EventKind::PieceComplete) {
      count += piece_size;
      pieces.emplace_back(r.time, count);
    }
  }
  const auto& curve = progress.empty() ? pieces : progress;
  if (curve.empty() || t0 < curve.front().first || t1 > curve.back().first) {
    throw std::invalid_argument("window outside the recorded residence of leecher " +
                                std::to_string(leecher));
  }
  // Cumulative kB at time t; the last record at a given time wins.
  auto at = [&](double t) {
    auto hi = std::upper_bound(curve.begin(), curve.end(), t,
                               [](double v, const auto& p) { return v < p.first; });
    if (hi == curve.end()) return curve.back().second;
    auto lo = std::prev(hi);
    if (hi->first == lo->first) return lo->second;
    const double w = (t - lo->first) / (hi->first - lo->first);
    return lo->second + w * (hi->second - lo->second);
  };
  return (at(t1) - at(t0)) / (t1 - t0);
}

}  // namespace swarmkit
