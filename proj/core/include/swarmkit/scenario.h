#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace swarmkit {

// Upload capacity of arriving leechers: uniform on
// [mean * (1 - spread), mean * (1 + spread)], constant when spread == 0.
struct CapacitySpec {
  double mean = 64.0;
  double spread = 0.0;
};

struct ExplicitArrivals {
  std::vector<double> times;
};

struct PoissonArrivals {
  double rate = 0.0;     // 1/s
  double horizon = 0.0;  // last admissible arrival time; 0 = sim_end
};

using ArrivalProcess = std::variant<ExplicitArrivals, PoissonArrivals>;

struct AlwaysOnSeed {};

// Exponential ON and OFF periods; the mean OFF duration is chosen so the
// long-run fraction of time ON equals `availability`.
struct OnOffSeed {
  double mean_on = 1000.0;
  double availability = 1.0;

  double mean_off() const { return mean_on * (1.0 - availability) / availability; }
};

using SeedMode = std::variant<AlwaysOnSeed, OnOffSeed>;

// Everything needed to replay one simulation run bit for bit.
struct ScenarioConfig {
  std::string name = "scenario";
  std::int64_t num_pieces = 1000;
  double piece_size = 256.0;  // kB
  double seed_capacity = 64.0;
  CapacitySpec leecher_capacity;
  std::optional<double> download_cap;  // kB/s, unlimited when empty
  ArrivalProcess arrivals = ExplicitArrivals{};
  SeedMode seed = AlwaysOnSeed{};
  double seeding_time = 0.0;  // s spent seeding after completion
  double sim_end = 0.0;       // 0 = run until the swarm drains
  double warmup = 0.0;        // metrics ignore earlier arrivals
  std::uint64_t rng_seed = 1;
  bool record_progress = false;  // emit cumulative-bytes records per event

  double content_size() const {
    return static_cast<double>(num_pieces) * piece_size;
  }

  // Throws std::invalid_argument on inconsistent settings.
  void validate() const;
};

ScenarioConfig parse_scenario(std::string_view json_text);
ScenarioConfig load_scenario(const std::string& path);
std::string scenario_to_json(const ScenarioConfig& config);

}  // namespace swarmkit
