#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace swarmkit {

enum class ValidationProtocol { FixedArrivals, Random };

struct ValidationOptions {
  ValidationProtocol protocol = ValidationProtocol::FixedArrivals;
  double tolerance = 0.10;  // max relative error allowed
  double seed_capacity = 64.0;
  double leecher_capacity = 64.0;
  std::int64_t num_pieces = 1000;
  double piece_size = 256.0;
  // Two leechers count as synchronized once their piece counts differ by
  // less than this many pieces.
  std::int64_t sync_gap = 3;
  // Random protocol only.
  int random_runs = 20;
  int max_leechers = 6;
  std::uint64_t rng_seed = 1;
};

enum class LabelKind { Arrival, Sync };

std::string to_string(LabelKind kind);

struct ValidationPoint {
  int run = 0;
  int label = 0;  // 1-based within the run
  LabelKind kind = LabelKind::Arrival;
  double start = 0.0;  // labeled instant
  double end = 0.0;    // next labeled instant or first completion
  std::int64_t leecher = 0;
  std::int64_t pieces = 0;  // count used for the model state
  double model_rate = 0.0;
  double measured_rate = 0.0;
  double relative_error = 0.0;
};

struct ValidationReport {
  ValidationOptions options;
  std::vector<ValidationPoint> points;
  double max_relative_error = 0.0;

  bool passed() const { return !points.empty() && max_relative_error <= options.tolerance; }
};

/// Runs the arrival protocol, labels every arrival and every pairwise
/// synchronization, and compares the rate model evaluated on the swarm
/// state at each label with the rate the simulator actually delivered until
/// the next label. Leechers whose counts are within `sync_gap` of each
/// other are handed to the model as one synchronized group.
ValidationReport run_validation(const ValidationOptions& options);

}  // namespace swarmkit
