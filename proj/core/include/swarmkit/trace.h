#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace swarmkit {

enum class EventKind {
  Arrival,
  PieceComplete,
  DownloadComplete,
  Departure,
  SeedOn,
  SeedOff,
  Progress,
};

std::string_view to_string(EventKind kind);
std::optional<EventKind> parse_event_kind(std::string_view text);

inline constexpr std::int64_t kSeedPeer = -1;

// One timestamped record. Which payload fields are meaningful depends on
// the kind:
//   Arrival          value = upload capacity (kB/s)
//   PieceComplete    piece, source (uploader id, kSeedPeer for the seed)
//   DownloadComplete value = download time (s)
//   Progress         value = cumulative kB received
//   Departure, SeedOn, SeedOff carry nothing.
struct TraceRecord {
  double time = 0.0;
  EventKind kind = EventKind::Arrival;
  std::int64_t peer = kSeedPeer;
  std::int64_t piece = -1;
  std::int64_t source = kSeedPeer;
  double value = 0.0;

  bool operator==(const TraceRecord&) const = default;
};

using EventTrace = std::vector<TraceRecord>;

/// CSV with header `time,kind,peer,detail`. The detail column holds
/// `key=value` pairs joined by ';' (e.g. `piece=12;from=-1`). Doubles are
/// written in shortest round-trip form, so write/read is lossless.
void write_trace_csv(std::ostream& out, const EventTrace& trace);
EventTrace read_trace_csv(std::istream& in);

/// Throws std::invalid_argument when times decrease or a Departure has no
/// earlier DownloadComplete for the same leecher.
void check_trace(const EventTrace& trace);

// Shortest round-trip decimal form of a double.
std::string format_double(double v);

}  // namespace swarmkit
