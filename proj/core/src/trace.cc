#include "swarmkit/trace.h"

#include <array>
#include <charconv>
#include <istream>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <unordered_set>

namespace swarmkit {
namespace {

constexpr std::array<std::pair<EventKind, std::string_view>, 7> kKindNames{{
    {EventKind::Arrival, "Arrival"},
    {EventKind::PieceComplete, "PieceComplete"},
    {EventKind::DownloadComplete, "DownloadComplete"},
    {EventKind::Departure, "Departure"},
    {EventKind::SeedOn, "SeedOn"},
    {EventKind::SeedOff, "SeedOff"},
    {EventKind::Progress, "Progress"},
}};

double parse_double(std::string_view s, std::size_t line) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw std::invalid_argument("trace line " + std::to_string(line) +
                                ": bad number '" + std::string(s) + "'");
  }
  return v;
}

std::int64_t parse_int(std::string_view s, std::size_t line) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw std::invalid_argument("trace line " + std::to_string(line) +
                                ": bad integer '" + std::string(s) + "'");
  }
  return v;
}

std::string detail_of(const TraceRecord& r) {
  switch (r.kind) {
    case EventKind::Arrival:
      return "cap=" + format_double(r.value);
    case EventKind::PieceComplete:
      return "piece=" + std::to_string(r.piece) + ";from=" + std::to_string(r.source);
    case EventKind::DownloadComplete:
      return "dt=" + format_double(r.value);
    case EventKind::Progress:
      return "kb=" + format_double(r.value);
    default:
      return {};
  }
}

void apply_detail(TraceRecord& r, std::string_view detail, std::size_t line) {
  while (!detail.empty()) {
    const auto semi = detail.find(';');
    const auto item = detail.substr(0, semi);
    detail = semi == std::string_view::npos ? std::string_view{} : detail.substr(semi + 1);
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) {
      throw std::invalid_argument("trace line " + std::to_string(line) +
                                  ": detail item without '='");
    }
    const auto key = item.substr(0, eq);
    const auto val = item.substr(eq + 1);
    if (key == "piece") {
      r.piece = parse_int(val, line);
    } else if (key == "from") {
      r.source = parse_int(val, line);
    } else if (key == "cap" || key == "dt" || key == "kb") {
      r.value = parse_double(val, line);
    } else {
      throw std::invalid_argument("trace line " + std::to_string(line) +
                                  ": unknown detail key '" + std::string(key) + "'");
    }
  }
}

}  // namespace

std::string_view to_string(EventKind kind) {
  for (const auto& [k, name] : kKindNames) {
    if (k == kind) return name;
  }
  return "Unknown";
}

std::optional<EventKind> parse_event_kind(std::string_view text) {
  for (const auto& [k, name] : kKindNames) {
    if (name == text) return k;
  }
  return std::nullopt;
}

std::string format_double(double v) {
  std::array<char, 32> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

void write_trace_csv(std::ostream& out, const EventTrace& trace) {
  out << "time,kind,peer,detail\n";
  for (const auto& r : trace) {
    out << format_double(r.time) << ',' << to_string(r.kind) << ',' << r.peer
        << ',' << detail_of(r) << '\n';
  }
}

EventTrace read_trace_csv(std::istream& in) {
  EventTrace trace;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (lineno == 1 && line.rfind("time,", 0) == 0) continue;

    std::array<std::string_view, 4> cols;
    std::string_view rest = line;
    for (std::size_t c = 0; c < 3; ++c) {
      const auto comma = rest.find(',');
      if (comma == std::string_view::npos) {
        throw std::invalid_argument("trace line " + std::to_string(lineno) +
                                    ": expected 4 columns");
      }
      cols[c] = rest.substr(0, comma);
      rest = rest.substr(comma + 1);
    }
    cols[3] = rest;

    TraceRecord r;
    r.time = parse_double(cols[0], lineno);
    const auto kind = parse_event_kind(cols[1]);
    if (!kind) {
      throw std::invalid_argument("trace line " + std::to_string(lineno) +
                                  ": unknown kind '" + std::string(cols[1]) + "'");
    }
    r.kind = *kind;
    r.peer = parse_int(cols[2], lineno);
    apply_detail(r, cols[3], lineno);
    trace.push_back(r);
  }
  return trace;
}

void check_trace(const EventTrace& trace) {
  std::unordered_set<std::int64_t> completed;
  double last = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const auto& r = trace[i];
    if (r.time < last) {
      throw std::invalid_argument("trace time decreases at record " + std::to_string(i));
    }
    last = r.time;
    if (r.kind == EventKind::DownloadComplete) completed.insert(r.peer);
    if (r.kind == EventKind::Departure && !completed.contains(r.peer)) {
      throw std::invalid_argument("departure of leecher " + std::to_string(r.peer) +
                                  " without a DownloadComplete");
    }
  }
}

}  // namespace swarmkit
