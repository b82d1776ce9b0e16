#include "swarmkit/rate_model.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace swarmkit {
namespace {

constexpr double kNegligible = 1e-12;

// Leecher indices ordered by decreasing piece count, ties by index.
std::vector<std::size_t> by_decreasing_pieces(const SwarmState& state) {
  std::vector<std::size_t> order(state.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return state.piece_counts[a] > state.piece_counts[b];
  });
  return order;
}

RateBound interest_bound(const SwarmState& state,
                         const SquareMatrix<double>& upload, double seed_share,
                         std::size_t i, std::size_t j) {
  if (i == j) return RateBound::finite(0.0);
  const auto& b = state.piece_counts;
  if (b[i] > b[j]) return RateBound::unbounded();
  double g = seed_share;
  for (std::size_t k = 0; k < state.size(); ++k) {
    if (b[k] > b[j]) g += upload(k, i);
  }
  return RateBound::finite(g);
}

// Same values as compute_interest_bounds, in O(n^2) using one pass per
// column along the piece-count order.
void fill_bounds(const SwarmState& state, const std::vector<std::size_t>& order,
                 const SquareMatrix<double>& upload, double seed_share,
                 InterestBoundMatrix& g) {
  const std::size_t n = state.size();
  const auto& b = state.piece_counts;
  for (std::size_t i = 0; i < n; ++i) {
    double above = 0.0;  // uploads to i from leechers in strictly older classes
    std::size_t pos = 0;
    while (pos < n) {
      std::size_t end = pos;
      while (end < n && b[order[end]] == b[order[pos]]) ++end;
      for (std::size_t q = pos; q < end; ++q) {
        const std::size_t j = order[q];
        if (j == i) {
          g(i, j) = RateBound::finite(0.0);
        } else if (b[i] > b[j]) {
          g(i, j) = RateBound::unbounded();
        } else {
          g(i, j) = RateBound::finite(seed_share + above);
        }
      }
      for (std::size_t q = pos; q < end; ++q) above += upload(order[q], i);
      pos = end;
    }
  }
}

}  // namespace

void SwarmState::validate() const {
  if (piece_counts.empty()) {
    throw std::invalid_argument("swarm state needs at least one leecher");
  }
  if (leecher_capacities.size() != piece_counts.size()) {
    throw std::invalid_argument(
        "leecher_capacities has " + std::to_string(leecher_capacities.size()) +
        " entries for " + std::to_string(piece_counts.size()) + " leechers");
  }
  if (!std::isfinite(seed_capacity) || seed_capacity < 0.0) {
    throw std::invalid_argument("seed capacity must be finite and >= 0");
  }
  for (double c : leecher_capacities) {
    if (!std::isfinite(c) || c < 0.0) {
      throw std::invalid_argument("leecher capacities must be finite and >= 0");
    }
  }
  for (auto b : piece_counts) {
    if (b < 0) throw std::invalid_argument("piece counts must be >= 0");
  }
}

double SwarmState::seed_share() const {
  return seed_present ? seed_capacity / static_cast<double>(size()) : 0.0;
}

SwarmState SwarmState::homogeneous(std::vector<std::int64_t> piece_counts,
                                   double seed_capacity,
                                   double leecher_capacity, bool seed_present) {
  SwarmState s;
  s.leecher_capacities.assign(piece_counts.size(), leecher_capacity);
  s.piece_counts = std::move(piece_counts);
  s.seed_capacity = seed_capacity;
  s.seed_present = seed_present;
  return s;
}

double RateMatrix::row_sum(std::size_t i) const {
  auto r = upload.row(i);
  return std::accumulate(r.begin(), r.end(), 0.0);
}

double RateMatrix::column_sum(std::size_t j) const {
  double s = 0.0;
  for (std::size_t i = 0; i < upload.size(); ++i) s += upload(i, j);
  return s;
}

InterestBoundMatrix compute_interest_bounds(const SwarmState& state,
                                            const SquareMatrix<double>& upload) {
  state.validate();
  const std::size_t n = state.size();
  if (upload.size() != n) {
    throw std::invalid_argument("upload matrix size does not match the state");
  }
  const double share = state.seed_share();
  InterestBoundMatrix g(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      g(i, j) = interest_bound(state, upload, share, i, j);
    }
  }
  return g;
}

RateMatrix compute_rates(const SwarmState& state) {
  state.validate();
  const std::size_t n = state.size();
  const auto& b = state.piece_counts;
  const auto order = by_decreasing_pieces(state);

  RateMatrix out;
  out.upload = SquareMatrix<double>(n, 0.0);
  out.seed_share = state.seed_share();

  // Every g(i, j) needed for row i only reads rows with strictly more pieces
  // than i, which precede i in `order`.
  for (std::size_t i : order) {
    const double capacity = state.leecher_capacities[i];
    double allocated = 0.0;
    std::size_t served = 0;  // targets with more pieces than the current class
    std::size_t pos = 0;
    while (pos < n) {
      // Collect the next class of targets (equal piece count), skipping i.
      std::size_t end = pos;
      while (end < n && b[order[end]] == b[order[pos]]) ++end;

      std::size_t class_targets = 0;
      for (std::size_t q = pos; q < end; ++q) {
        if (order[q] != i) ++class_targets;
      }
      if (class_targets > 0) {
        const std::size_t sharing = (n - 1) - served;
        const double share =
            std::max(0.0, (capacity - allocated) / static_cast<double>(sharing));
        double class_total = 0.0;
        for (std::size_t q = pos; q < end; ++q) {
          const std::size_t j = order[q];
          if (j == i) continue;
          const RateBound g =
              interest_bound(state, out.upload, out.seed_share, i, j);
          const double u = g.is_unbounded() ? share : std::min(g.value(), share);
          out.upload(i, j) = u;
          class_total += u;
        }
        allocated += class_total;
        served += class_targets;
      }
      pos = end;
    }
  }

  out.download.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    out.download[j] = out.seed_share + out.column_sum(j);
  }
  return out;
}

double max_download_rate(int n, double seed_capacity, double leecher_capacity) {
  if (n <= 1) throw std::invalid_argument("max_download_rate needs n > 1");
  if (seed_capacity < 0.0 || leecher_capacity < 0.0) {
    throw std::invalid_argument("capacities must be >= 0");
  }
  const double nn = static_cast<double>(n);
  const double cs = seed_capacity;
  const double cl = leecher_capacity;
  if (cl <= cs * (nn - 1.0) / nn) return cl + cs / nn;
  return (cl - cs) * (nn - 1.0) + 2.0 * cs - cs / nn;
}

RateMatrix progressive_fill_oracle(const SwarmState& state, double step,
                                   std::size_t max_rounds) {
  state.validate();
  if (!(step > 0.0)) throw std::invalid_argument("step must be > 0");
  const std::size_t n = state.size();

  if (max_rounds == 0) {
    const double top = std::max(
        state.seed_capacity,
        *std::max_element(state.leecher_capacities.begin(),
                          state.leecher_capacities.end()));
    max_rounds = static_cast<std::size_t>((top / step + 10.0) * (n + 1)) + 1000;
  }

  RateMatrix out;
  out.upload = SquareMatrix<double>(n, 0.0);
  out.seed_share = state.seed_share();

  const auto order = by_decreasing_pieces(state);
  InterestBoundMatrix g(n);
  std::vector<std::size_t> active;
  std::size_t round = 0;
  for (;; ++round) {
    if (round >= max_rounds) {
      throw std::runtime_error("progressive_fill_oracle did not converge in " +
                               std::to_string(max_rounds) + " rounds");
    }
    fill_bounds(state, order, out.upload, out.seed_share, g);
    bool granted = false;
    for (std::size_t i = 0; i < n; ++i) {
      const double room = state.leecher_capacities[i] - out.row_sum(i);
      if (room <= kNegligible) continue;
      active.clear();
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        if (g(i, j).is_unbounded() ||
            out.upload(i, j) < g(i, j).value() - kNegligible) {
          active.push_back(j);
        }
      }
      if (active.empty()) continue;
      const double per =
          std::min(step, room / static_cast<double>(active.size()));
      for (std::size_t j : active) {
        double grant = per;
        if (!g(i, j).is_unbounded()) {
          grant = std::min(grant, g(i, j).value() - out.upload(i, j));
        }
        out.upload(i, j) += grant;
        if (grant > kNegligible) granted = true;
      }
    }
    if (!granted) break;
  }

  out.download.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    out.download[j] = out.seed_share + out.column_sum(j);
  }
  return out;
}

}  // namespace swarmkit
