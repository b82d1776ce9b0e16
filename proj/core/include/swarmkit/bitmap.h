#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace swarmkit {

// Set of owned piece indices over [0, num_pieces).
class Bitmap {
 public:
  Bitmap() = default;
  explicit Bitmap(std::size_t num_pieces, bool full = false)
      : size_(num_pieces), words_((num_pieces + 63) / 64, 0) {
    if (full) fill();
  }

  std::size_t size() const { return size_; }
  std::size_t count() const { return count_; }
  bool complete() const { return count_ == size_; }

  bool test(std::size_t piece) const {
    check(piece);
    return (words_[piece / 64] >> (piece % 64)) & 1u;
  }

  // Returns false if the piece was already present.
  bool set(std::size_t piece) {
    check(piece);
    auto& w = words_[piece / 64];
    const std::uint64_t mask = std::uint64_t{1} << (piece % 64);
    if (w & mask) return false;
    w |= mask;
    ++count_;
    return true;
  }

  // Returns false if the piece was absent.
  bool reset(std::size_t piece) {
    check(piece);
    auto& w = words_[piece / 64];
    const std::uint64_t mask = std::uint64_t{1} << (piece % 64);
    if (!(w & mask)) return false;
    w &= ~mask;
    --count_;
    return true;
  }

  void fill() {
    for (auto& w : words_) w = ~std::uint64_t{0};
    if (size_ % 64 != 0 && !words_.empty()) {
      words_.back() = (std::uint64_t{1} << (size_ % 64)) - 1;
    }
    count_ = size_;
  }

  // |other \ this|: pieces `other` holds that this bitmap lacks.
  std::size_t missing_from(const Bitmap& other) const {
    std::size_t n = 0;
    for (std::size_t w = 0; w < words_.size(); ++w) {
      n += static_cast<std::size_t>(std::popcount(other.words_[w] & ~words_[w]));
    }
    return n;
  }

  const std::vector<std::uint64_t>& words() const { return words_; }

  bool operator==(const Bitmap&) const = default;

 private:
  void check(std::size_t piece) const {
    if (piece >= size_) throw std::out_of_range("piece index out of range");
  }

  std::size_t size_ = 0;
  std::size_t count_ = 0;
  std::vector<std::uint64_t> words_;
};

}  // namespace swarmkit
