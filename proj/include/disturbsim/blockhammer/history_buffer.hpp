#pragma once

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

#include "disturbsim/common/time.hpp"

namespace disturb::blockhammer {

/// FIFO of recent activations of one rank. An entry is valid for t_delay
/// after insertion; older entries are retired from the head.
class HistoryBuffer {
 public:
  HistoryBuffer(std::uint32_t capacity, Picos t_delay);

  /// Retires expired entries, then appends. Throws InvariantError if the
  /// buffer is still full.
  void push(std::uint64_t row_key, Picos now);
  /// Insert time of the newest valid entry for `row_key`, if any.
  std::optional<Picos> last_valid(std::uint64_t row_key, Picos now);

  std::uint32_t capacity() const { return static_cast<std::uint32_t>(slots_.size()); }
  std::uint32_t size() const { return count_; }
  std::uint32_t max_occupancy() const { return max_occupancy_; }

 private:
  struct Slot {
    std::uint64_t key = 0;
    Picos time = 0;
  };
  void expire(Picos now);

  std::vector<Slot> slots_;
  std::uint32_t head_ = 0;
  std::uint32_t count_ = 0;
  std::uint32_t max_occupancy_ = 0;
  Picos t_delay_;
  // Row -> (valid entries, newest insert time), so lookups avoid a full scan.
  std::unordered_map<std::uint64_t, std::pair<std::uint32_t, Picos>> index_;
};

}  // namespace disturb::blockhammer
