#include "disturbsim/blockhammer/history_buffer.hpp"

#include <algorithm>

#include "disturbsim/common/errors.hpp"

namespace disturb::blockhammer {

HistoryBuffer::HistoryBuffer(std::uint32_t capacity, Picos t_delay) : slots_(capacity), t_delay_(t_delay) {
  if (capacity == 0) throw ConfigError("history buffer capacity must be >= 1");
}

void HistoryBuffer::expire(Picos now) {
  while (count_ > 0 && slots_[head_].time <= now - t_delay_) {
    auto it = index_.find(slots_[head_].key);
    if (--it->second.first == 0) index_.erase(it);
    head_ = (head_ + 1) % capacity();
    --count_;
  }
}

void HistoryBuffer::push(std::uint64_t row_key, Picos now) {
  expire(now);
  if (count_ == capacity()) throw InvariantError("history buffer overflow");
  slots_[(head_ + count_) % capacity()] = {row_key, now};
  ++count_;
  max_occupancy_ = std::max(max_occupancy_, count_);
  auto& e = index_[row_key];
  ++e.first;
  e.second = now;
}

std::optional<Picos> HistoryBuffer::last_valid(std::uint64_t row_key, Picos now) {
  expire(now);
  auto it = index_.find(row_key);
  if (it == index_.end()) return std::nullopt;
  return it->second.second;
}

}  // namespace disturb::blockhammer
