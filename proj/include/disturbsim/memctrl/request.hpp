#pragma once

#include <cstdint>
#include <optional>

#include "disturbsim/common/time.hpp"
#include "disturbsim/dram/geometry.hpp"

namespace disturb::memctrl {

enum class ReqKind : std::uint8_t { Read, Write };

struct MemoryRequest {
  std::uint64_t id = 0;
  Picos arrival = 0;
  std::uint32_t thread = 0;
  ReqKind kind = ReqKind::Read;
  std::uint64_t physical = 0;
  dram::DecodedAddress addr;
  std::optional<Picos> completion;
};

enum class RowPolicy : std::uint8_t { Open, Closed };

struct SchedulerConfig {
  std::uint32_t read_queue_len = 64;
  std::uint32_t write_queue_len = 64;
  std::uint32_t column_cap = 16;
  RowPolicy row_policy = RowPolicy::Open;

  void validate() const;
};

}  // namespace disturb::memctrl
