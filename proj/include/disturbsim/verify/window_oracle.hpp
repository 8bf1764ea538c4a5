#pragma once

#include <cstdint>
#include <deque>
#include <unordered_map>

#include "disturbsim/memctrl/hooks.hpp"

namespace disturb::verify {

/// Exact per-row maximum number of activations inside any window of
/// length t_refw (two ACTs share a window iff they are less than t_refw apart).
class WindowOracle : public memctrl::CommandListener {
 public:
  WindowOracle(const dram::Geometry& g, Picos t_refw, bool count_refresh_acts = false);

  void observe(std::uint64_t flat_row, Picos t);
  void on_command(const dram::IssuedCommand& c) override;

  std::uint64_t max_count() const { return max_; }
  std::uint64_t max_row() const { return max_row_; }
  std::uint64_t row_max(std::uint64_t flat_row) const;
  std::uint64_t observed() const { return observed_; }

 private:
  struct Row {
    std::deque<Picos> times;
    std::uint64_t max = 0;
  };
  dram::Geometry g_;
  Picos t_refw_;
  bool count_refresh_;
  std::unordered_map<std::uint64_t, Row> rows_;
  std::uint64_t max_ = 0;
  std::uint64_t max_row_ = 0;
  std::uint64_t observed_ = 0;
};

}  // namespace disturb::verify
