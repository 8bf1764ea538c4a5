#pragma once

#include <cstdint>
#include <vector>

#include "disturbsim/memctrl/hooks.hpp"

namespace disturb::verify {

/// Checks that every row is refreshed at least once per t_refw: no gap
/// between consecutive refreshes of a row (starting at time 0, ending at
/// the end of the run) may exceed t_refw.
class CoverageOracle : public memctrl::CommandListener {
 public:
  CoverageOracle(const dram::Geometry& g, Picos t_refw);

  void on_rows_refreshed(const dram::BankRef& bank, dram::RowId first, std::uint32_t count, Picos t,
                         dram::CommandPurpose why) override;
  void finish(Picos end);

  std::uint64_t violations() const { return violations_; }
  Picos max_gap() const { return max_gap_; }
  std::uint64_t refreshes() const { return refreshes_; }

 private:
  void gap(Picos g);
  dram::Geometry g_;
  Picos t_refw_;
  std::vector<Picos> last_;
  std::uint64_t violations_ = 0;
  Picos max_gap_ = 0;
  std::uint64_t refreshes_ = 0;
};

}  // namespace disturb::verify
