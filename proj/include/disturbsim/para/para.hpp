#pragma once

#include <cstdint>
#include <optional>

#include "disturbsim/common/rng.hpp"
#include "disturbsim/memctrl/hooks.hpp"

namespace disturb::para {

/// One uniform draw u: u < p/2 picks row - 1, p/2 <= u < p picks row + 1.
/// A side that falls off the bank is dropped, not redistributed.
std::optional<dram::RowId> select_neighbor(dram::RowId row, std::uint32_t rows_per_bank, double p_th, Rng& rng);

/// Probabilistic adjacent-row refresh on every demand row closure.
class Para : public memctrl::Mitigation {
 public:
  Para(double p_th, const dram::Geometry& g, std::uint64_t seed);

  std::optional<dram::RowId> on_close(const memctrl::BankRef& bank, dram::RowId row, Picos now) override;
  void write_stats(nlohmann::json& out) const override;

  double p_th() const { return p_th_; }
  std::uint64_t closures() const { return closures_; }
  std::uint64_t refreshes() const { return refreshes_; }

 private:
  double p_th_;
  dram::Geometry g_;
  Rng rng_;
  std::uint64_t closures_ = 0;
  std::uint64_t refreshes_ = 0;
};

}  // namespace disturb::para
