#include "disturbsim/verify/coverage.hpp"

#include <algorithm>

namespace disturb::verify {

CoverageOracle::CoverageOracle(const dram::Geometry& g, Picos t_refw)
    : g_(g), t_refw_(t_refw), last_(g.total_rows(), 0) {}

void CoverageOracle::gap(Picos g) {
  max_gap_ = std::max(max_gap_, g);
  if (g > t_refw_) ++violations_;
}

void CoverageOracle::on_rows_refreshed(const dram::BankRef& bank, dram::RowId first, std::uint32_t count, Picos t,
                                       dram::CommandPurpose /*why*/) {
  const std::uint64_t base = dram::flat_row(g_, bank, first);
  for (std::uint64_t r = base; r < base + count; ++r) {
    gap(t - last_[r]);
    last_[r] = t;
  }
  refreshes_ += count;
}

void CoverageOracle::finish(Picos end) {
  for (Picos l : last_) gap(end - l);
}

}  // namespace disturb::verify
