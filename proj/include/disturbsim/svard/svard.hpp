#pragma once

#include <memory>
#include <vector>

#include "disturbsim/common/rng.hpp"
#include "disturbsim/memctrl/hooks.hpp"
#include "disturbsim/para/solver.hpp"
#include "disturbsim/svard/profile.hpp"

namespace disturb::svard {

enum class LookupScope { ActivatedRow, BlastRadiusMin };

struct SvardConfig {
  bool enabled = true;
  LookupScope scope = LookupScope::BlastRadiusMin;
};

/// HC_first used for an activation of `row`: the row's own bin, or the
/// weakest bin among the row and its existing neighbors within `r_blast`.
std::int64_t hcfirst_for_act(const VulnerabilityProfile& p, const dram::Geometry& g, const dram::BankRef& bank,
                             dram::RowId row, LookupScope scope, std::uint32_t r_blast = 1);

/// PARA whose refresh probability follows the closing row's vulnerability.
class SvardPara : public memctrl::Mitigation {
 public:
  /// `base` supplies every solver input except n_rh, which comes from the bins.
  SvardPara(std::shared_ptr<const VulnerabilityProfile> profile, const SvardConfig& cfg,
            const para::SolverInput& base, const dram::Geometry& g, std::uint64_t seed);

  std::optional<dram::RowId> on_close(const memctrl::BankRef& bank, dram::RowId row, Picos now) override;
  void write_stats(nlohmann::json& out) const override;

  double p_th_for(const memctrl::BankRef& bank, dram::RowId row) const;
  const std::vector<double>& bin_pth() const { return bin_pth_; }
  std::uint64_t refreshes() const { return refreshes_; }

 private:
  std::shared_ptr<const VulnerabilityProfile> profile_;
  SvardConfig cfg_;
  dram::Geometry g_;
  std::vector<double> bin_pth_;
  Rng rng_;
  std::uint64_t closures_ = 0;
  std::uint64_t refreshes_ = 0;
};

}  // namespace disturb::svard
