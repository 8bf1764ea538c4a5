#include "disturbsim/svard/svard.hpp"

#include <algorithm>

#include "disturbsim/common/errors.hpp"
#include "disturbsim/para/para.hpp"

namespace disturb::svard {

std::int64_t hcfirst_for_act(const VulnerabilityProfile& p, const dram::Geometry& g, const dram::BankRef& bank,
                             dram::RowId row, LookupScope scope, std::uint32_t r_blast) {
  const std::uint64_t base = dram::flat_row(g, bank, 0);
  if (scope == LookupScope::ActivatedRow) return p.hcfirst_of(base + row);
  const dram::RowId lo = row >= r_blast ? row - r_blast : 0;
  const dram::RowId hi = std::min<std::uint64_t>(std::uint64_t{row} + r_blast, g.rows_per_bank - 1);
  std::uint8_t bin = p.bins[base + lo];
  for (dram::RowId r = lo + 1; r <= hi; ++r) bin = std::min(bin, p.bins[base + r]);
  return p.bin_hcfirst[bin];
}

SvardPara::SvardPara(std::shared_ptr<const VulnerabilityProfile> profile, const SvardConfig& cfg,
                     const para::SolverInput& base, const dram::Geometry& g, std::uint64_t seed)
    : profile_(std::move(profile)), cfg_(cfg), g_(g), rng_(derive_seed(seed, "para")) {
  if (!profile_) throw ConfigError("svard: profile required");
  if (profile_->bins.size() != g.total_rows()) throw ProfileError("svard: profile does not cover the geometry");
  for (std::size_t i = 0; i < profile_->bin_hcfirst.size(); ++i) {
    para::SolverInput in = base;
    in.n_rh = cfg_.enabled ? profile_->bin_hcfirst[i] : profile_->worst_case();
    bin_pth_.push_back(para::solve_pth(in));
  }
}

double SvardPara::p_th_for(const memctrl::BankRef& bank, dram::RowId row) const {
  const auto hc = hcfirst_for_act(*profile_, g_, bank, row, cfg_.scope);
  const auto it = std::lower_bound(profile_->bin_hcfirst.begin(), profile_->bin_hcfirst.end(), hc);
  return bin_pth_[static_cast<std::size_t>(it - profile_->bin_hcfirst.begin())];
}

std::optional<dram::RowId> SvardPara::on_close(const memctrl::BankRef& bank, dram::RowId row, Picos /*now*/) {
  ++closures_;
  auto v = para::select_neighbor(row, g_.rows_per_bank, p_th_for(bank, row), rng_);
  if (v) ++refreshes_;
  return v;
}

void SvardPara::write_stats(nlohmann::json& out) const {
  out["svard"] = {{"bin_pth", bin_pth_},
                  {"bin_hcfirst", profile_->bin_hcfirst},
                  {"scope", cfg_.scope == LookupScope::ActivatedRow ? "activated_row" : "blast_radius_min"},
                  {"closures", closures_},
                  {"preventive_refreshes", refreshes_}};
}

}  // namespace disturb::svard
