#include "disturbsim/para/para.hpp"

#include "disturbsim/common/errors.hpp"

namespace disturb::para {

std::optional<dram::RowId> select_neighbor(dram::RowId row, std::uint32_t rows_per_bank, double p_th, Rng& rng) {
  const double u = rng.uniform();
  if (u < p_th / 2.0) {
    if (row == 0) return std::nullopt;
    return row - 1;
  }
  if (u < p_th) {
    if (row + 1 >= rows_per_bank) return std::nullopt;
    return row + 1;
  }
  return std::nullopt;
}

Para::Para(double p_th, const dram::Geometry& g, std::uint64_t seed)
    : p_th_(p_th), g_(g), rng_(derive_seed(seed, "para")) {
  if (!(p_th >= 0.0 && p_th <= 1.0)) throw ConfigError("para: p_th must lie in [0, 1]");
}

std::optional<dram::RowId> Para::on_close(const memctrl::BankRef& /*bank*/, dram::RowId row, Picos /*now*/) {
  ++closures_;
  auto v = select_neighbor(row, g_.rows_per_bank, p_th_, rng_);
  if (v) ++refreshes_;
  return v;
}

void Para::write_stats(nlohmann::json& out) const {
  out["para"] = {{"p_th", p_th_}, {"closures", closures_}, {"preventive_refreshes", refreshes_}};
}

}  // namespace disturb::para
