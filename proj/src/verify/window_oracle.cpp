#include "disturbsim/verify/window_oracle.hpp"

#include "disturbsim/common/errors.hpp"

namespace disturb::verify {

using dram::CommandKind;
using dram::CommandPurpose;

WindowOracle::WindowOracle(const dram::Geometry& g, Picos t_refw, bool count_refresh_acts)
    : g_(g), t_refw_(t_refw), count_refresh_(count_refresh_acts) {
  if (t_refw <= 0) throw ConfigError("window oracle: t_refw must be positive");
}

void WindowOracle::observe(std::uint64_t flat_row, Picos t) {
  Row& r = rows_[flat_row];
  if (!r.times.empty() && t < r.times.back()) throw InvariantError("window oracle: time went backwards");
  while (!r.times.empty() && t - r.times.front() >= t_refw_) r.times.pop_front();
  r.times.push_back(t);
  ++observed_;
  const std::uint64_t n = r.times.size();
  if (n > r.max) r.max = n;
  if (n > max_) {
    max_ = n;
    max_row_ = flat_row;
  }
}

void WindowOracle::on_command(const dram::IssuedCommand& c) {
  const auto& cmd = c.cmd;
  if (cmd.kind == CommandKind::Act) {
    if (cmd.purpose == CommandPurpose::Demand || count_refresh_) observe(dram::flat_row(g_, cmd.bank, cmd.row), c.time);
  } else if (cmd.kind == CommandKind::Hira) {
    if (count_refresh_) observe(dram::flat_row(g_, cmd.bank, cmd.refresh_row), c.time);
    if (!cmd.second_is_refresh || count_refresh_) observe(dram::flat_row(g_, cmd.bank, cmd.row), c.time);
  }
}

std::uint64_t WindowOracle::row_max(std::uint64_t flat_row) const {
  auto it = rows_.find(flat_row);
  return it == rows_.end() ? 0 : it->second.max;
}

}  // namespace disturb::verify
