#pragma once

#include <cstdint>
#include <string>

#include "disturbsim/common/time.hpp"
#include "disturbsim/dram/geometry.hpp"

namespace disturb::dram {

enum class CommandKind : std::uint8_t { Act, Pre, Rd, Wr, Ref, Hira };

/// Why the controller issued a command; drives stats and oracles only.
enum class CommandPurpose : std::uint8_t { Demand, PeriodicRefresh, PreventiveRefresh };

struct DramCommand {
  CommandKind kind = CommandKind::Act;
  BankRef bank;
  /// ACT/RD/WR target. For HiRA: the row opened by the second ACT.
  RowId row = 0;
  /// HiRA only: the row opened by the first ACT, always a refresh.
  RowId refresh_row = 0;
  /// HiRA only: the second row is also being refreshed (refresh-refresh).
  bool second_is_refresh = false;
  CommandPurpose purpose = CommandPurpose::Demand;

  static DramCommand act(BankRef b, RowId r, CommandPurpose p = CommandPurpose::Demand) {
    return {CommandKind::Act, b, r, 0, false, p};
  }
  static DramCommand pre(BankRef b, CommandPurpose p = CommandPurpose::Demand) {
    return {CommandKind::Pre, b, 0, 0, false, p};
  }
  static DramCommand rd(BankRef b, RowId r) { return {CommandKind::Rd, b, r, 0, false, CommandPurpose::Demand}; }
  static DramCommand wr(BankRef b, RowId r) { return {CommandKind::Wr, b, r, 0, false, CommandPurpose::Demand}; }
  static DramCommand ref(std::uint32_t channel, std::uint32_t rank) {
    return {CommandKind::Ref, {channel, rank, 0}, 0, 0, false, CommandPurpose::PeriodicRefresh};
  }
  /// ACT(refresh_row) - PRE - ACT(second_row).
  static DramCommand hira(BankRef b, RowId refresh_row, RowId second_row, bool second_is_refresh,
                          CommandPurpose p) {
    return {CommandKind::Hira, b, second_row, refresh_row, second_is_refresh, p};
  }
};

std::string to_string(CommandKind k);

/// A command together with the time it was put on the bus.
struct IssuedCommand {
  Picos time = 0;
  DramCommand cmd;
};

}  // namespace disturb::dram
