#include "disturbsim/dram/geometry.hpp"

#include <bit>
#include <string>

#include "disturbsim/common/errors.hpp"

namespace disturb::dram {

namespace {

std::uint32_t log2_exact(std::uint32_t v, const char* what) {
  if (!std::has_single_bit(v)) {
    throw ConfigError(std::string("bit-field address map needs a power-of-two ") + what);
  }
  return static_cast<std::uint32_t>(std::countr_zero(v));
}

std::uint32_t field_count(const Geometry& g, AddressField f) {
  switch (f) {
    case AddressField::Offset: return kWordBytes;
    case AddressField::Column: return g.columns_per_row;
    case AddressField::Row: return g.rows_per_bank;
    case AddressField::Bank: return g.banks_per_rank;
    case AddressField::Rank: return g.ranks_per_channel;
    case AddressField::Channel: return g.channels;
  }
  return 1;
}

std::uint32_t get_field(const DecodedAddress& a, AddressField f) {
  switch (f) {
    case AddressField::Offset: return 0;
    case AddressField::Column: return a.column;
    case AddressField::Row: return a.row;
    case AddressField::Bank: return a.bank;
    case AddressField::Rank: return a.rank;
    case AddressField::Channel: return a.channel;
  }
  return 0;
}

void set_field(DecodedAddress& a, AddressField f, std::uint32_t v) {
  switch (f) {
    case AddressField::Offset: break;
    case AddressField::Column: a.column = v; break;
    case AddressField::Row: a.row = v; break;
    case AddressField::Bank: a.bank = v; break;
    case AddressField::Rank: a.rank = v; break;
    case AddressField::Channel: a.channel = v; break;
  }
}

}  // namespace

void Geometry::validate() const {
  if (channels == 0 || ranks_per_channel == 0 || banks_per_rank == 0 || subarrays_per_bank == 0 ||
      rows_per_bank == 0 || columns_per_row == 0) {
    throw ConfigError("geometry counts must all be >= 1");
  }
  if (rows_per_bank % subarrays_per_bank != 0) {
    throw ConfigError("rows_per_bank must be divisible by subarrays_per_bank");
  }
}

std::uint64_t Geometry::capacity_bytes() const {
  return total_rows() * columns_per_row * kWordBytes;
}

BitFieldMap BitFieldMap::row_major(const Geometry& g) {
  return BitFieldMap({{AddressField::Offset, log2_exact(kWordBytes, "word size")},
                      {AddressField::Column, log2_exact(g.columns_per_row, "column count")},
                      {AddressField::Row, log2_exact(g.rows_per_bank, "row count")},
                      {AddressField::Bank, log2_exact(g.banks_per_rank, "bank count")},
                      {AddressField::Rank, log2_exact(g.ranks_per_channel, "rank count")},
                      {AddressField::Channel, log2_exact(g.channels, "channel count")}});
}

BitFieldMap BitFieldMap::mop(const Geometry& g) {
  const std::uint32_t col_bits = log2_exact(g.columns_per_row, "column count");
  const std::uint32_t low = col_bits < 3 ? col_bits : 3;
  return BitFieldMap({{AddressField::Offset, log2_exact(kWordBytes, "word size")},
                      {AddressField::Column, low},
                      {AddressField::Channel, log2_exact(g.channels, "channel count")},
                      {AddressField::Bank, log2_exact(g.banks_per_rank, "bank count")},
                      {AddressField::Rank, log2_exact(g.ranks_per_channel, "rank count")},
                      {AddressField::Column, col_bits - low},
                      {AddressField::Row, log2_exact(g.rows_per_bank, "row count")}});
}

BitFieldMap BitFieldMap::from_name(const std::string& name, const Geometry& g) {
  if (name == "row_major") return row_major(g);
  if (name == "mop") return mop(g);
  throw ConfigError("unknown address mapping '" + name + "' (expected row_major or mop)");
}

void BitFieldMap::check_against(const Geometry& g) const {
  for (AddressField f : {AddressField::Offset, AddressField::Column, AddressField::Row, AddressField::Bank,
                         AddressField::Rank, AddressField::Channel}) {
    std::uint32_t bits = 0;
    for (const auto& s : slices_) {
      if (s.field == f) bits += s.bits;
    }
    const std::uint32_t count = field_count(g, f);
    if (!std::has_single_bit(count) || (std::uint64_t{1} << bits) != count) {
      throw ConfigError("address map does not match geometry field widths");
    }
  }
}

DecodedAddress decode_address(std::uint64_t physical_address, const Geometry& g, const BitFieldMap& map) {
  if (physical_address >= g.capacity_bytes()) {
    throw AddressError("address " + std::to_string(physical_address) + " exceeds capacity " +
                       std::to_string(g.capacity_bytes()));
  }
  DecodedAddress out;
  std::uint32_t filled[6] = {};
  std::uint64_t rest = physical_address;
  for (const auto& s : map.slices()) {
    const std::uint64_t mask = (std::uint64_t{1} << s.bits) - 1;
    const auto part = static_cast<std::uint32_t>(rest & mask);
    rest >>= s.bits;
    const auto idx = static_cast<std::size_t>(s.field);
    set_field(out, s.field, get_field(out, s.field) | (part << filled[idx]));
    filled[idx] += s.bits;
  }
  out.subarray = out.row / g.rows_per_subarray();
  return out;
}

std::uint64_t encode_address(const DecodedAddress& a, const Geometry& g, const BitFieldMap& map) {
  if (a.channel >= g.channels || a.rank >= g.ranks_per_channel || a.bank >= g.banks_per_rank ||
      a.row >= g.rows_per_bank || a.column >= g.columns_per_row) {
    throw AddressError("decoded address index out of range");
  }
  std::uint64_t out = 0;
  std::uint32_t shift = 0;
  std::uint32_t consumed[6] = {};
  for (const auto& s : map.slices()) {
    const auto idx = static_cast<std::size_t>(s.field);
    const std::uint64_t part = (get_field(a, s.field) >> consumed[idx]) & ((std::uint64_t{1} << s.bits) - 1);
    out |= part << shift;
    consumed[idx] += s.bits;
    shift += s.bits;
  }
  return out;
}

}  // namespace disturb::dram
