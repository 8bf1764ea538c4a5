#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace disturb::dram {

using RowId = std::uint32_t;

struct Geometry {
  std::uint32_t channels = 1;
  std::uint32_t ranks_per_channel = 1;
  std::uint32_t banks_per_rank = 16;
  std::uint32_t subarrays_per_bank = 128;
  std::uint32_t rows_per_bank = 65536;
  std::uint32_t columns_per_row = 1024;

  /// Throws ConfigError when a count is zero or subarrays are not uniform.
  void validate() const;

  std::uint32_t rows_per_subarray() const { return rows_per_bank / subarrays_per_bank; }
  std::uint32_t total_banks() const { return channels * ranks_per_channel * banks_per_rank; }
  std::uint64_t total_rows() const { return std::uint64_t{total_banks()} * rows_per_bank; }
  /// Addressable bytes, with one 64-bit word per column.
  std::uint64_t capacity_bytes() const;
};

struct DecodedAddress {
  std::uint32_t channel = 0;
  std::uint32_t rank = 0;
  std::uint32_t bank = 0;
  RowId row = 0;
  std::uint32_t column = 0;
  std::uint32_t subarray = 0;

  friend bool operator==(const DecodedAddress&, const DecodedAddress&) = default;
};

/// Identifies one bank in the system.
struct BankRef {
  std::uint32_t channel = 0;
  std::uint32_t rank = 0;
  std::uint32_t bank = 0;

  friend bool operator==(const BankRef&, const BankRef&) = default;
  friend auto operator<=>(const BankRef&, const BankRef&) = default;
};

inline BankRef bank_of(const DecodedAddress& a) { return {a.channel, a.rank, a.bank}; }

/// Flat bank index: channel-major, then rank, then bank.
inline std::uint32_t flat_bank(const Geometry& g, const BankRef& b) {
  return (b.channel * g.ranks_per_channel + b.rank) * g.banks_per_rank + b.bank;
}

/// Flat row index across the whole system (used by profiles and oracles).
inline std::uint64_t flat_row(const Geometry& g, const BankRef& b, RowId row) {
  return std::uint64_t{flat_bank(g, b)} * g.rows_per_bank + row;
}

enum class AddressField { Offset, Column, Row, Bank, Rank, Channel };

/// A contiguous bit-field slice of the physical address.
struct FieldSlice {
  AddressField field;
  std::uint32_t bits;
};

/// Contiguous bit-field address map, listed from the least significant bit.
///
/// A field may appear in several slices (e.g. column split around the bank
/// bits); later slices hold the more significant bits of that field. All
/// geometry counts must be powers of two.
class BitFieldMap {
 public:
  BitFieldMap() = default;
  explicit BitFieldMap(std::vector<FieldSlice> slices) : slices_(std::move(slices)) {}

  /// offset | column | row | bank | rank | channel
  static BitFieldMap row_major(const Geometry& g);
  /// Minimalist open-page style: 8-word column chunks interleaved across
  /// channels and banks, row in the top bits.
  static BitFieldMap mop(const Geometry& g);
  static BitFieldMap from_name(const std::string& name, const Geometry& g);

  const std::vector<FieldSlice>& slices() const { return slices_; }

  /// Throws ConfigError if the slices do not exactly cover the geometry.
  void check_against(const Geometry& g) const;

 private:
  std::vector<FieldSlice> slices_;
};

inline constexpr std::uint32_t kWordBytes = 8;

DecodedAddress decode_address(std::uint64_t physical_address, const Geometry& g, const BitFieldMap& map);
std::uint64_t encode_address(const DecodedAddress& a, const Geometry& g, const BitFieldMap& map);

}  // namespace disturb::dram
