#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "disturbsim/dram/geometry.hpp"

namespace disturb::svard {

constexpr std::uint32_t kMaxBins = 16;  // 4-bit bin identifier

/// Per-row vulnerability bins over every row of a geometry, in flat-row order.
struct VulnerabilityProfile {
  std::vector<std::uint8_t> bins;
  /// HC_first per bin id; strictly ascending.
  std::vector<std::int64_t> bin_hcfirst;

  std::int64_t worst_case() const { return bin_hcfirst.front(); }
  std::int64_t hcfirst_of(std::uint64_t flat_row) const { return bin_hcfirst[bins[flat_row]]; }

  /// Throws ProfileError on an empty or oversized bin table, non-ascending
  /// values, or a row that points past the table.
  void validate() const;
  friend bool operator==(const VulnerabilityProfile&, const VulnerabilityProfile&) = default;
};

struct BinSpec {
  double fraction = 1.0;
  std::int64_t hcfirst = 1;
};

/// Assigns round(fraction * rows) rows to each bin (the last bin takes the
/// remainder) and scatters them with a seeded shuffle.
VulnerabilityProfile generate_profile(const std::vector<BinSpec>& spec, std::uint64_t rows, std::uint64_t seed);

/// Rescales every bin so the weakest equals `target`, keeping ratios.
void scale_to_min(VulnerabilityProfile& p, std::int64_t target);

/// Header line `# {"bins": {"<id>": <hcfirst>, ...}}`, then `row_id,bin` CSV.
void save_profile(const VulnerabilityProfile& p, const std::string& path);
/// Throws ProfileError unless the file covers exactly `rows` rows.
VulnerabilityProfile load_profile(const std::string& path, std::uint64_t rows);

}  // namespace disturb::svard
