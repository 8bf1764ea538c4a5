#include "disturbsim/svard/profile.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "disturbsim/common/errors.hpp"
#include "disturbsim/common/rng.hpp"
#include "json.hpp"

namespace disturb::svard {

void VulnerabilityProfile::validate() const {
  if (bin_hcfirst.empty() || bin_hcfirst.size() > kMaxBins) throw ProfileError("profile: need 1 to 16 bins");
  for (std::size_t i = 0; i < bin_hcfirst.size(); ++i) {
    if (bin_hcfirst[i] <= 0) throw ProfileError("profile: HC_first must be positive");
    if (i > 0 && bin_hcfirst[i] <= bin_hcfirst[i - 1]) throw ProfileError("profile: HC_first must ascend with bin id");
  }
  for (auto b : bins) {
    if (b >= bin_hcfirst.size()) throw ProfileError("profile: row refers to an undefined bin");
  }
}

VulnerabilityProfile generate_profile(const std::vector<BinSpec>& spec, std::uint64_t rows, std::uint64_t seed) {
  VulnerabilityProfile p;
  if (spec.empty() || spec.size() > kMaxBins) throw ProfileError("profile: need 1 to 16 bins");
  p.bins.resize(rows);
  std::uint64_t at = 0;
  for (std::size_t i = 0; i < spec.size(); ++i) {
    if (spec[i].fraction < 0.0) throw ProfileError("profile: negative bin fraction");
    p.bin_hcfirst.push_back(spec[i].hcfirst);
    std::uint64_t n = i + 1 == spec.size() ? rows - at
                                            : std::min<std::uint64_t>(rows - at, static_cast<std::uint64_t>(
                                                                                     std::llround(spec[i].fraction * static_cast<double>(rows))));
    std::fill_n(p.bins.begin() + static_cast<std::ptrdiff_t>(at), n, static_cast<std::uint8_t>(i));
    at += n;
  }
  Rng rng(derive_seed(seed, "svard/profile"));
  for (std::uint64_t i = rows; i > 1; --i) std::swap(p.bins[i - 1], p.bins[rng.below(i)]);
  p.validate();
  return p;
}

void scale_to_min(VulnerabilityProfile& p, std::int64_t target) {
  if (target <= 0) throw ProfileError("profile: scaling target must be positive");
  const double f = static_cast<double>(target) / static_cast<double>(p.worst_case());
  for (auto& v : p.bin_hcfirst) v = std::max<std::int64_t>(1, std::llround(static_cast<double>(v) * f));
  p.bin_hcfirst.front() = target;
  p.validate();
}

void save_profile(const VulnerabilityProfile& p, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ProfileError("profile: cannot write " + path);
  nlohmann::json bins = nlohmann::json::object();
  for (std::size_t i = 0; i < p.bin_hcfirst.size(); ++i) bins[std::to_string(i)] = p.bin_hcfirst[i];
  out << "# " << nlohmann::json{{"bins", bins}}.dump() << "\nrow_id,bin\n";
  for (std::size_t r = 0; r < p.bins.size(); ++r) out << r << ',' << int{p.bins[r]} << '\n';
  if (!out) throw ProfileError("profile: write failed for " + path);
}

VulnerabilityProfile load_profile(const std::string& path, std::uint64_t rows) {
  std::ifstream in(path);
  if (!in) throw ProfileError("profile: cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line.rfind("# ", 0) != 0) throw ProfileError(path + ":1: missing bin header");
  VulnerabilityProfile p;
  try {
    const auto hdr = nlohmann::json::parse(line.substr(2));
    const auto& bins = hdr.at("bins");
    if (bins.size() > kMaxBins) throw ProfileError(path + ":1: more than 16 bins");
    p.bin_hcfirst.assign(bins.size(), 0);
    for (auto it = bins.begin(); it != bins.end(); ++it) {
      const unsigned long id = std::stoul(it.key());
      if (id >= bins.size()) throw ProfileError(path + ":1: bin ids must be 0..n-1");
      p.bin_hcfirst[id] = it.value().get<std::int64_t>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw ProfileError(path + ":1: " + e.what());
  } catch (const std::logic_error& e) {
    throw ProfileError(path + ":1: bad bin id");
  }
  if (!std::getline(in, line) || line != "row_id,bin") throw ProfileError(path + ":2: expected 'row_id,bin'");
  p.bins.assign(rows, 0xff);
  std::vector<bool> seen(rows, false);
  long lineno = 2;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto comma = line.find(',');
    std::uint64_t row = 0;
    unsigned bin = 0;
    try {
      if (comma == std::string::npos) throw std::invalid_argument("");
      std::size_t used = 0;
      row = std::stoull(line.substr(0, comma), &used);
      if (used != comma) throw std::invalid_argument("");
      bin = static_cast<unsigned>(std::stoul(line.substr(comma + 1), &used));
      if (used != line.size() - comma - 1) throw std::invalid_argument("");
    } catch (const std::logic_error&) {
      throw ProfileError(path + ":" + std::to_string(lineno) + ": malformed row");
    }
    if (row >= rows) throw ProfileError(path + ":" + std::to_string(lineno) + ": row outside geometry");
    if (seen[row]) throw ProfileError(path + ":" + std::to_string(lineno) + ": duplicate row");
    if (bin >= kMaxBins) throw ProfileError(path + ":" + std::to_string(lineno) + ": bin exceeds 4 bits");
    seen[row] = true;
    p.bins[row] = static_cast<std::uint8_t>(bin);
  }
  const auto missing = std::count(seen.begin(), seen.end(), false);
  if (missing) throw ProfileError(path + ": " + std::to_string(missing) + " rows missing");
  p.validate();
  return p;
}

}  // namespace disturb::svard
