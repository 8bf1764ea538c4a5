#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <map>

#include "disturbsim/common/errors.hpp"
#include "disturbsim/para/para.hpp"
#include "disturbsim/svard/svard.hpp"

using namespace disturb;
using namespace disturb::svard;

namespace {

dram::Geometry small_geometry() {
  dram::Geometry g;
  g.banks_per_rank = 2;
  g.subarrays_per_bank = 4;
  g.rows_per_bank = 512;
  return g;
}

std::filesystem::path tmp(const char* name) { return std::filesystem::temp_directory_path() / name; }

void write_file(const std::filesystem::path& p, const std::string& s) {
  std::ofstream out(p);
  out << s;
}

}  // namespace

TEST_CASE("generated profile follows the bin fractions") {
  const auto p = generate_profile({{0.05, 1000}, {0.95, 2000}}, 10000, 4);
  p.validate();
  std::map<int, int> n;
  for (auto b : p.bins) ++n[b];
  CHECK(n[0] == 500);
  CHECK(n[1] == 9500);
  CHECK(p.worst_case() == 1000);
  CHECK(generate_profile({{0.05, 1000}, {0.95, 2000}}, 10000, 4) == p);
  CHECK_FALSE(generate_profile({{0.05, 1000}, {0.95, 2000}}, 10000, 5) == p);
  // The weak rows are scattered, not clustered at the front.
  int front = 0;
  for (int i = 0; i < 500; ++i) front += p.bins[i] == 0;
  CHECK(front < 100);
}

TEST_CASE("scaling keeps bin ratios") {
  auto p = generate_profile({{0.5, 3000}, {0.5, 6000}}, 100, 1);
  scale_to_min(p, 64);
  CHECK(p.bin_hcfirst == std::vector<std::int64_t>{64, 128});
  CHECK_THROWS_AS(scale_to_min(p, 0), ProfileError);
}

TEST_CASE("profile file round trip") {
  const auto p = generate_profile({{0.1, 500}, {0.3, 800}, {0.6, 1200}}, 4096, 9);
  const auto path = tmp("disturbsim_profile_rt.csv");
  save_profile(p, path.string());
  CHECK(load_profile(path.string(), 4096) == p);
  std::filesystem::remove(path);
}

TEST_CASE("malformed profiles raise ProfileError with a line number") {
  const auto path = tmp("disturbsim_profile_bad.csv");
  auto expect = [&](const std::string& body, std::uint64_t rows, const std::string& where) {
    write_file(path, body);
    try {
      load_profile(path.string(), rows);
      FAIL("no error for: " << body);
    } catch (const ProfileError& e) {
      CHECK(std::string(e.what()).find(where) != std::string::npos);
    }
  };
  const std::string head = "# {\"bins\": {\"0\": 100, \"1\": 200}}\nrow_id,bin\n";
  expect(head + "0,0\n1,1\n", 3, "missing");
  expect(head + "0,0\n1,1\n1,0\n", 3, ":5:");
  expect(head + "0,0\n1,x\n", 2, ":4:");
  expect(head + "0,0\n5,1\n", 2, ":4:");
  std::string many = "# {\"bins\": {";
  for (int i = 0; i < 17; ++i) many += (i ? ", \"" : "\"") + std::to_string(i) + "\": " + std::to_string(100 + i);
  expect(many + "}}\nrow_id,bin\n0,0\n", 1, ":1:");
  expect("row_id,bin\n0,0\n", 1, ":1:");
  std::filesystem::remove(path);
}

TEST_CASE("validation rejects inconsistent tables") {
  VulnerabilityProfile p;
  p.bins = {0, 1};
  p.bin_hcfirst = {200, 100};
  CHECK_THROWS_AS(p.validate(), ProfileError);
  p.bin_hcfirst = {100};
  CHECK_THROWS_AS(p.validate(), ProfileError);
  p.bin_hcfirst = {100, 200};
  CHECK_NOTHROW(p.validate());
}

TEST_CASE("lookup scope: own bin versus weakest neighbour") {
  const auto g = small_geometry();
  VulnerabilityProfile p;
  p.bin_hcfirst = {100, 200};
  p.bins.assign(g.total_rows(), 1);
  const dram::BankRef b{0, 0, 1};
  p.bins[dram::flat_row(g, b, 11)] = 0;
  CHECK(hcfirst_for_act(p, g, b, 10, LookupScope::ActivatedRow) == 200);
  CHECK(hcfirst_for_act(p, g, b, 10, LookupScope::BlastRadiusMin) == 100);
  CHECK(hcfirst_for_act(p, g, b, 11, LookupScope::ActivatedRow) == 100);
  CHECK(hcfirst_for_act(p, g, b, 13, LookupScope::BlastRadiusMin) == 200);
  CHECK(hcfirst_for_act(p, g, b, 13, LookupScope::BlastRadiusMin, 2) == 100);
  // The neighbour in the other bank does not leak across.
  CHECK(hcfirst_for_act(p, g, {0, 0, 0}, 10, LookupScope::BlastRadiusMin) == 200);
}

TEST_CASE("blast-radius lookup matches a brute-force neighbourhood scan") {
  const auto g = small_geometry();
  const auto p = generate_profile({{0.1, 100}, {0.2, 150}, {0.7, 300}}, g.total_rows(), 3);
  for (std::uint32_t r_blast : {1u, 2u, 4u}) {
    for (std::uint32_t bank = 0; bank < g.banks_per_rank; ++bank) {
      for (dram::RowId row = 0; row < g.rows_per_bank; ++row) {
        std::int64_t expect = p.hcfirst_of(dram::flat_row(g, {0, 0, bank}, row));
        for (std::int64_t d = -std::int64_t(r_blast); d <= std::int64_t(r_blast); ++d) {
          const std::int64_t n = std::int64_t(row) + d;
          if (n < 0 || n >= std::int64_t(g.rows_per_bank)) continue;
          expect = std::min(expect, p.hcfirst_of(dram::flat_row(g, {0, 0, bank}, dram::RowId(n))));
        }
        REQUIRE(hcfirst_for_act(p, g, {0, 0, bank}, row, LookupScope::BlastRadiusMin, r_blast) == expect);
      }
    }
  }
}

TEST_CASE("weakest bin's p_th equals plain PARA's") {
  const auto g = small_geometry();
  auto prof = std::make_shared<VulnerabilityProfile>(
      generate_profile({{0.05, 1024}, {0.95, 2048}}, g.total_rows(), 1));
  para::SolverInput base;
  SvardPara s(prof, {}, base, g, 1);
  base.n_rh = 1024;
  CHECK(s.bin_pth()[0] == para::solve_pth(base));
  base.n_rh = 2048;
  CHECK(s.bin_pth()[1] == para::solve_pth(base));
  CHECK(s.bin_pth()[1] < s.bin_pth()[0]);

  SvardPara off(prof, {false, LookupScope::BlastRadiusMin}, base, g, 1);
  base.n_rh = 1024;
  CHECK(off.bin_pth()[1] == para::solve_pth(base));
}

TEST_CASE("uniform profile reproduces PARA's refresh decisions exactly") {
  const auto g = small_geometry();
  auto prof = std::make_shared<VulnerabilityProfile>(generate_profile({{1.0, 1024}}, g.total_rows(), 2));
  para::SolverInput base;
  base.n_rh = 1024;
  const double p = para::solve_pth(base);
  SvardPara s(prof, {}, base, g, 77);
  para::Para plain(p, g, 77);
  Rng rng(3);
  for (int i = 0; i < 100000; ++i) {
    const dram::BankRef b{0, 0, static_cast<std::uint32_t>(rng.below(2))};
    const auto row = static_cast<dram::RowId>(rng.below(g.rows_per_bank));
    REQUIRE(s.on_close(b, row, i) == plain.on_close(b, row, i));
  }
  CHECK(s.refreshes() == plain.refreshes());
}

TEST_CASE("a mostly strong profile cuts preventive refreshes") {
  const auto g = small_geometry();
  auto prof = std::make_shared<VulnerabilityProfile>(
      generate_profile({{0.05, 1024}, {0.95, 2048}}, g.total_rows(), 6));
  para::SolverInput base;
  SvardPara s(prof, {true, LookupScope::ActivatedRow}, base, g, 8);
  base.n_rh = 1024;
  para::Para plain(para::solve_pth(base), g, 8);
  Rng rng(4);
  for (int i = 0; i < 200000; ++i) {
    const dram::BankRef b{0, 0, static_cast<std::uint32_t>(rng.below(2))};
    const auto row = static_cast<dram::RowId>(rng.below(g.rows_per_bank));
    s.on_close(b, row, i);
    plain.on_close(b, row, i);
  }
  CHECK(double(s.refreshes()) <= 0.8 * double(plain.refreshes()));
}
