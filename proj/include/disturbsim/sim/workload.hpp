#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "disturbsim/common/rng.hpp"
#include "disturbsim/dram/geometry.hpp"
#include "disturbsim/memctrl/request.hpp"
#include "disturbsim/sim/config.hpp"
#include "disturbsim/sim/trace.hpp"

namespace disturb::sim {

/// A stream of requests in non-decreasing arrival order. Closed-loop
/// sources learn about completions and may hold back until one arrives.
class RequestSource {
 public:
  virtual ~RequestSource() = default;
  /// Arrival time of the head request, or kNever if none is available now.
  virtual Picos next_arrival() const = 0;
  virtual TraceRecord take() = 0;
  virtual void on_done(const memctrl::MemoryRequest& /*r*/) {}
  /// True once no request will ever be produced again.
  virtual bool exhausted() const = 0;
};

class TraceSource : public RequestSource {
 public:
  explicit TraceSource(const std::string& path);
  Picos next_arrival() const override { return head_ ? head_->arrival : kNever; }
  TraceRecord take() override;
  bool exhausted() const override { return !head_; }

 private:
  TraceReader reader_;
  std::optional<TraceRecord> head_;
};

/// Open-loop random traffic: exponential gaps, a chance to reuse the
/// previous row, otherwise a uniformly random bank and row.
class RandomSource : public RequestSource {
 public:
  RandomSource(const WorkloadSpec& w, const dram::Geometry& g, const dram::BitFieldMap& map, std::uint64_t seed);
  Picos next_arrival() const override { return done_ ? kNever : head_.arrival; }
  TraceRecord take() override;
  bool exhausted() const override { return done_; }

 private:
  void advance();
  WorkloadSpec w_;
  dram::Geometry g_;
  dram::BitFieldMap map_;
  Rng rng_;
  dram::DecodedAddress cur_;
  TraceRecord head_;
  std::uint64_t made_ = 0;
  bool done_ = false;
};

/// Sequential cache-line walk through the address space at a fixed mean rate.
class StreamSource : public RequestSource {
 public:
  StreamSource(const WorkloadSpec& w, const dram::Geometry& g, std::uint64_t seed);
  Picos next_arrival() const override { return done_ ? kNever : head_.arrival; }
  TraceRecord take() override;
  bool exhausted() const override { return done_; }

 private:
  WorkloadSpec w_;
  std::uint64_t capacity_;
  Rng rng_;
  TraceRecord head_;
  std::uint64_t made_ = 0;
  bool done_ = false;
};

/// Hammering patterns over a fixed set of aggressor rows in one bank.
///
/// With interval 0 the source is closed-loop: it keeps `outstanding`
/// requests in flight and issues the next one when a previous one completes,
/// which is as fast as the controller will serve them. Otherwise one request
/// every `interval`.
class AttackSource : public RequestSource {
 public:
  AttackSource(const WorkloadSpec& w, const dram::Geometry& g, const dram::BitFieldMap& map, std::uint64_t seed);
  Picos next_arrival() const override;
  TraceRecord take() override;
  void on_done(const memctrl::MemoryRequest& r) override;
  bool exhausted() const override { return w_.count && made_ >= w_.count; }

  std::uint64_t made() const { return made_; }

 private:
  dram::RowId next_row();
  WorkloadSpec w_;
  dram::Geometry g_;
  dram::BitFieldMap map_;
  Rng rng_;
  std::uint64_t made_ = 0;
  std::uint32_t in_flight_ = 0;
  std::uint32_t in_burst_ = 0;
  bool idling_ = false;
  Picos ready_ = 0;
};

std::unique_ptr<RequestSource> make_source(const WorkloadSpec& w, const dram::Geometry& g,
                                           const dram::BitFieldMap& map, std::uint64_t seed);

/// `count` open-loop attack requests, one every `interval` (t_rc if zero).
std::vector<TraceRecord> gen_attack(const WorkloadSpec& w, const dram::Geometry& g, const dram::BitFieldMap& map,
                                    Picos default_interval, std::uint64_t seed);

}  // namespace disturb::sim
