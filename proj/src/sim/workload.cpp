#include "disturbsim/sim/workload.hpp"

#include <cmath>

#include "disturbsim/common/errors.hpp"

namespace disturb::sim {

TraceSource::TraceSource(const std::string& path) : reader_(path) { head_ = reader_.next(); }

TraceRecord TraceSource::take() {
  TraceRecord r = *head_;
  head_ = reader_.next();
  return r;
}

namespace {

Picos exp_gap(Rng& rng, Picos mean) {
  const double u = rng.uniform();
  return 1 + static_cast<Picos>(-std::log1p(-u) * static_cast<double>(mean));
}

}  // namespace

RandomSource::RandomSource(const WorkloadSpec& w, const dram::Geometry& g, const dram::BitFieldMap& map,
                           std::uint64_t seed)
    : w_(w), g_(g), map_(map), rng_(seed) {
  if (w_.row_hi == 0) w_.row_hi = g.rows_per_bank;
  head_.thread = w_.thread;
  head_.arrival = 0;
  cur_.row = w_.row_lo;
  advance();
}

void RandomSource::advance() {
  if (w_.count && made_ >= w_.count) {
    done_ = true;
    return;
  }
  if (made_ == 0 || !rng_.bernoulli(w_.row_hit)) {
    cur_.channel = static_cast<std::uint32_t>(rng_.below(g_.channels));
    cur_.rank = static_cast<std::uint32_t>(rng_.below(g_.ranks_per_channel));
    cur_.bank = static_cast<std::uint32_t>(rng_.below(g_.banks_per_rank));
    cur_.row = w_.row_lo + static_cast<dram::RowId>(rng_.below(w_.row_hi - w_.row_lo));
  }
  cur_.column = static_cast<std::uint32_t>(rng_.below(g_.columns_per_row));
  head_.kind = rng_.bernoulli(w_.read_fraction) ? memctrl::ReqKind::Read : memctrl::ReqKind::Write;
  head_.address = dram::encode_address(cur_, g_, map_);
  head_.arrival += exp_gap(rng_, w_.interval);
}

TraceRecord RandomSource::take() {
  TraceRecord r = head_;
  ++made_;
  advance();
  return r;
}

StreamSource::StreamSource(const WorkloadSpec& w, const dram::Geometry& g, std::uint64_t seed)
    : w_(w), capacity_(g.capacity_bytes()), rng_(seed) {
  head_.thread = w_.thread;
  head_.kind = memctrl::ReqKind::Read;
  head_.address = rng_.below(capacity_ / 64) * 64;
  head_.arrival = 0;
}

TraceRecord StreamSource::take() {
  TraceRecord r = head_;
  ++made_;
  if (w_.count && made_ >= w_.count) done_ = true;
  head_.address = (head_.address + 64) % capacity_;
  head_.kind = rng_.bernoulli(w_.read_fraction) ? memctrl::ReqKind::Read : memctrl::ReqKind::Write;
  head_.arrival += exp_gap(rng_, w_.interval);
  return r;
}

AttackSource::AttackSource(const WorkloadSpec& w, const dram::Geometry& g, const dram::BitFieldMap& map,
                           std::uint64_t seed)
    : w_(w), g_(g), map_(map), rng_(seed) {
  if (w_.rows.empty()) throw ConfigError("attack: no aggressor rows");
  if (w_.attack == AttackKind::Single) w_.rows.resize(1);
  if (w_.attack == AttackKind::DoubleSided && w_.rows.size() != 2) throw ConfigError("attack: double-sided needs two rows");
  if (w_.attack == AttackKind::BurstIdle && w_.burst == 0) throw ConfigError("attack: burst_idle needs burst > 0");
}

dram::RowId AttackSource::next_row() { return w_.rows[made_ % w_.rows.size()]; }

Picos AttackSource::next_arrival() const {
  if (exhausted()) return kNever;
  if (w_.interval == 0 && (in_flight_ >= w_.outstanding || idling_)) return kNever;
  return ready_;
}

TraceRecord AttackSource::take() {
  dram::DecodedAddress a;
  a.channel = w_.bank.channel;
  a.rank = w_.bank.rank;
  a.bank = w_.bank.bank;
  a.row = next_row();
  a.column = static_cast<std::uint32_t>(rng_.below(g_.columns_per_row));
  TraceRecord r{ready_, w_.thread, memctrl::ReqKind::Read, dram::encode_address(a, g_, map_)};
  ++made_;
  ++in_flight_;
  if (w_.interval > 0) ready_ += w_.interval;
  if (w_.attack == AttackKind::BurstIdle && ++in_burst_ == w_.burst) {
    in_burst_ = 0;
    if (w_.interval > 0) {
      ready_ += w_.idle;
    } else {
      idling_ = true;
    }
  }
  return r;
}

void AttackSource::on_done(const memctrl::MemoryRequest& r) {
  if (in_flight_ > 0) --in_flight_;
  if (w_.interval > 0) return;
  const Picos done = r.completion.value_or(r.arrival);
  if (idling_) {
    if (in_flight_ == 0) {
      idling_ = false;
      ready_ = std::max(ready_, done + w_.idle);
    }
    return;
  }
  ready_ = std::max(ready_, done);
}

std::unique_ptr<RequestSource> make_source(const WorkloadSpec& w, const dram::Geometry& g,
                                           const dram::BitFieldMap& map, std::uint64_t seed) {
  switch (w.type) {
    case WorkloadType::Trace: return std::make_unique<TraceSource>(w.path);
    case WorkloadType::Random: return std::make_unique<RandomSource>(w, g, map, seed);
    case WorkloadType::Stream: return std::make_unique<StreamSource>(w, g, seed);
    case WorkloadType::Attack: return std::make_unique<AttackSource>(w, g, map, seed);
  }
  throw ConfigError("unknown workload type");
}

std::vector<TraceRecord> gen_attack(const WorkloadSpec& w, const dram::Geometry& g, const dram::BitFieldMap& map,
                                    Picos default_interval, std::uint64_t seed) {
  WorkloadSpec spec = w;
  if (spec.interval <= 0) spec.interval = default_interval;
  if (spec.count == 0) throw ConfigError("gen-attack: count must be positive");
  AttackSource src(spec, g, map, seed);
  std::vector<TraceRecord> out;
  out.reserve(spec.count);
  while (!src.exhausted()) out.push_back(src.take());
  return out;
}

}  // namespace disturb::sim
