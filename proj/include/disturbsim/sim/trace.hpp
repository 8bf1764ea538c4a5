#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <string>

#include "disturbsim/common/time.hpp"
#include "disturbsim/memctrl/request.hpp"

namespace disturb::sim {

/// One line of a trace: `<arrival_ps> <thread_id> <R|W> <hex_address>`.
struct TraceRecord {
  Picos arrival = 0;
  std::uint32_t thread = 0;
  memctrl::ReqKind kind = memctrl::ReqKind::Read;
  std::uint64_t address = 0;

  friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

/// Streams a trace file line by line. Blank lines and lines starting with
/// '#' are skipped; anything else malformed, or an arrival earlier than the
/// previous one, throws ParseError with the line number.
class TraceReader {
 public:
  explicit TraceReader(const std::string& path);
  std::optional<TraceRecord> next();
  long line() const { return line_; }

 private:
  std::string path_;
  std::ifstream in_;
  long line_ = 0;
  Picos last_ = 0;
};

TraceRecord parse_trace_line(const std::string& text, const std::string& path, long line);

class TraceWriter {
 public:
  explicit TraceWriter(const std::string& path);
  void write(const TraceRecord& r);
  void close();

 private:
  std::string path_;
  std::ofstream out_;
};

}  // namespace disturb::sim
