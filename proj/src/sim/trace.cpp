#include "disturbsim/sim/trace.hpp"

#include <array>
#include <charconv>

#include "disturbsim/common/errors.hpp"

namespace disturb::sim {

namespace {

std::string_view next_token(std::string_view& s) {
  std::size_t i = 0;
  while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
  std::size_t j = i;
  while (j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != '\r') ++j;
  auto tok = s.substr(i, j - i);
  s.remove_prefix(j);
  return tok;
}

template <typename T>
bool parse_int(std::string_view tok, T& out, int base = 10) {
  if (tok.empty()) return false;
  auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out, base);
  return ec == std::errc() && p == tok.data() + tok.size();
}

}  // namespace

TraceRecord parse_trace_line(const std::string& text, const std::string& path, long line) {
  std::string_view s(text);
  TraceRecord r;
  const auto t_arr = next_token(s);
  const auto t_thr = next_token(s);
  const auto t_kind = next_token(s);
  auto t_addr = next_token(s);
  if (!parse_int(t_arr, r.arrival) || r.arrival < 0) throw ParseError(path, line, "bad arrival time");
  if (!parse_int(t_thr, r.thread)) throw ParseError(path, line, "bad thread id");
  if (t_kind == "R") {
    r.kind = memctrl::ReqKind::Read;
  } else if (t_kind == "W") {
    r.kind = memctrl::ReqKind::Write;
  } else {
    throw ParseError(path, line, "expected R or W");
  }
  if (t_addr.size() > 2 && t_addr[0] == '0' && (t_addr[1] == 'x' || t_addr[1] == 'X')) t_addr = t_addr.substr(2);
  if (t_addr.empty() || !parse_int(t_addr, r.address, 16)) {
    throw ParseError(path, line, "bad hex address");
  }
  if (!next_token(s).empty()) throw ParseError(path, line, "trailing fields");
  return r;
}

TraceReader::TraceReader(const std::string& path) : path_(path), in_(path) {
  if (!in_) throw ParseError(path, 0, "cannot open trace");
}

std::optional<TraceRecord> TraceReader::next() {
  std::string text;
  while (std::getline(in_, text)) {
    ++line_;
    const auto first = text.find_first_not_of(" \t\r");
    if (first == std::string::npos || text[first] == '#') continue;
    TraceRecord r = parse_trace_line(text, path_, line_);
    if (r.arrival < last_) throw ParseError(path_, line_, "arrival earlier than the previous line");
    last_ = r.arrival;
    return r;
  }
  return std::nullopt;
}

TraceWriter::TraceWriter(const std::string& path) : path_(path), out_(path) {
  if (!out_) throw ParseError(path, 0, "cannot create trace");
}

void TraceWriter::write(const TraceRecord& r) {
  std::array<char, 24> num{};
  std::string line;
  line.reserve(64);
  line.append(num.data(), std::to_chars(num.data(), num.data() + num.size(), r.arrival).ptr);
  line += ' ';
  line.append(num.data(), std::to_chars(num.data(), num.data() + num.size(), r.thread).ptr);
  line += r.kind == memctrl::ReqKind::Read ? " R 0x" : " W 0x";
  line.append(num.data(), std::to_chars(num.data(), num.data() + num.size(), r.address, 16).ptr);
  line += '\n';
  out_ << line;
}

void TraceWriter::close() {
  out_.close();
  if (!out_) throw ParseError(path_, 0, "write failed");
}

}  // namespace disturb::sim
