#pragma once

#include <stdexcept>
#include <string>

namespace disturb {

// One exception type per failure class so callers can tell a bad config
// from a simulator bug.

struct AddressError : std::out_of_range {
  using std::out_of_range::out_of_range;
};

/// An illegal command for the bank's phase, or a timing violation.
struct ProtocolError : std::logic_error {
  using std::logic_error::logic_error;
};

struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// HiRA pairing requested across subarrays that share bitlines.
struct PairingError : std::logic_error {
  using std::logic_error::logic_error;
};

struct ProfileError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParseError : std::runtime_error {
  ParseError(const std::string& path, long line, const std::string& what)
      : std::runtime_error(path + ":" + std::to_string(line) + ": " + what), line_(line) {}
  long line() const { return line_; }

 private:
  long line_;
};

/// A structural guarantee (buffer sizing, deadline) was broken.
struct InvariantError : std::logic_error {
  using std::logic_error::logic_error;
};

}  // namespace disturb
