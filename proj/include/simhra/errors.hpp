#pragma once

#include <stdexcept>
#include <string>

namespace simhra {

/// Malformed scenario files, transcripts, scripts, or manifests.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Unknown builtin identifiers and missing files.
class NotFoundError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad run/backend configuration (missing script entry, missing API key, ...).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// LLM endpoint unreachable or persistently failing; a run hitting this
/// aborts as INFRA_FAIL, which is accounted separately from JSON_FAIL.
class TransportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Append that would break the (round, turn_index) ordering of a buffer.
class OrderingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace simhra
