#pragma once

#include <stdexcept>
#include <string>

namespace tabsniper {

/// Invalid argument to a geometric or numeric routine (degenerate box, bad score vector).
class GeometryError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed ingestion, model or CSV input. The message names the offending record.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A pipeline stage could not produce a result for its input.
class PipelineError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace tabsniper
