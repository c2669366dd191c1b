#include "subsector/errors.hpp"

namespace subsector {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::parse: return "parse error";
    case ErrorKind::validation: return "validation error";
    case ErrorKind::configuration: return "configuration error";
    case ErrorKind::insufficient_data: return "insufficient data";
    case ErrorKind::zero_variance: return "zero variance";
    case ErrorKind::domain: return "domain error";
    case ErrorKind::numerical: return "numerical error";
    case ErrorKind::argument: return "argument error";
    case ErrorKind::index: return "index error";
  }
  return "error";
}

ParseError::ParseError(std::size_t line, const std::string& message)
    : Error(ErrorKind::parse, "line " + std::to_string(line) + ": " + message),
      line_(line) {}

ZeroVarianceError::ZeroVarianceError(std::size_t asset_index, const std::string& asset)
    : Error(ErrorKind::zero_variance,
            "asset '" + asset + "' has zero return variance"),
      asset_index_(asset_index),
      asset_(asset) {}

IndexError::IndexError(std::size_t index, std::size_t size)
    : Error(ErrorKind::index, "index " + std::to_string(index) +
                                  " out of range for size " + std::to_string(size)) {}

}  // namespace subsector
