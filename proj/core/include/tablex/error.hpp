#pragma once

#include <stdexcept>

namespace tablex {

/// Malformed input file (detections, annotations, predictions, config).
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace tablex
