#pragma once

#include <span>

#include "springcurl/error.hpp"

namespace springcurl::stats {

/// Mean of 7-point Likert items mapped onto [0, 1] by the scale's theoretical range.
inline double normalize_likert(std::span<const int> responses) {
  require(!responses.empty(), ErrorCode::InvalidInput, "no questionnaire responses");
  double sum = 0.0;
  for (int r : responses) {
    require(r >= 1 && r <= 7, ErrorCode::InvalidInput, "Likert response outside 1..7");
    sum += r;
  }
  const double mean = sum / static_cast<double>(responses.size());
  return (mean - 1.0) / 6.0;
}

/// Raw locus-of-control score (0..23) onto [-1, 1]; -1 is internal, +1 external.
inline double loc_transform(double raw) {
  require(raw >= 0.0 && raw <= 23.0, ErrorCode::InvalidInput, "locus-of-control raw outside 0..23");
  return 2.0 * raw / 23.0 - 1.0;
}

}  // namespace springcurl::stats
