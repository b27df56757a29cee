#pragma once

#include <algorithm>
#include <numeric>
#include <span>
#include <vector>

#include "springcurl/error.hpp"

namespace springcurl::stats {

/// Holm step-down adjustment; results are returned in the input order.
inline std::vector<double> holm_adjust(std::span<const double> p_values) {
  const std::size_t m = p_values.size();
  for (double p : p_values) {
    require(p >= 0.0 && p <= 1.0, ErrorCode::InvalidInput, "p-value outside [0, 1]");
  }
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return p_values[a] < p_values[b]; });
  std::vector<double> adjusted(m);
  double running = 0.0;
  for (std::size_t rank = 0; rank < m; ++rank) {
    const std::size_t i = order[rank];
    const double scaled = std::min(1.0, static_cast<double>(m - rank) * p_values[i]);
    running = std::max(running, scaled);
    adjusted[i] = running;
  }
  return adjusted;
}

}  // namespace springcurl::stats
