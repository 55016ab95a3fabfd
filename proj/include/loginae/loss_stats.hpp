// SPDX-License-Identifier: Apache-2.0

#ifndef LOGINAE_LOSS_STATS_HPP
#define LOGINAE_LOSS_STATS_HPP

#include <cmath>
#include <cstddef>
#include <span>

#include "loginae/error.hpp"

namespace loginae::detect {

/// Mean and population standard deviation of per-event losses.
struct LossStats {
  double mu = 0.0;
  double sigma = 0.0;
  std::size_t count = 0;
};

inline LossStats loss_stats(std::span<const double> losses) {
  require(!losses.empty(), "loss_stats requires at least one loss");
  const double n = static_cast<double>(losses.size());
  double sum = 0.0;
  for (double v : losses) sum += v;
  const double mu = sum / n;
  double sq = 0.0;
  for (double v : losses) sq += (v - mu) * (v - mu);
  return {mu, std::sqrt(sq / n), losses.size()};
}

}  // namespace loginae::detect

#endif  // LOGINAE_LOSS_STATS_HPP
