#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace snowtrend {

struct ContingencyCounts {
  std::size_t hits = 0;
  std::size_t misses = 0;
  std::size_t false_alarms = 0;
  std::size_t correct_negatives = 0;
};

ContingencyCounts contingency(const std::vector<bool>& estimates,
                              const std::vector<bool>& observations);

double pod(const ContingencyCounts& c);  // hits / (hits + misses)
double far(const ContingencyCounts& c);  // false alarms / (hits + false alarms)
double csi(const ContingencyCounts& c);  // hits / (hits + misses + false alarms)

// Squared correlation, computed as the squared mean product of the
// standardized pairs (sample moments, n-1). Throws when either side has zero
// variance or fewer than two pairs.
double r2(std::span<const double> estimates, std::span<const double> observations);

// Relative bias in percent: sum(est - obs) / sum(obs) * 100.
double rbias_percent(std::span<const double> estimates,
                     std::span<const double> observations);

}  // namespace snowtrend
