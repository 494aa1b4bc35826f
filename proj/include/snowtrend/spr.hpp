#pragma once

#include <cstddef>

#include "snowtrend/field.hpp"

namespace snowtrend {

struct PentadFrequency {
  GridField freq;                // 73 layers stamped at pentad start dates
  std::size_t incomplete = 0;    // pixel-pentads with missing daily masks
};

// Snow-day fraction per pentad from a daily mask series that covers the whole
// year. Frequencies are taken over the valid (non-missing) days of a window;
// windows with no valid day come out NaN and are counted as incomplete.
PentadFrequency snow_frequency_pentads(const GridField& daily_mask, int year);

struct AnnualSprResult {
  GridField spr;                 // single layer stamped Jan 1
  std::size_t dry_pixels = 0;    // zero precipitation across the year
};

// Snowfall-to-precipitation ratio: sum(f_s * P) / sum(P) over the year's 73
// pentads, using only pentads where both factors are present. Pixels whose
// accumulated precipitation is zero (or that have no usable pentad) are NaN.
AnnualSprResult annual_spr(const GridField& pentad_freq,
                           const GridField& pentad_precip, int year);

}  // namespace snowtrend
