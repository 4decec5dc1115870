#pragma once

#include <algorithm>

namespace adaptnet {

/// Duty-cycled radar: active for the first `active_fraction` of every pulse
/// repetition interval, silent for the rest.
struct RadarState {
  double pri = 2.0;               ///< seconds
  double active_fraction = 0.75;  ///< in (0, 1]
  double range_max = 150.0;       ///< meters
  double phase = 0.0;             ///< seconds into the current PRI, in [0, pri)

  bool active() const noexcept { return phase < active_fraction * pri; }

  void advance(double dt) noexcept {
    phase += dt;
    while (phase >= pri) phase -= pri;
  }
};

/// Linear ramp of link/detection quality between a floor and a reference SNR.
inline double snr_quality(double snr_db, double floor_db, double ref_db) noexcept {
  return std::clamp((snr_db - floor_db) / (ref_db - floor_db), 0.0, 1.0);
}

}  // namespace adaptnet
