#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace polpair {

/// Time-binned coincidence histogram as produced by the acquisition system.
/// Bins cover [0, t_max) at fixed width; the signal window is [t_i, t_f] and
/// everything after t_f is the accidental (noise) region.
struct Histogram {
  double bin_width = 0.0;      // seconds
  std::vector<std::int64_t> counts;
  double t_i = 0.0;            // seconds, window start (bin-aligned)
  double t_f = 0.0;            // seconds, window end (may fall inside a bin)
  double t_max = 0.0;          // seconds
  double duration = 0.0;       // acquisition time, seconds
  std::int64_t singles_A = 0;  // Alice singles over the acquisition
  std::string label;           // joint-setting descriptor

  double window_length() const { return t_f - t_i; }
  void validate() const;
};

} // namespace polpair
