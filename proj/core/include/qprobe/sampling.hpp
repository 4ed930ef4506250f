#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "qprobe/probe.hpp"

namespace qprobe {

struct MeasurementRecord {
  std::vector<double> samples;
  std::uint64_t seed = 0;
  double detector_bin = 0.0;  // 0 means continuum readout
  double detector_origin = 0.0;
};

// Samples are generated in fixed blocks, each with its own generator seeded
// from (seed, block index). Any number of workers produces the same record.
inline constexpr std::size_t kSamplingBlockSize = 4096;

struct SamplingOptions {
  unsigned workers = 1;
};

// n i.i.d. draws: component chosen by inverse CDF over cumulative weights
// (ties go to the lower component), then an exact inverse-CDF draw inside it.
MeasurementRecord sample_measurements(const MomentumDistribution& dist, std::size_t n, std::uint64_t seed,
                                      const SamplingOptions& options = {});

// Replaces every sample by the centre of its detector bin
// [origin + k w, origin + (k+1) w).
MeasurementRecord quantize_to_detector(MeasurementRecord record, double bin_width, double origin = 0.0);

}  // namespace qprobe
