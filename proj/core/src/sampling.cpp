#include "qprobe/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <thread>

#include <boost/math/special_functions/erf.hpp>

#include "qprobe/errors.hpp"

namespace qprobe {
namespace {

// Flattened component table shared by all three distribution kinds.
struct Component {
  enum class Kind { Point, Uniform, Gaussian } kind;
  double location;  // position, plateau lower edge, or mean
  double scale;     // 0, plateau width, or stddev
};

struct Table {
  std::vector<Component> components;
  std::vector<double> cumulative;  // normalized, last entry 1
};

Table build_table(const MomentumDistribution& dist) {
  Table t;
  std::vector<double> weights;
  if (const auto* d = std::get_if<PointMasses>(&dist)) {
    for (const auto& p : d->points)
      if (p.mass > 0.0) {
        t.components.push_back({Component::Kind::Point, p.position, 0.0});
        weights.push_back(p.mass);
      }
  } else if (const auto* d = std::get_if<PiecewiseUniform>(&dist)) {
    for (const auto& p : d->plateaus)
      if (p.mass > 0.0) {
        if (!(p.width > 0.0)) throw InvalidArgument("sampling: plateau width must be > 0");
        t.components.push_back({Component::Kind::Uniform, p.lower(), p.width});
        weights.push_back(p.mass);
      }
  } else {
    for (const auto& c : std::get<GaussianMixture>(dist).components)
      if (c.weight > 0.0) {
        if (!(c.stddev > 0.0)) throw InvalidArgument("sampling: Gaussian stddev must be > 0");
        t.components.push_back({Component::Kind::Gaussian, c.mean, c.stddev});
        weights.push_back(c.weight);
      }
  }
  if (t.components.empty()) throw InvalidArgument("sampling: distribution has no mass");
  double total = 0.0;
  for (double w : weights) total += w;
  if (std::abs(total - 1.0) > 1e-9) throw InvalidArgument("sampling: distribution is not normalized");
  double running = 0.0;
  for (double w : weights) {
    running += w;
    t.cumulative.push_back(running / total);
  }
  t.cumulative.back() = 1.0;
  return t;
}

// 53 random bits in [0, 1).
double unit_closed_open(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }
// 53 random bits in (0, 1).
double unit_open(std::mt19937_64& rng) { return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53; }

double draw(const Table& t, std::mt19937_64& rng) {
  const double u = unit_closed_open(rng);
  // First component whose cumulative weight reaches u: ties go to the lower one.
  auto it = std::lower_bound(t.cumulative.begin(), t.cumulative.end(), u);
  if (it == t.cumulative.end()) --it;
  const Component& c = t.components[static_cast<std::size_t>(it - t.cumulative.begin())];
  switch (c.kind) {
    case Component::Kind::Point:
      rng();  // keep two draws per sample for every kind
      return c.location;
    case Component::Kind::Uniform:
      return c.location + c.scale * unit_closed_open(rng);
    case Component::Kind::Gaussian:
      // Phi^{-1}(v) = -sqrt(2) erfc^{-1}(2 v)
      return c.location - c.scale * std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * unit_open(rng));
  }
  return c.location;
}

std::mt19937_64 block_generator(std::uint64_t seed, std::uint64_t block) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace

MeasurementRecord sample_measurements(const MomentumDistribution& dist, std::size_t n, std::uint64_t seed,
                                      const SamplingOptions& options) {
  if (n == 0) throw InvalidArgument("sampling: n must be positive");
  const Table table = build_table(dist);

  MeasurementRecord record;
  record.seed = seed;
  record.samples.resize(n);

  const std::size_t blocks = (n + kSamplingBlockSize - 1) / kSamplingBlockSize;
  auto fill = [&](std::size_t first_block, std::size_t last_block) {
    for (std::size_t b = first_block; b < last_block; ++b) {
      auto rng = block_generator(seed, b);
      const std::size_t begin = b * kSamplingBlockSize;
      const std::size_t end = std::min(n, begin + kSamplingBlockSize);
      for (std::size_t i = begin; i < end; ++i) record.samples[i] = draw(table, rng);
    }
  };

  const std::size_t workers = std::clamp<std::size_t>(options.workers, 1, blocks);
  if (workers == 1) {
    fill(0, blocks);
    return record;
  }
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t first = blocks * w / workers;
    const std::size_t last = blocks * (w + 1) / workers;
    threads.emplace_back(fill, first, last);
  }
  for (auto& t : threads) t.join();
  return record;
}

MeasurementRecord quantize_to_detector(MeasurementRecord record, double bin_width, double origin) {
  if (!(bin_width > 0.0) || !std::isfinite(bin_width)) throw InvalidArgument("detector: bin width must be > 0");
  for (double& p : record.samples) p = origin + (std::floor((p - origin) / bin_width) + 0.5) * bin_width;
  record.detector_bin = bin_width;
  record.detector_origin = origin;
  return record;
}

}  // namespace qprobe
