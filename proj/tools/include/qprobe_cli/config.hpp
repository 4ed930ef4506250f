#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "qprobe/models.hpp"
#include "qprobe/operators.hpp"
#include "qprobe/probe.hpp"
#include "qprobe/reconstruct.hpp"
#include "qprobe/spectrum.hpp"

namespace qprobe::cli {

using nlohmann::json;

// Operator from a system section:
//   {"matrix": ...}
//   {"model": "rabi", "sites": n} | {"model": "dicke", "atoms": n}
//   {"model": "ladder", "levels": n, "spacing": d, "offset": e0}
//   {"model": "pauli_x" | "pauli_y" | "pauli_z"}
//   {"family": "dicke" | "rabi", "atoms" | "sites": n, "lambda": x}
// with optional "rotate": "hadamard", "scale" and "shift".
HermitianOperator build_operator(const json& section);

ParamFamily build_family(const json& section);

// State section, relative to the probed operator:
//   {"thermal": {"beta": b, "hamiltonian": <system>?}}
//   {"maximally_mixed": true}
//   {"matrix": ...}
//   {"ground_of": <system>}
//   {"random_populations": {"seed": k, "floor": f}}  (diagonal in the
//     eigenbasis of the probed operator, populations uniform on [f, 1))
SystemState build_state(const json& section, const HermitianOperator& probed);

// Probe section; {"preset": name} sets g = 1 and tau = the preset's g tau.
ProbeConfig build_probe(const json& section);

struct SamplingSettings {
  std::size_t n = 0;
  std::uint64_t seed = 0;
  double detector_bin = 0.0;
  double detector_origin = 0.0;
  unsigned workers = 1;
};

/// A parsed and resolved run configuration.
///
/// `resolved` is the input with command-line overrides applied and derived
/// values filled in (the probe in explicit form, "auto" sample counts as
/// numbers). Resolving a resolved config is the identity.
struct RunConfig {
  json resolved;
  double merge_tolerance = kDefaultMergeTolerance;

  std::optional<HermitianOperator> system;
  std::optional<SystemState> state;
  std::optional<ProbeConfig> probe;
  std::optional<SamplingSettings> sampling;

  const HermitianOperator& require_system() const;
  const SystemState& require_state() const;
  const ProbeConfig& require_probe() const;
  const SamplingSettings& require_sampling() const;

  // Exact lines of the system operator in the configured state.
  Spectrum exact_spectrum() const;
};

struct Overrides {
  std::optional<std::uint64_t> seed;
};

// Accepts a report with a top-level "config" key as well. Throws
// InvalidArgument on malformed input.
RunConfig resolve_config(const json& input, const Overrides& overrides = {});
json load_json_file(const std::string& path);

// Histogram bin width for reconstruction: the reconstruct section's
// "bin_width", else the detector bin, else a quarter of the peak width
// (1e-6 g tau for ideal probes).
double reconstruction_bin_width(const RunConfig& config);
PeakOptions peak_options(const RunConfig& config);

}  // namespace qprobe::cli
