#pragma once

#include <iosfwd>
#include <string>

#include <nlohmann/json.hpp>

#include "qprobe/operators.hpp"
#include "qprobe/probe.hpp"
#include "qprobe/reconstruct.hpp"
#include "qprobe/sampling.hpp"
#include "qprobe/spectrum.hpp"
#include "qprobe/thermo.hpp"

namespace qprobe::io {

using nlohmann::json;

// {"dim": d, "entries": [[re, im], ...]} row-major. Plain numbers are
// accepted as real entries on input.
json matrix_to_json(const ComplexMatrix& m);
ComplexMatrix matrix_from_json(const json& j);

json to_json(const HermitianOperator& op);
HermitianOperator operator_from_json(const json& j);
json to_json(const SystemState& state);
SystemState state_from_json(const json& j);

json to_json(const Spectrum& spectrum);
Spectrum spectrum_from_json(const json& j);

// {"p0", "g", "tau", "mode": "ideal" | "bin" | "squeezed", "L" | "s"}
json to_json(const ProbeConfig& probe);
ProbeConfig probe_from_json(const json& j);

// Tagged by "kind": point_masses | piecewise_uniform | gaussian_mixture.
json to_json(const MomentumDistribution& dist);
MomentumDistribution distribution_from_json(const json& j);

json to_json(const ResolutionParams& params);
json to_json(const ReconstructedSpectrum& spectrum);
json to_json(const ThermoReport& report);
json to_json(const QuenchReport& report);
json to_json(const ValidityReport& report);

enum class TableStyle { Csv, Whitespace };

/// Measurement record as a two-column table (index, p) behind '#' header
/// lines carrying seed, sample count, detector bin and probe parameters.
/// Values are printed in shortest round-trip form.
void write_record(std::ostream& out, const MeasurementRecord& record, const ProbeConfig& probe,
                  TableStyle style = TableStyle::Csv, const json& extra_header = nullptr);

struct LoadedRecord {
  MeasurementRecord record;
  json header;  // parsed metadata, including "probe" when present
};
// Accepts either table style. Throws InvalidArgument on malformed input.
LoadedRecord read_record(std::istream& in);

// Shortest round-trip decimal for a double.
std::string format_double(double value);

}  // namespace qprobe::io
