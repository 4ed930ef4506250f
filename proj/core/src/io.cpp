#include "qprobe/io.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "qprobe/errors.hpp"

namespace qprobe::io {
namespace {

constexpr const char* kRecordMagic = "# qprobe measurement record";
constexpr const char* kMetaPrefix = "# meta ";

double number(const json& j, const char* key) {
  if (!j.contains(key)) throw InvalidArgument(std::string("missing key '") + key + "'");
  const auto& v = j.at(key);
  if (!v.is_number()) throw InvalidArgument(std::string("key '") + key + "' must be a number");
  return v.get<double>();
}

// Non-finite values have no JSON literal; they are written as null.
json finite_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

Complex complex_from_json(const json& e) {
  if (e.is_number()) return {e.get<double>(), 0.0};
  if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number())
    return {e[0].get<double>(), e[1].get<double>()};
  throw InvalidArgument("matrix entry must be a number or [re, im]");
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

json matrix_to_json(const ComplexMatrix& m) {
  if (!m.is_square()) throw InvalidArgument("matrix_to_json: square matrix expected");
  json entries = json::array();
  for (const auto& z : m.data()) entries.push_back(json::array({z.real(), z.imag()}));
  return {{"dim", m.rows()}, {"entries", entries}};
}

ComplexMatrix matrix_from_json(const json& j) {
  // Nested rows are accepted too: [[a, b], [c, d]] with real or [re, im] entries.
  if (j.is_array()) {
    const std::size_t d = j.size();
    if (d == 0) throw InvalidArgument("matrix: empty");
    ComplexMatrix m(d, d);
    for (std::size_t r = 0; r < d; ++r) {
      if (!j[r].is_array() || j[r].size() != d) throw InvalidArgument("matrix: rows must have length dim");
      for (std::size_t c = 0; c < d; ++c) m(r, c) = complex_from_json(j[r][c]);
    }
    return m;
  }
  if (!j.is_object()) throw InvalidArgument("matrix: object or nested array expected");
  const double dim_raw = number(j, "dim");
  if (dim_raw < 1 || dim_raw != std::floor(dim_raw)) throw InvalidArgument("matrix: dim must be a positive integer");
  const auto d = static_cast<std::size_t>(dim_raw);
  if (d > kMaxDimension) throw InvalidArgument("matrix: dimension cap exceeded");
  const auto& e = j.at("entries");
  if (!e.is_array() || e.size() != d * d) throw InvalidArgument("matrix: entries must have dim^2 elements");
  ComplexMatrix m(d, d);
  for (std::size_t k = 0; k < d * d; ++k) m.data()[k] = complex_from_json(e[k]);
  return m;
}

json to_json(const HermitianOperator& op) { return matrix_to_json(op.matrix()); }
HermitianOperator operator_from_json(const json& j) { return HermitianOperator(matrix_from_json(j)); }
json to_json(const SystemState& state) { return matrix_to_json(state.matrix()); }
SystemState state_from_json(const json& j) { return SystemState::from_matrix(matrix_from_json(j)); }

json to_json(const Spectrum& spectrum) {
  json lines = json::array();
  for (const auto& l : spectrum.lines)
    lines.push_back({{"energy", l.energy}, {"probability", l.probability}, {"degeneracy", l.degeneracy}});
  return {{"lines", lines}};
}

Spectrum spectrum_from_json(const json& j) {
  const json& lines = j.is_object() ? j.at("lines") : j;
  if (!lines.is_array()) throw InvalidArgument("spectrum: 'lines' must be an array");
  std::vector<double> e, p;
  std::vector<int> g;
  for (const auto& l : lines) {
    e.push_back(number(l, "energy"));
    p.push_back(number(l, "probability"));
    g.push_back(l.contains("degeneracy") ? l.at("degeneracy").get<int>() : 1);
  }
  return make_spectrum(std::move(e), std::move(p), std::move(g));
}

json to_json(const ProbeConfig& probe) {
  json j = {{"p0", probe.momentum_center},
            {"g", probe.coupling},
            {"tau", probe.interaction_time},
            {"mode", mode_name(probe.mode)}};
  if (const auto* b = std::get_if<BinMode>(&probe.mode)) j["L"] = b->width;
  if (const auto* s = std::get_if<SqueezedMode>(&probe.mode)) j["s"] = s->squeezing;
  return j;
}

ProbeConfig probe_from_json(const json& j) {
  if (!j.is_object()) throw InvalidArgument("probe: object expected");
  ProbeConfig p;
  p.momentum_center = j.contains("p0") ? number(j, "p0") : 0.0;
  p.coupling = j.contains("g") ? number(j, "g") : 1.0;
  p.interaction_time = j.contains("tau") ? number(j, "tau") : 1.0;
  const std::string mode = j.value("mode", std::string("ideal"));
  if (mode == "ideal") {
    p.mode = IdealMode{};
  } else if (mode == "bin") {
    p.mode = BinMode{number(j, "L")};
  } else if (mode == "squeezed") {
    p.mode = SqueezedMode{number(j, "s")};
  } else {
    throw InvalidArgument("probe: unknown mode '" + mode + "'");
  }
  p.validate();
  return p;
}

json to_json(const MomentumDistribution& dist) {
  json j = {{"kind", kind_name(dist)}};
  std::visit(
      [&j](const auto& d) {
        using T = std::decay_t<decltype(d)>;
        json items = json::array();
        if constexpr (std::is_same_v<T, PointMasses>) {
          for (const auto& x : d.points) items.push_back({{"position", x.position}, {"mass", x.mass}});
          j["points"] = items;
        } else if constexpr (std::is_same_v<T, PiecewiseUniform>) {
          for (const auto& x : d.plateaus)
            items.push_back({{"center", x.center}, {"width", x.width}, {"mass", x.mass}});
          j["plateaus"] = items;
        } else {
          for (const auto& x : d.components)
            items.push_back({{"mean", x.mean}, {"stddev", x.stddev}, {"weight", x.weight}});
          j["components"] = items;
        }
      },
      dist);
  return j;
}

MomentumDistribution distribution_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "point_masses") {
    PointMasses d;
    for (const auto& x : j.at("points")) d.points.push_back({number(x, "position"), number(x, "mass")});
    return d;
  }
  if (kind == "piecewise_uniform") {
    PiecewiseUniform d;
    for (const auto& x : j.at("plateaus"))
      d.plateaus.push_back({number(x, "center"), number(x, "width"), number(x, "mass")});
    return d;
  }
  if (kind == "gaussian_mixture") {
    GaussianMixture d;
    for (const auto& x : j.at("components"))
      d.components.push_back({number(x, "mean"), number(x, "stddev"), number(x, "weight")});
    return d;
  }
  throw InvalidArgument("distribution: unknown kind '" + kind + "'");
}

json to_json(const ResolutionParams& params) {
  return {{"infinite_resolution", params.infinite_resolution},
          {"bin_resolution", params.bin_resolution},
          {"energy_stddev", params.energy_stddev},
          {"energy_stddev_quoted", params.energy_stddev_quoted}};
}

json to_json(const ReconstructedSpectrum& spectrum) {
  json lines = json::array();
  for (const auto& l : spectrum.lines)
    lines.push_back({{"energy", l.energy}, {"probability", l.probability}, {"count", l.count}});
  return {{"lines", lines}, {"residual_mass", spectrum.residual_mass}};
}

json to_json(const ThermoReport& report) {
  json grid = json::array();
  for (const auto& row : report.grid) {
    grid.push_back({{"beta", row.beta},
                    {"Z", finite_or_null(row.z)},
                    {"logZ", row.log_z},
                    {"F", finite_or_null(row.free_energy.value)},
                    {"F_valid", row.free_energy.valid},
                    {"C", row.heat_capacity},
                    {"S", row.entropy},
                    {"U", row.mean_energy}});
  }
  return {{"beta_hat", report.beta_hat}, {"spectrum", to_json(report.spectrum)}, {"grid", grid}};
}

json to_json(const QuenchReport& report) {
  return {{"average_work", report.average_work},
          {"free_energy_change", report.free_energy_change},
          {"irreversible_work", report.irreversible_work}};
}

json to_json(const ValidityReport& report) {
  return {{"commuting", report.commuting},
          {"commutator", report.commutator},
          {"interaction_ratio", finite_or_null(report.interaction_ratio)},
          {"evolution_phase", report.evolution_phase},
          {"passed", report.passed}};
}

void write_record(std::ostream& out, const MeasurementRecord& record, const ProbeConfig& probe, TableStyle style,
                  const json& extra_header) {
  json meta = {{"seed", record.seed},
               {"n", record.samples.size()},
               {"detector_bin", record.detector_bin},
               {"detector_origin", record.detector_origin},
               {"probe", to_json(probe)}};
  if (extra_header.is_object())
    for (const auto& [k, v] : extra_header.items()) meta[k] = v;
  const char sep = style == TableStyle::Csv ? ',' : ' ';
  out << kRecordMagic << '\n' << kMetaPrefix << meta.dump() << '\n';
  out << "index" << sep << "p\n";
  std::string line;
  for (std::size_t i = 0; i < record.samples.size(); ++i) {
    line.clear();
    line += std::to_string(i);
    line += sep;
    line += format_double(record.samples[i]);
    line += '\n';
    out << line;
  }
}

LoadedRecord read_record(std::istream& in) {
  LoadedRecord loaded;
  std::string line;
  bool saw_columns = false;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (line.rfind(kMetaPrefix, 0) == 0) {
        try {
          loaded.header = json::parse(line.substr(std::char_traits<char>::length(kMetaPrefix)));
        } catch (const json::exception& e) {
          throw InvalidArgument(std::string("record: malformed metadata: ") + e.what());
        }
      }
      continue;
    }
    if (!saw_columns) {
      saw_columns = true;
      if (line.rfind("index", 0) == 0) continue;
    }
    const auto split = line.find_first_of(", \t");
    if (split == std::string::npos) throw InvalidArgument("record: row " + std::to_string(row) + " has one column");
    auto value_start = line.find_first_not_of(", \t", split);
    if (value_start == std::string::npos) throw InvalidArgument("record: row " + std::to_string(row) + " has no value");
    double value = 0.0;
    const char* first = line.data() + value_start;
    const char* last = line.data() + line.size();
    const auto res = std::from_chars(first, last, value);
    if (res.ec != std::errc() || res.ptr != last)
      throw InvalidArgument("record: cannot parse value in row " + std::to_string(row));
    loaded.record.samples.push_back(value);
    ++row;
  }
  if (loaded.header.is_object()) {
    if (loaded.header.contains("seed")) loaded.record.seed = loaded.header.at("seed").get<std::uint64_t>();
    if (loaded.header.contains("detector_bin")) loaded.record.detector_bin = number(loaded.header, "detector_bin");
    if (loaded.header.contains("detector_origin"))
      loaded.record.detector_origin = number(loaded.header, "detector_origin");
    if (loaded.header.contains("n") && loaded.header.at("n").get<std::size_t>() != loaded.record.samples.size())
      throw InvalidArgument("record: sample count does not match header");
  }
  return loaded;
}

}  // namespace qprobe::io
