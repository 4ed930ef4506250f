#include "qprobe_cli/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>

#include "qprobe/errors.hpp"
#include "qprobe/io.hpp"

namespace qprobe::cli {
namespace {

double get_number(const json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (!v.is_number()) throw InvalidArgument(std::string("'") + key + "' must be a number");
  return v.get<double>();
}

std::uint64_t get_count(const json& j, const char* key, std::uint64_t fallback) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
  if (v.is_number_float()) {
    const double x = v.get<double>();
    if (x >= 0.0 && x == std::floor(x) && x < 1.8e19) return static_cast<std::uint64_t>(x);
  }
  throw InvalidArgument(std::string("'") + key + "' must be a nonnegative integer");
}

std::size_t site_count(const json& s, const char* key) {
  const auto n = get_count(s, key, 1);
  if (n == 0) throw InvalidArgument(std::string("system: '") + key + "' must be >= 1");
  if (n > kMaxDimension) throw InvalidArgument(std::string("system: '") + key + "' is too large");
  return static_cast<std::size_t>(n);
}

void require_object(const json& j, const char* what) {
  if (!j.is_object()) throw InvalidArgument(std::string(what) + " section must be an object");
}

}  // namespace

ParamFamily build_family(const json& section) {
  require_object(section, "family");
  const std::string name = section.at("family").get<std::string>();
  ParamFamily family;
  if (name == "dicke") {
    family = dicke_family(static_cast<unsigned>(site_count(section, "atoms")));
  } else if (name == "rabi") {
    family = rabi_family(site_count(section, "sites"));
  } else {
    throw InvalidArgument("unknown family '" + name + "'");
  }
  if (section.contains("lambda_c")) {
    family.critical_coupling = get_number(section, "lambda_c", 0.0);
    family.critical_coupling_illustrative = false;
  }
  return family;
}

HermitianOperator build_operator(const json& section) {
  require_object(section, "system");
  std::optional<HermitianOperator> op;
  std::size_t sites = 1;
  if (section.contains("matrix")) {
    op.emplace(io::matrix_from_json(section.at("matrix")));
  } else if (section.contains("family")) {
    if (!section.contains("lambda")) throw InvalidArgument("system: family needs 'lambda'");
    op.emplace(build_family(section).build(get_number(section, "lambda", 0.0)));
    if (section.contains("sites")) sites = site_count(section, "sites");
  } else if (section.contains("model")) {
    const std::string model = section.at("model").get<std::string>();
    if (model == "rabi") {
      sites = site_count(section, "sites");
      op.emplace(rabi_interaction(sites));
    } else if (model == "dicke") {
      op.emplace(dicke_interaction(static_cast<unsigned>(site_count(section, "atoms"))));
    } else if (model == "ladder") {
      op.emplace(ladder_operator(site_count(section, "levels"), get_number(section, "spacing", 1.0),
                                 get_number(section, "offset", 0.0)));
    } else if (model == "pauli_x") {
      op.emplace(spin_x(1, true));
    } else if (model == "pauli_y") {
      op.emplace(spin_y(1, true));
    } else if (model == "pauli_z") {
      op.emplace(spin_z(1, true));
    } else {
      throw InvalidArgument("system: unknown model '" + model + "'");
    }
  } else {
    throw InvalidArgument("system: expected 'matrix', 'model' or 'family'");
  }

  if (section.contains("rotate")) {
    const std::string rot = section.at("rotate").get<std::string>();
    if (rot != "hadamard") throw InvalidArgument("system: unknown rotation '" + rot + "'");
    if (op->dim() != (std::size_t{1} << sites)) throw InvalidArgument("system: hadamard rotation needs qubit sites");
    op.emplace(conjugate(*op, hadamard_rotation(sites)));
  }
  if (section.contains("scale")) op.emplace(op->scaled(get_number(section, "scale", 1.0)));
  if (section.contains("shift")) op.emplace(op->shifted(get_number(section, "shift", 0.0)));
  return *op;
}

SystemState build_state(const json& section, const HermitianOperator& probed) {
  require_object(section, "state");
  const std::size_t d = probed.dim();
  SystemState state = SystemState::maximally_mixed(d);
  if (section.contains("thermal")) {
    const auto& t = section.at("thermal");
    require_object(t, "state.thermal");
    const double beta = get_number(t, "beta", std::numeric_limits<double>::quiet_NaN());
    if (t.contains("hamiltonian")) {
      state = thermal_state(build_operator(t.at("hamiltonian")), beta);
    } else {
      state = thermal_state(probed, beta);
    }
  } else if (section.contains("maximally_mixed")) {
    state = SystemState::maximally_mixed(d);
  } else if (section.contains("matrix")) {
    state = io::state_from_json(section.at("matrix"));
  } else if (section.contains("ground_of")) {
    const HermitianOperator h = build_operator(section.at("ground_of"));
    const auto& eig = h.eigen();
    if (h.dim() > 1 && eig.eigenvalues[1] - eig.eigenvalues[0] <= kDefaultMergeTolerance)
      throw ContractViolation("state: ground_of operator has a degenerate ground space");
    std::vector<double> weights(h.dim(), 0.0);
    weights[0] = 1.0;
    state = SystemState::diagonal_in(eig.eigenvectors, weights);
  } else if (section.contains("random_populations")) {
    const auto& r = section.at("random_populations");
    require_object(r, "state.random_populations");
    const double floor = get_number(r, "floor", 0.1);
    if (!(floor > 0.0) || !(floor < 1.0)) throw InvalidArgument("state: random population floor must be in (0, 1)");
    std::mt19937_64 rng(get_count(r, "seed", 0));
    std::vector<double> weights(d);
    for (double& w : weights) w = floor + (1.0 - floor) * static_cast<double>(rng() >> 11) * 0x1p-53;
    state = SystemState::diagonal_in(probed.eigen().eigenvectors, weights);
  } else {
    throw InvalidArgument("state: expected 'thermal', 'maximally_mixed', 'matrix', 'ground_of' or 'random_populations'");
  }
  if (state.dim() != d) throw DimensionMismatch("state: dimension differs from the system operator");
  return state;
}

ProbeConfig build_probe(const json& section) {
  require_object(section, "probe");
  if (!section.contains("preset")) return io::probe_from_json(section);
  const RegimePreset& preset = find_preset(section.at("preset").get<std::string>());
  json explicit_form = section;
  explicit_form.erase("preset");
  explicit_form["g"] = 1.0;
  explicit_form["tau"] = preset.g_tau;
  return io::probe_from_json(explicit_form);
}

const HermitianOperator& RunConfig::require_system() const {
  if (!system) throw InvalidArgument("config: 'system' section is required");
  return *system;
}
const SystemState& RunConfig::require_state() const {
  if (!state) throw InvalidArgument("config: 'state' section is required");
  return *state;
}
const ProbeConfig& RunConfig::require_probe() const {
  if (!probe) throw InvalidArgument("config: 'probe' section is required");
  return *probe;
}
const SamplingSettings& RunConfig::require_sampling() const {
  if (!sampling) throw InvalidArgument("config: 'sampling' section is required");
  return *sampling;
}

Spectrum RunConfig::exact_spectrum() const { return spectrum_of(require_state(), require_system(), merge_tolerance); }

RunConfig resolve_config(const json& input, const Overrides& overrides) {
  const json& raw = input.is_object() && input.contains("config") ? input.at("config") : input;
  require_object(raw, "top-level config");

  RunConfig cfg;
  cfg.resolved = raw;
  cfg.merge_tolerance = get_number(raw, "merge_tolerance", kDefaultMergeTolerance);
  if (!(cfg.merge_tolerance > 0.0)) throw InvalidArgument("merge_tolerance must be > 0");

  if (raw.contains("system")) cfg.system.emplace(build_operator(raw.at("system")));
  if (raw.contains("state")) {
    if (!cfg.system) throw InvalidArgument("config: 'state' needs a 'system' section");
    cfg.state.emplace(build_state(raw.at("state"), *cfg.system));
  }
  if (raw.contains("probe")) {
    cfg.probe.emplace(build_probe(raw.at("probe")));
    cfg.resolved["probe"] = io::to_json(*cfg.probe);
  }

  if (raw.contains("sampling") || overrides.seed) {
    const json s = raw.value("sampling", json::object());
    require_object(s, "sampling");
    SamplingSettings st;
    st.seed = overrides.seed ? *overrides.seed : get_count(s, "seed", 0);
    st.detector_bin = get_number(s, "detector_bin", 0.0);
    st.detector_origin = get_number(s, "detector_origin", 0.0);
    st.workers = static_cast<unsigned>(std::max<std::uint64_t>(1, get_count(s, "workers", 1)));
    if (st.detector_bin < 0.0 || !std::isfinite(st.detector_bin))
      throw InvalidArgument("sampling: detector_bin must be >= 0");

    if (s.contains("n") && s.at("n").is_string()) {
      if (s.at("n").get<std::string>() != "auto") throw InvalidArgument("sampling: n must be a number or \"auto\"");
      const ProbeConfig& probe = cfg.require_probe();
      const ResolutionParams res = resolution_params(probe);
      double sigma = 0.0;
      if (std::holds_alternative<SqueezedMode>(probe.mode)) sigma = res.energy_stddev;
      if (std::holds_alternative<BinMode>(probe.mode)) sigma = res.bin_resolution / std::sqrt(12.0);
      if (!(sigma > 0.0)) throw InvalidArgument("sampling: n = \"auto\" needs a bin or squeezed probe");
      const double constant = get_number(s, "auto_constant", 1.0);
      std::uint64_t n = 1;
      for (const auto& line : cfg.exact_spectrum().lines)
        if (line.probability > 0.0) n = std::max(n, required_samples(sigma, line.probability, constant));
      if (n > 100'000'000) throw InvalidArgument("sampling: auto sample count exceeds 1e8");
      st.n = static_cast<std::size_t>(n);
    } else {
      st.n = static_cast<std::size_t>(get_count(s, "n", 0));
    }

    json rs = s;
    rs["n"] = st.n;
    rs["seed"] = st.seed;
    rs["detector_bin"] = st.detector_bin;
    rs["detector_origin"] = st.detector_origin;
    rs.erase("workers");
    cfg.resolved["sampling"] = rs;
    cfg.sampling = st;
  }
  return cfg;
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open '" + path + "'");
  try {
    return json::parse(in, nullptr, true, true);
  } catch (const json::exception& e) {
    throw InvalidArgument("'" + path + "' is not valid JSON: " + e.what());
  }
}

double reconstruction_bin_width(const RunConfig& config) {
  const json r = config.resolved.value("reconstruct", json::object());
  if (r.contains("bin_width")) {
    const double w = get_number(r, "bin_width", 0.0);
    if (!(w > 0.0)) throw InvalidArgument("reconstruct: bin_width must be > 0");
    return w;
  }
  if (config.sampling && config.sampling->detector_bin > 0.0) return config.sampling->detector_bin;
  const ProbeConfig& probe = config.require_probe();
  const double sigma = momentum_peak_stddev(probe);
  return sigma > 0.0 ? 0.25 * sigma : 1e-6 * probe.coupling_time();
}

PeakOptions peak_options(const RunConfig& config) {
  const json r = config.resolved.value("reconstruct", json::object());
  PeakOptions opt;
  opt.min_mass = get_number(r, "min_mass", 0.0);
  opt.threshold_fraction = get_number(r, "threshold_fraction", opt.threshold_fraction);
  return opt;
}

}  // namespace qprobe::cli
