#include "qprobe_cli/cli.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qprobe/errors.hpp"
#include "qprobe/io.hpp"
#include "qprobe/models.hpp"
#include "qprobe/reconstruct.hpp"
#include "qprobe/sampling.hpp"
#include "qprobe/thermo.hpp"
#include "qprobe_cli/config.hpp"

namespace qprobe::cli {
namespace {

enum class Format { Json, Table, Csv };

struct Options {
  std::string config_path;
  std::string out_path;
  std::string record_path;
  std::optional<std::uint64_t> seed;
  std::optional<Format> format;
};

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

void write_table(std::ostream& out, const Table& t, Format format) {
  const char* sep = format == Format::Csv ? "," : " ";
  if (format == Format::Table) out << "# ";
  for (std::size_t c = 0; c < t.columns.size(); ++c) out << (c ? sep : "") << t.columns[c];
  out << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) out << (c ? sep : "") << io::format_double(row[c]);
    out << '\n';
  }
}

struct Output {
  json report;
  Table table;
};

void emit(const Output& o, Format format, std::ostream& out) {
  if (format == Format::Json) {
    out << o.report.dump(2) << '\n';
  } else {
    write_table(out, o.table, format);
  }
}

json system_section(const RunConfig& cfg, const json& section, const char* key) {
  if (section.contains(key)) return section.at(key);
  if (!cfg.resolved.contains("system")) throw InvalidArgument(std::string("config: missing '") + key + "'");
  return cfg.resolved.at("system");
}

std::vector<double> beta_grid_from(const json& section) {
  if (!section.contains("beta_grid")) return default_beta_grid();
  const json& g = section.at("beta_grid");
  if (g.is_array()) return g.get<std::vector<double>>();
  return make_grid(g.value("lo", 0.1), g.value("hi", 10.0), g.value("points", std::size_t{50}), g.value("log", true));
}

MeasurementRecord generate_record(const RunConfig& cfg) {
  const SamplingSettings& s = cfg.require_sampling();
  if (s.n == 0) throw InvalidArgument("sampling: n must be > 0");
  const MomentumDistribution dist = momentum_distribution(cfg.exact_spectrum(), cfg.require_probe());
  MeasurementRecord rec = sample_measurements(dist, s.n, s.seed, SamplingOptions{s.workers});
  if (s.detector_bin > 0.0) rec = quantize_to_detector(std::move(rec), s.detector_bin, s.detector_origin);
  return rec;
}

struct Reconstruction {
  MeasurementRecord record;
  ProbeConfig probe;
  double bin_width;
  double origin;
  ReconstructedSpectrum spectrum;
};

// Reads the record named on the command line or in the config, or samples
// one from the config.
Reconstruction reconstruct_from(RunConfig& cfg, const Options& opt) {
  std::string path = opt.record_path;
  if (path.empty() && cfg.resolved.contains("record")) path = cfg.resolved.at("record").get<std::string>();

  Reconstruction r;
  json header;
  if (!path.empty()) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidArgument("cannot open record '" + path + "'");
    auto loaded = io::read_record(in);
    r.record = std::move(loaded.record);
    header = std::move(loaded.header);
    cfg.resolved["record"] = path;
  } else {
    r.record = generate_record(cfg);
  }

  if (cfg.probe) {
    r.probe = *cfg.probe;
  } else if (header.is_object() && header.contains("probe")) {
    r.probe = io::probe_from_json(header.at("probe"));
    cfg.probe = r.probe;
  } else {
    throw InvalidArgument("config: 'probe' section is required");
  }

  const json rsec = cfg.resolved.value("reconstruct", json::object());
  if (rsec.contains("bin_width")) {
    r.bin_width = reconstruction_bin_width(cfg);
    r.origin = rsec.value("origin", 0.0);
  } else if (r.record.detector_bin > 0.0) {
    r.bin_width = r.record.detector_bin;
    r.origin = r.record.detector_origin;
  } else {
    r.bin_width = reconstruction_bin_width(cfg);
    r.origin = 0.0;
  }
  const Histogram hist = histogram(r.record, r.bin_width, r.origin);
  r.spectrum = detect_peaks(hist, r.probe, peak_options(cfg));
  return r;
}

Output cmd_spectrum(RunConfig& cfg, const Options&) {
  const Spectrum spec = cfg.exact_spectrum();
  Output o;
  o.report = {{"command", "spectrum"}, {"spectrum", io::to_json(spec)}};
  json m = json::array();
  for (int k = 1; k <= 3; ++k) m.push_back(spectral_moment(spec, k));
  o.report["moments"] = m;
  if (cfg.probe) {
    o.report["resolution"] = io::to_json(resolution_params(*cfg.probe));
    o.report["distribution"] = io::to_json(momentum_distribution(spec, *cfg.probe));
    if (cfg.resolved.contains("validity")) {
      const json& v = cfg.resolved.at("validity");
      const ValidityReport vr = validity_check(build_operator(v.at("bare")), cfg.require_system(),
                                               cfg.probe->coupling, cfg.probe->interaction_time,
                                               v.value("ratio", 100.0), v.value("eps", 0.01));
      o.report["validity"] = io::to_json(vr);
    }
  }
  o.table.columns = {"energy", "probability", "degeneracy"};
  for (const auto& l : spec.lines) o.table.rows.push_back({l.energy, l.probability, static_cast<double>(l.degeneracy)});
  return o;
}

Output cmd_reconstruct(RunConfig& cfg, const Options& opt) {
  const Reconstruction r = reconstruct_from(cfg, opt);
  Output o;
  o.report = {{"command", "reconstruct"},
              {"resolution", io::to_json(resolution_params(r.probe))},
              {"histogram", {{"bin_width", r.bin_width}, {"origin", r.origin}, {"samples", r.record.samples.size()}}},
              {"reconstruction", io::to_json(r.spectrum)}};
  json m = json::array();
  for (int k = 1; k <= 3; ++k) m.push_back(moments(r.spectrum, k));
  o.report["moments"] = m;
  if (cfg.system && cfg.state) o.report["exact"] = io::to_json(cfg.exact_spectrum());
  o.table.columns = {"energy", "probability", "count"};
  for (const auto& l : r.spectrum.lines) o.table.rows.push_back({l.energy, l.probability, static_cast<double>(l.count)});
  return o;
}

Output cmd_thermo(RunConfig& cfg, const Options& opt) {
  const json sec = cfg.resolved.value("thermo", json::object());
  const bool from_record = !opt.record_path.empty() || cfg.resolved.contains("record") ||
                           sec.value("source", std::string("exact")) == "record";

  Spectrum spec;
  std::vector<int> known(2, 1);
  if (from_record) {
    spec = to_spectrum(reconstruct_from(cfg, opt).spectrum);
    known = sec.value("degeneracies", std::vector<int>{1, 1});
    if (known.size() != 2) throw InvalidArgument("thermo: degeneracies must have two entries");
  } else {
    spec = cfg.exact_spectrum();
  }
  if (spec.size() < 2) throw NumericalError("thermo: fewer than two spectral lines available");
  // Lowest and highest lines unless chosen explicitly.
  const auto lines = sec.value("beta_lines", std::vector<std::size_t>{0, spec.size() - 1});
  if (lines.size() != 2 || lines[0] == lines[1]) throw InvalidArgument("thermo: beta_lines must name two lines");
  if (lines[0] >= spec.size() || lines[1] >= spec.size()) throw InvalidArgument("thermo: beta_lines out of range");
  SpectralLine a = spec.lines[lines[0]];
  SpectralLine b = spec.lines[lines[1]];
  if (from_record) {
    a.degeneracy = known[0];
    b.degeneracy = known[1];
  }
  const double beta_hat = estimate_beta(a, b);
  const DegeneracyRecovery rec = recover_degeneracies(spec, beta_hat, lines[0], a.degeneracy);
  const ThermoReport report = thermo_report(rec.spectrum, beta_hat, beta_grid_from(sec));

  Output o;
  o.report = io::to_json(report);
  o.report["command"] = "thermo";
  o.report["source"] = from_record ? "record" : "exact";
  o.report["degeneracy_residual"] = rec.max_residual;
  o.table.columns = {"beta", "Z", "logZ", "F", "C", "S", "U"};
  for (const auto& row : report.grid)
    o.table.rows.push_back(
        {row.beta, row.z, row.log_z, row.free_energy.value, row.heat_capacity, row.entropy, row.mean_energy});
  return o;
}

Output cmd_quench(RunConfig& cfg, const Options&) {
  if (!cfg.resolved.contains("quench")) throw InvalidArgument("config: 'quench' section is required");
  const json& q = cfg.resolved.at("quench");
  const HermitianOperator h0 = build_operator(system_section(cfg, q, "initial"));
  const HermitianOperator h1 = build_operator(q.at("final"));
  if (!q.contains("beta") || !q.at("beta").is_number()) throw InvalidArgument("quench: 'beta' is required");
  const QuenchReport r = quench_work(h0, h1, q.at("beta").get<double>(), cfg.merge_tolerance);
  Output o;
  o.report = io::to_json(r);
  o.report["command"] = "quench";
  o.table.columns = {"average_work", "free_energy_change", "irreversible_work"};
  o.table.rows.push_back({r.average_work, r.free_energy_change, r.irreversible_work});
  return o;
}

std::pair<HermitianOperator, HermitianOperator> overlap_pair(const RunConfig& cfg, const json& sec) {
  if (sec.contains("family")) {
    const ParamFamily fam = build_family(sec.at("family"));
    return {fam.build(sec.at("lambda_a").get<double>()), fam.build(sec.at("lambda_b").get<double>())};
  }
  return {build_operator(system_section(cfg, sec, "first")), build_operator(sec.at("second"))};
}

Output cmd_overlap(RunConfig& cfg, const Options&) {
  if (!cfg.resolved.contains("overlap")) throw InvalidArgument("config: 'overlap' section is required");
  const auto [a, b] = overlap_pair(cfg, cfg.resolved.at("overlap"));
  const double p0 = ground_state_overlap(a, b, cfg.merge_tolerance);
  Output o;
  o.report = {{"command", "overlap"}, {"P0", p0}};
  o.table.columns = {"P0"};
  o.table.rows.push_back({p0});
  return o;
}

Output cmd_sweep(RunConfig& cfg, const Options&) {
  if (!cfg.resolved.contains("sweep")) throw InvalidArgument("config: 'sweep' section is required");
  const json& sw = cfg.resolved.at("sweep");
  const std::string param = sw.value("parameter", std::string("beta"));
  Output o;
  json rows = json::array();
  if (param == "beta") {
    const Spectrum levels = level_structure(cfg.require_system(), cfg.merge_tolerance);
    const ThermoReport report = thermo_report(levels, 0.0, beta_grid_from(sw));
    o.table.columns = {"beta", "Z", "logZ", "F", "C", "S", "U"};
    for (const auto& row : report.grid)
      o.table.rows.push_back(
          {row.beta, row.z, row.log_z, row.free_energy.value, row.heat_capacity, row.entropy, row.mean_energy});
    o.report = io::to_json(report);
  } else if (param == "lambda") {
    const ParamFamily fam = build_family(sw.at("family"));
    const json& g = sw.at("grid");
    const std::vector<double> grid =
        g.is_array() ? g.get<std::vector<double>>()
                     : make_grid(g.value("lo", 0.0), g.value("hi", 2.0), g.value("points", std::size_t{21}),
                                 g.value("log", false));
    const double ref = sw.value("reference_lambda", grid.front());
    const HermitianOperator reference = fam.build(ref);
    o.table.columns = {"lambda", "ground_energy", "gap", "overlap"};
    for (double lambda : grid) {
      const HermitianOperator h = fam.build(lambda);
      const auto e = h.eigenvalues();
      const double gap = e.size() > 1 ? e[1] - e[0] : 0.0;
      const double p0 = ground_state_overlap(reference, h, cfg.merge_tolerance);
      o.table.rows.push_back({lambda, e[0], gap, p0});
      rows.push_back({{"lambda", lambda}, {"ground_energy", e[0]}, {"gap", gap}, {"overlap", p0}});
    }
    o.report = {{"rows", rows}, {"reference_lambda", ref}};
    if (fam.critical_coupling) {
      o.report["critical_coupling"] = *fam.critical_coupling;
      o.report["critical_coupling_illustrative"] = fam.critical_coupling_illustrative;
    }
  } else {
    throw InvalidArgument("sweep: parameter must be 'beta' or 'lambda'");
  }
  o.report["command"] = "sweep";
  return o;
}

using Command = std::function<Output(RunConfig&, const Options&)>;

int execute(const std::string& name, const Options& opt, std::ostream& out, std::ostream& err) {
  static const std::map<std::string, Command> commands = {
      {"spectrum", cmd_spectrum}, {"reconstruct", cmd_reconstruct}, {"thermo", cmd_thermo},
      {"quench", cmd_quench},     {"overlap", cmd_overlap},         {"sweep", cmd_sweep},
  };
  try {
    RunConfig cfg = resolve_config(load_json_file(opt.config_path), Overrides{opt.seed});

    std::ofstream file;
    if (!opt.out_path.empty()) {
      file.open(opt.out_path, std::ios::binary | std::ios::trunc);
      if (!file) throw InvalidArgument("cannot write '" + opt.out_path + "'");
    }
    std::ostream& sink = opt.out_path.empty() ? out : file;

    if (name == "sample") {
      const Format f = opt.format.value_or(Format::Csv);
      if (f == Format::Json) throw InvalidArgument("sample writes a table; use --format csv or table");
      const MeasurementRecord rec = generate_record(cfg);
      io::write_record(sink, rec, cfg.require_probe(), f == Format::Csv ? io::TableStyle::Csv : io::TableStyle::Whitespace,
                       json{{"config", cfg.resolved}});
    } else {
      Output o = commands.at(name)(cfg, opt);
      o.report["config"] = cfg.resolved;
      emit(o, opt.format.value_or(name == "sweep" ? Format::Csv : Format::Json), sink);
    }
    sink.flush();
    if (!sink) throw InvalidArgument("write failed");
    return kExitOk;
  } catch (const ContractViolation& e) {
    err << "qprobe " << name << ": contract violation: " << e.what() << '\n';
    return kExitContract;
  } catch (const NumericalError& e) {
    err << "qprobe " << name << ": numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const InvalidArgument& e) {
    err << "qprobe " << name << ": config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const json::exception& e) {
    err << "qprobe " << name << ": config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "qprobe " << name << ": error: " << e.what() << '\n';
    return kExitNumerical;
  }
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Qumode-probe spectroscopy and thermodynamics", "qprobe"};
  app.require_subcommand(1);

  Options opt;
  std::string format_name;
  const std::map<std::string, Format> formats = {{"json", Format::Json}, {"table", Format::Table}, {"csv", Format::Csv}};

  const std::vector<std::pair<std::string, std::string>> subcommands = {
      {"spectrum", "exact spectral lines of the system in its state"},
      {"sample", "simulated momentum readouts as a record table"},
      {"reconstruct", "spectral lines recovered from a record"},
      {"thermo", "temperature, degeneracies and thermodynamic curves"},
      {"quench", "average and irreversible work of a sudden quench"},
      {"overlap", "two-stage ground-state overlap"},
      {"sweep", "tables over a beta or lambda grid"},
  };
  for (const auto& [name, help] : subcommands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", opt.config_path, "JSON run configuration")->required();
    sub->add_option("--out", opt.out_path, "output file (default stdout)");
    sub->add_option("--seed", opt.seed, "sampling seed, overrides the config");
    sub->add_option("--format", format_name, "json, table or csv")
        ->check(CLI::IsMember({"json", "table", "csv"}));
    if (name == "reconstruct" || name == "thermo") sub->add_option("--record", opt.record_path, "measurement record");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }
  if (!format_name.empty()) opt.format = formats.at(format_name);
  for (const auto* sub : app.get_subcommands()) return execute(sub->get_name(), opt, out, err);
  return kExitConfig;
}

}  // namespace qprobe::cli
