#pragma once

// Command-line front end. run_cli() does all the work and returns the exit
// code so it can be driven in-process; tools/wkb_spectra.cpp is a thin main.

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "wkbspec/angular.hpp"
#include "wkbspec/core.hpp"
#include "wkbspec/oracle.hpp"
#include "wkbspec/quantizer.hpp"
#include "wkbspec/spectra.hpp"
#include "wkbspec/wavefunction.hpp"

namespace wkbspec::cli {

inline constexpr const char* kVersion = "1.0.0";

enum ExitCode : int { kOk = 0, kInvalid = 2, kNoBoundState = 3, kConvergence = 4 };

inline int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NoBoundState:
    case ErrorKind::NoClassicalRegion: return kNoBoundState;
    case ErrorKind::QuadratureFailure:
    case ErrorKind::ConvergenceFailure:
    case ErrorKind::DomainTooSmall:
    case ErrorKind::TurningPointProximity:
    case ErrorKind::Undersampled:
    case ErrorKind::DegenerateSample: return kConvergence;
    default: return kInvalid;
  }
}

struct RunConfig {
  std::string command;
  std::string potential;
  std::string params_text;
  std::map<std::string, double> params;
  std::string table_path;
  double hbar = 1.0;
  double mass = 1.0;
  int l = 0;
  std::optional<int> l_max;
  int m_z = 0;
  int n_r = 0;
  std::optional<int> n_r_max;
  std::string method;
  std::string format = "json";
  std::string out;
  std::optional<double> tol_quad;
  std::optional<double> tol_root;
  int points = 4096;
  std::string form = "full";
  int samples = 0;

  int l_last() const { return l_max.value_or(l); }
  int n_r_last() const { return n_r_max.value_or(n_r); }
};

/// "alpha=1,k=2" -> {{"alpha", 1}, {"k", 2}}.
inline std::map<std::string, double> parse_params(const std::string& text) {
  std::map<std::string, double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw InvalidArgument("malformed parameter '" + item + "', expected name=value");
    const std::string name = item.substr(0, eq), value = item.substr(eq + 1);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(value, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != value.size()) throw InvalidArgument("parameter '" + name + "' has non-numeric value '" + value + "'");
    out[name] = v;
  }
  return out;
}

/// Two-column r,V table; blank lines, '#' comments and a non-numeric header are skipped.
inline PotentialSpec read_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open potential table '" + path + "'");
  std::vector<double> r, v;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    double a = 0.0, b = 0.0;
    if (ls >> a >> b) {
      r.push_back(a);
      v.push_back(b);
    } else if (!r.empty()) {
      throw InvalidArgument("malformed line in potential table: '" + line + "'");
    }
  }
  return PotentialSpec::tabulated(std::move(r), std::move(v));
}

inline PotentialSpec build_potential(const RunConfig& cfg) {
  if (cfg.potential.empty()) throw InvalidArgument("--potential is required");
  const auto kind = parse_potential_kind(cfg.potential);
  if (kind == PotentialKind::Tabulated) {
    if (cfg.table_path.empty()) throw InvalidArgument("tabulated potential needs --table PATH");
    if (!cfg.params.empty()) throw InvalidArgument("tabulated potential takes no named parameters");
    return read_table(cfg.table_path);
  }
  return PotentialSpec::from_parameters(kind, cfg.params);
}

inline QuantizerOptions quantizer_options(const RunConfig& cfg) {
  QuantizerOptions opts;
  if (cfg.tol_quad) opts.quadrature.rel_tol = *cfg.tol_quad;
  if (cfg.tol_root) opts.root_tol = *cfg.tol_root;
  return opts;
}

/// Worker count from WKB_SPECTRA_THREADS (default: hardware concurrency).
inline unsigned thread_cap() {
  unsigned cap = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("WKB_SPECTRA_THREADS")) {
    try {
      const int v = std::stoi(env);
      if (v >= 1) cap = static_cast<unsigned>(v);
    } catch (const std::exception&) {
    }
  }
  return cap;
}

/// Runs tasks on up to thread_cap() workers; the first failure in task order is rethrown.
inline void run_parallel(const std::vector<std::function<void()>>& tasks) {
  std::vector<std::exception_ptr> errors(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      try {
        tasks[i]();
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const unsigned n = std::min<std::size_t>(thread_cap(), tasks.size());
  if (n <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < n; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

inline nlohmann::json config_echo(const RunConfig& cfg, const PotentialSpec& spec) {
  nlohmann::json j;
  j["command"] = cfg.command;
  j["potential"] = std::string(to_string(spec.kind()));
  j["params"] = spec.parameters();
  if (!cfg.table_path.empty()) j["table"] = cfg.table_path;
  j["hbar"] = cfg.hbar;
  j["mass"] = cfg.mass;
  j["l"] = cfg.l;
  j["l_max"] = cfg.l_last();
  j["m_z"] = cfg.m_z;
  j["n_r"] = cfg.n_r;
  j["n_r_max"] = cfg.n_r_last();
  if (!cfg.method.empty()) j["method"] = cfg.method;
  j["format"] = cfg.format;
  return j;
}

inline nlohmann::json provenance(const RunConfig& cfg) {
  const auto opts = quantizer_options(cfg);
  return {{"version", kVersion},
          {"tolerances",
           {{"quadrature_rel", opts.quadrature.rel_tol},
            {"root", opts.root_tol},
            {"max_residual", kMaxAcceptedResidual}}}};
}

inline nlohmann::json optional_json(const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(); }

inline std::string optional_csv(const std::optional<double>& v) {
  if (!v) return "";
  std::ostringstream os;
  os.precision(17);
  os << *v;
  return os.str();
}

struct SpectrumRow {
  int n_r = 0;
  int l = 0;
  std::string method;
  double energy = 0.0;
  std::optional<double> residual;
};

inline std::string default_method(const PotentialSpec& spec) { return spec.has_closed_form() ? "closed" : "quadrature"; }

// Morse at l = 0 uses the equation without a centrifugal term; l > 0 keeps it.
inline SpectrumVariant closed_variant(const PotentialSpec& spec, int l) {
  if (spec.kind() != PotentialKind::Morse) return SpectrumVariant::Standard;
  return l == 0 ? SpectrumVariant::MorseNoCentrifugal : SpectrumVariant::MorseWithM;
}

inline EnergyLevel quadrature_level(const PotentialSpec& spec, int n_r, int l, const UnitsContext& units,
                                    const QuantizerOptions& opts) {
  if (spec.kind() == PotentialKind::Morse && l == 0) {
    auto level = quantize_2tp(spec, 0.0, n_r, units, opts);
    level.qn = QuantumNumbers(n_r, 0);
    return level;
  }
  return quantize_2tp(spec, QuantumNumbers(n_r, l), units, opts);
}

inline std::vector<SpectrumRow> compute_spectrum(const RunConfig& cfg, const PotentialSpec& spec,
                                                 const UnitsContext& units) {
  const std::string method = cfg.method.empty() ? default_method(spec) : cfg.method;
  const auto opts = quantizer_options(cfg);
  const int l0 = cfg.l, l1 = cfg.l_last(), n0 = cfg.n_r, n1 = cfg.n_r_last();
  if (method == "multiwell" && !spec.is_confining())
    throw InvalidArgument("method multiwell requires an oscillator or linear-plus-oscillator potential");
  if (method == "closed" && !spec.has_closed_form())
    throw InvalidArgument("potential '" + cfg.potential + "' has no closed-form spectrum");

  std::vector<SpectrumRow> rows;
  if (method == "closed") {
    // cheap and sequential, so the first unbound level is reported in order
    for (int l = l0; l <= l1; ++l)
      for (int n = n0; n <= n1; ++n)
        rows.push_back({n, l, method, ClosedFormSpectrum(spec, closed_variant(spec, l), units).energy(n, l), 0.0});
    return rows;
  }

  std::vector<std::function<void()>> tasks;
  if (method == "oracle") {
    std::vector<std::vector<SpectrumRow>> per_l(l1 - l0 + 1);
    for (int l = l0; l <= l1; ++l)
      tasks.push_back([&, l] {
        const int count = n1 + 1;
        auto grid = suggest_grid(spec, l, units, count);
        auto res = diagonalize_radial(spec, l, CentrifugalVariant::Ll1, units, grid, count);
        for (int n = n0; n <= n1; ++n)
          per_l[l - l0].push_back({n, l, method, res.eigenvalues[n], res.refinement_estimate[n]});
      });
    run_parallel(tasks);
    for (auto& v : per_l) rows.insert(rows.end(), v.begin(), v.end());
    return rows;
  }

  rows.resize(static_cast<std::size_t>(l1 - l0 + 1) * (n1 - n0 + 1));
  for (int l = l0; l <= l1; ++l)
    for (int n = n0; n <= n1; ++n) {
      const std::size_t slot = static_cast<std::size_t>(l - l0) * (n1 - n0 + 1) + (n - n0);
      tasks.push_back([&, l, n, slot] {
        EnergyLevel level;
        if (method == "multiwell")
          level = quantize_multiwell(spec, angular_momentum_squared(l, units), 2 * n, 2, units,
                                     default_multiwell_domain(spec, units), opts);
        else
          level = quadrature_level(spec, n, l, units, opts);
        rows[slot] = {n, l, method, level.energy, level.residual};
      });
    }
  run_parallel(tasks);
  return rows;
}

inline void write_output(const RunConfig& cfg, std::ostream& out, const std::string& text) {
  if (cfg.out.empty()) {
    out << text;
    return;
  }
  std::ofstream f(cfg.out);
  if (!f) throw InvalidArgument("cannot open output file '" + cfg.out + "'");
  f << text;
}

inline std::string json_text(const nlohmann::json& j) { return j.dump(2) + "\n"; }

inline std::string run_spectrum(const RunConfig& cfg, const PotentialSpec& spec, const UnitsContext& units) {
  auto rows = compute_spectrum(cfg, spec, units);
  std::stable_sort(rows.begin(), rows.end(), [](const SpectrumRow& a, const SpectrumRow& b) {
    return std::tie(a.l, a.n_r, a.method) < std::tie(b.l, b.n_r, b.method);
  });
  if (cfg.format == "csv") {
    std::ostringstream os;
    os.precision(17);
    os << "n_r,l,method,energy,residual\n";
    for (const auto& r : rows) os << r.n_r << ',' << r.l << ',' << r.method << ',' << r.energy << ',' << optional_csv(r.residual) << '\n';
    return os.str();
  }
  nlohmann::json j{{"config_echo", config_echo(cfg, spec)}, {"rows", nlohmann::json::array()}, {"provenance", provenance(cfg)}};
  for (const auto& r : rows)
    j["rows"].push_back({{"n_r", r.n_r}, {"l", r.l}, {"method", r.method}, {"energy", r.energy}, {"residual", optional_json(r.residual)}});
  return json_text(j);
}

inline std::string run_angular(const RunConfig& cfg, const UnitsContext& units) {
  if (std::abs(cfg.m_z) > cfg.l)
    throw InvalidArgument("|m_z|=" + std::to_string(std::abs(cfg.m_z)) + " exceeds l=" + std::to_string(cfg.l));
  const auto ev = quantize_polar(cfg.l - std::abs(cfg.m_z), cfg.m_z, units);
  QuadratureOptions quad;
  if (cfg.tol_quad) quad.rel_tol = *cfg.tol_quad;
  const double numeric = polar_phase_integral(ev.M, ev.M_z, quad);
  const double exact = polar_phase_integral_exact(ev.M, ev.M_z);

  std::vector<std::array<double, 3>> samples;
  for (int i = 0; i < cfg.samples; ++i) {
    const double theta = std::numbers::pi * (i + 0.5) / cfg.samples;
    const auto y = angular_wavefunction(cfg.l, cfg.m_z, theta, 0.0);
    samples.push_back({theta, y.real(), y.imag()});
  }

  if (cfg.format == "csv") {
    std::ostringstream os;
    os.precision(17);
    os << "l,m_z,M,M_z,M2,polar_integral,polar_integral_exact\n";
    os << ev.l << ',' << ev.m_z << ',' << ev.M << ',' << ev.M_z << ',' << ev.M2() << ',' << numeric << ',' << exact << '\n';
    if (!samples.empty()) {
      os << "\ntheta,Y_re,Y_im\n";
      for (const auto& s : samples) os << s[0] << ',' << s[1] << ',' << s[2] << '\n';
    }
    return os.str();
  }
  nlohmann::json echo{{"command", cfg.command}, {"hbar", cfg.hbar}, {"mass", cfg.mass}, {"l", cfg.l}, {"m_z", cfg.m_z}};
  nlohmann::json j{{"config_echo", echo},
                   {"rows",
                    {{{"l", ev.l},
                      {"m_z", ev.m_z},
                      {"M", ev.M},
                      {"M_z", ev.M_z},
                      {"M2", ev.M2()},
                      {"polar_integral", numeric},
                      {"polar_integral_exact", exact}}}},
                   {"provenance", provenance(cfg)}};
  if (!samples.empty()) {
    j["samples"] = nlohmann::json::array();
    for (const auto& s : samples) j["samples"].push_back({{"theta", s[0]}, {"re", s[1]}, {"im", s[2]}});
  }
  return json_text(j);
}

inline std::string run_wavefunction(const RunConfig& cfg, const PotentialSpec& spec, const UnitsContext& units) {
  if (cfg.form != "full" && cfg.form != "standing") throw InvalidArgument("--form must be full or standing");
  const auto opts = quantizer_options(cfg);
  const EnergyLevel level = quadrature_level(spec, cfg.n_r, cfg.l, units, opts);
  const double M2 = spec.kind() == PotentialKind::Morse && cfg.l == 0 ? 0.0 : level.M2;
  ScanOptions scan;
  scan.points = opts.scan_points;
  const SearchDomain domain = default_domain(spec, M2, units);
  for (const auto& w : find_wells(spec, M2, units, domain, opts.scan_points)) scan.anchors.push_back(w.position);
  const auto structure = find_turning_structure(spec, M2, level.energy, units, domain, scan);

  WavefunctionSample sample;
  if (cfg.form == "full") {
    sample = sample_full_wkb(spec, level, units, structure, cfg.points, 0, opts.quadrature);
  } else {
    sample = sample_standing_wave(level.energy, level.qn, units, structure.intervals.front(), cfg.points);
    sample.method = level.method;
  }
  sample = normalize_on_interval(std::move(sample));
  const int nodes = count_nodes(sample);

  if (cfg.format == "csv") {
    std::ostringstream os;
    write_sample_csv(os, sample);
    return os.str();
  }
  nlohmann::json j{{"config_echo", config_echo(cfg, spec)},
                   {"n_r", level.qn.n_r()},
                   {"l", level.qn.l()},
                   {"method", to_string(level.method)},
                   {"form", to_string(sample.form)},
                   {"energy", level.energy},
                   {"residual", level.residual},
                   {"nodes", nodes},
                   {"interval", {sample.allowed_interval.left, sample.allowed_interval.right}},
                   {"r", sample.grid},
                   {"psi", sample.values},
                   {"provenance", provenance(cfg)}};
  return json_text(j);
}

inline std::string run_compare(const RunConfig& cfg, const PotentialSpec& spec, const UnitsContext& units) {
  ComparisonOptions opts;
  opts.quantizer = quantizer_options(cfg);
  std::vector<std::vector<ComparisonRow>> per_l(cfg.l_last() - cfg.l + 1);
  std::vector<std::function<void()>> tasks;
  for (int l = cfg.l; l <= cfg.l_last(); ++l)
    tasks.push_back([&, l] { per_l[l - cfg.l] = compare_methods(spec, l, cfg.n_r, cfg.n_r_last(), units, opts); });
  run_parallel(tasks);
  std::vector<ComparisonRow> rows;
  for (auto& v : per_l) rows.insert(rows.end(), v.begin(), v.end());
  if (std::all_of(rows.begin(), rows.end(), [](const ComparisonRow& r) { return r.all_failed(); })) {
    std::string first = rows.empty() || rows.front().errors.empty() ? "" : ": " + rows.front().errors.front().second;
    throw ConvergenceFailure("compare: every method failed for every row" + first);
  }

  using Getter = std::function<std::optional<double>(const ComparisonRow&)>;
  const std::vector<std::pair<std::string, Getter>> columns = {
      {"closed", [](const ComparisonRow& r) { return r.closed; }},
      {"closed_alt", [](const ComparisonRow& r) { return r.closed_alt; }},
      {"quadrature", [](const ComparisonRow& r) { return r.quadrature; }},
      {"oracle_ll1", [](const ComparisonRow& r) { return r.oracle_ll1; }},
      {"oracle_langer", [](const ComparisonRow& r) { return r.oracle_langer; }},
      {"delta_closed_alt", [](const ComparisonRow& r) { return r.delta_closed_alt(); }},
      {"delta_quadrature", [](const ComparisonRow& r) { return r.delta_quadrature(); }},
      {"delta_oracle_ll1", [](const ComparisonRow& r) { return r.delta_oracle_ll1(); }},
      {"delta_oracle_langer", [](const ComparisonRow& r) { return r.delta_oracle_langer(); }},
  };

  if (cfg.format == "csv") {
    std::ostringstream os;
    os << "n_r,l";
    for (const auto& c : columns) os << ',' << c.first;
    os << '\n';
    for (const auto& r : rows) {
      os << r.n_r << ',' << r.l;
      for (const auto& c : columns) os << ',' << optional_csv(c.second(r));
      os << '\n';
    }
    return os.str();
  }
  nlohmann::json j{{"config_echo", config_echo(cfg, spec)}, {"rows", nlohmann::json::array()}, {"provenance", provenance(cfg)}};
  for (const auto& r : rows) {
    nlohmann::json row{{"n_r", r.n_r}, {"l", r.l}};
    for (const auto& c : columns) row[c.first] = optional_json(c.second(r));
    nlohmann::json errors = nlohmann::json::object();
    for (const auto& [column, message] : r.errors) errors[column] = message;
    row["errors"] = errors;
    j["rows"].push_back(row);
  }
  return json_text(j);
}

inline void validate(const RunConfig& cfg) {
  if (cfg.l < 0 || cfg.n_r < 0) throw InvalidArgument("--l and --nr must be non-negative");
  if (cfg.l_last() < cfg.l) throw InvalidArgument("--l-max must not be below --l");
  if (cfg.n_r_last() < cfg.n_r) throw InvalidArgument("--nr-max must not be below --nr");
  if (cfg.tol_quad && !(*cfg.tol_quad > 0.0)) throw InvalidArgument("--tol-quad must be positive");
  if (cfg.tol_root && !(*cfg.tol_root > 0.0)) throw InvalidArgument("--tol-root must be positive");
  if (cfg.points < 2) throw InvalidArgument("--points must be at least 2");
  if (cfg.samples < 0) throw InvalidArgument("--samples must be non-negative");
}

/// Parses `args` (without the program name), runs the command and returns the exit code.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Quasiclassical bound-state spectra, angular quantities, wavefunctions and method comparisons",
               "wkb_spectra"};
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.set_config("--config", "", "key=value configuration file; command-line flags take precedence");

  RunConfig cfg;
  std::map<std::string, double> named;
  app.add_option("command", cfg.command, "spectrum | angular | wavefunction | compare")
      ->required()
      ->check(CLI::IsMember({"spectrum", "angular", "wavefunction", "compare"}));
  app.add_option("--potential", cfg.potential, "coulomb | oscillator | hulthen | morse | linear-oscillator | tabulated");
  app.add_option("--params", cfg.params_text, "comma-separated name=value list");
  for (const char* name : {"alpha", "omega", "v0", "r0", "morse_alpha", "k"})
    app.add_option(std::string("--") + name, named[name], std::string("potential parameter ") + name)->group("Parameters");
  app.add_option("--table", cfg.table_path, "r,V samples for the tabulated potential");
  app.add_option("--hbar", cfg.hbar, "reduced Planck constant");
  app.add_option("--mass", cfg.mass, "particle mass");
  app.add_option("--l", cfg.l, "orbital number (first of the range)");
  app.add_option("--l-max", cfg.l_max, "last orbital number");
  app.add_option("--mz", cfg.m_z, "magnetic number");
  app.add_option("--nr", cfg.n_r, "radial number (first of the range)");
  app.add_option("--nr-max", cfg.n_r_max, "last radial number");
  app.add_option("--method", cfg.method, "closed | quadrature | multiwell | oracle")
      ->check(CLI::IsMember({"closed", "quadrature", "multiwell", "oracle"}));
  app.add_option("--format", cfg.format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--out", cfg.out, "output path (default stdout)");
  app.add_option("--tol-quad", cfg.tol_quad, "relative quadrature tolerance");
  app.add_option("--tol-root", cfg.tol_root, "root tolerance in units of pi hbar");
  app.add_option("--points", cfg.points, "wavefunction sample count");
  app.add_option("--form", cfg.form, "wavefunction form: full | standing");
  app.add_option("--samples", cfg.samples, "angular function samples on (0, pi)");

  std::vector<std::string> argv(args.rbegin(), args.rend());
  try {
    app.parse(argv);
  } catch (const CLI::Success& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "wkb_spectra: " << e.what() << "\n";
    return kInvalid;
  }

  const std::string what = cfg.command;
  try {
    for (const auto& [name, value] : named)
      if (app.get_option("--" + name)->count() > 0) cfg.params[name] = value;
    for (const auto& [name, value] : parse_params(cfg.params_text)) cfg.params[name] = value;
    validate(cfg);
    const UnitsContext units(cfg.hbar, cfg.mass);
    std::string text;
    if (cfg.command == "angular") {
      text = run_angular(cfg, units);
    } else {
      const auto spec = build_potential(cfg);
      if (cfg.command == "spectrum") text = run_spectrum(cfg, spec, units);
      else if (cfg.command == "wavefunction") text = run_wavefunction(cfg, spec, units);
      else text = run_compare(cfg, spec, units);
    }
    write_output(cfg, out, text);
    return kOk;
  } catch (const Error& e) {
    err << "wkb_spectra: " << what << " failed (" << to_string(e.kind()) << "): " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "wkb_spectra: " << what << " failed: " << e.what() << "\n";
    return kConvergence;
  }
}

}  // namespace wkbspec::cli
