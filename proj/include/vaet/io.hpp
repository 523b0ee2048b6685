#pragma once

// Run configuration (strict JSON) and plot-ready output emitters.
//
// Numbers are written with 17 significant digits through std::to_chars, so
// the text never depends on the process locale. Lines end in LF. Every
// emitted artifact carries the resolved configuration: CSV files in a leading
// "# config: {...}" comment line, JSON files under a "config" key, SVG files
// in a <metadata> element.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "vaet/dynamics.hpp"
#include "vaet/perturb.hpp"
#include "vaet/spectra.hpp"
#include "vaet/vibronic.hpp"

namespace vaet {

using Json = nlohmann::ordered_json;

/// Bad or inconsistent configuration (CLI exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Filesystem failure (CLI exit code 4).
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string preset = "IonTrapLine1";
  SystemConfig system;
  double t_final = 400.0;
  double sample_step = 0.5;
  int workers = 0;
  std::uint64_t seed = 0;  // reserved; the physics is deterministic
  std::string output_dir = "out";
  PropagationOptions propagation;

  struct Scan {
    AxisRange nu_a;
    AxisRange nu_b;
    std::string units = "rad_per_ms";  // or "d31": ranges in multiples of Delta31
    FeatureOptions features;
    bool svg = true;
  } scan;

  struct Trace {
    Json batch = Json::array();  // each entry is merged onto the config; optional "label"
  } trace;

  struct Vibronic {
    double nu_a_start = 0.1;
    double nu_a_stop = 1.2;
    double nu_a_step = 0.005;
    std::string units = "rad_per_ms";
    int n_fock = 3;
    CrossingOptions crossings;
  } vibronic;

  struct Perturb {
    Regime regime = Regime::StrongJ;
    double probe_time = -1.0;
    double pathway_cutoff = 0.0;
    bool exact = true;
  } perturb;

  struct Convergence {
    std::vector<int> n_values{10, 15};
  } convergence;

  double delta31() const { return gap31(system.trimer, system.topology); }
  std::vector<double> times() const { return time_grid(t_final, sample_step); }
  PropagationOptions propagation_options() const;
  ScanConfig scan_config() const;
  VibronicConfig vibronic_config() const;
};

/// Strict parse: unknown keys, wrong types and invalid values raise ConfigError
/// naming the offending field.
RunConfig parse_run_config(const Json& doc);

/// Reads and parses a config file; syntax errors report line and column.
Json read_json_file(const std::string& path);
RunConfig load_run_config(const std::string& path);

/// The fully resolved configuration, round-trippable through parse_run_config.
Json to_json(const RunConfig& config);

/// Applies "dotted.key=value" to a config document. The value is parsed as
/// JSON when possible, else taken as a string.
void apply_override(Json& doc, const std::string& assignment);

/// 17 significant digits, shortest exponent form, locale-independent.
std::string format_number(double x);

class CsvWriter {
 public:
  CsvWriter(const Json& config, std::vector<std::string> columns);
  void row(const std::vector<double>& values);
  const std::string& str() const { return text_; }

 private:
  std::size_t ncols_;
  std::string text_;
};

void write_text_file(const std::string& path, const std::string& content);
void ensure_directory(const std::string& path);

Json meta_json(const Json& config, const std::string& command);

std::string spectrum_csv(const SpectrumGrid& grid, const Json& config);
Json features_json(const FeatureSet& features, const Json& config);
std::string spectrum_svg(const SpectrumGrid& grid, const Json& config, int max_order = 6);

std::string trace_csv(const TransferTrace& trace, const std::vector<double>& trace_norm, const Json& config);

std::string levels_csv(const VibronicSweep& sweep, const Json& config);
Json crossings_json(const std::vector<AvoidedCrossing>& crossings, const VibronicSweep& sweep, const Json& config);

/// Assembled perturbative trace next to the exact one (empty `exact` skips the column).
std::string perturb_trace_csv(const PerturbResult& result, const std::vector<double>& exact, const Json& config);
std::string perturb_terms_csv(const PerturbResult& result, const Json& config);
std::string perturb_pathways_csv(const PerturbResult& result, const Json& config);

std::string convergence_traces_csv(const ConvergenceResult& result, const Json& config);
std::string convergence_table_csv(const ConvergenceResult& result, const Json& config);

}  // namespace vaet
