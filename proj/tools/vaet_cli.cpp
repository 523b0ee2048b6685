// vaet: command-line front end for the VAET simulator.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "vaet/dynamics.hpp"
#include "vaet/io.hpp"
#include "vaet/linalg.hpp"
#include "vaet/perturb.hpp"
#include "vaet/spectra.hpp"
#include "vaet/vibronic.hpp"

namespace {

enum Exit { kOk = 0, kConfig = 2, kNumeric = 3, kIo = 4 };

struct Common {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out;
  int workers = -1;
  bool print_config = false;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("-c,--config", c.config_path, "JSON run configuration");
  sub->add_option("-s,--set", c.overrides, "override a config key, e.g. --set mode_a.kappa=0.03")->take_all();
  sub->add_option("-o,--out", c.out, "output directory (overrides output_dir)");
  sub->add_option("-j,--workers", c.workers, "worker threads (overrides workers; 0 = VAET_NUM_THREADS or all cores)")
      ->check(CLI::NonNegativeNumber);
  sub->add_flag("--print-config", c.print_config, "print the resolved configuration and exit");
}

vaet::Json load_doc(const Common& c) {
  vaet::Json doc = c.config_path.empty() ? vaet::Json::object() : vaet::read_json_file(c.config_path);
  for (const std::string& o : c.overrides) vaet::apply_override(doc, o);
  if (!c.out.empty()) doc["output_dir"] = c.out;
  if (c.workers >= 0) doc["workers"] = c.workers;
  return doc;
}

std::string path_in(const vaet::RunConfig& rc, const std::string& name) { return rc.output_dir + "/" + name; }

void warn_backend() {
  if (!vaet::linalg::lapack_symmetric_ok() || !vaet::linalg::lapack_general_ok()) {
    std::cerr << "warning: LAPACK self-check failed (" << vaet::linalg::backend_summary()
              << "); falling back to Eigen. Setting OPENBLAS_CORETYPE=Haswell usually fixes this.\n";
  }
}

void write_json(const std::string& path, const vaet::Json& j) { vaet::write_text_file(path, j.dump(2) + "\n"); }

void write_meta(const vaet::RunConfig& rc, const vaet::Json& resolved, const std::string& command, double seconds) {
  vaet::Json meta = vaet::meta_json(resolved, command);
  meta["wall_seconds"] = seconds;
  write_json(path_in(rc, "meta.json"), meta);
}

int cmd_spectrum2d(const vaet::RunConfig& rc, const vaet::Json& resolved) {
  const vaet::ScanConfig sc = rc.scan_config();
  int last = -1;
  const vaet::SpectrumGrid grid = vaet::scan_2d(sc, [&](std::size_t done, std::size_t total) {
    const int pct = static_cast<int>(100 * done / total);
    if (pct / 5 != last / 5) {
      last = pct;
      std::cerr << "\rscan " << pct << "% (" << done << "/" << total << ")" << std::flush;
    }
  });
  std::cerr << "\n";
  const vaet::FeatureSet fs = vaet::classify_features(grid, rc.scan.features);
  vaet::ensure_directory(rc.output_dir);
  vaet::write_text_file(path_in(rc, "spectrum.csv"), vaet::spectrum_csv(grid, resolved));
  vaet::Json fj = vaet::features_json(fs, resolved);
  fj["delta31"] = grid.delta31;
  write_json(path_in(rc, "features.json"), fj);
  if (rc.scan.svg) vaet::write_text_file(path_in(rc, "spectrum.svg"), vaet::spectrum_svg(grid, resolved));
  std::cout << "grid " << grid.nu_a.size() << "x" << grid.nu_b.size() << ", delta31 = " << grid.delta31 << "\n";
  for (const vaet::Feature& f : fs.features)
    if (f.detected) std::cout << "  detected " << vaet::to_string(f.kind) << "(" << f.order << ") prominence " << f.prominence << "\n";
  return kOk;
}

int cmd_trace(const vaet::RunConfig& rc, const vaet::Json& resolved, const vaet::Json& doc) {
  vaet::ensure_directory(rc.output_dir);
  const vaet::PropagationOptions po = rc.propagation_options();
  vaet::Json summary = vaet::Json::array();
  auto run_one = [&](const vaet::RunConfig& c, const vaet::Json& cfg, const std::string& name, const std::string& label) {
    const vaet::TraceResult r = vaet::run_trace(c.system, c.times(), po);
    vaet::write_text_file(path_in(rc, name), vaet::trace_csv(r.trace, r.trace_norm, cfg));
    summary.push_back({{"label", label}, {"file", name}, {"max_p3", r.trace.max_p3}, {"int_p3", r.trace.int_p3},
                       {"final_trace_norm", r.trace_norm.empty() ? 1.0 : r.trace_norm.back()}});
    std::cout << label << ": max_p3 = " << r.trace.max_p3 << ", int_p3 = " << r.trace.int_p3 << "\n";
  };
  if (rc.trace.batch.empty()) {
    run_one(rc, resolved, "trace.csv", "base");
  } else {
    int k = 0;
    for (const vaet::Json& item : rc.trace.batch) {
      vaet::Json patch = item;
      std::string label = "set" + std::to_string(k);
      if (patch.contains("label")) {
        if (!patch["label"].is_string()) throw vaet::ConfigError("trace.batch[" + std::to_string(k) + "].label: expected a string");
        label = patch["label"].get<std::string>();
        patch.erase("label");
      }
      vaet::Json merged = doc;
      merged.erase("trace");
      merged.merge_patch(patch);
      vaet::RunConfig c;
      try {
        c = vaet::parse_run_config(merged);
      } catch (const vaet::ConfigError& e) {
        throw vaet::ConfigError("trace.batch[" + std::to_string(k) + "]: " + e.what());
      }
      run_one(c, vaet::to_json(c), "trace_" + std::to_string(k) + ".csv", label);
      ++k;
    }
  }
  write_json(path_in(rc, "traces.json"), {{"traces", summary}, {"config", resolved}});
  return kOk;
}

int cmd_vibronic(const vaet::RunConfig& rc, const vaet::Json& resolved) {
  const vaet::VibronicSweep sweep = vaet::sweep_spectrum(rc.vibronic_config(), rc.workers);
  const auto crossings = vaet::find_avoided_crossings(sweep, rc.vibronic.crossings);
  vaet::ensure_directory(rc.output_dir);
  vaet::write_text_file(path_in(rc, "levels.csv"), vaet::levels_csv(sweep, resolved));
  write_json(path_in(rc, "crossings.json"), vaet::crossings_json(crossings, sweep, resolved));
  int avoided = 0;
  for (const auto& c : crossings) avoided += c.true_crossing ? 0 : 1;
  std::cout << sweep.nu_a_values.size() << " sweep points, " << crossings.size() << " gap minima, " << avoided
            << " avoided crossings\n";
  return kOk;
}

int cmd_perturb(const vaet::RunConfig& rc, const vaet::Json& resolved) {
  vaet::SymmetricEigenSystem sys;
  try {
    sys = vaet::symmetric_eigensystem(rc.system.trimer);
  } catch (const std::invalid_argument& e) {
    throw vaet::ConfigError(std::string("perturb: ") + e.what());
  }
  const vaet::CouplingCoefficients coeffs = vaet::coupling_coefficients_numeric(sys, rc.system.topology);
  const vaet::PerturbModes modes = vaet::PerturbModes::from_specs(rc.system.mode_a, rc.system.mode_b);
  vaet::PerturbOptions opt;
  opt.probe_time = rc.perturb.probe_time;
  opt.pathway_cutoff = rc.perturb.pathway_cutoff;
  const std::vector<double> times = rc.times();
  const vaet::PerturbResult res = vaet::p3_perturbative(sys, coeffs, modes, times, rc.perturb.regime, opt);
  std::vector<double> exact;
  if (rc.perturb.exact) exact = vaet::run_trace(rc.system, times, rc.propagation_options()).trace.p3;

  vaet::ensure_directory(rc.output_dir);
  vaet::write_text_file(path_in(rc, "perturb_trace.csv"), vaet::perturb_trace_csv(res, exact, resolved));
  vaet::write_text_file(path_in(rc, "perturb_terms.csv"), vaet::perturb_terms_csv(res, resolved));
  vaet::write_text_file(path_in(rc, "perturb_pathways.csv"), vaet::perturb_pathways_csv(res, resolved));

  vaet::Json summary;
  summary["regime"] = vaet::to_string(res.regime);
  summary["probe_time"] = res.probe_time;
  summary["max_p3_perturbative"] = res.trace.max_p3;
  summary["warnings"] = res.warnings;
  if (!exact.empty()) {
    // First local maximum of the exact trace.
    std::size_t k = 0;
    for (std::size_t i = 1; i + 1 < exact.size(); ++i)
      if (exact[i] > exact[i - 1] && exact[i] >= exact[i + 1]) {
        k = i;
        break;
      }
    summary["first_max_time"] = times[k];
    summary["first_max_exact"] = exact[k];
    summary["first_max_perturbative"] = res.trace.p3[k];
    summary["first_max_relative_error"] = exact[k] > 0 ? std::abs(res.trace.p3[k] - exact[k]) / exact[k] : 0.0;
  }
  summary["config"] = resolved;
  write_json(path_in(rc, "perturb.json"), summary);
  for (const std::string& w : res.warnings) std::cerr << "warning: " << w << "\n";
  std::cout << "max_p3 (perturbative) = " << res.trace.max_p3 << "\n";
  return kOk;
}

int cmd_convergence(const vaet::RunConfig& rc, const vaet::Json& resolved) {
  const vaet::ConvergenceResult r =
      vaet::convergence_sweep(rc.system, rc.convergence.n_values, rc.times(), rc.propagation_options());
  vaet::ensure_directory(rc.output_dir);
  vaet::write_text_file(path_in(rc, "convergence_traces.csv"), vaet::convergence_traces_csv(r, resolved));
  vaet::write_text_file(path_in(rc, "convergence_table.csv"), vaet::convergence_table_csv(r, resolved));
  for (std::size_t i = 0; i < r.n_values.size(); ++i)
    std::cout << "N = " << r.n_values[i] << ": max deviation vs N = " << r.n_values.back() << " is "
              << r.deviation_vs_max[i] << "\n";
  return kOk;
}

int cmd_presets() {
  vaet::Json all = vaet::Json::array();
  for (auto name : {vaet::PresetName::IonTrapLine1, vaet::PresetName::ScaleUpLine2, vaet::PresetName::FmoLine3}) {
    const vaet::Preset p = vaet::preset(name);
    auto mode = [](const vaet::VibrationalModeSpec& m) {
      return vaet::Json{{"nu", m.nu}, {"kappa", m.kappa}, {"kbt", m.kbt}, {"n_fock", m.n_fock}};
    };
    all.push_back({{"name", vaet::to_string(name)},
                   {"unit", vaet::to_string(p.unit)},
                   {"note", p.note},
                   {"trimer",
                    {{"omega_tilde", p.trimer.omega_tilde}, {"j12", p.trimer.j12}, {"j23", p.trimer.j23}, {"j13", p.trimer.j13}}},
                   {"mode_a", mode(p.mode_a)},
                   {"mode_b", mode(p.mode_b)}});
  }
  std::cout << all.dump(2) << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Vibrationally assisted energy transfer in a donor-bridge-acceptor trimer"};
  app.require_subcommand(1);
  Common common;
  auto* spectrum = app.add_subcommand("spectrum2d", "Max/Int of P3 over a (nu_a, nu_b) grid with feature classification");
  auto* trace = app.add_subcommand("trace", "P3(t) for one configuration or a batch");
  auto* vibronic = app.add_subcommand("vibronic", "vibronic levels over nu_a and avoided crossings");
  auto* perturb = app.add_subcommand("perturb", "fourth-order perturbative P3 with pathway tables");
  auto* convergence = app.add_subcommand("convergence", "Fock-truncation convergence of P3");
  auto* presets = app.add_subcommand("presets", "print the built-in parameter presets");
  for (auto* s : {spectrum, trace, vibronic, perturb, convergence}) add_common(s, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (presets->parsed()) return cmd_presets();
    const vaet::Json doc = load_doc(common);
    const vaet::RunConfig rc = vaet::parse_run_config(doc);
    const vaet::Json resolved = vaet::to_json(rc);
    if (common.print_config) {
      std::cout << resolved.dump(2) << "\n";
      return kOk;
    }
    warn_backend();
    const auto t0 = std::chrono::steady_clock::now();
    int code = kOk;
    std::string name;
    if (spectrum->parsed()) {
      name = "spectrum2d";
      code = cmd_spectrum2d(rc, resolved);
    } else if (trace->parsed()) {
      name = "trace";
      code = cmd_trace(rc, resolved, doc);
    } else if (vibronic->parsed()) {
      name = "vibronic";
      code = cmd_vibronic(rc, resolved);
    } else if (perturb->parsed()) {
      name = "perturb";
      code = cmd_perturb(rc, resolved);
    } else if (convergence->parsed()) {
      name = "convergence";
      code = cmd_convergence(rc, resolved);
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_meta(rc, resolved, name, secs);
    return code;
  } catch (const vaet::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const vaet::SizeError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const vaet::IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kNumeric;
  }
}
